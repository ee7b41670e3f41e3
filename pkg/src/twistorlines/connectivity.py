"""Stabilizers, transversality, and chains of twistor lines joining two periods.

GL(V_R) acts on complex structures by conjugation.  The tangent space of the
stabilizer of ``lam`` is its commutant.  Vectorization is row-major:
vec(X lam) = (Id kron lam^t) vec(X) and vec(lam X) = (lam kron Id) vec(X).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import linalg as la
from .errors import (
    DifferentComponents,
    NotConverged,
    OutOfReach,
    StepTooLarge,
    TwistorError,
    WrongEpsilon,
)
from .lines import (
    LinePoint,
    TwistorLine,
    component_of,
    contains,
    sample_points,
)
from .reps import (
    AlgebraRep,
    _invariant_extension,
    conjugate_rep,
    require_complex_structure,
    standard_rep,
    verify_rep,
)

NEWTON_TOL = 1e-10
NEWTON_MAX_ITER = 50
MAX_UPDATE = 1.0


# ---------------------------------------------------------------------------
# stabilizers and transversality (exact)
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class StabilizerTangent:
    lam: np.ndarray
    basis: list

    @property
    def dim(self) -> int:
        return len(self.basis)


def commutation_operator(lam):
    """The matrix of X -> X lam - lam X on row-major vec(X)."""
    lam = np.asarray(lam)
    ident = la.eye(lam.shape[0], la.is_exact(lam))
    return np.kron(ident, lam.T) - np.kron(lam, ident)


def _commutant(matrices, tol):
    ops = np.concatenate([commutation_operator(x) for x in matrices], axis=0)
    m = np.asarray(matrices[0]).shape[0]
    return [v.reshape(m, m) for v in la.nullspace(ops, tol)]


def stabilizer_tangent(lam, tol: float = la.TOL) -> StabilizerTangent:
    """Basis of {X : X lam = lam X}."""
    lam = np.asarray(lam)
    require_complex_structure(lam, tol)
    return StabilizerTangent(lam, _commutant([lam], tol))


def algebra_centralizer_tangent(rep: AlgebraRep, tol: float = la.TOL) -> list:
    """Basis of the matrices commuting with both generators."""
    return _commutant([rep.I, rep.B], tol)


def _sum_rank(bases, tol):
    return la.span_rank([x for b in bases for x in b], tol)


def generator_transversality(rep: AlgebraRep, tol: float = la.TOL) -> bool:
    """The commutants of I, B, K span 12n^2 dimensions modulo the centralizer."""
    if rep.epsilon == 0:
        raise WrongEpsilon("transversality of generators is stated for eps = +-1")
    return generator_transversality_rank(rep, tol) == 12 * rep.n**2


def generator_transversality_rank(rep: AlgebraRep, tol: float = la.TOL) -> int:
    bases = [_commutant([x], tol) for x in rep.generators()]
    central = algebra_centralizer_tangent(rep, tol)
    return _sum_rank(bases, tol) - len(central)


def triple_transversality_rank(p1, p2, p3, n: int, tol: float = la.TOL) -> int:
    bases = [stabilizer_tangent(p.matrix, tol).basis for p in (p1, p2, p3)]
    return _sum_rank(bases, tol) - 4 * n * n


def triple_transversality(
    line: TwistorLine, p1: LinePoint, p2: LinePoint, p3: LinePoint, tol: float = la.TOL
) -> bool:
    """The three stabilizers meet transversally modulo the centralizer."""
    if line.epsilon == 0:
        raise WrongEpsilon("triple transversality is stated for eps = +-1")
    return triple_transversality_rank(p1, p2, p3, line.n, tol) == 12 * line.n**2


def coordinate_determinant(p1: LinePoint, p2: LinePoint, p3: LinePoint):
    m = np.array([list(p.coords) for p in (p1, p2, p3)], dtype=object)
    a, b, c = m
    return (
        a[0] * (b[1] * c[2] - b[2] * c[1])
        - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0])
    )


# ---------------------------------------------------------------------------
# local solve (float)
# ---------------------------------------------------------------------------


def _float_commutant(lam):
    op = commutation_operator(np.asarray(lam, dtype=float))
    m = lam.shape[0]
    _, s, vh = np.linalg.svd(op)
    r = int(np.sum(s > 1e-9 * s[0]))
    return [row.reshape(m, m) for row in vh[r:]]


@dataclass(frozen=True)
class LocalSolution:
    g1: np.ndarray
    g2: np.ndarray
    iterations: int
    residual: float


def _phi(g1, g2, i3):
    g = g1 @ g2
    return g @ i3 @ np.linalg.inv(g)


def local_connect(
    i1, i2, i3, target, tol: float = NEWTON_TOL, max_iter: int = NEWTON_MAX_ITER
) -> LocalSolution:
    """g1 in exp(commutant of I1), g2 in exp(commutant of I2) with Phi(g1, g2) = target.

    Phi(g1, g2) = g1 g2 I3 g2^-1 g1^-1.  Gauss-Newton on right-multiplicative
    updates g1 <- g1 exp(X), g2 <- g2 exp(Y); the linearization is
    g1 [X, g2 I3 g2^-1] g1^-1 + g1 g2 [Y, I3] g2^-1 g1^-1.  Steps are the
    minimum-norm least squares solutions, halved while the residual grows.
    """
    i1, i2, i3, target = (np.asarray(x, dtype=float) for x in (i1, i2, i3, target))
    m = i3.shape[0]
    xs, ys = _float_commutant(i1), _float_commutant(i2)
    g1, g2 = np.eye(m), np.eye(m)
    res = np.linalg.norm(_phi(g1, g2, i3) - target)
    it = 0
    while res >= tol:
        if it >= max_iter:
            raise NotConverged(f"no convergence after {max_iter} iterations", res)
        it += 1
        g1i, g2i = np.linalg.inv(g1), np.linalg.inv(g2)
        mid = g2 @ i3 @ g2i
        g = g1 @ g2
        gi = g2i @ g1i
        cols = [la.vec(g1 @ (x @ mid - mid @ x) @ g1i) for x in xs]
        cols += [la.vec(g @ (y @ i3 - i3 @ y) @ gi) for y in ys]
        jac = np.stack(cols, axis=1)
        delta, *_ = np.linalg.lstsq(jac, -la.vec(_phi(g1, g2, i3) - target), rcond=None)
        # Trust region: keep each exponential update of moderate size.
        t = min(1.0, MAX_UPDATE / max(float(np.linalg.norm(delta)), 1e-300))
        while True:
            dx = sum(c * x for c, x in zip(t * delta[: len(xs)], xs))
            dy = sum(c * y for c, y in zip(t * delta[len(xs):], ys))
            n1, n2 = g1 @ scipy.linalg.expm(dx), g2 @ scipy.linalg.expm(dy)
            try:
                new = float(np.linalg.norm(_phi(n1, n2, i3) - target))
            except np.linalg.LinAlgError:
                new = np.inf
            if new < res:
                break
            t /= 2
            if t < 1e-6:
                raise OutOfReach(f"Newton step cannot reduce the residual {res:.3e}; subdivide")
        g1, g2, res = n1, n2, new
    return LocalSolution(g1, g2, it, float(res))


# ---------------------------------------------------------------------------
# paths
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ChainSegment:
    line: TwistorLine
    start: LinePoint
    end: LinePoint
    component: str | None


@dataclass(frozen=True, eq=False)
class TwistorPath:
    segments: list
    junction_residuals: list = field(default_factory=list)
    iterations: list = field(default_factory=list)
    source: np.ndarray | None = None
    target: np.ndarray | None = None


def complex_frame(lam, rng=None, tol: float = 1e-9):
    """h with h^-1 lam h equal to the standard I: columns v_1..v_2n, lam v_1..lam v_2n.

    With ``rng`` the v's are drawn at random, otherwise from the standard basis.
    """
    lam = np.asarray(lam, dtype=float)
    m = lam.shape[0]
    span = la.SpanBuilder(m, False, tol)
    if rng is None:
        cands = list(np.eye(m))
    else:
        cands = list(rng.standard_normal((4 * m, m)))
    vs = _invariant_extension(lam, span, cands)
    return np.stack(vs + [lam @ v for v in vs], axis=1)


def conjugator(a, b, tol: float = 1e-9):
    """g with g a g^-1 = b; raises if det g < 0 (different components)."""
    ha, hb = complex_frame(a, tol=tol), complex_frame(b, tol=tol)
    g = hb @ np.linalg.inv(ha)
    if np.linalg.det(g) < 0:
        raise DifferentComponents("the complex structures lie in different components")
    return g


def _log_orthogonal(q, tol: float = 1e-8):
    """A real logarithm of an orthogonal matrix with det > 0.

    The real Schur form of q is block diagonal with rotation blocks and +-1
    entries; the -1 entries come in pairs and are joined into rotations by pi.
    """
    t, z = scipy.linalg.schur(q, output="real")
    m = q.shape[0]
    log_t = np.zeros((m, m))
    minus = []
    i = 0
    while i < m:
        if i + 1 < m and abs(t[i + 1, i]) > tol:
            theta = np.arctan2(t[i + 1, i], t[i, i])
            log_t[i + 1, i], log_t[i, i + 1] = theta, -theta
            i += 2
            continue
        if t[i, i] < 0:
            minus.append(i)
        i += 1
    if len(minus) % 2:
        raise DifferentComponents("orthogonal factor has negative determinant")
    for a, b in zip(minus[::2], minus[1::2]):
        log_t[b, a], log_t[a, b] = np.pi, -np.pi
    return z @ log_t @ z.T


def _log_positive(s):
    w, v = np.linalg.eigh((s + s.T) / 2)
    return (v * np.log(w)) @ v.T


def interpolation(g):
    """t -> g(t) in GL+ from Id to g via the polar factors: exp(t log Q) exp(t log S)."""
    q, s = scipy.linalg.polar(g)
    lq, ls = _log_orthogonal(q), _log_positive(s)
    return lambda t: scipy.linalg.expm(t * lq) @ scipy.linalg.expm(t * ls)


def _line_through_point(lam, epsilon: int, n: int, rng) -> TwistorLine:
    """A random type-eps line through ``lam`` with ``lam`` = (1, 0, 0)."""
    h = complex_frame(lam, rng)
    std = standard_rep(epsilon, n, exact_domain=False)
    return TwistorLine(conjugate_rep(h, std))


def _candidate_points(line, rng, count=2):
    comp = None if line.epsilon == -1 else "+"
    pts = sample_points(line, count + 1, comp, rng=rng)
    return [p for p in pts if abs(p.coords[0]) > 1e-3 and not np.allclose(p.coords, (1, 0, 0))]


def _choose_pair(line, rng, candidates: int = 16):
    """I1, I2 with nonzero I-coefficient maximizing |det| with (1, 0, 0)."""
    best, best_det = None, -1.0
    while best is None:
        for _ in range(candidates):
            pts = _candidate_points(line, rng)
            if len(pts) < 2:
                continue
            p1, p2 = pts[0], pts[1]
            d = abs(p1.coords[1] * p2.coords[2] - p1.coords[2] * p2.coords[1])
            if d > best_det:
                best, best_det = (p1, p2), d
    return best


def _point_on(line, coords, matrix):
    return LinePoint(tuple(float(c) for c in coords), matrix)


def _chain_step(current, target, epsilon, n, rng):
    line = _line_through_point(current, epsilon, n, rng)
    p1, p2 = _choose_pair(line, rng)
    sol = local_connect(p1.matrix, p2.matrix, current, target)
    g1, g2 = sol.g1, sol.g2
    g1i = np.linalg.inv(g1)
    g12 = g1 @ g2
    g12i = np.linalg.inv(g12)
    comp = None if epsilon == -1 else "+"
    start = _point_on(line, (1, 0, 0), current)
    seg1 = ChainSegment(line, start, p1, comp)
    line2 = TwistorLine(conjugate_rep(g1, line.rep))
    mid = g1 @ p2.matrix @ g1i
    seg2 = ChainSegment(line2, _point_on(line2, p1.coords, p1.matrix),
                        _point_on(line2, p2.coords, mid), comp)
    line3 = TwistorLine(conjugate_rep(g12, line.rep))
    end = g12 @ current @ g12i
    seg3 = ChainSegment(line3, _point_on(line3, p2.coords, mid),
                        _point_on(line3, (1, 0, 0), end), comp)
    residual = float(np.linalg.norm(end - target))
    return [seg1, seg2, seg3], residual, sol.iterations


def connect(
    a, b, epsilon: int, step: float = 1.0, rng=None, min_step: float = 1e-3
) -> TwistorPath:
    """A chain of type-eps lines from ``a`` to ``b`` (float domain).

    The conjugator g with g a g^-1 = b is interpolated inside GL+; each step
    from the current point to the next interpolated point is covered by three
    lines S, g1 S, g1 g2 S from a local Newton solve.  A failing step is halved.
    """
    if epsilon not in (-1, 1):
        raise WrongEpsilon("connectivity is constructed for eps = +-1")
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    require_complex_structure(a, 1e-8)
    require_complex_structure(b, 1e-8)
    if rng is None:
        rng = np.random.default_rng(0)
    n = a.shape[0] // 4
    if np.linalg.norm(a - b) < NEWTON_TOL:
        return TwistorPath([], [], [], a, b)
    g = conjugator(a, b)
    path_g = interpolation(g)

    def point_at(t):
        if t >= 1.0:
            return b
        gt = path_g(t)
        return gt @ a @ np.linalg.inv(gt)

    segments, residuals, iterations = [], [], []
    current, t, h = a, 0.0, step
    while t < 1.0:
        t_next = min(1.0, t + h)
        target = point_at(t_next)
        try:
            segs, res, its = _chain_step(current, target, epsilon, n, rng)
        except (NotConverged, OutOfReach):
            h /= 2
            if h < min_step:
                raise StepTooLarge(f"step fell below {min_step} at t = {t:.4f}")
            continue
        segments.extend(segs)
        residuals.append(res)
        iterations.append(its)
        current, t = target, t_next
    # Junctions inside a step are exact by construction; each residual is the
    # gap between one step's end and the next step's start.
    return TwistorPath(segments, residuals, iterations, a, b)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PathReport:
    segments: int
    rep_ok: list
    membership_ok: list
    component_ok: list
    junction_ok: list
    endpoints_ok: bool
    max_junction: float

    @property
    def ok(self) -> bool:
        return (
            all(self.rep_ok)
            and all(self.membership_ok)
            and all(self.component_ok)
            and all(self.junction_ok)
            and self.endpoints_ok
        )

    def to_dict(self):
        return {
            "segments": self.segments,
            "rep_ok": all(self.rep_ok),
            "membership_ok": all(self.membership_ok),
            "component_ok": all(self.component_ok),
            "junction_ok": all(self.junction_ok),
            "endpoints_ok": self.endpoints_ok,
            "max_junction": self.max_junction,
            "verdict": self.ok,
        }


def _relative_tol(mat, tol):
    return tol * max(1.0, float(np.max(np.abs(mat))))


def validate_path(path: TwistorPath, tol: float = 1e-8) -> PathReport:
    """Check every segment's line, endpoint membership, components and junctions."""
    rep_ok, mem_ok, comp_ok, junc_ok = [], [], [], []
    max_j = 0.0
    for i, seg in enumerate(path.segments):
        rep = seg.line.rep
        rtol = _relative_tol(np.abs(rep.I).max() * np.abs(rep.B).max() + 1, tol)
        rep_ok.append(verify_rep(rep.I, rep.B, rep.epsilon, rep.b_square, rtol).ok)
        coords = []
        for p in (seg.start, seg.end):
            try:
                c = contains(seg.line, p.matrix, _relative_tol(p.matrix, tol))
            except TwistorError:
                c = None
            coords.append(c)
        mem_ok.append(all(c is not None for c in coords))
        if seg.line.epsilon != -1 and all(c is not None for c in coords):
            comps = {component_of(seg.line, c) for c in coords}
            comp_ok.append(len(comps) == 1 and (seg.component is None or seg.component in comps))
        else:
            comp_ok.append(seg.line.epsilon == -1)
        if i:
            d = float(np.linalg.norm(path.segments[i - 1].end.matrix - seg.start.matrix))
            max_j = max(max_j, d)
            junc_ok.append(d < tol)
    endpoints = True
    if path.segments and path.source is not None:
        d0 = float(np.linalg.norm(path.segments[0].start.matrix - path.source))
        d1 = float(np.linalg.norm(path.segments[-1].end.matrix - path.target))
        max_j = max(max_j, d0, d1)
        endpoints = d0 < tol and d1 < tol
    return PathReport(len(path.segments), rep_ok, mem_ok, comp_ok, junc_ok, endpoints, max_j)
