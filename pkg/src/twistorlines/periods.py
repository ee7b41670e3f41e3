"""Normalized period matrices, bilinear relations, Hdg spaces and Kähler checks.

Vectors of V_R are written in the standard basis (the lattice basis).  A complex
structure ``lam`` acts on row vectors from the right, and the rows of
``Id - i*lam`` span the left i-eigenspace ``{w : w lam = i w}``; a normalized
period matrix is the reduced echelon form ``(1 | Z)`` of that row space with
respect to a greedily chosen set of 2n C-independent lattice columns.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from .errors import BadK, DegenerateImaginaryPart, TwistorError
from .lines import TwistorLine, component_of, sample_points
from .reps import require_complex_structure


@dataclass(frozen=True, eq=False)
class PeriodMatrix:
    Z: np.ndarray
    selection: tuple
    order: tuple
    coordinates: np.ndarray  # 2n x 4n map from real vectors to complex coordinates

    @property
    def normalized(self):
        """The 2n x 4n matrix (1 | Z) in the reordered lattice basis."""
        m = self.Z.shape[0]
        return np.concatenate([la.complexify(la.eye(m, la.is_exact(self.Z)),
                                             la.zeros((m, m), la.is_exact(self.Z))), self.Z], axis=1)


@dataclass(frozen=True, eq=False)
class DualPeriod:
    E: np.ndarray
    G: np.ndarray

    @property
    def Pi(self):
        return np.concatenate([self.E, self.G], axis=0)


@dataclass(frozen=True, eq=False)
class HdgSpace:
    line: TwistorLine
    basis: list
    mode: str

    @property
    def dim(self) -> int:
        return len(self.basis)


@dataclass(frozen=True, eq=False)
class KahlerCertificate:
    status: str  # "cone" or "none"
    reason: str
    witness: np.ndarray | None = None
    component: str | None = None
    checks: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# periods
# ---------------------------------------------------------------------------


def _complex(a):
    """Lift a real matrix to the complex type of its domain."""
    if la.is_exact(a):
        return la.complexify(a, la.zeros(np.asarray(a).shape))
    return np.asarray(a, dtype=complex)


def normalized_period(lam, tol: float = la.TOL) -> PeriodMatrix:
    """Normalized period matrix of the complex structure ``lam``."""
    lam = np.asarray(lam)
    require_complex_structure(lam, tol)
    m = lam.shape[0]
    ex = la.is_exact(lam)
    rows = la.complexify(la.eye(m, ex), -lam)  # Id - i*lam
    row_sel = la.column_basis(rows.T, tol)
    r = rows[row_sel]
    sel = la.column_basis(r, tol)
    p = la.inverse(r[:, sel], tol) @ r
    rest = [j for j in range(m) if j not in sel]
    return PeriodMatrix(p[:, rest], tuple(sel), tuple(sel + rest), p)


def reorder(q, order):
    """A bilinear form matrix in the reordered lattice basis."""
    idx = list(order)
    return np.asarray(q)[np.ix_(idx, idx)]


def dual_period(Z, tol: float = la.TOL) -> DualPeriod:
    """G = (Z - conj Z)^-1 and E = Id - Z G."""
    Z = np.asarray(Z)
    try:
        G = la.inverse(Z - la.conj(Z), tol)
    except np.linalg.LinAlgError as exc:
        raise DegenerateImaginaryPart("Z - conj(Z) is singular") from exc
    m = Z.shape[0]
    E = _complex(la.eye(m, la.is_exact(Z))) - Z @ G
    return DualPeriod(E, G)


def hermitian_form(Q, lam, tol: float = la.TOL):
    """H = -i Pi^t Q conj(Pi), with Q taken in the reordered lattice basis."""
    per = normalized_period(lam, tol)
    dual = dual_period(per.Z, tol)
    Pi = dual.Pi
    Qp = reorder(Q, per.order)
    if la.is_exact(Qp) != la.is_exact(Pi):
        Qp = la.exact(Qp) if la.is_exact(Pi) else la.to_float(Qp)
    return -la.times_i(Pi.T @ Qp @ la.conj(Pi))


def restricted_form(Q, lam, subspace_basis, tol: float = la.TOL):
    """The hermitian form restricted to a lam-invariant real subspace.

    ``subspace_basis`` has real columns; their complex coordinates C are
    computed from the period matrix and the result is C^t H conj(C).
    """
    per = normalized_period(lam, tol)
    H = hermitian_form(Q, lam, tol)
    C = per.coordinates @ _complex(np.asarray(subspace_basis))
    return C.T @ H @ la.conj(C)


def is_kahler_at(Q, lam, tol: float = la.TOL) -> bool:
    return la.hermitian_definiteness(hermitian_form(Q, lam, tol), tol) == "positive"


# ---------------------------------------------------------------------------
# Hdg spaces
# ---------------------------------------------------------------------------


def _skew_basis(m: int, exact_domain: bool):
    out = []
    for i in range(m):
        for j in range(i + 1, m):
            e = la.zeros((m, m), exact_domain)
            e[i, j] = la.like(1, e)
            e[j, i] = la.like(-1, e)
            out.append(e)
    return out


def _solve_forms(operators, m, exact_domain, tol):
    """Skew forms Q annihilated by every vectorized operator in ``operators``.

    Each operator is an (m^2 x m^2) matrix acting on row-major vec(Q); the
    unknowns are the entries Q[i, j], i < j.
    """
    pairs = [(i, j) for i in range(m) for j in range(i + 1, m)]
    system = np.concatenate(
        [op[:, [i * m + j for i, j in pairs]] - op[:, [j * m + i for i, j in pairs]]
         for op in operators],
        axis=0,
    )
    out = []
    for v in la.nullspace(system, tol):
        q = la.zeros((m, m), exact_domain)
        for coeff, (i, j) in zip(v, pairs):
            q[i, j] = coeff
            q[j, i] = -coeff
        out.append(q)
    return out


def _kron(a, b):
    return np.kron(np.asarray(a), np.asarray(b))


def _closed_form_constraints(line):
    # X^t Q + Q X = 0 for X = I, B; in the standard basis these are the
    # commutation relations QI = IQ, QJ = JQ, RQ = -QR, QN + N^t Q = 0.
    # Row-major vec(A Q C) = (A kron C^t) vec(Q).
    ident = la.eye(line.rep.dim, line.exact)
    return [_kron(x.T, ident) + _kron(ident, x.T) for x in (line.rep.I, line.rep.B)]


def _sampled_constraints(points):
    m = points[0].matrix.shape[0]
    ident = la.eye(m * m, la.is_exact(points[0].matrix))
    return [_kron(p.matrix.T, p.matrix.T) - ident for p in points]


def _sampling_points(line, count):
    component = None if line.epsilon == -1 else "+"
    return sample_points(line, count, component)


def hdg_space(line: TwistorLine, mode: str = "closed-form", tol: float = la.TOL) -> HdgSpace:
    """Skew forms staying of type (1,1) along ``line``.

    ``closed-form`` solves X^t Q + Q X = 0 for the two generators.
    ``generic-sampling`` solves lam^t Q lam = Q at three sampled points, then
    checks a fourth point and agreement with the closed-form space.
    """
    m = line.rep.dim
    if mode == "closed-form":
        basis = _solve_forms(_closed_form_constraints(line), m, line.exact, tol)
        return HdgSpace(line, basis, mode)
    if mode != "generic-sampling":
        raise ValueError(f"unknown mode {mode!r}")
    pts = _sampling_points(line, 4)
    basis = _solve_forms(_sampled_constraints(pts[:3]), m, line.exact, tol)
    confirm = pts[3].matrix
    for q in basis:
        if not la.allclose(confirm.T @ q @ confirm, q, tol):
            raise TwistorError("sampled Hdg space fails at the confirmation point")
    closed = _solve_forms(_closed_form_constraints(line), m, line.exact, tol)
    if not la.span_equal(basis, closed, tol):
        raise TwistorError("sampled and closed-form Hdg spaces differ")
    return HdgSpace(line, basis, mode)


def hdg_dim_formula(epsilon: int, n: int, k: int | None = None) -> int:
    """2n^2 + n for eps = +-1; k(k+1) + (2n-k)^2 for eps = 0."""
    if epsilon in (-1, 1):
        return 2 * n * n + n
    if epsilon != 0:
        raise ValueError("epsilon must be -1, 0 or 1")
    if k is None or not 1 <= k <= n:
        raise BadK(f"k must satisfy 1 <= k <= n = {n}, got {k}")
    return k * (k + 1) + (2 * n - k) ** 2


# ---------------------------------------------------------------------------
# Kähler certificates
# ---------------------------------------------------------------------------


def kahler_witness(line: TwistorLine, component: str = "+"):
    """A form in Hdg positive along one sheet of a hyperboloid line.

    M is an averaged metric with I^t M I = M and B^t M B = c M; then Q = I^t M
    satisfies the closed-form constraints and is positive at I (x > 0).  The
    lower sheet uses -Q.  In the standard basis Q = [[0, Id], [-Id, 0]].
    """
    if line.epsilon != 1:
        raise TwistorError("Kähler witnesses exist only on hyperboloid lines")
    I, B, c = line.rep.I, line.rep.B, line.c
    ident = la.eye(line.rep.dim, line.exact)
    m1 = ident + I.T @ I
    m2 = m1 + (B.T @ m1 @ B) * (1 / c if not line.exact else 1 / la._to_fraction(c))
    q = I.T @ (m2 / 4)
    return q if component == "+" else -q


def kahler_certificate(
    line: TwistorLine, component: str | None = None, samples: int = 5, tol: float = la.TOL
) -> KahlerCertificate:
    """Witness of a Kähler cone (hyperboloid) or a pointwise obstruction.

    Sphere: H(-lam) = -conj H(lam) for every Hdg basis form at every sample,
    so positivity at lam forces negativity at the antipode -lam, which lies on
    the same connected line.  Planes: every Hdg form restricts to zero on the
    lam-invariant subspace Im N.  Hyperboloid: the witness is checked positive
    at samples of its sheet and not positive on the other sheet.
    """
    eps = line.epsilon
    if eps == 1:
        comp = component or "+"
        other = "-" if comp == "+" else "+"
        q = kahler_witness(line, comp)
        hdg = hdg_space(line, tol=tol)
        in_hdg = la.span_contains(hdg.basis, [q], tol)
        on = [is_kahler_at(q, p.matrix, tol) for p in sample_points(line, samples, comp)]
        off = [is_kahler_at(q, p.matrix, tol) for p in sample_points(line, samples, other)]
        ok = in_hdg and all(on) and not any(off)
        return KahlerCertificate(
            "cone" if ok else "none",
            "positive on the chosen sheet" if ok else "witness check failed",
            q,
            comp,
            {"in_hdg": in_hdg, "positive_on_sheet": sum(on), "positive_off_sheet": sum(off),
             "samples": samples},
        )
    hdg = hdg_space(line, tol=tol)
    if eps == -1:
        pts = sample_points(line, samples)
        flips = 0
        total = 0
        for p in pts:
            for q in hdg.basis:
                h_plus = hermitian_form(q, p.matrix, tol)
                h_minus = hermitian_form(q, -p.matrix, tol)
                total += 1
                if la.allclose(h_minus, -la.conj(h_plus), tol):
                    flips += 1
        kahler_hits = sum(is_kahler_at(q, p.matrix, tol) for p in pts for q in hdg.basis)
        antipode_hits = sum(
            is_kahler_at(q, p.matrix, tol) and is_kahler_at(q, -p.matrix, tol)
            for p in pts for q in hdg.basis
        )
        ok = flips == total and antipode_hits == 0
        return KahlerCertificate(
            "none",
            "antipodal" if ok else "antipodal check failed",
            checks={"forms": hdg.dim, "samples": len(pts), "sign_flips": flips, "pairs": total,
                    "kahler_at_sample": kahler_hits, "kahler_at_both": antipode_hits},
        )
    image = np.stack(
        [line.rep.B[:, j] for j in la.column_basis(line.rep.B, tol)], axis=1
    )
    pts = sample_points(line, samples)
    vanish = 0
    total = 0
    for p in pts:
        for q in hdg.basis:
            total += 1
            if la.is_zero(restricted_form(q, p.matrix, image, tol), tol):
                vanish += 1
    ok = vanish == total
    return KahlerCertificate(
        "none",
        "isotropic" if ok else "isotropy check failed",
        checks={"forms": hdg.dim, "samples": len(pts), "vanishing": vanish, "pairs": total,
                "components": sorted({component_of(line, p) for p in pts})},
    )
