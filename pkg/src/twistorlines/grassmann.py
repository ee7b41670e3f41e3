"""The embedding into Gr(2n, V_C), the real locus, and tangent data at infinity.

A complex structure ``lam`` maps to the subspace spanned by the columns of
``Id - i*lam``.  Points of the real locus are subspaces meeting R^{4n}.
Tangent vectors at a point ``p`` are homomorphisms ``p -> V_C / p``; they are
stored as a representative map on a fixed basis of ``p`` and compared modulo
maps into ``p``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from .errors import (
    BaseNotInLR,
    DomainMismatch,
    InvalidRep,
    OffCircle,
    WrongEpsilon,
    ZeroParameter,
)
from .lines import TwistorLine, sample_points
from .reps import _invariant_extension, require_complex_structure


def _c(a):
    """Real matrix lifted to the complex type of its domain."""
    a = np.asarray(a)
    if la.is_exact(a):
        return la.complexify(a, la.zeros(a.shape))
    return a.astype(complex)


def _cols(vectors):
    return np.stack(list(vectors), axis=1)


# ---------------------------------------------------------------------------
# points
# ---------------------------------------------------------------------------


def embed(lam, tol: float = la.TOL) -> la.SubspaceC:
    """The subspace (Id - i lam) V_R."""
    lam = np.asarray(lam)
    require_complex_structure(lam, tol)
    m = lam.shape[0]
    return la.SubspaceC.from_span(la.complexify(la.eye(m, la.is_exact(lam)), -lam), tol)


def in_LR(u: la.SubspaceC) -> tuple[bool, int]:
    d = la.real_points_dimension(u)
    return d > 0, d


def _require_normalized(line: TwistorLine, eps: int):
    if line.epsilon != eps:
        raise WrongEpsilon(f"expected a line of type eps={eps}")
    if eps != 0 and line.c != eps:
        raise InvalidRep("this construction needs a normalized generator (B^2 = eps Id)")


def _circle_operator(line: TwistorLine, c, s, tol):
    ex = line.exact
    c, s = (la._to_fraction(v) if ex else float(v) for v in (c, s))
    q = c * c + s * s
    if (ex and q != 1) or (not ex and abs(q - 1) > tol):
        raise OffCircle(f"({c}, {s}) is not on the unit circle")
    return c * line.rep.B + s * line.rep.K


def infinity_circle_point(line: TwistorLine, c, s, tol: float = la.TOL) -> la.SubspaceC:
    """W + iW for W = (I + cR + sIR) V_R, a limit point of a hyperboloid line."""
    _require_normalized(line, 1)
    w = line.rep.I + _circle_operator(line, c, s, tol)
    return la.SubspaceC.from_span(_c(w), tol)


def _kernel_image(line, tol):
    N = line.rep.B
    kernel = la.nullspace(N, tol)
    image = [N[:, j] for j in la.column_basis(N, tol)]
    return kernel, image


def _nilpotent_data(line: TwistorLine, which: str, tol):
    """(I', N', image basis, W-complement vectors) for the component ``which``."""
    sign = 1 if which == "+" else -1
    I = sign * line.rep.I
    N = sign * line.rep.B
    kernel, image = _kernel_image(line, tol)
    span = la.SpanBuilder(line.rep.dim, line.exact, tol)
    for v in image:
        span.add(v)
    ws = _invariant_extension(I, span, kernel)
    return I, N, image, ws


def _plus_minus_basis(line, which, tol):
    I, _, image, ws = _nilpotent_data(line, which, tol)
    m = line.rep.dim
    ident = la.eye(m, line.exact)
    lift = la.complexify(ident, -I)
    cols = [_c(_cols(image))]
    if ws:
        cols.append(lift @ _c(_cols(ws)))
    return np.concatenate(cols, axis=1)


def infinity_points(line: TwistorLine, tol: float = la.TOL):
    """The two limit points (Im N + i Im N) + (Id -+ iI) Ker N of a planes line."""
    _require_normalized(line, 0)
    return tuple(
        la.SubspaceC(_plus_minus_basis(line, w, tol), tol) for w in ("+", "-")
    )


def infinity_points_closed_form(line: TwistorLine, tol: float = la.TOL):
    """p+- spanned directly by N V_R, i N V_R and (Id -+ iI) Ker N (all of it)."""
    _require_normalized(line, 0)
    kernel, _ = _kernel_image(line, tol)
    out = []
    for sign in (1, -1):
        lift = la.complexify(la.eye(line.rep.dim, line.exact), -sign * line.rep.I)
        m = np.concatenate(
            [_c(line.rep.B), la.times_i(_c(line.rep.B)), lift @ _c(_cols(kernel))], axis=1
        )
        out.append(la.SubspaceC.from_span(m, tol))
    return tuple(out)


# ---------------------------------------------------------------------------
# holomorphicity of interior points
# ---------------------------------------------------------------------------


def tangent_plane_basis(line: TwistorLine, coords):
    """Two coordinate vectors spanning the tangent plane of the quadric at ``coords``.

    The gradient of x^2 - c(y^2 + z^2) is proportional to (x, -c y, -c z).
    """
    x, y, z = coords
    c = line.c
    normal = [x, -c * y, -c * z]
    basis = la.nullspace(np.array([normal], dtype=object if line.exact else float))
    return [tuple(v) for v in basis]


def tangent_invariance_check(line: TwistorLine, p, tol: float = la.TOL) -> bool:
    """Left multiplication by ``p`` maps the tangent plane at ``p`` into itself.

    Tangent vectors are formed as matrices u I + v B + w K, multiplied by the
    matrix of ``p``, and decomposed back onto (I, B, K).
    """
    from .lines import coordinates

    tangent = tangent_plane_basis(line, p.coords)
    plane = [line.matrix(*t) for t in tangent]
    for t in plane:
        prod = p.matrix @ t
        coords = coordinates(line, prod, tol)
        if coords is None:
            return False
        if not la.span_contains(plane, [line.matrix(*coords)], tol):
            return False
    images = [p.matrix @ t for t in plane]
    return la.span_rank(images, tol) == 2


# ---------------------------------------------------------------------------
# limits (float domain)
# ---------------------------------------------------------------------------


def limit_convergence(line: TwistorLine, ray: dict, t_grid, tol: float = la.TOL):
    """Largest principal angle between embed(c(t)) and the limit point.

    ``ray`` for a hyperboloid line: {"sheet": "+"|"-", "angle": theta}, giving
    c(t) = +-(t I + sqrt(t^2 - 1)(cos theta B + sin theta K)).  For a planes
    line: {"sheet": "+"|"-", "alpha": a, "beta": b}, giving
    c(y) = +-(I + y (a N + b IN)).  The ray {"fixed": (x, y, z)} is the
    constant curve at one point, compared with its own embedding.
    """
    if line.exact:
        raise DomainMismatch("limit_convergence needs a float-domain line")
    rep = line.rep
    if "fixed" in ray:
        lam = line.matrix(*ray["fixed"])
        target = embed(lam, tol)
        return [(float(t), max(la.principal_angles(embed(lam, tol), target))) for t in t_grid]
    sign = 1 if ray.get("sheet", "+") == "+" else -1
    if line.epsilon == 1:
        _require_normalized(line, 1)
        th = float(ray.get("angle", 0.0))
        r1 = np.cos(th) * rep.B + np.sin(th) * rep.K
        target = infinity_circle_point(line, np.cos(th), np.sin(th), tol)

        def curve(t):
            return sign * (t * rep.I + np.sqrt(t * t - 1) * r1)
    elif line.epsilon == 0:
        a, b = float(ray.get("alpha", 1.0)), float(ray.get("beta", 0.0))
        p_plus, p_minus = infinity_points(line, tol)
        target = p_plus if sign == 1 else p_minus

        def curve(t):
            return sign * (rep.I + t * (a * rep.B + b * rep.K))
    else:
        raise WrongEpsilon("the sphere line has no points at infinity")
    out = []
    for t in t_grid:
        angles = la.principal_angles(embed(curve(float(t)), 1e-7), target)
        out.append((float(t), max(angles)))
    return out


# ---------------------------------------------------------------------------
# tangent homomorphisms at infinity
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TangentHom:
    """A representative map p -> V_C, given on the columns of ``domain``."""

    base: la.SubspaceC
    domain: np.ndarray
    map: np.ndarray
    meta: dict = field(default_factory=dict)

    def _check(self, other):
        if self.domain is not other.domain and not la.allclose(self.domain, other.domain):
            raise ValueError("tangent maps are given on different bases of p")

    def __add__(self, other: TangentHom) -> TangentHom:
        self._check(other)
        return TangentHom(self.base, self.domain, self.map + other.map)

    def __sub__(self, other: TangentHom) -> TangentHom:
        self._check(other)
        return TangentHom(self.base, self.domain, self.map - other.map)

    def __rmul__(self, a) -> TangentHom:
        return TangentHom(self.base, self.domain, a * self.map, dict(self.meta))

    def reduced(self, tol: float = la.TOL):
        """The class in Hom(p, V_C/p), as coordinates along a fixed complement of p."""
        frame, d = _quotient_frame(self.base, tol)
        coords = la.solve(frame, self.map, tol)
        return coords[d:]

    def equal_mod_base(self, other: TangentHom, tol: float = la.TOL) -> bool:
        self._check(other)
        return self.base.contains(self.map - other.map)


def _quotient_frame(base: la.SubspaceC, tol):
    m = base.ambient_dim
    ident = _c(la.eye(m, base.exact))
    frame = np.concatenate([base.basis, ident], axis=1)
    cols = la.column_basis(frame, tol)
    return frame[:, cols], base.dim


def real_rank(tangents, tol: float = la.TOL) -> int:
    """Dimension of the real span of the classes of ``tangents`` in Hom(p, V_C/p)."""
    rows = []
    for t in tangents:
        r = la.vec(t.reduced(tol))
        rows.append(np.concatenate([la.real_part(r), la.imag_part(r)]))
    return la.rank(np.stack(rows), tol)


def _complement(span_vectors, m, exact_domain, tol, invariant_under=None, variant=0):
    """Basis of a complement of span(span_vectors) in R^m.

    ``variant=1`` shears the greedy complement by adding kernel vectors, which
    yields a different complement of the same span.
    """
    span = la.SpanBuilder(m, exact_domain, tol)
    for v in span_vectors:
        span.add(v)
    cands = list(la.eye(m, exact_domain))
    if invariant_under is None:
        us = [v for v in cands if span.add(v)]
        pairs = us
    else:
        first = _invariant_extension(invariant_under, span, cands)
        us = first + [invariant_under @ u for u in first]
        pairs = first
    if variant and span_vectors:
        ks = list(span_vectors)
        shifted = [u + ks[i % len(ks)] for i, u in enumerate(pairs)]
        if invariant_under is None:
            us = shifted
        else:
            us = shifted + [invariant_under @ u for u in shifted]
    return us


def _image_basis(op, tol):
    return _cols([op[:, j] for j in la.column_basis(op, tol)])


def _lift_through(op, u_basis, targets, tol):
    """Vectors u in span(u_basis) with op u = target, one per target column."""
    coeffs = la.solve(op @ u_basis, targets, tol)
    if coeffs is None:
        raise InvalidRep("complement does not map onto the image")
    return u_basis @ coeffs


def circle_frame(line: TwistorLine, circle=(1, 0), variant: int = 0, tol: float = la.TOL):
    """(p, v, u, IR1) with v a basis of (I+R1)V_R and (I+R1) u = v, u in a complement."""
    _require_normalized(line, 1)
    r1 = _circle_operator(line, circle[0], circle[1], tol)
    rep = line.rep
    a = rep.I + r1
    v = _image_basis(a, tol)
    kernel = la.nullspace(a, tol)
    U = _cols(_complement(kernel, rep.dim, rep.exact, tol, variant=variant))
    u = _lift_through(a, U, v, tol)
    p = la.SubspaceC(_c(v), tol)
    return p, v, u, rep.I @ r1


def tangent_at_infinity_R(
    line: TwistorLine, b, circle=(1, 0), variant: int = 0, tol: float = la.TOL
) -> TangentHom:
    """(I+R1)u -> (b IR1 + i)u on p = (I+R1)V_R + i(I+R1)V_R, R1 = cR + sIR."""
    p, v, u, ir = circle_frame(line, circle, variant, tol)
    b = la.like(b, v)
    image = _c(b * (ir @ u)) + la.times_i(_c(u))
    return TangentHom(p, _c(v), image, {"b": b, "variant": variant})


def circle_direction(
    line: TwistorLine, circle=(1, 0), variant: int = 0, tol: float = la.TOL
) -> TangentHom:
    """(I+R1)u -> IR1 u: the tangent line to the circle at infinity."""
    p, v, u, ir = circle_frame(line, circle, variant, tol)
    return TangentHom(p, _c(v), _c(ir @ u), {"variant": variant})


def _as_pair(z):
    if isinstance(z, la.CRational):
        return z.re, z.im
    if isinstance(z, (tuple, list)):
        return tuple(z)
    z = complex(z)
    return z.real, z.imag


def tangent_at_infinity_N(
    line: TwistorLine, which: str, z, variant: int = 0, tol: float = la.TOL
) -> TangentHom:
    """phi_z at p+ (or p-) of a planes line, z = alpha + i beta != 0.

    For v in Im N with v = N(alpha - beta I)u, u in an I-invariant complement
    of Ker N: v -> (i + I)u, and (Id - iI)w -> 0 on Ker N.  At p- the roles of
    (I, N, beta) are taken by (-I, -N, -beta), the curve -c(y).
    """
    _require_normalized(line, 0)
    alpha, beta = _as_pair(z)
    if alpha == 0 and beta == 0:
        raise ZeroParameter("z must be nonzero")
    ex = line.exact
    alpha, beta = (la._to_fraction(t) if ex else float(t) for t in (alpha, beta))
    sign = 1 if which == "+" else -1
    I, N, image, ws = _nilpotent_data(line, which, tol)
    beta = sign * beta
    m = line.rep.dim
    ident = la.eye(m, ex)
    kernel = la.nullspace(line.rep.B, tol)
    U = _cols(_complement(kernel, m, ex, tol, invariant_under=I, variant=variant))
    v = _cols(image)
    op = N @ (alpha * ident - beta * I)
    u = _lift_through(op, U, v, tol)
    domain = _plus_minus_basis(line, which, tol)
    mapped = la.times_i(_c(u)) + _c(I @ u)
    if ws:
        zeros = _c(la.zeros((m, len(ws)), ex))
        mapped = np.concatenate([mapped, zeros], axis=1)
    base = la.SubspaceC(domain, tol)
    return TangentHom(base, domain, mapped, {"which": which, "variant": variant})


# ---------------------------------------------------------------------------
# tangent cone of the real locus
# ---------------------------------------------------------------------------


def in_tangent_cone_LR(phi: TangentHom, tol: float = la.TOL) -> bool:
    """True iff phi(p ∩ V_R) contains a nonzero real vector."""
    real = phi.base.real_points_basis()
    if real.shape[1] == 0:
        raise BaseNotInLR("base point does not meet V_R")
    coeffs = la.solve(phi.domain, _c(real), tol)
    images = phi.map @ coeffs
    re, im = la.real_part(images), la.imag_part(images)
    kernel = la.nullspace(im, tol)
    if not kernel:
        return False
    return la.rank(re @ _cols(kernel), tol) > 0


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------


DIRECTION_GRID = [(1, 1), (0, 1), (-1, 1), (2, 1), (1, -1), (0, -1), (-1, -1), (1, 2)]
PLANE_GRID = [(1, 0), (0, 1), (1, 1), (1, -1), (-1, 2), (2, 1), (-3, 1), (1, 3)]


@dataclass(frozen=True)
class InfinityReport:
    epsilon: int
    plane_dim: int
    boundary_in_cone: bool | None
    interior_hits: int
    directions: int
    complement_agreement: bool
    singular_points: bool | None
    verdict: bool

    def to_dict(self):
        return {
            "plane_dim": self.plane_dim,
            "boundary_in_cone": self.boundary_in_cone,
            "interior_hits": self.interior_hits,
            "directions": self.directions,
            "complement_agreement": self.complement_agreement,
            "singular_points": self.singular_points,
            "verdict": self.verdict,
        }


def infinity_tangent_report(line: TwistorLine, tol: float = la.TOL) -> InfinityReport:
    """Tangent plane at infinity against the tangent cone of the real locus.

    Hyperboloid: at p = (I+R)V_R + i(I+R)V_R the plane is spanned by the
    classes of the circle direction l and phi_0; l is in the cone, directions
    a l + t phi_0 with t != 0 are not.  Planes: at p+ and p- the plane spanned
    by phi_1, phi_i meets the cone only at 0.  Every verdict is recomputed with
    a second complement U.
    """
    if line.epsilon == 1:
        verdicts = []
        for variant in (0, 1):
            l = circle_direction(line, variant=variant, tol=tol)
            phi0 = tangent_at_infinity_R(line, 0, variant=variant, tol=tol)
            dim = real_rank([l, phi0], tol)
            boundary = in_tangent_cone_LR(l, tol)
            hits = sum(
                in_tangent_cone_LR(la.like(a, l.map) * l + la.like(t, l.map) * phi0, tol) for a, t in DIRECTION_GRID
            )
            verdicts.append((dim, boundary, hits))
        dim, boundary, hits = verdicts[0]
        agree = verdicts[0] == verdicts[1]
        ok = dim == 2 and boundary and hits == 0 and agree
        return InfinityReport(1, dim, boundary, hits, len(DIRECTION_GRID), agree, None, ok)
    if line.epsilon == 0:
        verdicts = []
        for variant in (0, 1):
            dims, hits = [], 0
            for which in ("+", "-"):
                p1 = tangent_at_infinity_N(line, which, 1, variant, tol)
                pi = tangent_at_infinity_N(line, which, (0, 1), variant, tol)
                dims.append(real_rank([p1, pi], tol))
                hits += sum(
                    in_tangent_cone_LR(la.like(a, p1.map) * p1 + la.like(b, p1.map) * pi, tol) for a, b in PLANE_GRID
                )
            verdicts.append((min(dims), max(dims), hits))
        lo, hi, hits = verdicts[0]
        agree = verdicts[0] == verdicts[1]
        ok = lo == hi == 2 and hits == 0 and agree
        return InfinityReport(0, lo, None, hits, 2 * len(PLANE_GRID), agree, ok, ok)
    raise WrongEpsilon("the sphere line has no points at infinity")


def check_embedding_off_LR(line: TwistorLine, count: int, rng=None) -> int:
    """Number of sampled points whose embedding meets V_R (expected 0)."""
    return sum(in_LR(embed(p.matrix))[0] for p in sample_points(line, count, rng=rng))
