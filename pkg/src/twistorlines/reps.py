"""Faithful representations of H(eps) = <i, j | i^2 = -1, j^2 = eps, ij + ji = 0>.

A representation is stored by the images ``I`` and ``B`` of the generators as
4n x 4n real matrices.  ``B`` may be unnormalized: ``B @ B == b_square * Id``
with ``sign(b_square) == eps``.  This is how pairs of complex structures are
turned into representations without taking square roots.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import linalg as la
from .errors import (
    BadK,
    DomainMismatch,
    InvalidRep,
    NotComplexStructure,
    NotCospherical,
    OddRank,
    Proportional,
    Singular,
)


@dataclass(frozen=True, eq=False)
class AlgebraRep:
    epsilon: int
    n: int
    I: np.ndarray
    B: np.ndarray
    k: int | None = None
    b_square: object = None

    def __post_init__(self):
        if self.epsilon not in (-1, 0, 1):
            raise InvalidRep(f"epsilon must be -1, 0 or 1, got {self.epsilon}")
        if self.b_square is None:
            object.__setattr__(self, "b_square", la.like(self.epsilon, self.I))

    @property
    def K(self):
        return self.I @ self.B

    @property
    def exact(self) -> bool:
        return la.is_exact(self.I)

    @property
    def dim(self) -> int:
        return 4 * self.n

    @property
    def normalized(self) -> bool:
        return self.b_square == self.epsilon

    def generators(self):
        """The spanning triple (I, B, K) of the imaginary part."""
        return self.I, self.B, self.K

    def to_float(self) -> AlgebraRep:
        return AlgebraRep(
            self.epsilon, self.n, la.to_float(self.I), la.to_float(self.B), self.k,
            float(self.b_square),
        )


@dataclass(frozen=True)
class RepReport:
    i_squared: bool
    b_squared: bool
    anticommute: bool
    faithful: bool
    messages: tuple = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return self.i_squared and self.b_squared and self.anticommute and self.faithful


@dataclass(frozen=True, eq=False)
class PairClassification:
    alpha: object
    epsilon: int
    I: np.ndarray
    B_raw: np.ndarray
    c: object

    def to_rep(self) -> AlgebraRep:
        n = self.I.shape[0] // 4
        k = None
        if self.epsilon == 0:
            k = la.rank(self.B_raw) // 2
        return AlgebraRep(self.epsilon, n, self.I, self.B_raw, k, self.c)

    def normalized_generator(self):
        """B_raw / sqrt|c|; float domain only."""
        if la.is_exact(self.B_raw):
            raise DomainMismatch("normalizing B_raw needs a square root; use float inputs")
        if self.epsilon == 0:
            return self.B_raw
        return self.B_raw / np.sqrt(abs(self.c))


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------


def _rot(m: int, sign: int = 1, exact_domain: bool = True):
    """[[0, -sign*1_m], [sign*1_m, 0]]."""
    z = la.zeros((m, m), exact_domain)
    e = la.eye(m, exact_domain)
    return np.block([[z, -sign * e], [sign * e, z]])


def _diag_blocks(*blocks, exact_domain=True):
    sizes = [b.shape[0] for b in blocks]
    total = sum(sizes)
    out = la.zeros((total, total), exact_domain)
    pos = 0
    for b, s in zip(blocks, sizes):
        out[pos : pos + s, pos : pos + s] = b
        pos += s
    return out


def standard_rep(epsilon: int, n: int, k: int | None = None, exact_domain: bool = True) -> AlgebraRep:
    """The block-matrix representation in the standard basis.

    ``epsilon=-1``: I = [[0,-1],[1,0]] (2n blocks), J = diag(I_2n, -I_2n).
    ``epsilon=1``:  same I, R = diag(1_2n, -1_2n).
    ``epsilon=0``:  basis Im N (+) W (+) U with block sizes 2k, 2l, 2k and
    l = 2(n - k); N maps the U block identically onto the Im N block.
    """
    if n < 1:
        raise InvalidRep("n must be positive")
    e = exact_domain
    if epsilon == -1:
        big = _rot(2 * n, 1, e)
        small = _rot(n, 1, e)
        return AlgebraRep(-1, n, big, _diag_blocks(small, -small, exact_domain=e))
    if epsilon == 1:
        one = la.eye(2 * n, e)
        return AlgebraRep(1, n, _rot(2 * n, 1, e), _diag_blocks(one, -one, exact_domain=e))
    if epsilon != 0:
        raise InvalidRep(f"epsilon must be -1, 0 or 1, got {epsilon}")
    if k is None or not 1 <= k <= n:
        raise BadK(f"k must satisfy 1 <= k <= n = {n}, got {k}")
    l = 2 * (n - k)
    blocks = [_rot(k, -1, e)]
    if l:
        blocks.append(_rot(l, 1, e))
    blocks.append(_rot(k, 1, e))
    I = _diag_blocks(*blocks, exact_domain=e)
    N = la.zeros((4 * n, 4 * n), e)
    N[: 2 * k, 2 * k + 2 * l :] = la.eye(2 * k, e)
    return AlgebraRep(0, n, I, N, k)


def verify_rep(I, B, epsilon: int, b_square=None, tol: float = la.TOL) -> RepReport:
    """Check I^2 = -Id, B^2 = eps*Id (or ``b_square``*Id), IB + BI = 0, B != 0."""
    I, B = np.asarray(I), np.asarray(B)
    if I.ndim != 2 or I.shape[0] != I.shape[1] or I.shape != B.shape or I.shape[0] % 4:
        raise InvalidRep("generators must be square 4n x 4n matrices of equal size")
    m = I.shape[0]
    ident = la.eye(m, la.is_exact(I))
    target = epsilon if b_square is None else b_square
    msgs = []
    i_sq = la.allclose(I @ I, -ident, tol)
    b_sq = la.allclose(B @ B, la.like(target, I) * ident, tol)
    anti = la.is_zero(I @ B + B @ I, tol)
    faithful = not la.is_zero(B, tol)
    if not i_sq:
        msgs.append("I^2 != -Id")
    if not b_sq:
        msgs.append(f"B^2 != {target}*Id")
    if not anti:
        msgs.append("IB + BI != 0")
    if not faithful:
        msgs.append("B = 0, representation is not faithful")
    return RepReport(i_sq, b_sq, anti, faithful, tuple(msgs))


def check_rep(rep: AlgebraRep, tol: float = la.TOL) -> None:
    report = verify_rep(rep.I, rep.B, rep.epsilon, rep.b_square, tol)
    if not report.ok:
        raise InvalidRep("; ".join(report.messages))
    if rep.epsilon * rep.b_square <= 0 and rep.epsilon != 0:
        raise InvalidRep("b_square has the wrong sign for epsilon")


def is_complex_structure(lam, tol: float = la.TOL) -> bool:
    lam = np.asarray(lam)
    if lam.ndim != 2 or lam.shape[0] != lam.shape[1]:
        return False
    return la.allclose(lam @ lam, -la.eye(lam.shape[0], la.is_exact(lam)), tol)


def require_complex_structure(lam, tol: float = la.TOL):
    if not is_complex_structure(lam, tol):
        raise NotComplexStructure("matrix does not square to -Id")


# ---------------------------------------------------------------------------
# pairs, trace form, signature
# ---------------------------------------------------------------------------


def classify_pair(J1, J2, tol: float = la.TOL) -> PairClassification:
    """Orthogonalize two complex structures with scalar anticommutator.

    ``J1 J2 + J2 J1 = 2 alpha Id``; B_raw = alpha J1 + J2 anticommutes with J1
    and squares to (alpha^2 - 1) Id.  |alpha| < 1, = 1, > 1 give eps = -1, 0, 1.
    """
    J1, J2 = np.asarray(J1), np.asarray(J2)
    require_complex_structure(J1, tol)
    require_complex_structure(J2, tol)
    if la.span_rank([J1, J2], tol) < 2:
        raise Proportional("the two complex structures are proportional")
    m = J1.shape[0]
    anti = J1 @ J2 + J2 @ J1
    if la.is_scalar_matrix(anti, tol) is None:
        raise NotCospherical("J1 J2 + J2 J1 is not a scalar matrix")
    trace = sum(np.diag(anti))
    if la.is_exact(J1):
        alpha = Fraction(trace) / (2 * m)
    else:
        alpha = float(trace) / (2 * m)
    c = alpha * alpha - 1
    if la.is_exact(J1):
        eps = (c > 0) - (c < 0)
    else:
        eps = 0 if abs(c) < tol else (1 if c > 0 else -1)
        if eps == 0:
            c = 0.0
    return PairClassification(alpha, eps, J1, alpha * J1 + J2, c)


def trace_form(u, v, n: int | None = None):
    """(u, v) = -Tr(uv) / 4n."""
    u, v = np.asarray(u), np.asarray(v)
    if n is None:
        n = u.shape[0] // 4
    t = sum(np.diag(u @ v))
    if la.is_exact(u):
        return -Fraction(t) / (4 * n)
    return -float(t) / (4 * n)


def _gram(rep: AlgebraRep):
    gens = rep.generators()
    m = rep.dim
    g = np.empty((3, 3), dtype=object if rep.exact else float)
    for a in range(3):
        for b in range(3):
            t = sum(np.diag(gens[a] @ gens[b] + gens[b] @ gens[a]))
            g[a, b] = Fraction(t) / m if rep.exact else float(t) / m
    return g


def span_signature(rep: AlgebraRep, tol: float = la.TOL) -> tuple[int, int, int]:
    """Signature (pos, neg, null) of q(x, y) = scalar part of xy + yx on <I, B, K>."""
    return la.inertia(_gram(rep), tol)


# ---------------------------------------------------------------------------
# H(0) classification
# ---------------------------------------------------------------------------


def classify_nilpotent_rep(I, N, tol: float = la.TOL) -> int:
    """The parameter k = rank(N) / 2 of a faithful H(0) representation."""
    report = verify_rep(I, N, 0, tol=tol)
    if not report.ok:
        raise InvalidRep("; ".join(report.messages))
    r = la.rank(np.asarray(N), tol)
    if r % 2:
        raise OddRank(f"rank N = {r} is odd; Im N cannot be I-invariant")
    k = r // 2
    n = np.asarray(I).shape[0] // 4
    if not 1 <= k <= n:
        raise InvalidRep(f"k = {k} outside 1..{n}")
    return k


def _invariant_extension(I, span: la.SpanBuilder, candidates) -> list:
    """Greedily add pairs (v, Iv) from ``candidates`` to an I-invariant span."""
    chosen = []
    for v in candidates:
        if span.contains(v):
            continue
        span.add(v)
        span.add(I @ v)
        chosen.append(v)
    return chosen


def adapted_nilpotent_basis(I, N, tol: float = la.TOL):
    """Change of basis g with g^-1 I g, g^-1 N g in the standard block form.

    Columns: N u_1..N u_k, N I u_1..N I u_k, w_1..w_l, I w_1..I w_l,
    u_1..u_k, I u_1..I u_k, where U = <u, Iu> is an I-invariant complement of
    Ker N and W = <w, Iw> an I-invariant complement of Im N inside Ker N.
    """
    I, N = np.asarray(I), np.asarray(N)
    classify_nilpotent_rep(I, N, tol)
    m = I.shape[0]
    ex = la.is_exact(I)
    kernel = la.nullspace(N, tol)

    span = la.SpanBuilder(m, ex, tol)
    for v in kernel:
        span.add(v)
    us = _invariant_extension(I, span, list(la.eye(m, ex)))

    image = [N @ u for u in us] + [N @ (I @ u) for u in us]
    span = la.SpanBuilder(m, ex, tol)
    for v in image:
        span.add(v)
    ws = _invariant_extension(I, span, kernel)

    cols = image + ws + [I @ w for w in ws] + us + [I @ u for u in us]
    g = np.stack(cols, axis=1)
    if la.rank(g, tol) != m:
        raise InvalidRep("adapted basis is not invertible")
    return g


def conjugate_rep(g, rep: AlgebraRep, tol: float = la.TOL) -> AlgebraRep:
    """The representation g I g^-1, g B g^-1."""
    g = np.asarray(g)
    if rep.exact and not la.is_exact(g):
        g = la.exact(g)
    try:
        gi = la.inverse(g, tol)
    except np.linalg.LinAlgError as exc:
        raise Singular("conjugating matrix is singular") from exc
    return AlgebraRep(
        rep.epsilon, rep.n, g @ rep.I @ gi, g @ rep.B @ gi, rep.k, rep.b_square
    )
