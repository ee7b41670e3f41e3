"""Scalar and matrix substrate with an exact and a floating point domain.

Matrices are numpy arrays.  The exact domain uses ``dtype=object`` arrays whose
entries are :class:`fractions.Fraction` (real) or :class:`CRational` (Gaussian
rationals); the float domain uses ``float64``/``complex128`` arrays.  The domain
of a computation is read off the dtype, so exact inputs give exact answers and
no tolerance is ever applied to them.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

import gmpy2
import numpy as np
import scipy.linalg

from .errors import DegenerateBasis, DomainMismatch, NotHermitian

#: Default tolerance for rank, definiteness and equality tests in the float domain.
TOL = 1e-9


class CRational:
    """Complex number with exact rational real and imaginary parts."""

    __slots__ = ("im", "re")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @classmethod
    def _raw(cls, re, im):
        z = object.__new__(cls)
        z.re = re
        z.im = im
        return z

    def conjugate(self):
        return CRational._raw(self.re, -self.im)

    def abs2(self):
        return self.re * self.re + self.im * self.im

    @property
    def real(self):
        return self.re

    @property
    def imag(self):
        return self.im

    def __add__(self, other):
        if isinstance(other, CRational):
            return CRational._raw(self.re + other.re, self.im + other.im)
        if isinstance(other, Rational):
            return CRational._raw(self.re + other, self.im)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, CRational):
            return CRational._raw(self.re - other.re, self.im - other.im)
        if isinstance(other, Rational):
            return CRational._raw(self.re - other, self.im)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, Rational):
            return CRational._raw(other - self.re, -self.im)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, CRational):
            return CRational._raw(
                self.re * other.re - self.im * other.im,
                self.re * other.im + self.im * other.re,
            )
        if isinstance(other, Rational):
            return CRational._raw(self.re * other, self.im * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, CRational):
            d = other.abs2()
            if d == 0:
                raise ZeroDivisionError("CRational division by zero")
            return CRational._raw(
                (self.re * other.re + self.im * other.im) / d,
                (self.im * other.re - self.re * other.im) / d,
            )
        if isinstance(other, Rational):
            return CRational._raw(self.re / other, self.im / other)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, Rational):
            return CRational._raw(Fraction(other), Fraction(0)) / self
        return NotImplemented

    def __neg__(self):
        return CRational._raw(-self.re, -self.im)

    def __pos__(self):
        return self

    def __eq__(self, other):
        if isinstance(other, CRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, Rational):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"CRational({self.re}, {self.im})"


#: The imaginary unit in the exact domain.
I_UNIT = CRational(0, 1)


# ---------------------------------------------------------------------------
# construction and domain handling
# ---------------------------------------------------------------------------


def _to_fraction(x):
    if isinstance(x, (Fraction, CRational)):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, complex):
        raise DomainMismatch("cannot convert a float complex value to the exact domain")
    if isinstance(x, (float, np.floating)):
        return Fraction(float(x)).limit_denominator(10**12)
    raise TypeError(f"cannot convert {x!r} to an exact scalar")


def exact(a):
    """Return ``a`` as an exact (object dtype) array of Fractions/CRationals."""
    arr = np.asarray(a, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx, x in np.ndenumerate(arr):
        out[idx] = _to_fraction(x)
    return out


def to_float(a):
    """Convert to a float64 or complex128 array."""
    arr = np.asarray(a)
    if arr.dtype != object:
        return arr.astype(np.complex128 if np.iscomplexobj(arr) else np.float64)
    if any(isinstance(x, CRational) for x in arr.flat):
        return np.array([complex(x) for x in arr.flat], dtype=np.complex128).reshape(arr.shape)
    return np.array([float(x) for x in arr.flat], dtype=np.float64).reshape(arr.shape)


def is_exact(a) -> bool:
    return np.asarray(a).dtype == object


def is_complex(a) -> bool:
    arr = np.asarray(a)
    if arr.dtype == object:
        return any(isinstance(x, CRational) for x in arr.flat)
    return np.iscomplexobj(arr)


def eye(n: int, exact_domain: bool = True):
    if not exact_domain:
        return np.eye(n)
    out = np.full((n, n), Fraction(0), dtype=object)
    for i in range(n):
        out[i, i] = Fraction(1)
    return out


def zeros(shape, exact_domain: bool = True):
    if not exact_domain:
        return np.zeros(shape)
    return np.full(shape, Fraction(0), dtype=object)


def like(value, ref):
    """Coerce a scalar to the domain of the array ``ref``."""
    if is_exact(ref):
        return _to_fraction(value)
    return float(value)


def real_part(a):
    arr = np.asarray(a)
    if arr.dtype != object:
        return np.real(arr)
    out = np.empty(arr.shape, dtype=object)
    for idx, x in np.ndenumerate(arr):
        out[idx] = x.re if isinstance(x, CRational) else x
    return out


def imag_part(a):
    arr = np.asarray(a)
    if arr.dtype != object:
        return np.imag(arr)
    out = np.empty(arr.shape, dtype=object)
    for idx, x in np.ndenumerate(arr):
        out[idx] = x.im if isinstance(x, CRational) else Fraction(0)
    return out


def complexify(re, im):
    """Build ``re + i*im`` in the domain of the inputs."""
    re = np.asarray(re)
    im = np.asarray(im)
    if re.dtype != object and im.dtype != object:
        return re + 1j * im
    re, im = exact(re), exact(im)
    out = np.empty(re.shape, dtype=object)
    for idx in np.ndindex(re.shape):
        out[idx] = CRational._raw(re[idx], im[idx])
    return out


def conj(a):
    arr = np.asarray(a)
    if arr.dtype != object:
        return np.conj(arr)
    out = np.empty(arr.shape, dtype=object)
    for idx, x in np.ndenumerate(arr):
        out[idx] = x.conjugate() if isinstance(x, CRational) else x
    return out


def herm(a):
    """Conjugate transpose."""
    return conj(a).T


def times_i(a):
    """Multiply by the imaginary unit, staying in the domain of ``a``."""
    arr = np.asarray(a)
    if arr.dtype != object:
        return 1j * arr
    return arr * I_UNIT


def is_zero(a, tol: float = TOL) -> bool:
    arr = np.asarray(a)
    if arr.size == 0:
        return True
    if arr.dtype == object:
        return all(x == 0 for x in arr.flat)
    return float(np.max(np.abs(arr))) <= tol


def allclose(a, b, tol: float = TOL) -> bool:
    """Exact equality in the exact domain, max-abs difference within ``tol`` otherwise."""
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        return False
    if a.dtype == object and b.dtype == object:
        return all(x == y for x, y in zip(a.flat, b.flat))
    return is_zero(to_float(a) - to_float(b), tol)


def is_scalar_matrix(a, tol: float = TOL):
    """Return the scalar ``s`` if ``a == s*Id`` (within ``tol`` for floats), else None."""
    a = np.asarray(a)
    n = a.shape[0]
    if a.dtype == object:
        s = a[0, 0]
        for i in range(n):
            for j in range(n):
                if a[i, j] != (s if i == j else 0):
                    return None
        return s
    diag = np.diag(a)
    off = a - np.diag(diag)
    if np.max(np.abs(off), initial=0.0) >= tol or np.ptp(diag) >= tol:
        return None
    return float(np.mean(diag))


def vec(a):
    """Row-major flattening of a matrix into a 1-D array."""
    return np.asarray(a).reshape(-1)


# ---------------------------------------------------------------------------
# exact elimination kernel
# ---------------------------------------------------------------------------


class _Echelon:
    """Incrementally maintained reduced row echelon form over an exact field.

    Rows are sparse dicts ``{column: value}``.  Every stored pivot row is
    normalized (pivot entry 1) and fully reduced against all other pivots.
    """

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.pivots: dict[int, dict] = {}

    def reduce(self, row: dict) -> dict:
        r = dict(row)
        for c in [c for c in r if c in self.pivots]:
            f = r.get(c)
            if f is None:
                continue
            for cc, vv in self.pivots[c].items():
                nv = r.get(cc, 0) - f * vv
                if nv == 0:
                    r.pop(cc, None)
                else:
                    r[cc] = nv
        return r

    def add(self, row: dict) -> bool:
        """Insert a row; return True if it increased the rank."""
        r = self.reduce(row)
        if not r:
            return False
        p = min(r)
        inv = 1 / r[p]
        r = {c: v * inv for c, v in r.items()}
        for prow in self.pivots.values():
            f = prow.get(p)
            if f is None:
                continue
            for cc, vv in r.items():
                nv = prow.get(cc, 0) - f * vv
                if nv == 0:
                    prow.pop(cc, None)
                else:
                    prow[cc] = nv
        self.pivots[p] = r
        return True

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def nullspace(self) -> list[dict]:
        free = [c for c in range(self.ncols) if c not in self.pivots]
        out = []
        for f in free:
            v = {f: 1}
            for pc, prow in self.pivots.items():
                x = prow.get(f)
                if x is not None:
                    v[pc] = -x
            out.append(v)
        return out


def _all_real(m) -> bool:
    return not any(isinstance(x, CRational) for x in m.flat)


def _sparse_rows(m, fast: bool):
    # Real rational rows are eliminated with gmpy2.mpq, which is several times
    # faster than Fraction; values are converted back on the way out.
    conv = gmpy2.mpq if fast else (lambda x: x)
    for row in m:
        yield {j: conv(x) for j, x in enumerate(row) if x != 0}


_MPQ = type(gmpy2.mpq())


def _from_field(x):
    if isinstance(x, _MPQ):
        return Fraction(int(x.numerator), int(x.denominator))
    if isinstance(x, int):
        return Fraction(x)
    return x


def _dense(v: dict, n: int):
    out = np.full(n, Fraction(0), dtype=object)
    for c, x in v.items():
        out[c] = _from_field(x)
    return out


def _echelon_of(m) -> _Echelon:
    m = exact(m) if np.asarray(m).dtype != object else np.asarray(m)
    ech = _Echelon(m.shape[1])
    for r in _sparse_rows(m, _all_real(m)):
        ech.add(r)
    return ech


def _float_rank(m, tol):
    m = np.asarray(m)
    if m.size == 0:
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


# ---------------------------------------------------------------------------
# rank / nullspace / solving
# ---------------------------------------------------------------------------


def rank(m, tol: float = TOL) -> int:
    """Row rank.

    Exact inputs are eliminated over the rationals (or Gaussian rationals);
    float inputs count singular values above ``tol`` times the largest one.
    """
    m = np.asarray(m)
    if m.ndim != 2:
        raise ValueError("rank expects a 2-D matrix")
    if m.size == 0:
        return 0
    if m.dtype == object:
        return _echelon_of(m).rank
    return _float_rank(m, tol)


def nullspace(m, tol: float = TOL) -> list:
    """Basis of ``{v : m v = 0}`` as a list of 1-D arrays."""
    m = np.asarray(m)
    ncols = m.shape[1]
    if m.dtype == object:
        if m.shape[0] == 0:
            return [_dense({j: Fraction(1)}, ncols) for j in range(ncols)]
        return [_dense(v, ncols) for v in _echelon_of(m).nullspace()]
    if m.shape[0] == 0:
        return list(np.eye(ncols))
    _, s, vh = np.linalg.svd(m)
    r = int(np.sum(s > tol * s[0])) if s.size and s[0] > 0 else 0
    return [np.conj(row) for row in vh[r:]]


def column_basis(m, tol: float = TOL) -> list[int]:
    """Indices of a greedily chosen maximal independent set of columns."""
    m = np.asarray(m)
    chosen: list[int] = []
    if m.dtype == object:
        ech = _Echelon(m.shape[0])
        for j in range(m.shape[1]):
            col = {i: x for i, x in enumerate(m[:, j]) if x != 0}
            if ech.add(col):
                chosen.append(j)
        return chosen
    for j in range(m.shape[1]):
        if _float_rank(m[:, chosen + [j]], tol) == len(chosen) + 1:
            chosen.append(j)
    return chosen


def solve(a, b, tol: float = TOL):
    """Solve ``a x = b``; return one solution or None if inconsistent.

    ``b`` may be a vector or a matrix of right-hand sides.  Free variables of
    an underdetermined exact system are set to zero.
    """
    a, b = np.asarray(a), np.asarray(b)
    vector = b.ndim == 1
    bm = b.reshape(-1, 1) if vector else b
    if a.dtype == object or bm.dtype == object:
        a = exact(a) if a.dtype != object else a
        bm = exact(bm) if bm.dtype != object else bm
        n = a.shape[1]
        cols = []
        for k in range(bm.shape[1]):
            ech = _Echelon(n + 1)
            for i in range(a.shape[0]):
                row = {j: x for j, x in enumerate(a[i]) if x != 0}
                if bm[i, k] != 0:
                    row[n] = bm[i, k]
                ech.add(row)
            if n in ech.pivots:
                return None
            x = np.full(n, Fraction(0), dtype=object)
            for pc, prow in ech.pivots.items():
                x[pc] = prow.get(n, Fraction(0))
            cols.append(x)
        out = np.stack(cols, axis=1)
        return out[:, 0] if vector else out
    x, *_ = np.linalg.lstsq(a, bm, rcond=None)
    scale = max(1.0, float(np.max(np.abs(bm), initial=0.0)))
    if not is_zero(a @ x - bm, tol * scale):
        return None
    return x[:, 0] if vector else x


def inverse(m, tol: float = TOL):
    """Matrix inverse; raises :class:`numpy.linalg.LinAlgError` if singular."""
    m = np.asarray(m)
    n = m.shape[0]
    if m.dtype != object:
        if _float_rank(m, tol) < n:
            raise np.linalg.LinAlgError("singular matrix")
        return np.linalg.inv(m)
    if rank(m) < n:
        raise np.linalg.LinAlgError("singular matrix")
    return solve(m, eye(n))


# ---------------------------------------------------------------------------
# spans of matrices (stacked as vectors)
# ---------------------------------------------------------------------------


def span_rank(vectors, tol: float = TOL) -> int:
    """Rank of the real span of a list of arrays (each flattened)."""
    if not vectors:
        return 0
    return rank(np.stack([vec(v) for v in vectors]), tol)


def span_contains(basis, candidates, tol: float = TOL) -> bool:
    """True iff every candidate lies in the span of ``basis``."""
    r = span_rank(list(basis), tol)
    return span_rank(list(basis) + list(candidates), tol) == r


def span_equal(a, b, tol: float = TOL) -> bool:
    return span_contains(a, b, tol) and span_contains(b, a, tol)


def span_intersection(a, b, tol: float = TOL) -> list:
    """Basis of ``span(a) ∩ span(b)`` for lists of same-shaped arrays."""
    if not a or not b:
        return []
    shape = np.asarray(a[0]).shape
    am = np.stack([vec(x) for x in a], axis=1)
    bm = np.stack([vec(x) for x in b], axis=1)
    combo = np.concatenate([am, -bm], axis=1)
    kernel = nullspace(combo, tol)
    pieces = [(am @ k[: am.shape[1]]).reshape(shape) for k in kernel]
    if not pieces:
        return []
    stacked = np.stack([vec(p) for p in pieces])
    keep = column_basis(stacked.T, tol)
    return [pieces[i] for i in keep]


# ---------------------------------------------------------------------------
# complex subspaces
# ---------------------------------------------------------------------------


class SubspaceC:
    """A complex subspace of C^m given by a basis of independent columns.

    Equality is span equality (mutual containment), never basis comparison.
    """

    def __init__(self, basis, tol: float = TOL):
        basis = np.asarray(basis)
        if basis.ndim != 2 or basis.shape[1] == 0:
            raise DegenerateBasis("a subspace basis needs at least one column")
        for j in range(basis.shape[1]):
            if is_zero(basis[:, j], tol):
                raise DegenerateBasis(f"basis column {j} is zero")
        if rank(basis, tol) != basis.shape[1]:
            raise DegenerateBasis("basis columns are linearly dependent")
        self.basis = basis
        self.tol = tol

    @classmethod
    def from_span(cls, m, tol: float = TOL) -> SubspaceC:
        """Subspace spanned by the columns of ``m`` (dependent columns dropped)."""
        m = np.asarray(m)
        return cls(m[:, column_basis(m, tol)], tol)

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def exact(self) -> bool:
        return is_exact(self.basis)

    def contains(self, vectors) -> bool:
        v = np.asarray(vectors)
        if v.ndim == 1:
            v = v.reshape(-1, 1)
        both = _concat_cols(self.basis, v)
        return rank(both, self.tol) == self.dim

    def __eq__(self, other):
        if not isinstance(other, SubspaceC):
            return NotImplemented
        if self.ambient_dim != other.ambient_dim or self.dim != other.dim:
            return False
        return self.contains(other.basis)

    __hash__ = None

    def transform(self, g) -> SubspaceC:
        """Image under the linear map ``g``."""
        return SubspaceC(np.asarray(g) @ self.basis, self.tol)

    def real_points_basis(self):
        """Real basis (as columns) of the intersection with R^m."""
        return _real_points(self.basis, self.tol)

    def __repr__(self):
        return f"SubspaceC(ambient_dim={self.ambient_dim}, dim={self.dim})"


def _concat_cols(a, b):
    a, b = np.asarray(a), np.asarray(b)
    if (a.dtype == object) != (b.dtype == object):
        a, b = to_float(a), to_float(b)
    return np.concatenate([a, b], axis=1)


def _real_points(basis, tol):
    # Bc is real iff Im(B)a + Re(B)b = 0 for c = a + ib; the point is Re(B)a - Im(B)b.
    p, q = real_part(basis), imag_part(basis)
    d = basis.shape[1]
    kernel = nullspace(np.concatenate([q, p], axis=1), tol)
    if not kernel:
        return p[:, :0]
    pts = np.stack([p @ k[:d] - q @ k[d:] for k in kernel], axis=1)
    return pts[:, column_basis(pts, tol)]


def real_points_dimension(u: SubspaceC) -> int:
    """Real dimension of ``U ∩ R^m``."""
    p, q = real_part(u.basis), imag_part(u.basis)
    return 2 * u.dim - rank(np.concatenate([q, p], axis=1), u.tol)


# ---------------------------------------------------------------------------
# hermitian forms
# ---------------------------------------------------------------------------


def check_hermitian(h, tol: float = TOL):
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise NotHermitian("hermitian matrix must be square")
    if not allclose(h, herm(h), tol):
        raise NotHermitian("matrix is not equal to its conjugate transpose")


def inertia(h, tol: float = TOL) -> tuple[int, int, int]:
    """Numbers of positive, negative and zero eigenvalues of a hermitian matrix.

    Exact inputs use a symmetric (congruence) elimination, which preserves
    inertia by Sylvester's law; zero diagonals are handled by mixing in an
    off-diagonal partner first.  Float inputs compare eigenvalues with ``tol``.
    """
    check_hermitian(h, tol)
    h = np.asarray(h)
    n = h.shape[0]
    if h.dtype != object:
        ev = np.linalg.eigvalsh(h)
        scale = max(1.0, float(np.max(np.abs(ev), initial=0.0)))
        pos = int(np.sum(ev > tol * scale))
        neg = int(np.sum(ev < -tol * scale))
        return pos, neg, n - pos - neg
    m = [[h[i, j] for j in range(n)] for i in range(n)]
    active = list(range(n))
    pos = neg = 0
    while active:
        piv = next((i for i in active if m[i][i] != 0), None)
        if piv is None:
            pair = next(
                ((i, j) for i in active for j in active if i != j and m[i][j] != 0), None
            )
            if pair is None:
                break
            i, j = pair
            c = m[i][j].conjugate() if isinstance(m[i][j], CRational) else m[i][j]
            cbar = c.conjugate() if isinstance(c, CRational) else c
            for r in active:
                m[r][i] = m[r][i] + c * m[r][j]
            for s in active:
                m[i][s] = m[i][s] + cbar * m[j][s]
            piv = i
        d = m[piv][piv]
        d_re = d.re if isinstance(d, CRational) else d
        if d_re > 0:
            pos += 1
        else:
            neg += 1
        active.remove(piv)
        for r in active:
            f = m[r][piv] / d
            if f == 0:
                continue
            for s in active:
                m[r][s] = m[r][s] - f * m[piv][s]
    return pos, neg, n - pos - neg


def hermitian_definiteness(h, tol: float = TOL) -> str:
    """Classify as 'positive', 'negative', 'indefinite' or 'degenerate'."""
    pos, neg, zero = inertia(h, tol)
    n = pos + neg + zero
    if n and pos == n:
        return "positive"
    if n and neg == n:
        return "negative"
    if pos and neg:
        return "indefinite"
    return "degenerate"


# ---------------------------------------------------------------------------
# principal angles (float only)
# ---------------------------------------------------------------------------


def principal_angles(u1: SubspaceC, u2: SubspaceC) -> list[float]:
    """Principal angles between equal-dimensional subspaces, largest first."""
    if u1.exact or u2.exact:
        raise DomainMismatch("principal angles are only defined in the float domain")
    if u1.ambient_dim != u2.ambient_dim or u1.dim != u2.dim:
        raise ValueError("subspaces must have equal ambient and subspace dimensions")
    angles = scipy.linalg.subspace_angles(u1.basis, u2.basis)
    return sorted((float(a) for a in angles), reverse=True)


class SpanBuilder:
    """Grow a spanning set one vector at a time, keeping only independent ones."""

    def __init__(self, dim: int, exact_domain: bool = True, tol: float = TOL):
        self.dim = dim
        self.exact = exact_domain
        self.tol = tol
        self.vectors: list = []
        self._ech = _Echelon(dim) if exact_domain else None

    def _row(self, v):
        return {i: x for i, x in enumerate(vec(v)) if x != 0}

    def contains(self, v) -> bool:
        if self.exact:
            return not self._ech.reduce(self._row(v))
        if not self.vectors:
            return is_zero(v, self.tol)
        m = np.stack(self.vectors + [vec(v)], axis=1)
        return _float_rank(m, self.tol) == len(self.vectors)

    def add(self, v) -> bool:
        """Add ``v`` if independent of the current span; report whether it was added."""
        if self.exact:
            if not self._ech.add(self._row(v)):
                return False
        elif self.contains(v):
            return False
        self.vectors.append(vec(v))
        return True

    @property
    def rank(self) -> int:
        return len(self.vectors)
