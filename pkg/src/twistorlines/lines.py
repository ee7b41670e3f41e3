"""Generalized twistor lines: the imaginary units of an embedded H(eps).

A line is stored by its representation.  With ``c = b_square`` a point
``x I + y B + z K`` squares to ``(-x^2 + c (y^2 + z^2)) Id``, so the line is the
quadric ``x^2 - c (y^2 + z^2) = 1``: a sphere (c < 0), a two-sheeted
hyperboloid (c > 0) or the two planes ``x = +-1`` (c = 0).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import count as _count
from math import isqrt

import numpy as np

from . import linalg as la
from .errors import ConnectedLine, InvalidRep, OffQuadric
from .reps import AlgebraRep, check_rep, classify_pair, require_complex_structure

LINE_TYPES = {-1: "sphere", 1: "hyperboloid", 0: "planes"}


@dataclass(frozen=True, eq=False)
class TwistorLine:
    rep: AlgebraRep

    @property
    def epsilon(self) -> int:
        return self.rep.epsilon

    @property
    def type(self) -> str:
        return LINE_TYPES[self.rep.epsilon]

    @property
    def c(self):
        return self.rep.b_square

    @property
    def exact(self) -> bool:
        return self.rep.exact

    @property
    def n(self) -> int:
        return self.rep.n

    def quadric_value(self, x, y, z):
        return x * x - self.c * (y * y + z * z)

    def matrix(self, x, y, z):
        return x * self.rep.I + y * self.rep.B + z * self.rep.K


@dataclass(frozen=True, eq=False)
class LinePoint:
    coords: tuple
    matrix: np.ndarray

    @property
    def x(self):
        return self.coords[0]

    def __neg__(self) -> LinePoint:
        return LinePoint(tuple(-v for v in self.coords), -self.matrix)


def _scalar(value, exact_domain: bool):
    return la._to_fraction(value) if exact_domain else float(value)


def line_from_rep(rep: AlgebraRep, tol: float = la.TOL) -> TwistorLine:
    """The line of imaginary units of ``rep``, checked at three sample points."""
    check_rep(rep, tol)
    line = TwistorLine(rep)
    ident = la.eye(rep.dim, rep.exact)
    for p in sample_points(line, 3):
        if not la.allclose(p.matrix @ p.matrix, -ident, tol):
            raise InvalidRep("sampled point of the quadric is not a complex structure")
    return line


def point(line: TwistorLine, x, y, z, tol: float = la.TOL) -> LinePoint:
    """The complex structure with coordinates (x, y, z) on ``line``."""
    x, y, z = (_scalar(v, line.exact) for v in (x, y, z))
    q = line.quadric_value(x, y, z)
    if (line.exact and q != 1) or (not line.exact and abs(q - 1) > tol):
        raise OffQuadric(f"({x}, {y}, {z}) is not on the {line.type}")
    return LinePoint((x, y, z), line.matrix(x, y, z))


def coordinates(line: TwistorLine, lam, tol: float = la.TOL):
    """Coordinates of ``lam`` in the basis (I, B, K), or None outside the span."""
    lam = np.asarray(lam)
    if line.exact and not la.is_exact(lam):
        lam = la.exact(lam)
    basis = np.stack([la.vec(g) for g in line.rep.generators()], axis=1)
    sol = la.solve(basis, la.vec(lam), tol)
    if sol is None:
        return None
    return tuple(sol)


def contains(line: TwistorLine, lam, tol: float = la.TOL):
    """Coordinates of ``lam`` if it lies on ``line``; None otherwise."""
    require_complex_structure(lam, tol)
    coords = coordinates(line, lam, tol)
    if coords is None:
        return None
    q = line.quadric_value(*coords)
    if line.exact and la.is_exact(coords[0]):
        return coords if q == 1 else None
    return coords if abs(float(q) - 1) <= tol else None


def component_of(line: TwistorLine, p) -> str:
    """Sign of the I-coefficient: '+' or '-'.

    The label is relative to the stored generator I; replacing I by -I swaps it.
    """
    if line.epsilon == -1:
        raise ConnectedLine("the sphere line is connected")
    x = p.coords[0] if isinstance(p, LinePoint) else p[0]
    return "+" if x > 0 else "-"


def line_through(lam1, lam2, tol: float = la.TOL) -> TwistorLine:
    """The unique line through two non-proportional complex structures."""
    pair = classify_pair(lam1, lam2, tol)
    return line_from_rep(pair.to_rep(), tol)


def equal_lines(s1: TwistorLine, s2: TwistorLine, tol: float = la.TOL) -> bool:
    """Same type and the same span <I, B, K>."""
    if s1.epsilon != s2.epsilon or s1.rep.dim != s2.rep.dim:
        return False
    g1, g2 = list(s1.rep.generators()), list(s2.rep.generators())
    if s1.exact != s2.exact:
        g1, g2 = [la.to_float(g) for g in g1], [la.to_float(g) for g in g2]
    return la.span_equal(g1, g2, tol)


# ---------------------------------------------------------------------------
# rational sampling
# ---------------------------------------------------------------------------


def _parameter_grid():
    """Distinct rational pairs (u, v) in the open square (-1, 1)^2, origin first."""
    yield Fraction(0), Fraction(0)
    seen = {(Fraction(0), Fraction(0))}
    for d in _count(2):
        for a in range(-(d - 1), d):
            for b in range(-(d - 1), d):
                uv = (Fraction(a, d), Fraction(b, d))
                if uv not in seen:
                    seen.add(uv)
                    yield uv


def _random_parameters(rng):
    while True:
        d = int(rng.integers(2, 12))
        a, b = rng.integers(-(d - 1), d, size=2)
        yield Fraction(int(a), d), Fraction(int(b), d)


def _quadric_point(c, u, v):
    """Rational point of x^2 - c(y^2 + z^2) = 1 with x > 0 from parameters (u, v)."""
    s = u * u + v * v
    if c == 0:
        return Fraction(1), u * 4, v * 4
    denom = 1 - c * s
    return (1 + c * s) / denom, 2 * u / denom, 2 * v / denom


def _scale_for(c) -> int:
    # |u|, |v| < 1 gives s < 2; need c*s/m^2 < 1 on the hyperboloid.
    if c <= 0:
        return 1
    m = isqrt(int(np.ceil(2 * c))) + 1
    return m


def sample_points(
    line: TwistorLine, count: int, component: str | None = None, rng=None
) -> list[LinePoint]:
    """Pairwise distinct rational points on ``line``.

    Sphere: inverse stereographic projection from (-1, 0, 0).  Hyperboloid:
    x = (1+cs)/(1-cs), (y, z) = 2(u, v)/(1-cs) with cs < 1, negated on the
    lower sheet.  Planes: x = +-1 with rational (y, z).  Without ``component``
    the two components of a disconnected line alternate, starting with '+'.
    With ``rng`` (a numpy Generator) the parameters are random small rationals;
    otherwise a fixed grid is walked.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    c = Fraction(line.c) if line.exact else Fraction(line.c).limit_denominator(10**12)
    params = _random_parameters(rng) if rng is not None else _parameter_grid()
    m = _scale_for(c)
    out, seen = [], set()
    for u, v in params:
        if len(out) == count:
            break
        x, y, z = _quadric_point(c, u / m, v / m)
        sign = 1
        if line.epsilon != -1:
            if component is None:
                sign = 1 if len(out) % 2 == 0 else -1
            else:
                sign = 1 if component == "+" else -1
        key = (sign * x, sign * y, sign * z)
        if key in seen:
            continue
        seen.add(key)
        if line.exact:
            out.append(point(line, *key))
        else:
            xf, yf, zf = (float(t) for t in key)
            out.append(LinePoint((xf, yf, zf), line.matrix(xf, yf, zf)))
    return out
