"""A reproducible battery of checks covering every constructive statement.

Each group returns :class:`Check` records; :func:`run_battery` sorts them by id
so the report is independent of evaluation order.  All randomness comes from a
single ``numpy.random.Generator`` seeded by the caller.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import pairwise

import numpy as np

from . import connectivity as cn
from . import grassmann as gr
from . import linalg as la
from . import periods as pd
from .lines import TwistorLine, point, sample_points
from .reps import (
    adapted_nilpotent_basis,
    classify_nilpotent_rep,
    conjugate_rep,
    standard_rep,
)

CI = la.CRational


@dataclass(frozen=True)
class Check:
    id: str
    expected: object
    computed: object
    passed: bool

    def to_dict(self):
        return {
            "id": self.id,
            "expected": _jsonable(self.expected),
            "computed": _jsonable(self.computed),
            "passed": bool(self.passed),
        }


def _jsonable(x):
    if isinstance(x, (bool, int, float, str)) or x is None:
        return x
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    return str(x)


def _eq(cid, expected, computed):
    return Check(cid, expected, computed, expected == computed)


def _reps(n_max, include_nilpotent=True, exact_domain=True):
    for n in range(1, n_max + 1):
        for eps in (-1, 1):
            yield eps, n, None, standard_rep(eps, n, exact_domain=exact_domain)
        if include_nilpotent:
            for k in range(1, n + 1):
                yield 0, n, k, standard_rep(0, n, k, exact_domain=exact_domain)


def _tag(eps, n, k=None):
    return f"eps={eps:+d}.n={n}" + (f".k={k}" if k is not None else "")


def random_rational_matrix(rng, m, low=-3, high=3):
    """A random invertible integer matrix, as exact Fractions."""
    while True:
        g = la.exact(rng.integers(low, high + 1, size=(m, m)))
        if la.rank(g) == m:
            return g


# ---------------------------------------------------------------------------
# 1: Hdg dimensions
# ---------------------------------------------------------------------------


def hdg_checks(n_max: int, scalar: str = "exact"):
    out = []
    for eps, n, k, rep in _reps(n_max, exact_domain=scalar == "exact"):
        line = TwistorLine(rep)
        formula = pd.hdg_dim_formula(eps, n, k)
        out.append(_eq(f"1.hdg.{_tag(eps, n, k)}.closed", formula, pd.hdg_space(line).dim))
        if scalar == "exact":
            sampled = pd.hdg_space(line, "generic-sampling").dim
            out.append(_eq(f"1.hdg.{_tag(eps, n, k)}.sampled", formula, sampled))
    return out


# ---------------------------------------------------------------------------
# 2: Kähler certificates
# ---------------------------------------------------------------------------


def kahler_checks(n_max: int, samples: int = 5):
    out = []
    for eps, n, k, rep in _reps(min(n_max, 2)):
        line = TwistorLine(rep)
        cert = pd.kahler_certificate(line, samples=samples)
        tag = _tag(eps, n, k)
        if eps == 1:
            out.append(_eq(f"2.kahler.{tag}.status", "cone", cert.status))
            out.append(_eq(f"2.kahler.{tag}.upper_positive", samples,
                           cert.checks["positive_on_sheet"]))
            out.append(_eq(f"2.kahler.{tag}.lower_positive", 0, cert.checks["positive_off_sheet"]))
            std = la.zeros((4 * n, 4 * n))
            std[: 2 * n, 2 * n:] = la.eye(2 * n)
            std[2 * n:, : 2 * n] = -la.eye(2 * n)
            out.append(_eq(f"2.kahler.{tag}.witness_standard", True, la.allclose(cert.witness, std)))
            for p in sample_points(line, samples, "+"):
                a, c = p.coords[0], p.coords[2]
                h = pd.hermitian_form(cert.witness, p.matrix)
                want = la.eye(2 * n) * ((a + c) / 2)
                ok = la.allclose(la.real_part(h), want) and la.is_zero(la.imag_part(h))
                out.append(_eq(f"2.kahler.{tag}.closed_form.{p.coords}", True, ok))
        else:
            reason = "antipodal" if eps == -1 else "isotropic"
            out.append(_eq(f"2.kahler.{tag}.status", "none", cert.status))
            out.append(_eq(f"2.kahler.{tag}.reason", reason, cert.reason))
    return out


# ---------------------------------------------------------------------------
# 3: period closed forms
# ---------------------------------------------------------------------------


def sphere_period(a, b, c, n):
    """Closed form of Z on the sphere line at (a, b, c), a^2 + c^2 != 0."""
    d = a * a + c * c
    p = CI(-b * c, a) / d
    q = CI(a * b, c) / d
    z = np.empty((2 * n, 2 * n), dtype=object)
    z[:] = CI(0, 0)
    for i in range(n):
        z[i, i] = p
        z[n + i, n + i] = p
        z[i, n + i] = q
        z[n + i, i] = -q
    return z


def hyperboloid_period(a, b, c, n):
    z = np.empty((2 * n, 2 * n), dtype=object)
    z[:] = CI(0, 0)
    u = CI(-b, 1) / (a + c)
    for i in range(2 * n):
        z[i, i] = u
    return z


def period_checks(n_max: int, samples: int = 5):
    out = []
    for n in range(1, n_max + 1):
        for eps, closed in ((-1, sphere_period), (1, hyperboloid_period)):
            line = TwistorLine(standard_rep(eps, n))
            pts = [p for p in sample_points(line, samples + 2)
                   if p.coords[0] ** 2 + p.coords[2] ** 2 != 0][:samples]
            for p in pts:
                per = pd.normalized_period(p.matrix)
                tag = f"3.period.{_tag(eps, n)}.{p.coords}"
                out.append(_eq(f"{tag}.selection", tuple(range(2 * n)), per.selection))
                out.append(_eq(f"{tag}.Z", True, la.allclose(per.Z, closed(*p.coords, n))))
                dual = pd.dual_period(per.Z)
                ident = la.complexify(la.eye(2 * n), la.zeros((2 * n, 2 * n)))
                first = la.allclose(dual.E + per.Z @ dual.G, ident)
                second = la.is_zero(la.conj(dual.E) + per.Z @ la.conj(dual.G))
                out.append(_eq(f"{tag}.dual", True, first and second))
    return out


# ---------------------------------------------------------------------------
# 4: behaviour at infinity
# ---------------------------------------------------------------------------

CIRCLE_POINTS = [
    (1, 0), (0, 1), (-1, 0), (0, -1),
    (Fraction(3, 5), Fraction(4, 5)), (Fraction(-4, 5), Fraction(3, 5)),
    (Fraction(5, 13), Fraction(-12, 13)), (Fraction(-8, 17), Fraction(-15, 17)),
]


def infinity_checks(n_max: int, rng, embeds: int = 100):
    out = []
    lines = [TwistorLine(rep) for _, _, _, rep in _reps(min(n_max, 2))]
    per_line = -(-embeds // len(lines))
    hits, total = 0, 0
    for line in lines:
        for p in sample_points(line, per_line, rng=rng):
            if total == embeds:
                break
            total += 1
            hits += gr.in_LR(gr.embed(p.matrix))[0]
    out.append(_eq("4a.embed_off_LR.count", embeds, total))
    out.append(_eq("4a.embed_off_LR.hits", 0, hits))
    for n in range(1, min(n_max, 2) + 1):
        line = TwistorLine(standard_rep(1, n))
        spans = [gr.infinity_circle_point(line, c, s) for c, s in CIRCLE_POINTS]
        dims = [gr.in_LR(u)[1] for u in spans]
        out.append(_eq(f"4b.circle.{_tag(1, n)}.real_dims", [2 * n] * len(spans), dims))
        distinct = all(spans[i] != spans[j]
                       for i in range(len(spans)) for j in range(i + 1, len(spans)))
        out.append(_eq(f"4b.circle.{_tag(1, n)}.distinct", True, distinct))
    for n in range(1, n_max + 1):
        for k in range(1, n + 1):
            line = TwistorLine(standard_rep(0, n, k))
            built = gr.infinity_points(line)
            closed = gr.infinity_points_closed_form(line)
            tag = _tag(0, n, k)
            out.append(_eq(f"4c.points.{tag}.match", True,
                           built[0] == closed[0] and built[1] == closed[1]))
            # both limits equal the complexified image of N exactly when k = n
            out.append(_eq(f"4c.points.{tag}.coincide", k == n, built[0] == built[1]))
            out.append(_eq(f"4c.points.{tag}.real_dims", [2 * k, 2 * k],
                           [gr.in_LR(p)[1] for p in built]))
    grid = [10.0, 100.0, 1000.0]
    rays = [
        (1, {"sheet": "+"}), (1, {"sheet": "-", "angle": 0.9}),
        (0, {"sheet": "+", "alpha": 1.0, "beta": 0.0}), (0, {"sheet": "-", "alpha": 0.5, "beta": -2.0}),
    ]
    for eps, ray in rays:
        k = 1 if eps == 0 else None
        line = TwistorLine(standard_rep(eps, 1, k, exact_domain=False))
        angles = [a for _, a in gr.limit_convergence(line, ray, grid)]
        ok = all(x > y for x, y in pairwise(angles)) and angles[-1] < 1e-2
        out.append(Check(f"4d.angles.eps={eps:+d}.{ray['sheet']}", "decreasing, < 1e-2",
                         [round(a, 12) for a in angles], ok))
    return out


# ---------------------------------------------------------------------------
# 5: tangent cones
# ---------------------------------------------------------------------------

Z_GRID = [CI(1, 0), CI(0, 1), CI(1, 1), CI(2, -1), CI(Fraction(-1, 2), Fraction(3, 2))]


def tangent_checks(n_max: int):
    out = []
    for eps, n, k, rep in _reps(min(n_max, 2)):
        if eps == -1:
            continue
        line = TwistorLine(rep)
        rpt = gr.infinity_tangent_report(line)
        tag = _tag(eps, n, k)
        out.append(_eq(f"5.cone.{tag}.plane_dim", 2, rpt.plane_dim))
        out.append(_eq(f"5.cone.{tag}.interior_hits", 0, rpt.interior_hits))
        out.append(_eq(f"5.cone.{tag}.complement_agreement", True, rpt.complement_agreement))
        if eps == 1:
            out.append(_eq(f"5.cone.{tag}.boundary_in_cone", True, rpt.boundary_in_cone))
    line = TwistorLine(standard_rep(0, 2, 1))
    for which in ("+", "-"):
        phis = {z: gr.tangent_at_infinity_N(line, which, z) for z in Z_GRID}
        good = 0
        total = 0
        for z1 in Z_GRID:
            for z2 in Z_GRID:
                if z1 + z2 == 0:
                    continue
                total += 1
                lhs = phis[z1] + phis[z2]
                rhs = gr.tangent_at_infinity_N(line, which, z1 * z2 / (z1 + z2))
                good += la.allclose(lhs.map, rhs.map)
        out.append(_eq(f"5.addition_law.{which}", total, good))
        good = 0
        scalars = [Fraction(2), Fraction(-3), Fraction(1, 2)]
        for z in Z_GRID:
            for a in scalars:
                scaled = gr.tangent_at_infinity_N(line, which, z / a)
                good += la.allclose((a * phis[z]).map, scaled.map)
        out.append(_eq(f"5.scaling_law.{which}", len(Z_GRID) * len(scalars), good))
    return out


# ---------------------------------------------------------------------------
# 6: stabilizers and transversality
# ---------------------------------------------------------------------------


def random_triples(line: TwistorLine, count: int, rng):
    """Rational triples of line points; every fifth one is linearly dependent."""
    out = []
    while len(out) < count:
        p1, p2, p3 = sample_points(line, 3, rng=rng)
        kind = len(out) % 5
        if kind == 3:
            p3 = -p1
        elif kind == 4:
            flat = [q for q in sample_points(line, 12, rng=rng) if q.coords[2] == 0]
            if len(flat) < 3:
                flat = [point(line, *_flat_point(line, t)) for t in (0, 1, 2)]
            p1, p2, p3 = flat[:3]
        out.append((p1, p2, p3))
    return out


def _flat_point(line, t):
    # Rational points with z = 0: (x, y) on the conic x^2 - c y^2 = 1.
    c = line.c
    u = Fraction(t + 1, t + 3)
    if c < 0:
        d = 1 - c * u * u
        return (1 + c * u * u) / d, 2 * u / d, 0
    u = u / 2 / max(1, int(c) + 1)
    d = 1 - c * u * u
    return (1 + c * u * u) / d, 2 * u / d, 0


def transversality_checks(n_max: int, rng, triples: int = 50, scalar: str = "exact"):
    out = []
    tol = la.TOL
    for n in range(1, n_max + 1):
        for eps in (-1, 1):
            rep = standard_rep(eps, n, exact_domain=scalar == "exact")
            line = TwistorLine(rep)
            tag = _tag(eps, n)
            pts = sample_points(line, 3, rng=rng)
            stabs = [cn.stabilizer_tangent(p.matrix, tol) for p in pts]
            out.append(_eq(f"6.stabilizer.{tag}", [8 * n * n] * 3, [s.dim for s in stabs]))
            central = cn.algebra_centralizer_tangent(rep, tol)
            out.append(_eq(f"6.centralizer.{tag}", 4 * n * n, len(central)))
            inter = la.span_intersection(stabs[0].basis, stabs[1].basis, tol)
            out.append(_eq(f"6.pair_intersection.{tag}", True,
                           len(inter) == len(central) and la.span_equal(inter, central, tol)))
            out.append(_eq(f"6.generators.{tag}", 12 * n * n,
                           cn.generator_transversality_rank(rep, tol)))
            if scalar != "exact":
                continue
            agree = 0
            trip = random_triples(line, triples, rng)
            for p1, p2, p3 in trip:
                t = cn.triple_transversality(line, p1, p2, p3)
                agree += t == (cn.coordinate_determinant(p1, p2, p3) != 0)
            out.append(_eq(f"6.triples.{tag}", len(trip), agree))
    return out


# ---------------------------------------------------------------------------
# 7: connectivity
# ---------------------------------------------------------------------------


def connect_pairs(rng, count: int, epsilon: int, n: int = 1):
    """Pairs (A, B = g A g^-1) with det g > 0 and g near the identity."""
    out = []
    m = 4 * n
    base = standard_rep(epsilon, n, exact_domain=False).I
    while len(out) < count:
        h = np.eye(m) + 0.3 * rng.standard_normal((m, m))
        if np.linalg.det(h) <= 0:
            continue
        a = h @ base @ np.linalg.inv(h)
        g = np.eye(m) + 0.3 * rng.standard_normal((m, m))
        if np.linalg.det(g) <= 0:
            continue
        out.append((a, g @ a @ np.linalg.inv(g)))
    return out


def connect_checks(rng, pairs: int = 10):
    out = []
    for eps in (-1, 1):
        for i, (a, b) in enumerate(connect_pairs(rng, pairs, eps)):
            path = cn.connect(a, b, eps, rng=rng)
            rpt = cn.validate_path(path)
            tag = f"7.connect.eps={eps:+d}.pair={i:02d}"
            out.append(_eq(f"{tag}.valid", True, rpt.ok))
            worst = max(path.junction_residuals, default=0.0)
            out.append(Check(f"{tag}.junction", "< 1e-8", f"{worst:.1e}", worst < 1e-8))
            its = max(path.iterations, default=0)
            out.append(Check(f"{tag}.newton_iterations", "<= 50", its, its <= 50))
    return out


# ---------------------------------------------------------------------------
# 8: classification of nilpotent representations
# ---------------------------------------------------------------------------


def classification_checks(n_max: int, rng, conjugates: int = 20):
    out = []
    for n in range(1, min(n_max, 3) + 1):
        for k in range(1, n + 1):
            std = standard_rep(0, n, k)
            found, round_trip = [], 0
            for _ in range(conjugates):
                g = random_rational_matrix(rng, 4 * n)
                rep = conjugate_rep(g, std)
                found.append(classify_nilpotent_rep(rep.I, rep.B))
                h = adapted_nilpotent_basis(rep.I, rep.B)
                hi = la.inverse(h)
                round_trip += la.allclose(hi @ rep.I @ h, std.I) and la.allclose(hi @ rep.B @ h, std.B)
            tag = _tag(0, n, k)
            out.append(_eq(f"8.classify.{tag}", [k] * conjugates, found))
            out.append(_eq(f"8.adapted_basis.{tag}", conjugates, round_trip))
    return out


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------


def run_battery(n_max: int = 2, seed: int = 0, scalar: str = "exact",
                triples: int = 50, pairs: int = 10, samples: int = 5) -> dict:
    if not 1 <= n_max <= 4:
        raise ValueError("n_max must be between 1 and 4")
    if scalar not in ("exact", "float"):
        raise ValueError("scalar must be 'exact' or 'float'")
    rng = np.random.default_rng(seed)
    checks = []
    checks += hdg_checks(n_max, scalar)
    checks += transversality_checks(n_max, rng, triples, scalar)
    if scalar == "exact":
        checks += kahler_checks(n_max, samples)
        checks += period_checks(n_max, samples)
        checks += infinity_checks(n_max, rng)
        checks += tangent_checks(n_max)
        checks += classification_checks(n_max, rng)
        checks += connect_checks(rng, pairs)
    checks.sort(key=lambda c: c.id)
    failed = [c.id for c in checks if not c.passed]
    return {
        "seed": seed,
        "n_max": n_max,
        "scalar": scalar,
        "checks": [c.to_dict() for c in checks],
        "total": len(checks),
        "failed": failed,
        "passed": not failed,
    }
