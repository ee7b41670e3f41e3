"""Acceptance criteria 1-8, one test each.

Run with ``pytest tests/test_acceptance.py`` or ``python3 tests/test_acceptance.py``;
a PASS/FAIL line per criterion is printed at the end of the session.
"""

import sys
from fractions import Fraction

import numpy as np
import pytest

from twistorlines import battery as bt
from twistorlines import connectivity as cn
from twistorlines import grassmann as gr
from twistorlines import linalg as la
from twistorlines import periods as pd
from twistorlines.lines import TwistorLine, sample_points
from twistorlines.reps import (
    adapted_nilpotent_basis,
    classify_nilpotent_rep,
    conjugate_rep,
    standard_rep,
)

F = Fraction
CI = la.CRational
SEED = 20240501


def line(eps, n, k=None, exact_domain=True):
    return TwistorLine(standard_rep(eps, n, k, exact_domain))


# expected dimensions for n = 1, 2, 3
HDG_DIMS = {
    (-1, 1, None): 3, (-1, 2, None): 10, (-1, 3, None): 21,
    (1, 1, None): 3, (1, 2, None): 10, (1, 3, None): 21,
    (0, 1, 1): 3,
    (0, 2, 1): 11, (0, 2, 2): 10,
    (0, 3, 1): 27, (0, 3, 2): 22, (0, 3, 3): 21,
}


def test_criterion_1_hdg_dimensions(criterion):
    criterion(1, "Hdg dimensions, exact, n = 1..3, all types and k")
    got = {}
    for eps, n, k in HDG_DIMS:
        s = line(eps, n, k)
        got[(eps, n, k)] = (pd.hdg_space(s).dim, pd.hdg_space(s, "generic-sampling").dim)
    assert got == {key: (v, v) for key, v in HDG_DIMS.items()}


def test_criterion_2_kahler_certificates(criterion):
    criterion(2, "Kahler cone on hyperboloid lines; antipodal and isotropic obstructions")
    for n in (1, 2):
        s = line(1, n)
        q = pd.kahler_witness(s)
        z, one = la.zeros((2 * n, 2 * n)), la.eye(2 * n)
        assert la.allclose(q, np.block([[z, one], [-one, z]]))
        upper = sample_points(s, 5, "+")
        lower = sample_points(s, 5, "-")
        assert all(pd.is_kahler_at(q, p.matrix) for p in upper)
        assert not any(pd.is_kahler_at(q, p.matrix) for p in lower)
        for p in upper + lower:
            a, c = p.coords[0], p.coords[2]
            want = la.complexify(one * ((a + c) / 2), z)
            assert la.allclose(pd.hermitian_form(q, p.matrix), want)
        assert pd.kahler_certificate(s).status == "cone"

        s = line(-1, n)
        basis = pd.hdg_space(s).basis
        pts = sample_points(s, 5)
        for p in pts:
            for form in basis:
                h = pd.hermitian_form(form, p.matrix)
                assert la.allclose(pd.hermitian_form(form, -p.matrix), -la.conj(h))
                assert not (pd.is_kahler_at(form, p.matrix) and pd.is_kahler_at(form, -p.matrix))
        cert = pd.kahler_certificate(s)
        assert (cert.status, cert.reason) == ("none", "antipodal")

        for k in range(1, n + 1):
            s = line(0, n, k)
            image = s.rep.B[:, la.column_basis(s.rep.B)]
            for p in sample_points(s, 6):
                for form in pd.hdg_space(s).basis:
                    assert la.is_zero(pd.restricted_form(form, p.matrix, image))
            cert = pd.kahler_certificate(s)
            assert (cert.status, cert.reason) == ("none", "isotropic")


def _sphere_Z(a, b, c, n):
    d = a * a + c * c
    p, q = CI(-b * c, a) / d, CI(a * b, c) / d
    z = np.full((2 * n, 2 * n), CI(0, 0), dtype=object)
    for i in range(n):
        z[i, i] = z[n + i, n + i] = p
        z[i, n + i], z[n + i, i] = q, -q
    return z


def _hyperboloid_Z(a, b, c, n):
    z = np.full((2 * n, 2 * n), CI(0, 0), dtype=object)
    for i in range(2 * n):
        z[i, i] = CI(-b, 1) / (a + c)
    return z


def test_criterion_3_period_closed_forms(criterion):
    criterion(3, "normalized periods equal the closed forms; dual identities exact")
    rng = np.random.default_rng(SEED)
    for n in (1, 2, 3):
        ident = la.complexify(la.eye(2 * n), la.zeros((2 * n, 2 * n)))
        for eps, closed in ((-1, _sphere_Z), (1, _hyperboloid_Z)):
            pts = [p for p in sample_points(line(eps, n), 8, rng=rng)
                   if p.coords[0] ** 2 + p.coords[2] ** 2 != 0 and p.coords[0] + p.coords[2] != 0]
            assert len(pts) >= 5
            for p in pts[:5]:
                per = pd.normalized_period(p.matrix)
                assert la.allclose(per.Z, closed(*p.coords, n))
                d = pd.dual_period(per.Z)
                assert la.allclose(d.E + per.Z @ d.G, ident)
                assert la.is_zero(la.conj(d.E) + per.Z @ la.conj(d.G))


CIRCLE = [(1, 0), (0, 1), (-1, 0), (0, -1), (F(3, 5), F(4, 5)), (F(-4, 5), F(3, 5)),
          (F(5, 13), F(-12, 13)), (F(-8, 17), F(-15, 17))]


def test_criterion_4_infinity(criterion):
    criterion(4, "embedding off L_R, circle at infinity, limit points, angle decay")
    rng = np.random.default_rng(SEED)
    lines = [line(-1, 1), line(1, 1), line(0, 1, 1), line(-1, 2), line(1, 2), line(0, 2, 1), line(0, 2, 2)]
    sampled = [p for s in lines for p in sample_points(s, 15, rng=rng)][:100]
    assert len(sampled) == 100
    assert not any(gr.in_LR(gr.embed(p.matrix))[0] for p in sampled)

    for n in (1, 2):
        spans = [gr.infinity_circle_point(line(1, n), c, s) for c, s in CIRCLE]
        assert [gr.in_LR(u) for u in spans] == [(True, 2 * n)] * 8
        assert all(spans[i] != spans[j] for i in range(8) for j in range(i + 1, 8))

    for n in (1, 2, 3):
        for k in range(1, n + 1):
            s = line(0, n, k)
            assert gr.infinity_points(s) == gr.infinity_points_closed_form(s)
    g = bt.random_rational_matrix(rng, 8)
    s = TwistorLine(conjugate_rep(g, standard_rep(0, 2, 1)))
    assert gr.infinity_points(s) == gr.infinity_points_closed_form(s)

    grid = [10.0, 100.0, 1000.0]
    rays = [(1, {"sheet": "+"}), (1, {"sheet": "-", "angle": 0.7}),
            (0, {"sheet": "+", "alpha": 1.0, "beta": 0.0}), (0, {"sheet": "-", "alpha": 0.3, "beta": 1.5})]
    for eps, ray in rays:
        s = line(eps, 1, 1 if eps == 0 else None, exact_domain=False)
        angles = [a for _, a in gr.limit_convergence(s, ray, grid)]
        assert angles[0] > angles[1] > angles[2] and angles[2] < 1e-2


Z_GRID = [CI(a, b) for a, b in ((1, 0), (0, 1), (1, 1), (2, -1), (F(-1, 2), F(3, 2)))]


def test_criterion_5_tangent_cones(criterion):
    criterion(5, "tangent plane at infinity against the tangent cone of L_R; phi_z laws")
    for n in (1, 2):
        r = gr.infinity_tangent_report(line(1, n))
        assert (r.plane_dim, r.boundary_in_cone, r.interior_hits, r.directions) == (2, True, 0, 8)
        for k in range(1, n + 1):
            r = gr.infinity_tangent_report(line(0, n, k))
            assert (r.plane_dim, r.interior_hits, r.directions) == (2, 0, 16)
    s = line(0, 2, 1)
    for which in ("+", "-"):
        phi = {z: gr.tangent_at_infinity_N(s, which, z) for z in Z_GRID}
        for z1 in Z_GRID:
            for z2 in Z_GRID:
                if z1 + z2 != 0:
                    rhs = gr.tangent_at_infinity_N(s, which, z1 * z2 / (z1 + z2))
                    assert la.allclose((phi[z1] + phi[z2]).map, rhs.map)
            for a in (F(2), F(-3), F(1, 2), F(5, 7), F(-1)):
                assert la.allclose((a * phi[z1]).map, gr.tangent_at_infinity_N(s, which, z1 / a).map)


STAB = {1: 8, 2: 32, 3: 72}
CENTRAL = {1: 4, 2: 16, 3: 36}
GENERATORS = {1: 12, 2: 48, 3: 108}


def test_criterion_6_transversality(criterion):
    criterion(6, "stabilizer, centralizer and transversality dimensions, n = 1..3")
    rng = np.random.default_rng(SEED)
    for n in (1, 2, 3):
        for eps in (-1, 1):
            rep = standard_rep(eps, n)
            s = TwistorLine(rep)
            p1, p2 = sample_points(s, 2, rng=rng)
            st1, st2 = cn.stabilizer_tangent(p1.matrix), cn.stabilizer_tangent(p2.matrix)
            assert (st1.dim, st2.dim) == (STAB[n], STAB[n])
            central = cn.algebra_centralizer_tangent(rep)
            assert len(central) == CENTRAL[n]
            inter = la.span_intersection(st1.basis, st2.basis)
            assert len(inter) == CENTRAL[n] and la.span_equal(inter, central)
            assert cn.generator_transversality_rank(rep) == GENERATORS[n]
            triples = bt.random_triples(s, 50, rng)
            dependent = 0
            for t in triples:
                nonzero = cn.coordinate_determinant(*t) != 0
                dependent += not nonzero
                assert cn.triple_transversality(s, *t) == nonzero
            assert dependent >= 10


def test_criterion_7_connectivity(criterion):
    criterion(7, "three-line chains join seeded pairs in one component, eps = -1 and 1")
    rng = np.random.default_rng(SEED)
    for eps in (-1, 1):
        pairs = bt.connect_pairs(rng, 10, eps)
        assert len(pairs) == 10
        for a, b in pairs:
            path = cn.connect(a, b, eps, rng=rng)
            report = cn.validate_path(path)
            assert report.ok, report.to_dict()
            assert max(path.junction_residuals) < 1e-8
            assert report.max_junction < 1e-8
            assert max(path.iterations) <= 50


def test_criterion_8_nilpotent_classification(criterion):
    criterion(8, "nilpotent representations classified by k; adapted basis round-trips")
    rng = np.random.default_rng(SEED)
    for n in (1, 2, 3):
        for k in range(1, n + 1):
            std = standard_rep(0, n, k)
            for _ in range(20):
                rep = conjugate_rep(bt.random_rational_matrix(rng, 4 * n), std)
                assert classify_nilpotent_rep(rep.I, rep.B) == k
                h = adapted_nilpotent_basis(rep.I, rep.B)
                hi = la.inverse(h)
                assert la.allclose(hi @ rep.I @ h, std.I) and la.allclose(hi @ rep.B @ h, std.B)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
