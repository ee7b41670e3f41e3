from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from twistorlines import connectivity as cn
from twistorlines import linalg as la
from twistorlines.errors import DifferentComponents, WrongEpsilon
from twistorlines.lines import LinePoint, TwistorLine, point, sample_points
from twistorlines.reps import standard_rep

F = Fraction


def line(eps, n=1, exact_domain=True):
    return TwistorLine(standard_rep(eps, n, exact_domain=exact_domain))


# --- exact dimension counts -------------------------------------------------


@pytest.mark.parametrize("n", [1, 2])
def test_stabilizer_dimension(n):
    st_ = cn.stabilizer_tangent(standard_rep(-1, n).I)
    assert st_.dim == 8 * n * n
    for x in st_.basis:
        assert la.allclose(x @ st_.lam, st_.lam @ x)


@pytest.mark.parametrize("eps,n", [(-1, 1), (1, 2)])
def test_centralizer_dimension(eps, n):
    rep = standard_rep(eps, n)
    central = cn.algebra_centralizer_tangent(rep)
    assert len(central) == 4 * n * n
    other = sample_points(TwistorLine(rep), 2, None if eps == -1 else "+")[1]
    inter = la.span_intersection(cn.stabilizer_tangent(rep.I).basis,
                                 cn.stabilizer_tangent(other.matrix).basis)
    assert la.span_equal(inter, central)


@pytest.mark.parametrize("eps,n", [(-1, 1), (1, 1), (1, 2)])
def test_generator_transversality(eps, n):
    rep = standard_rep(eps, n)
    assert cn.generator_transversality(rep)
    assert cn.generator_transversality_rank(rep) == 12 * n * n


def test_transversality_needs_eps_pm1():
    with pytest.raises(WrongEpsilon):
        cn.generator_transversality(standard_rep(0, 1, 1))


def test_triple_examples():
    s = line(-1)
    a, b, c = point(s, 1, 0, 0), point(s, 0, 1, 0), point(s, F(3, 5), F(4, 5), 0)
    # all three lie in the plane z = 0 of coordinate space
    assert cn.coordinate_determinant(a, b, c) == 0
    assert not cn.triple_transversality(s, a, b, c)
    assert not cn.triple_transversality(s, a, -a, b)
    assert cn.triple_transversality(s, a, b, point(s, 0, 0, 1))
    h = line(1)
    p = [point(h, F(5, 4), F(3, 4), 0), point(h, F(5, 4), F(-3, 4), 0), point(h, F(5, 4), 0, F(3, 4))]
    assert cn.coordinate_determinant(*p) != 0
    assert cn.triple_transversality(h, *p)


@settings(max_examples=15, deadline=None)
@given(st.sampled_from([-1, 1]), st.integers(0, 2**32 - 1))
def test_triple_transversality_iff_determinant(eps, seed):
    s = line(eps)
    p = sample_points(s, 3, rng=np.random.default_rng(seed))
    assert cn.triple_transversality(s, *p) == (cn.coordinate_determinant(*p) != 0)


# --- local solve ------------------------------------------------------------


def test_local_connect_identity():
    s = line(1, exact_domain=False)
    p1, p2 = sample_points(s, 3, "+")[1:]
    sol = cn.local_connect(p1.matrix, p2.matrix, s.rep.I, s.rep.I)
    assert sol.iterations == 0
    assert np.allclose(sol.g1, np.eye(4)) and np.allclose(sol.g2, np.eye(4))


def _pair_on(s):
    pts = sample_points(s, 4, "+" if s.epsilon == 1 else None)
    return pts[1].matrix, pts[2].matrix


def test_local_connect_along_first_stabilizer():
    s = line(1, exact_domain=False)
    i1, i2 = _pair_on(s)
    x = cn._float_commutant(i1)[0]
    g = scipy.linalg.expm(0.05 * x)
    target = g @ s.rep.I @ np.linalg.inv(g)
    sol = cn.local_connect(i1, i2, s.rep.I, target)
    assert sol.residual < 1e-10
    assert np.linalg.norm(sol.g2 - np.eye(4)) < 1e-6


def test_local_connect_small_random_target():
    rng = np.random.default_rng(11)
    s = line(-1, exact_domain=False)
    i1, i2 = _pair_on(s)
    x = rng.standard_normal((4, 4))
    g = scipy.linalg.expm(x)
    d0 = np.linalg.norm(g @ s.rep.I @ np.linalg.inv(g) - s.rep.I)
    g = scipy.linalg.expm(x * 0.1 / d0)
    target = g @ s.rep.I @ np.linalg.inv(g)
    sol = cn.local_connect(i1, i2, s.rep.I, target)
    assert sol.residual < 1e-10 and sol.iterations <= 20


# --- conjugators and paths --------------------------------------------------


def test_complex_frame_and_conjugator():
    rng = np.random.default_rng(2)
    i = standard_rep(-1, 2, exact_domain=False).I
    h = cn.complex_frame(i, rng)
    assert np.allclose(np.linalg.inv(h) @ i @ h, i)
    g = np.eye(8) + 0.3 * rng.standard_normal((8, 8))
    b = g @ i @ np.linalg.inv(g)
    c = cn.conjugator(i, b)
    assert np.allclose(c @ i @ np.linalg.inv(c), b)
    r = np.diag([-1.0] + [1.0] * 7)
    with pytest.raises(DifferentComponents):
        cn.conjugator(i, r @ i @ r)


def test_interpolation_stays_in_gl_plus():
    rng = np.random.default_rng(4)
    g = np.eye(4) + 0.5 * rng.standard_normal((4, 4))
    if np.linalg.det(g) < 0:
        g[:, 0] *= -1
    path = cn.interpolation(g)
    assert np.allclose(path(0.0), np.eye(4)) and np.allclose(path(1.0), g)
    assert all(np.linalg.det(path(t)) > 0 for t in np.linspace(0, 1, 11))


def test_connect_trivial():
    i = standard_rep(1, 1, exact_domain=False).I
    path = cn.connect(i, i, 1)
    assert path.segments == [] and cn.validate_path(path).ok


def _pair(eps, seed):
    a = standard_rep(eps, 1, exact_domain=False).I
    g = np.eye(4) + np.array([[0, 1, 0, 0], [0, 0, 1, 0], [1, 0, 0, 0], [0, 0, 0, 2]]) / 4
    return a, g @ a @ np.linalg.inv(g)


@pytest.mark.parametrize("eps", [-1, 1])
def test_connect_fixed_rational_conjugate(eps):
    a, b = _pair(eps, 0)
    path = cn.connect(a, b, eps, rng=np.random.default_rng(0))
    rpt = cn.validate_path(path)
    assert rpt.ok, rpt.to_dict()
    assert len(path.segments) % 3 == 0 and len(path.segments) >= 3
    assert max(path.junction_residuals) < 1e-8
    assert max(path.iterations) <= cn.NEWTON_MAX_ITER


def test_connect_rejects_eps_zero():
    i = standard_rep(0, 1, 1, exact_domain=False).I
    with pytest.raises(WrongEpsilon):
        cn.connect(i, i, 0)


def test_connect_rejects_other_component():
    i = standard_rep(1, 1, exact_domain=False).I
    r = np.diag([-1.0, 1.0, 1.0, 1.0])
    with pytest.raises(DifferentComponents):
        cn.connect(i, r @ i @ r, 1)


def test_interpolation_through_half_turn():
    g = np.diag([1.0, 1.0, -1.0, -1.0]) * 2
    path = cn.interpolation(g)
    assert np.allclose(path(1.0), g)
    assert all(np.linalg.det(path(t)) > 0 for t in np.linspace(0, 1, 11))


@pytest.mark.parametrize("eps", [-1, 1])
def test_connect_to_negative(eps):
    # -I lies in the same component as I since the complex dimension 2n is even
    i = standard_rep(eps, 1, exact_domain=False).I
    path = cn.connect(i, -i, eps, rng=np.random.default_rng(1))
    assert cn.validate_path(path).ok


@settings(max_examples=6, deadline=None)
@given(st.sampled_from([-1, 1]), st.integers(0, 2**32 - 1))
def test_connect_random_pairs(eps, seed):
    rng = np.random.default_rng(seed)
    a = standard_rep(eps, 1, exact_domain=False).I
    while True:
        g = np.eye(4) + 0.3 * rng.standard_normal((4, 4))
        if np.linalg.det(g) > 0:
            break
    path = cn.connect(a, g @ a @ np.linalg.inv(g), eps, rng=rng)
    assert cn.validate_path(path).ok


# --- validation failures ----------------------------------------------------


def _valid_path():
    a, b = _pair(1, 0)
    return cn.connect(a, b, 1, rng=np.random.default_rng(0))


def test_validate_detects_junction_gap():
    path = _valid_path()
    seg = path.segments[1]
    bumped = LinePoint(seg.start.coords, seg.start.matrix + 1e-3)
    segs = list(path.segments)
    segs[1] = replace(seg, start=bumped)
    rpt = cn.validate_path(replace(path, segments=segs))
    assert not rpt.ok and not all(rpt.junction_ok)


def test_validate_detects_sheet_change():
    s = line(1, exact_domain=False)
    up, down = sample_points(s, 1, "+")[0], sample_points(s, 1, "-")[0]
    path = cn.TwistorPath([cn.ChainSegment(s, up, down, "+")], [], [], up.matrix, down.matrix)
    rpt = cn.validate_path(path)
    assert not rpt.ok and rpt.component_ok == [False]
