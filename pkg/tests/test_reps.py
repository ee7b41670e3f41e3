from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twistorlines import linalg as la
from twistorlines.errors import BadK, NotComplexStructure, NotCospherical, Proportional
from twistorlines.reps import (
    adapted_nilpotent_basis,
    classify_nilpotent_rep,
    classify_pair,
    conjugate_rep,
    span_signature,
    standard_rep,
    trace_form,
    verify_rep,
)


def M(rows):
    return la.exact(np.array(rows))


def block(a, b, c, d):
    return np.block([[a, b], [c, d]])


def test_standard_quaternionic_rep_block_form():
    rep = standard_rep(-1, 1)
    assert la.allclose(rep.I, M([[0, 0, -1, 0], [0, 0, 0, -1], [1, 0, 0, 0], [0, 1, 0, 0]]))
    i2 = M([[0, -1], [1, 0]])
    z = la.zeros((2, 2))
    assert la.allclose(rep.B, block(i2, z, z, -i2))


def test_standard_split_rep_block_form():
    rep = standard_rep(1, 1)
    one, z = la.eye(2), la.zeros((2, 2))
    assert la.allclose(rep.I, block(z, -one, one, z))
    assert la.allclose(rep.B, block(one, z, z, -one))


def test_standard_nilpotent_rep_block_form():
    rep = standard_rep(0, 1, 1)
    assert la.allclose(rep.I, M([[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]]))
    assert la.allclose(rep.B, M([[0, 0, 1, 0], [0, 0, 0, 1], [0, 0, 0, 0], [0, 0, 0, 0]]))


@pytest.mark.parametrize("eps,n,k", [(-1, 1, None), (1, 2, None), (0, 2, 1), (0, 2, 2), (0, 3, 2)])
def test_standard_reps_verify(eps, n, k):
    rep = standard_rep(eps, n, k)
    assert verify_rep(rep.I, rep.B, eps).ok
    assert rep.dim == 4 * n
    assert la.allclose(rep.K, rep.I @ rep.B)


def test_float_standard_rep_equals_exact():
    assert la.allclose(standard_rep(1, 2, exact_domain=False).B, la.to_float(standard_rep(1, 2).B))


def test_bad_k_rejected():
    with pytest.raises(BadK):
        standard_rep(0, 2, 3)
    with pytest.raises(BadK):
        standard_rep(0, 2)


def test_verify_rep_reports_failures():
    rep = standard_rep(-1, 1)
    r = verify_rep(rep.I, rep.I, -1)
    assert not r.anticommute and not r.ok
    r = verify_rep(rep.I, la.zeros((4, 4)), 0)
    assert r.i_squared and r.anticommute and r.b_squared and not r.faithful


# --- pair classification ---------------------------------------------------


def test_classify_anticommuting_pair():
    rep = standard_rep(-1, 1)
    pc = classify_pair(rep.I, rep.B)
    assert pc.alpha == 0 and pc.epsilon == -1


def test_classify_split_pair():
    rep = standard_rep(1, 1)
    pc = classify_pair(rep.I, Fraction(5, 4) * rep.I + Fraction(3, 4) * rep.B)
    assert pc.alpha == Fraction(-5, 4) and pc.epsilon == 1
    assert pc.c == Fraction(9, 16)
    assert verify_rep(pc.I, pc.B_raw, 1, pc.c).ok


def test_classify_nilpotent_pair():
    rep = standard_rep(0, 1, 1)
    pc = classify_pair(rep.I, rep.I + rep.B)
    assert pc.alpha == -1 and pc.epsilon == 0
    assert la.is_zero(pc.B_raw @ pc.B_raw)
    # the orthogonalized generator is +N itself
    assert la.allclose(pc.B_raw, rep.B)


def test_classify_pair_errors():
    rep = standard_rep(1, 1)
    with pytest.raises(Proportional):
        classify_pair(rep.I, -rep.I)
    with pytest.raises(NotComplexStructure):
        classify_pair(rep.I, rep.B)
    g = M([[1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [2, 0, 0, 1]])
    with pytest.raises(NotCospherical):
        classify_pair(rep.I, g @ rep.I @ la.inverse(g))


@settings(max_examples=25, deadline=None)
@given(st.integers(-6, 6), st.integers(1, 6))
def test_classify_pair_on_circle_points(p, q):
    # (x, y) = ((q^2 + p^2)/(q^2 - p^2), 2pq/(q^2 - p^2)) lies on x^2 - y^2 = 1
    if p * p == q * q:
        return
    d = q * q - p * p
    x, y = Fraction(q * q + p * p, d), Fraction(2 * p * q, d)
    rep = standard_rep(1, 1)
    if y == 0:
        return
    pc = classify_pair(rep.I, x * rep.I + y * rep.B)
    assert pc.epsilon == 1 and pc.alpha == -x


# --- trace form and signature ----------------------------------------------


def test_trace_form_examples():
    rep = standard_rep(1, 1)
    assert trace_form(rep.I, rep.I) == 1
    assert trace_form(rep.I, rep.B) == 0
    assert trace_form(rep.B, rep.B) == -1
    q = standard_rep(-1, 1)
    assert trace_form(q.I, q.B) == 0


def test_signatures():
    assert span_signature(standard_rep(-1, 1)) == (0, 3, 0)
    assert span_signature(standard_rep(1, 1)) == (2, 1, 0)
    assert span_signature(standard_rep(0, 2, 1)) == (0, 1, 2)


# --- nilpotent classification ----------------------------------------------


def test_classify_nilpotent_standard():
    assert classify_nilpotent_rep(*standard_rep(0, 2, 1).generators()) == 1
    assert classify_nilpotent_rep(*standard_rep(0, 2, 2).generators()) == 2


def random_invertible(rng, m):
    while True:
        g = la.exact(rng.integers(-3, 4, size=(m, m)))
        if la.rank(g) == m:
            return g


def test_classify_conjugated_rep():
    rng = np.random.default_rng(3)
    rep = conjugate_rep(random_invertible(rng, 12), standard_rep(0, 3, 2))
    assert classify_nilpotent_rep(rep.I, rep.B) == 2


def test_adapted_basis_on_standard_rep():
    std = standard_rep(0, 2, 1)
    h = adapted_nilpotent_basis(std.I, std.B)
    hi = la.inverse(h)
    assert la.allclose(hi @ std.I @ h, std.I) and la.allclose(hi @ std.B @ h, std.B)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([(1, 1), (2, 1), (2, 2)]))
def test_adapted_basis_round_trip(seed, nk):
    n, k = nk
    std = standard_rep(0, n, k)
    rep = conjugate_rep(random_invertible(np.random.default_rng(seed), 4 * n), std)
    h = adapted_nilpotent_basis(rep.I, rep.B)
    hi = la.inverse(h)
    assert la.allclose(hi @ rep.I @ h, std.I) and la.allclose(hi @ rep.B @ h, std.B)


# --- conjugation -----------------------------------------------------------


def test_conjugation_by_scalars_is_trivial():
    rep = standard_rep(1, 1)
    for g in (la.eye(4), 2 * la.eye(4)):
        c = conjugate_rep(g, rep)
        assert la.allclose(c.I, rep.I) and la.allclose(c.B, rep.B)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([-1, 1]))
def test_conjugation_preserves_relations_and_signature(seed, eps):
    rep = standard_rep(eps, 1)
    c = conjugate_rep(random_invertible(np.random.default_rng(seed), 4), rep)
    assert verify_rep(c.I, c.B, eps).ok
    assert span_signature(c) == span_signature(rep)
