import math

import numpy as np
import pytest
from hypothesis import given

from conftest import dims, nonzero_quaternions, seeds
from qhyp import spgroup as sp
from qhyp.errors import ADZero, DegenerateConfiguration
from qhyp.hspace import classify_point, infinity, origin, rescale
from qhyp.xratio import Inequality, abs_cross_ratio, cross_ratio, lemma23_triple, lemma24_check


def boundary_point(rng, n):
    """Random null vector."""
    z = np.zeros((n + 1, 4))
    z[: n - 1] = rng.normal(size=(n - 1, 4))
    z[n - 1, 0] = 1.0
    z[n, 0] = float(np.sum(z[: n - 1] ** 2)) / 2
    z[n, 1:] = rng.normal(size=3)
    return classify_point(z)


def images(h):
    n = h.n
    return h.act(infinity(n)), h.act(origin(n))


def test_swap_examples():
    h = sp.swap(2)
    hinf, ho = images(h)
    assert abs_cross_ratio(hinf, origin(2), infinity(2), ho) == pytest.approx(1.0)
    assert lemma23_triple(h) == (1.0, 0.0, None)
    with pytest.raises(ADZero):
        lemma23_triple(h).require_ratio()


def test_diagonal_example():
    h = sp.loxodromic_diagonal(2, 0.8, 0.3, [1.1])
    hinf, ho = images(h)
    assert abs_cross_ratio(hinf, infinity(2), origin(2), ho) == pytest.approx(1.0, rel=1e-14)


def test_identity_triple():
    assert lemma23_triple(sp.identity(3)) == (0.0, 1.0, 0.0)


@given(seeds, dims)
def test_lemma23_matches_cross_ratios(seed, n):
    h = sp.random_sp(n, np.random.default_rng(seed))
    hinf, ho = images(h)
    o, inf = origin(n), infinity(n)
    bc, ad, ratio = lemma23_triple(h)
    assert abs_cross_ratio(hinf, o, inf, ho) == pytest.approx(bc, rel=1e-10)
    assert abs_cross_ratio(hinf, inf, o, ho) == pytest.approx(ad, rel=1e-10)
    assert abs_cross_ratio(inf, o, hinf, ho) == pytest.approx(ratio, rel=1e-10)


def test_value_formula(rng):
    pts = [boundary_point(rng, 2) for _ in range(4)]
    cr = cross_ratio(*pts)
    assert cr.abs == pytest.approx(abs(cr.value), rel=1e-12)


@given(seeds, nonzero_quaternions(), nonzero_quaternions(), nonzero_quaternions(), nonzero_quaternions())
def test_lift_independence(seed, l1, l2, l3, l4):
    r = np.random.default_rng(seed)
    pts = [boundary_point(r, 3) for _ in range(4)]
    base = abs_cross_ratio(*pts)
    moved = abs_cross_ratio(*(rescale(p, lam) for p, lam in zip(pts, (l1, l2, l3, l4))))
    assert moved == pytest.approx(base, rel=1e-10)


@given(seeds, nonzero_quaternions())
def test_value_conjugated_by_rescaling_z1(seed, lam):
    r = np.random.default_rng(seed)
    pts = [boundary_point(r, 2) for _ in range(4)]
    v0 = cross_ratio(*pts).value
    v1 = cross_ratio(rescale(pts[0], lam), *pts[1:]).value
    assert v1.w == pytest.approx(v0.w, abs=1e-9 * max(1, abs(v0)))
    assert abs(v1) == pytest.approx(abs(v0), rel=1e-10)


def test_degenerate_configuration():
    o, inf = origin(2), infinity(2)
    with pytest.raises(DegenerateConfiguration):
        cross_ratio(o, o, o, inf)


def test_lemma24_examples():
    rep = lemma24_check(sp.identity(2))
    assert rep.all_hold
    assert [i.lhs for i in rep] == [0.0, 0.0, 1.0, 0.0, 1.0]
    assert [i.rhs for i in rep] == [0.0, 0.0, 1.0, 2.0, 1.0]
    swap = lemma24_check(sp.swap(2))
    assert swap.all_hold
    assert swap.inequalities[3].margin == 0.0


@given(seeds, dims)
def test_lemma24_random(seed, n):
    rep = lemma24_check(sp.random_sp(n, np.random.default_rng(seed)))
    assert rep.all_hold, [(i.name, i.margin) for i in rep]


def test_inequality_slack_is_relative():
    assert Inequality("x", 1e7 * (1 + 1e-12), 1e7).holds
    assert not Inequality("x", 1.0 + 1e-6, 1.0).holds
    assert math.isclose(Inequality("x", 1.0, 3.0).margin, 2.0)
