import math

import numpy as np
import pytest
from hypothesis import given

from conftest import contraction_pair, dims, seeds
from qhyp import jorgensen as jg
from qhyp import spgroup as sp
from qhyp.errors import InsufficientIterations, MgTooLarge, NotDiagonalPosition, NotLoxodromic
from qhyp.quaternion import qabs
from qhyp.xratio import lemma24_check

G_SMALL = sp.loxodromic_diagonal(2, 1e-3)  # M_g = 2 sinh(1/2000)


def test_swap_triggers_theorem():
    rep = jg.test_theorem11(G_SMALL, sp.swap(2))
    assert rep.lhs == 0.0
    assert rep.rhs == pytest.approx((1 - rep.mg) / rep.mg**2)
    assert rep.rhs == pytest.approx(9.99e5, rel=1e-3)
    assert rep.triggered
    assert rep.conclusion is jg.Conclusion.ElementaryOrNonDiscrete


def test_translation_triggers_theorem():
    h = sp.translation(2, [[0.4, 0.1, 0, 0]], [0, 0.3, 0, 0])
    assert float(qabs(h.scalar_blocks()[2])) == 0.0  # c = 0
    rep = jg.test_theorem11(G_SMALL, h)
    assert rep.lhs == 0.0 and rep.triggered


def test_rhs_arithmetic():
    l = 2 * math.asinh(0.25)  # M_g = 0.5
    rep = jg.test_theorem11(sp.loxodromic_diagonal(2, l), sp.random_sp(2, np.random.default_rng(0)))
    assert rep.mg == pytest.approx(0.5, rel=1e-14)
    assert rep.rhs == pytest.approx(2.0, rel=1e-13)


@pytest.mark.parametrize("mg, expected", [(0.4, True), (0.6, False)])
def test_identity_h_condition_b(mg, expected):
    g = sp.loxodromic_diagonal(2, 2 * math.asinh(mg / 2))
    rep = jg.test_corollary12(g, sp.identity(2), "b")
    assert rep.lhs == pytest.approx(1.0)
    assert rep.triggered is expected


@pytest.mark.parametrize("mg, expected", [(0.4, True), (0.6, False)])
def test_swap_h_condition_a(mg, expected):
    g = sp.loxodromic_diagonal(2, 2 * math.asinh(mg / 2))
    rep = jg.test_corollary12(g, sp.swap(2), jg.Condition.CondA)
    assert rep.lhs == pytest.approx(1.0)
    assert rep.triggered is expected


def test_condition_parsing():
    assert jg.Condition.parse("4") is jg.Condition.CondA
    assert jg.Condition.parse("CondD") is jg.Condition.CondD
    assert jg.Condition.parse("thm11") is jg.Condition.Thm11
    with pytest.raises(ValueError):
        jg.Condition.parse("z")


def test_errors():
    with pytest.raises(MgTooLarge):
        jg.test_theorem11(sp.loxodromic_diagonal(2, 2.0), sp.swap(2))
    with pytest.raises(NotLoxodromic):
        jg.test_theorem11(sp.diagonal([complex(0, 1)] * 3), sp.swap(2))


@given(seeds, dims)
def test_corollary_implies_theorem(seed, n):
    r = np.random.default_rng(seed)
    g, _, _ = sp.random_loxodromic(n, r, l_range=(0.01, 0.3))
    if sp.loxodromic_data(g).mg >= 1:
        return
    h = sp.random_sp(n, r, factors=1, scale=r.uniform(0.05, 0.8))
    thm = jg.test_theorem11(g, h)
    for cond in ("a", "b", "c", "d"):
        if jg.test_corollary12(g, h, cond).triggered:
            assert thm.triggered


# iteration


def test_commuting_h_is_elementary_branch():
    g, _ = contraction_pair()
    tr = jg.iterate(g, sp.loxodromic_diagonal(2, 0.3, 0.2, [0.1]), 5)
    assert tr.verdict is jg.Verdict.ElementaryBranch
    assert len(tr.steps) == 1
    assert tr.steps[0].vanished == "bc"


def test_contraction_instance():
    g, h = contraction_pair()
    rep = jg.test_theorem11(g, h)
    assert rep.triggered
    tr = jg.iterate(g, h, 20)
    assert tr.verdict is jg.Verdict.ContractionToElementaryOrNonDiscrete
    M = tr.mg
    # first display after the contraction law
    assert math.sqrt(tr.steps[1].bc) < (1 - M) / M
    for s in tr.steps[1:]:
        assert s.iteration_ok and s.bound_ok
        assert s.recursion_residual < 1e-8
    assert tr.steps[-1].bc < 1e-20
    for m in tr.matrices:
        assert lemma24_check(m).all_hold


def test_frozen_trace_values():
    g, h = contraction_pair()
    tr = jg.iterate(g, h, 4)
    frozen = [6.711723181307464e-04, 1.6780692172031078e-06, 4.195171120234445e-09,
              1.0487927802894882e-11, 2.6219819507233415e-14]
    np.testing.assert_allclose([s.bc for s in tr.steps], frozen, rtol=1e-9)


def test_large_h_diverges():
    g = sp.loxodromic_diagonal(2, 2 * math.asinh(0.35))  # M_g = 0.7
    h = (sp.translation(2, [[2, 0, 0, 0]], [0, 2, 0, 0]) @ sp.swap(2)
         @ sp.translation(2, [[2, 0.3, 0, 0]], [0, 0, 2, 0]))
    assert not jg.test_theorem11(g, h).triggered
    tr = jg.iterate(g, h, 20)
    assert tr.verdict is jg.Verdict.DivergedOrInconclusive
    assert tr.steps[-1].bc > 1e10
    assert len(tr.steps) < 21


def test_not_diagonal_position(rng):
    g, _, _ = sp.random_loxodromic(2, rng)
    with pytest.raises(NotDiagonalPosition):
        jg.iterate(g, sp.swap(2))
    tr = jg.iterate(g, sp.random_sp(2, rng), 3, conjugator="auto")
    assert tr.conjugator is not None


def test_auto_conjugation_matches_diagonal(rng):
    g, h = contraction_pair()
    k = sp.random_sp(2, rng, factors=0, scale=0.3)
    ki = sp.inverse(k)
    direct = jg.iterate(g, h, 6)
    moved = jg.iterate(k @ g @ ki, k @ h @ ki, 6, conjugator="auto")
    np.testing.assert_allclose([s.bc for s in moved.steps], [s.bc for s in direct.steps], rtol=1e-5)


def test_compact_witness():
    g, h = contraction_pair()
    tr = jg.iterate(g, h, 20)
    np.testing.assert_array_equal(jg.compact_witness(tr, 0).entries, h.entries)
    lam = math.exp(sp.loxodromic_data(g).length / 2)
    offdiag, middle = [], []
    for k in range(11):
        a, b, _, _ = jg.compact_witness(tr, k).scalar_blocks()
        offdiag.append(float(qabs(b)))
        middle.append(float(qabs(a)))
    assert all(x > y for x, y in zip(offdiag, offdiag[1:]))
    gaps = [abs(m - lam) for m in middle]
    assert gaps[-1] < 1e-12
    # gaps shrink until they reach the rounding floor of |a|
    assert all(y <= max(x, 1e-15) for x, y in zip(gaps, gaps[1:]))
    with pytest.raises(InsufficientIterations):
        jg.compact_witness(tr, 11)


def test_trace_json():
    g, h = contraction_pair()
    data = jg.iterate(g, h, 3).to_json()
    assert data["verdict"] == "ContractionToElementaryOrNonDiscrete"
    assert [s["k"] for s in data["steps"]] == [0, 1, 2, 3]
