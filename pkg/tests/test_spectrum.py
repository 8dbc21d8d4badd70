import csv
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import seeds
from qhyp import spectrum as S
from qhyp import spgroup as sp
from qhyp.collars import MG_LIMIT
from qhyp.errors import BelowThreshold, ConditionFailed

EX51 = S.AngleProfile((math.pi / 4,), math.pi / 3, 1e-3)


def naive_mgk(p, k):
    ch = math.cosh(k * p.length / 2)
    rot = max((2 * math.sqrt(2 * (1 - math.cos(k * b))) for b in p.angles), default=0.0)
    return 2 * math.sqrt((ch + 1) * (ch - math.cos(k * p.beta_n))) + rot


def test_profile_validation():
    with pytest.raises(ValueError):
        S.AngleProfile((), 0.1, 0.0)
    with pytest.raises(ValueError):
        S.AngleProfile((float("nan"),), 0.1, 1.0)
    assert EX51.n == 2


def test_profile_json():
    assert S.AngleProfile.from_json(EX51.to_json()) == EX51
    alt = S.AngleProfile.from_json({"angles": [0.7], "beta_n": 0.2, "length": 0.5})
    assert alt.length == 0.5


def test_mgk_examples():
    assert S.mgk(EX51, 24) == pytest.approx(2 * math.sinh(0.012), rel=1e-14)
    assert S.mgk(EX51, 1) == pytest.approx(naive_mgk(EX51, 1), rel=1e-12)
    with pytest.raises(ValueError):
        S.mgk(EX51, 0)


def test_mgk_without_rotation_angles():
    p = S.AngleProfile((), 0.0, 0.2)
    assert S.mgk(p, 3) == pytest.approx(2 * math.sinh(0.3), rel=1e-14)


@given(st.floats(0.05, 2.0), st.floats(0, math.pi), st.floats(0, math.pi), st.integers(1, 40))
def test_mgk_matches_naive_when_well_conditioned(l, b1, bn, k):
    p = S.AngleProfile((b1,), bn, l)
    # sqrt(1 - cos x) in the naive form is only good to about sqrt(eps) near x = 0
    assert S.mgk(p, k) == pytest.approx(naive_mgk(p, k), rel=1e-9, abs=1e-7)


def test_mgk_small_length_keeps_digits():
    p = S.AngleProfile((), 0.0, 1e-9)
    # the naive (ch + 1)(ch - 1) product loses every digit here
    assert S.mgk(p, 1) == pytest.approx(2 * math.sinh(5e-10), rel=1e-12)


@given(seeds, st.integers(2, 3))
def test_mgk_matches_matrix_powers(seed, n):
    r = np.random.default_rng(seed)
    g, _, _ = sp.random_loxodromic(n, r, l_range=(0.01, 0.2), conjugate=False)
    prof = S.AngleProfile.from_loxodromic(sp.loxodromic_data(g))
    for k in (1, 2, 7, 30):
        direct = sp.loxodromic_data(sp.power(g, k)).mg
        assert S.mgk(prof, k) == pytest.approx(direct, abs=1e-9)


# minimisation


def test_example_argmin():
    res = S.minimize_T(EX51)
    assert res.argmin_k == 24
    assert res.T == pytest.approx(0.024000576004148687, rel=1e-12)
    assert res.to_json() == {"argmin_k": 24, "T": res.T, "scanned": res.ks.size}


@given(st.floats(0.001, 0.5), st.floats(0, math.pi), st.floats(0, math.pi))
def test_minimize_matches_brute_force(l, b1, bn):
    p = S.AngleProfile((b1,), bn, l)
    res = S.minimize_T(p, 3000)
    ks = np.arange(1, 3001)
    vals = S.mgk_array(p, ks)
    assert res.T == pytest.approx(float(vals.min()), rel=1e-15)
    assert res.argmin_k == int(ks[np.argmin(vals)])


def test_minimize_prunes():
    p = S.AngleProfile((), 0.0, 1.0)
    res = S.minimize_T(p)
    assert res.argmin_k == 1
    assert res.ks.size == S.CHUNK


def test_minimize_rejects_bad_kmax():
    with pytest.raises(ValueError):
        S.minimize_T(EX51, 0)


def test_half_turn_skips_odd_powers():
    p = S.AngleProfile((), math.pi, 1e-6)
    res = S.minimize_T(p, 10)
    assert res.argmin_k == 2


# pigeonhole and the angle-free bound


def test_pigeonhole_examples():
    assert S.pigeonhole_k([math.pi / 4], 8) == 1
    assert S.pigeonhole_k([0.1, 2.0], 6) == 3
    assert S.pigeonhole_k([1.0], 2) == 1
    with pytest.raises(ValueError):
        S.pigeonhole_k([1.0], 1)


@given(st.lists(st.floats(0, 2 * math.pi), min_size=1, max_size=3), st.integers(2, 6))
def test_pigeonhole_certificate(angles, N):
    k = S.pigeonhole_k(angles, N)
    assert 1 <= k <= N ** len(angles)
    c = math.cos(2 * math.pi / N)
    assert all(math.cos(k * b) >= c - 1e-12 for b in angles)
    for j in range(1, k):
        assert not all(math.cos(j * b) >= c - 1e-12 for b in angles)


@given(st.floats(1e-5, 1e-2), st.floats(0, math.pi), st.floats(0, math.pi), st.integers(2, 6))
def test_aligned_power_beats_rn(l, b1, bn, N):
    p = S.AngleProfile((b1,), bn, l)
    k = S.pigeonhole_k([b1, bn], N)
    assert S.mgk(p, k) <= S.r_n_bound(l, N, 2) * (1 + 1e-12)
    assert S.minimize_T(p, N**2).T <= S.r_n_bound(l, N, 2) * (1 + 1e-12)


def test_rn_examples():
    assert S.r_n_bound(1e-4, 10, 2) == pytest.approx(2.4721802681125524, rel=1e-12)
    assert S.h(10, 1e-4, 2) == S.r_n_bound(1e-4, 10, 2)
    with pytest.raises(ValueError):
        S.r_n_bound(1e-4, 1, 2)


# the l(x) curve


def test_threshold():
    assert S.X0 == pytest.approx(34.28393620892513, rel=1e-14)
    # at x0 a zero length already uses the whole budget
    c = math.cos(2 * math.pi / S.X0)
    assert 4 * math.sqrt(2 * (1 - c)) == pytest.approx(MG_LIMIT, rel=1e-14)
    assert S.h(S.X0, 0.0, 2) == pytest.approx(MG_LIMIT, rel=1e-14)
    assert S.l_of_x(S.X0) == pytest.approx(0.0, abs=1e-7)
    with pytest.raises(BelowThreshold):
        S.l_of_x(34.0)


@given(st.floats(S.X0 + 0.01, 500), st.integers(1, 3))
def test_l_of_x_solves_h(x, n):
    l = S.l_of_x(x, n)
    assert l > 0
    assert S.h(x, l, n) == pytest.approx(MG_LIMIT, rel=1e-9)


def test_l_of_x_examples():
    assert S.l_of_x(43) == pytest.approx(0.00017681348430053544, rel=1e-12)
    ints = range(35, 101)
    assert max(ints, key=S.l_of_x) == 43


def test_curve_samples():
    rows = S.curve_samples(2, 35.0, 36.0, 0.25)
    assert [x for x, _ in rows] == [35.0, 35.25, 35.5, 35.75, 36.0]
    with pytest.raises(BelowThreshold):
        S.curve_samples(2, 30.0, 40.0, 1.0)
    with pytest.raises(ValueError):
        S.curve_samples(2, 35.0, 40.0, 0.0)


def test_length_only_collar():
    c = S.length_only_collar(1e-5, 2, 43)
    assert c.mg == pytest.approx(S.r_n_bound(1e-5, 43, 2))
    assert c.r > 0
    with pytest.raises(ConditionFailed):
        S.length_only_collar(1e-2, 2, 43)
    with pytest.raises(ConditionFailed):
        S.length_only_collar(1e-9, 2, 20)


# csv


def test_curve_csv_round_trip(tmp_path):
    rows = S.curve_samples(2, 40.0, 42.0, 0.5)
    path = tmp_path / "curve.csv"
    S.write_curve_csv(path, rows)
    with open(path, newline="") as fh:
        data = list(csv.reader(fh))
    assert data[0] == ["x", "l"]
    assert [(float(a), float(b)) for a, b in data[1:]] == rows


def test_spectrum_csv_round_trip(tmp_path):
    res = S.minimize_T(EX51, 50)
    path = tmp_path / "powers.csv"
    S.write_spectrum_csv(path, res)
    with open(path, newline="") as fh:
        data = list(csv.reader(fh))
    assert data[0] == ["k", "Mgk"]
    assert len(data) == 51
    assert [(int(a), float(b)) for a, b in data[1:]] == res.samples
