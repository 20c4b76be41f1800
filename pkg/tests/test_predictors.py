import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from netpredict.network import StrengthDistribution
from netpredict.predictors import (
    a_grid,
    combine,
    grid_search_a,
    kld,
    kld_series,
    moments,
    prior_average,
    rs_series,
    strength_metrics,
)
from netpredict.regression import polyfit
from oracles import moments_textbook

hist = arrays(float, 8, elements=st.floats(0, 1)).filter(lambda h: h.sum() > 0).map(lambda h: h / h.sum())


def test_kld_two_bin_example():
    assert kld([0.5, 0.5], [0.25, 0.75]) == pytest.approx(0.5 * math.log(2) + 0.5 * math.log(2 / 3), abs=1e-6)
    assert kld([0.5, 0.5], [0.25, 0.75]) == pytest.approx(0.1438, abs=1e-4)


def test_kld_asymmetric():
    assert kld([0.5, 0.5], [0.25, 0.75]) != pytest.approx(kld([0.25, 0.75], [0.5, 0.5]))


def test_kld_disjoint_support_is_finite_and_large():
    v = kld([1, 0], [0, 1])
    assert math.isfinite(v) and v > 20


def test_kld_grid_mismatch():
    with pytest.raises(ValueError):
        kld([1, 0], [0.5, 0.25, 0.25])


@settings(max_examples=100, deadline=None)
@given(hist, hist)
def test_kld_gibbs(p, q):
    assert abs(kld(p, p)) <= 1e-12
    assert kld(p, q) >= 0


def test_prior_average():
    np.testing.assert_allclose(prior_average([[1, 0], [0, 1]]), [0.5, 0.5])


def test_kld_series_definedness():
    hs = [np.array([0.5, 0.5])] * 10
    s3 = kld_series(hs, 3)
    assert s3.name == "KLD-3"
    assert np.isnan(s3.values[:3]).all() and np.all(s3.values[3:] == 0)
    sall = kld_series(hs, "All")
    assert sall.name == "KLD-All"
    assert np.isnan(sall.values[0]) and not np.isnan(sall.values[1:]).any()


def test_kld_series_spike():
    base = np.array([0.9, 0.1, 0.0])
    hs = [base] * 8 + [np.array([0.0, 0.1, 0.9])]
    v = kld_series(hs, 3).values
    assert v[-1] > 1 and np.all(v[3:-1] == 0)


def test_rs_constant_and_doubling():
    v = rs_series([2.0] * 5 + [4.0], 3).values
    assert np.all(v[3:5] == 1.0)
    assert v[5] == 2.0
    assert rs_series([1.0, 2.0, 3.0], "All").values[2] == pytest.approx(2.0)


def test_rs_zero_prior():
    with pytest.raises(ValueError):
        rs_series([0.0, 0.0, 0.0, 1.0], 3)


@settings(max_examples=30, deadline=None)
@given(arrays(float, 20, elements=st.floats(0.5, 50)), st.floats(0.01, 100))
def test_rs_scale_invariant(ad, c):
    for s in (3, 6, 9, 13, "All"):
        a = rs_series(ad, s).values
        b = rs_series(ad * c, s).values
        np.testing.assert_allclose(b, a, rtol=1e-12, atol=0)


def test_moments_example():
    mean, var, skew, kurt = moments([1, 2, 3, 4])
    assert (mean, var, skew) == (2.5, pytest.approx(5 / 3), 0.0)
    assert kurt == pytest.approx(1.64)


def test_moments_constant():
    mean, var, skew, kurt = moments([3, 3, 3])
    assert var == 0 and math.isnan(skew) and math.isnan(kurt)


@settings(max_examples=50, deadline=None)
@given(arrays(float, st.integers(3, 40), elements=st.floats(0, 1000)).filter(lambda x: np.ptp(x) > 1e-3))
def test_moments_oracle(x):
    np.testing.assert_allclose(moments(x), moments_textbook(list(x)), rtol=1e-9, atol=1e-9)


def test_strength_metrics_names_and_constant_network():
    grid = np.arange(0, 30, 10.0)
    dists = [StrengthDistribution(i + 1, np.full(5, 12.0), np.array([0, 1.0]), grid) for i in range(20)]
    ms = {m.name: m.values for m in strength_metrics(dists)}
    assert list(ms)[:10] == [f"{k}-{s}" for k in ("KLD", "RS") for s in (3, 6, 9, 13, "All")]
    for s in (3, 6, 9, 13, "All"):
        v = ms[f"RS-{s}"]
        np.testing.assert_allclose(v[~np.isnan(v)], 1.0, atol=1e-12)
    assert np.all(ms["mean"] == 12.0)


def test_combine_endpoints():
    A, B = np.array([1.0, 2.0]), np.array([5.0, 7.0])
    np.testing.assert_array_equal(combine(0.0, A, B), B)
    np.testing.assert_array_equal(combine(1.0, A, B), A)
    with pytest.raises(ValueError):
        combine(1.5, A, B)


def test_a_grid():
    g = a_grid(0.001)
    assert len(g) == 1001 and g[0] == 0.0 and g[-1] == 1.0


def _mixture(seed=0, n=80):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=n)
    B = rng.normal(size=n)
    return A, B, 0.3 * A + 0.7 * B


def test_grid_search_recovers_mixture():
    A, B, y = _mixture()
    a, r2, best = grid_search_a(A, B, y, step=0.001)
    assert abs(a - 0.3) <= 0.001
    assert r2 == pytest.approx(1.0, abs=1e-10)
    assert best.a == a


def test_grid_search_is_exhaustive():
    rng = np.random.default_rng(4)
    A, B = rng.normal(size=50), rng.normal(size=50)
    y = (0.6 * A + 0.4 * B) ** 2 + rng.normal(scale=0.3, size=50)
    a, r2, _ = grid_search_a(A, B, y, degree=2, step=0.01)
    scan = [polyfit(combine(g, A, B), y, 2).r2 for g in a_grid(0.01)]
    assert r2 == max(scan)
    assert a == a_grid(0.01)[int(np.argmax(scan))]


def test_grid_search_ties_take_smaller_a():
    A = np.arange(10.0)
    a, _, _ = grid_search_a(A, A, A ** 2, degree=2, step=0.1)
    assert a == 0.0
