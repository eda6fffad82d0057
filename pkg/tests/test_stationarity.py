import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tailrisk.stationarity import (
    adf_test,
    default_max_lag,
    pp_bandwidth,
    pp_test,
    rho_critical_value,
    select_lags_aic,
    tau_critical_value,
)


def _ar1(phi, n, seed):
    e = np.random.default_rng(seed).standard_normal(n)
    y = np.empty(n)
    y[0] = e[0]
    for t in range(1, n):
        y[t] = phi * y[t - 1] + e[t]
    return y


def test_adf_matches_statsmodels():
    from statsmodels.tsa.stattools import adfuller

    for seed in range(5):
        y = np.cumsum(np.random.default_rng(seed).standard_normal(600))
        ours = adf_test(y)
        ref = adfuller(y, regression="c", autolag="AIC")
        assert ours.statistic == pytest.approx(ref[0], rel=1e-8)
        assert ours.lags_or_bandwidth == ref[2]
        assert ours.critical_value_5pct == pytest.approx(ref[4]["5%"], abs=1e-3)


def test_reject_flag_is_left_tail():
    res = adf_test(np.random.default_rng(1).standard_normal(500))
    assert res.reject_5pct == (res.statistic < res.critical_value_5pct)


def test_defaults():
    assert default_max_lag(2000) == 25
    assert pp_bandwidth(2000) == 7
    assert tau_critical_value(10**6, "c") == pytest.approx(-2.8621, abs=1e-3)
    assert rho_critical_value(10**6, "c") == pytest.approx(-14.1, abs=1e-3)


def test_white_noise_zrho_order_n():
    x = np.random.default_rng(4).standard_normal(2348)
    z = pp_test(x, "PP_Zrho")
    # n (rho_hat - 1) with rho_hat near 0
    assert -1.2 * 2348 < z.statistic < -0.8 * 2348
    assert z.reject_5pct


def test_pp_random_walk_non_rejection_rate():
    keep = 0
    for seed in range(500):
        y = np.cumsum(np.random.default_rng(seed).standard_normal(2000))
        keep += not pp_test(y, "PP_Zrho").reject_5pct
    assert keep / 500 >= 0.91


def test_lag_selection_modes():
    picks = [select_lags_aic(np.random.default_rng(s).standard_normal(800), 8) for s in range(40)]
    assert np.bincount(picks).argmax() == 0
    picks = []
    for s in range(40):
        e = np.random.default_rng(s).standard_normal(800)
        d = np.zeros(800)
        for t in range(2, 800):
            d[t] = 0.5 * d[t - 1] - 0.3 * d[t - 2] + e[t]
        picks.append(select_lags_aic(np.cumsum(d), 8))
    assert np.bincount(picks).argmax() >= 1
    assert select_lags_aic(np.arange(50.0) ** 0.5, 0) == 0


@settings(max_examples=25, deadline=None)
@given(st.floats(0.01, 1e4), st.floats(-1e3, 1e3), st.integers(0, 10**6))
def test_adf_affine_invariance(scale, shift, seed):
    y = np.cumsum(np.random.default_rng(seed).standard_normal(300))
    a = adf_test(y)
    b = adf_test(scale * y + shift)
    assert b.lags_or_bandwidth == a.lags_or_bandwidth
    assert b.statistic == pytest.approx(a.statistic, abs=1e-8)


@pytest.mark.parametrize("phi", [1.0, 0.99])
def test_zt_close_to_adf_near_unit_root(phi):
    diffs = []
    for seed in range(10):
        y = _ar1(phi, 5000, seed)
        diffs.append(abs(pp_test(y, "PP_Zt").statistic - adf_test(y).statistic))
    assert np.median(diffs) < 0.3


def test_errors():
    with pytest.raises(ValueError):
        pp_test(np.arange(20.0), "PP_Zt")
    with pytest.raises(ValueError):
        pp_test(np.random.default_rng(0).standard_normal(100), "bogus")
    with pytest.raises(ValueError):
        adf_test(np.arange(10.0), spec="nc")
