import math

import numpy as np
import pytest
from scipy import stats

from tailrisk.evd import (
    FAMILIES,
    DistSpec,
    GevParams,
    cdf,
    classify_domain,
    evd_cdf,
    gev_cdf,
    gnedenko_ratio,
    max_stability_check,
    sample,
    transform_uniform,
)
from tailrisk.tails import estimate_tail

SPECS = [
    DistSpec("normal"),
    DistSpec("lognormal", {"sigma": 0.5}),
    DistSpec("exponential", {"scale": 2.0}),
    DistSpec("uniform"),
    DistSpec("cauchy"),
    DistSpec("student_t", {"dof": 3}),
    DistSpec("pareto", {"alpha": 3}),
    DistSpec("frechet", {"alpha": 2}),
]


def test_gev_values():
    assert gev_cdf(0.0, 0.0) == pytest.approx(math.exp(-1), abs=1e-15)
    assert gev_cdf(GevParams(1.0), 0.0) == pytest.approx(math.exp(-1), abs=1e-15)
    assert abs(gev_cdf(1e-8, 2.0) - gev_cdf(0.0, 2.0)) < 1e-7
    # outside the support
    assert gev_cdf(0.5, -3.0) == 0.0
    assert gev_cdf(-0.5, 3.0) == 1.0


def test_gev_matches_frechet_after_reparameterization():
    r = np.linspace(-0.9, 20, 1000)
    for alpha in (0.5, 1.0, 3.0):
        g = 1 / alpha
        np.testing.assert_allclose(gev_cdf(g, r), evd_cdf("frechet", alpha, 1 + g * r), atol=1e-12, rtol=0)


def test_evd_cdf_values():
    for alpha in (0.5, 1.0, 4.0):
        assert evd_cdf("frechet", alpha, 1.0) == pytest.approx(math.exp(-1))
        assert evd_cdf("frechet", alpha, 0.0) == 0.0
        assert evd_cdf("frechet", alpha, -2.0) == 0.0
        assert evd_cdf("weibull", alpha, 0.5) == 1.0
    assert evd_cdf("gumbel", 0, 0.0) == pytest.approx(math.exp(-1))
    with pytest.raises(ValueError):
        evd_cdf("frechet", -1.0, 1.0)
    with pytest.raises(ValueError):
        evd_cdf("pareto", 1.0, 1.0)


def test_classify_domain():
    assert classify_domain(0.33) == "frechet"
    assert classify_domain(0.0) == "gumbel"
    assert classify_domain(-0.5) == "weibull"
    assert GevParams(0.2).family == "frechet"


@pytest.mark.parametrize("family", ["gumbel", "frechet", "weibull"])
def test_cdfs_monotone_with_limits(family):
    r = np.linspace(-50, 50, 1000)
    f = evd_cdf(family, 2.0, r)
    assert np.all(np.diff(f) >= 0)
    assert f[0] == pytest.approx(0.0, abs=1e-12) and f[-1] == pytest.approx(1.0, abs=1e-3)
    g = gev_cdf({"gumbel": 0.0, "frechet": 0.5, "weibull": -0.5}[family], r)
    assert np.all(np.diff(g) >= 0)


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: s.family)
def test_reference_cdfs_monotone(spec):
    x = np.linspace(-20, 60, 1000)
    f = cdf(spec, x)
    assert np.all(np.diff(f) >= 0) and f.min() >= 0 and f.max() <= 1


def test_distspec_validation():
    assert set(FAMILIES) == {s.family for s in SPECS}
    with pytest.raises(ValueError, match="required"):
        DistSpec("pareto")
    with pytest.raises(ValueError, match="positive"):
        DistSpec("student_t", {"dof": 0})
    with pytest.raises(ValueError, match="unknown"):
        DistSpec("levy")
    with pytest.raises(ValueError, match="unknown parameter"):
        DistSpec("normal", {"alpha": 2})
    assert DistSpec.parse("pareto", "alpha=3", "scale=2").params == {"alpha": 3.0, "scale": 2.0}


def test_pareto_u_grid_tail():
    n = 10**6
    u = (np.arange(1, n + 1) - 0.5) / n
    x = transform_uniform(DistSpec("pareto", {"alpha": 2}), u)
    assert np.mean(x > 10) == pytest.approx(0.01, rel=0.005)


def test_uniform_support_and_determinism():
    u = sample(DistSpec("uniform"), 10_000, 5)
    assert u.min() >= 0 and u.max() <= 1
    for spec in SPECS:
        np.testing.assert_array_equal(sample(spec, 100, 42), sample(spec, 100, 42))
    with pytest.raises(ValueError):
        sample(SPECS[0], 0, 1)


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: s.family)
def test_samplers_fit_own_cdf(spec):
    passes = sum(
        stats.kstest(sample(spec, 1000, seed), lambda v: cdf(spec, v)).pvalue >= 0.05 for seed in range(40)
    )
    assert passes >= 36


def test_gnedenko_ratios():
    for t in (1.5, 10.0, 1e3):
        assert gnedenko_ratio(DistSpec("pareto", {"alpha": 3}), t, 2.0) == 0.125
    t3 = DistSpec("student_t", {"dof": 3})
    seq = [gnedenko_ratio(t3, t, 2.0) for t in (10, 50, 100)]
    gaps = [abs(v - 0.125) for v in seq]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 1e-4
    assert gnedenko_ratio(DistSpec("normal"), 10.0, 2.0) < 1e-10


def test_max_stability():
    frechet = DistSpec("frechet", {"alpha": 1})
    passes = sum(max_stability_check(frechet, 100, 5000, seed).passed for seed in range(20))
    assert passes >= 18
    pareto = [max_stability_check(DistSpec("pareto", {"alpha": 2}), 1000, 2000, seed).passed for seed in range(5)]
    assert sum(pareto) >= 3
    rep = max_stability_check(DistSpec("frechet", {"alpha": 1.5}), 1, 2000, 3)
    assert rep.scale_factor == 1.0
    with pytest.raises(ValueError):
        max_stability_check(DistSpec("normal"), 10, 10)


def test_hill_recovers_frechet_and_pareto():
    for spec in (DistSpec("frechet", {"alpha": 3}), DistSpec("pareto", {"alpha": 3})):
        a = [estimate_tail(sample(spec, 2500, s), "upper").alpha for s in range(40)]
        assert 2.7 <= np.median(a) <= 3.3
