"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Published anchor values below (tail indices, standard errors, quantile and
probability table entries) are quoted from the reference tables for the Euro,
Deutsche Mark and Yen series.
"""

import math
import subprocess
import sys
import time

import numpy as np
import pytest

from tailrisk.evd import DistSpec, gnedenko_ratio, max_stability_check, sample
from tailrisk.risk import excess_probability, probability_grid, quantile, quantile_grid
from tailrisk.stationarity import adf_test, pp_test
from tailrisk.tails import TailEstimate, TailSample, estimate_tail, hill_gamma, select_threshold, tail_sample, tail_stability
from tailrisk.volatility import PARAM_NAMES, garch_fit, garch_simulate, ljung_box


@pytest.fixture
def verdict(capsys):
    def report(criterion, ok, detail):
        with capsys.disabled():
            print(f"\nACCEPTANCE {criterion:>2}: {'PASS' if ok else 'FAIL'} | {detail}")
        assert ok, detail

    return report


def test_criterion_01_stability_from_published_values(verdict):
    lower = TailEstimate.from_reported(3.51, 0.32)
    upper = TailEstimate.from_reported(3.40, 0.31)
    dm_tails = tail_stability(upper, lower).statistic
    euro = TailEstimate.from_reported(3.71, 0.42)
    dm = TailEstimate.from_reported(3.82, 0.35)
    euro_dm = tail_stability(euro, dm, "cross_period").statistic
    ok = abs(dm_tails - (-0.25)) <= 0.02 and abs(euro_dm - (-0.20)) <= 0.01
    verdict(1, ok, f"DM upper-lower {dm_tails:.4f} (target -0.25+-0.02); Euro-DM {euro_dm:.4f} (target -0.20+-0.01)")


def test_criterion_02_quantile_ratio_law(verdict):
    rows = []
    ok = True
    for alpha, r95, r99, target in ((3.71, 1.15, 1.78, 1.543), (2.82, 1.06, 1.88, 1.769)):
        t = TailEstimate(side="both", m=80, threshold_value=1.0, gamma=1 / alpha, n=800)
        ratio = quantile(t, 0.01) / quantile(t, 0.05)
        table = r99 / r95
        ok &= abs(ratio - target) <= 0.001 and abs(ratio / table - 1) <= 0.005
        rows.append(f"alpha {alpha}: {ratio:.4f} vs table {table:.4f}")
    verdict(2, ok, "; ".join(rows))


def test_criterion_03_probability_ratio_law(verdict):
    t = TailEstimate(side="both", m=80, threshold_value=0.9, gamma=1 / 3.71, n=800)
    ratio = excess_probability(t, 1.0) / excess_probability(t, 5.0)
    # 8.43 / P(>5) with P(>5) in [0.015, 0.025] from rounding 0.02
    lo, hi = 8.43 / 0.025, 8.43 / 0.015
    verdict(3, lo <= ratio <= hi and round(ratio) == 392, f"P(>1)/P(>5) = {ratio:.1f} in [{lo:.0f}, {hi:.0f}]")


def test_criterion_04_hill_correctness(verdict):
    t0 = time.perf_counter()
    hand = hill_gamma(TailSample("upper", np.array([16.0, 8, 4, 2, 1]), 5), 2).gamma
    n = 10**5
    grid = (n / np.arange(1, n + 1)) ** (1 / 3)
    alpha = hill_gamma(tail_sample(grid, "upper"), int(n ** (2 / 3))).alpha
    dt = time.perf_counter() - t0
    ok = abs(hand - 1.03972) < 1e-5 and abs(alpha - 3) < 0.05 and dt < 1
    verdict(4, ok, f"hand gamma {hand:.6f}; grid alpha {alpha:.4f}; {dt:.2f}s")


def test_criterion_05_adaptive_threshold(verdict):
    t0 = time.perf_counter()
    base = tail_sample(np.random.default_rng(0).standard_t(4, 2000), "both")
    sel = select_threshold(TailSample("both", base.values[:776], 776))
    t4 = DistSpec("student_t", {"dof": 4})
    hits = sum(40 <= estimate_tail(sample(t4, 776, s), "both", return_selection=True)[1].m_star <= 120
               for s in range(200))
    dt = time.perf_counter() - t0
    ok = (sel.m1, sel.m2) == (54, 399) and hits >= 160 and dt < 30
    verdict(5, ok, f"m1={sel.m1}, m2={sel.m2}; m_star in [40,120] for {hits}/200 seeds; {dt:.1f}s")


def test_criterion_06_estimator_recovery(verdict):
    t0 = time.perf_counter()
    pareto = DistSpec("pareto", {"alpha": 3})
    t3 = DistSpec("student_t", {"dof": 3})
    med_p = np.median([estimate_tail(sample(pareto, 2500, s), "both").alpha for s in range(200)])
    med_t = np.median([estimate_tail(sample(t3, 2500, s), "both").alpha for s in range(200)])
    z = []
    for s in range(1000):
        a = hill_gamma(tail_sample(sample(pareto, 2000, 10_000 + s), "upper"), 100).alpha
        z.append((a - 3) * math.sqrt(100) / a)
    mz, sz = float(np.mean(z)), float(np.std(z, ddof=1))
    dt = time.perf_counter() - t0
    ok = abs(med_p - 3) <= 0.3 and abs(med_t - 3) <= 0.5 and -0.15 <= mz <= 0.15 and 0.85 <= sz <= 1.15 and dt < 120
    verdict(6, ok, f"median Pareto(3) {med_p:.3f}, t(3) {med_t:.3f}; z mean {mz:.3f} sd {sz:.3f}; {dt:.1f}s")


def test_criterion_07_inverse_identity(verdict):
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    worst, violations = 0.0, 0
    for _ in range(1000):
        n = int(rng.integers(500, 20_000))
        m = int(rng.integers(10, n // 4))
        t = TailEstimate(side="both", m=m, threshold_value=float(rng.uniform(0.1, 5)),
                         gamma=1 / float(rng.uniform(0.8, 8)), n=n)
        p = float(rng.uniform(1e-7, 1.0)) * m / n
        worst = max(worst, abs(excess_probability(t, quantile(t, p)) / p - 1))
        x = t.threshold_value * float(rng.uniform(1, 50))
        worst = max(worst, abs(quantile(t, excess_probability(t, x)) / x - 1))
        try:
            quantile_grid(t)
            probability_grid(t)
        except AssertionError:
            violations += 1
    dt = time.perf_counter() - t0
    verdict(7, worst < 1e-12 and violations == 0 and dt < 1,
            f"max relative error {worst:.2e}; grid violations {violations}; {dt:.2f}s")


def test_criterion_08_garch_recovery_and_ljung_box_size(verdict):
    t0 = time.perf_counter()
    truth = {"mu": 0.0, "omega": 0.05, "a": 0.10, "b": 0.85, "dof": 6.0}
    within = dict.fromkeys(PARAM_NAMES, 0)
    for s in range(50):
        f = garch_fit(garch_simulate(0.05, 0.10, 0.85, 6.0, 5000, seed=s))
        for k in PARAM_NAMES:
            within[k] += abs(getattr(f, k) - truth[k]) <= 3 * f.robust_se[k]
    rng = np.random.default_rng(8)
    size = np.mean([ljung_box(rng.standard_normal(1000), 10).reject_5pct for _ in range(500)])
    dt = time.perf_counter() - t0
    ok = min(within.values()) >= 45 and 0.02 <= size <= 0.09 and dt < 300
    verdict(8, ok, f"within 3 SE of 50: {within}; Ljung-Box size {size:.3f}; {dt:.1f}s")


def test_criterion_09_unit_root_size_and_power(verdict):
    t0 = time.perf_counter()
    size = {"ADF": 0, "PP_Zt": 0, "PP_Zrho": 0}
    power = dict(size)
    for s in range(500):
        e = np.random.default_rng(s).standard_normal(2000)
        walk = np.cumsum(e)
        ar = np.empty(2000)
        ar[0] = e[0]
        for t in range(1, 2000):
            ar[t] = 0.5 * ar[t - 1] + e[t]
        for y, tally in ((walk, size), (ar, power)):
            tally["ADF"] += adf_test(y).reject_5pct
            tally["PP_Zt"] += pp_test(y, "PP_Zt").reject_5pct
            tally["PP_Zrho"] += pp_test(y, "PP_Zrho").reject_5pct
    dt = time.perf_counter() - t0
    ok = all(10 <= v <= 45 for v in size.values()) and all(v >= 495 for v in power.values()) and dt < 120
    verdict(9, ok, f"size (of 500) {size}; power {power}; {dt:.1f}s")


def test_criterion_10_evd_checks(verdict):
    t0 = time.perf_counter()
    frechet = DistSpec("frechet", {"alpha": 1})
    passes = sum(max_stability_check(frechet, 100, 5000, seed).passed for seed in range(20))
    ratio = gnedenko_ratio(DistSpec("pareto", {"alpha": 3}), 4.0, 2.0)
    dt = time.perf_counter() - t0
    verdict(10, passes >= 18 and ratio == 0.125 and dt < 60,
            f"max-stability passes {passes}/20 meta-seeds; Gnedenko ratio {ratio!r}; {dt:.1f}s")


def test_criterion_11_report_determinism(verdict, tmp_path):
    t0 = time.perf_counter()
    cli = [sys.executable, "-m", "tailrisk"]
    data = subprocess.run(cli + ["synthetic", "student_t", "dof=4", "scale=0.6", "n=2500", "seed=5"],
                          capture_output=True, check=True).stdout
    path = tmp_path / "s.csv"
    path.write_bytes(data)
    runs = [subprocess.run(cli + ["report", f"S={path}", "--boundary", "1995-01-02", "--trace"],
                           capture_output=True).stdout for _ in range(2)]
    dt = time.perf_counter() - t0
    verdict(11, runs[0] == runs[1] and len(runs[0]) > 1000 and dt < 5,
            f"two report runs byte-identical: {runs[0] == runs[1]} ({len(runs[0])} bytes); {dt:.1f}s")
