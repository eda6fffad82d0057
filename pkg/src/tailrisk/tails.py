"""Hill tail-index estimation with adaptive threshold choice, and tests on tail indices.

Conventions: ``gamma`` is the Hill statistic (mean log-excess, the inverse
index) and ``alpha = 1 / gamma`` is the tail index reported in tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .series import ReturnSeries

__all__ = [
    "DegenerateTailError",
    "TailSample",
    "ThresholdSelection",
    "TailEstimate",
    "TailTestResult",
    "tail_sample",
    "hill_gamma",
    "select_threshold",
    "estimate_tail",
    "tail_stability",
    "moment_test",
    "top_extremes",
    "SIDES",
]

Side = Literal["lower", "upper", "both"]
SIDES = ("lower", "upper", "both")

STABILITY_CRITICAL = 1.96
MOMENT_CRITICAL = 1.64


class DegenerateTailError(ValueError):
    """The requested tail cannot support a Hill estimate."""


@dataclass(frozen=True)
class TailSample:
    side: str
    values: np.ndarray  # positive magnitudes, non-increasing
    n_source: int

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class ThresholdSelection:
    n: int
    m1: int
    m2: int
    gamma1: float
    gamma2: float
    lam: float
    m_star: int
    fallback_used: bool

    @property
    def alpha1(self) -> float:
        return 1.0 / self.gamma1

    @property
    def alpha2(self) -> float:
        return 1.0 / self.gamma2


@dataclass(frozen=True)
class TailEstimate:
    side: str
    m: int
    threshold_value: float
    gamma: float
    n: int

    @property
    def alpha(self) -> float:
        return 1.0 / self.gamma

    @property
    def se_alpha(self) -> float:
        return self.alpha / math.sqrt(self.m)

    @classmethod
    def from_reported(cls, alpha: float, se: float, side: str = "both", n: int = 0,
                      threshold_value: float = float("nan")) -> "TailEstimate":
        """Rebuild an estimate from a published (alpha, standard error) pair.

        The threshold count is recovered as ``round((alpha / se) ** 2)``.
        """
        m = max(1, int(round((alpha / se) ** 2)))
        return cls(side=side, m=m, threshold_value=threshold_value, gamma=1.0 / alpha, n=n)

    def to_dict(self) -> dict:
        return {
            "side": self.side,
            "m": self.m,
            "n": self.n,
            "threshold_value": self.threshold_value,
            "gamma": self.gamma,
            "alpha": self.alpha,
            "se_alpha": self.se_alpha,
        }


@dataclass(frozen=True)
class TailTestResult:
    kind: str
    statistic: float
    critical_value: float
    reject: bool
    alternative: str = "two-sided"


def _values(r) -> np.ndarray:
    return np.asarray(r.values if isinstance(r, ReturnSeries) else r, dtype=float)


def tail_sample(r: ReturnSeries | np.ndarray, side: Side) -> TailSample:
    x = _values(r)
    if side == "upper":
        mags = x[x > 0]
    elif side == "lower":
        mags = -x[x < 0]
    elif side == "both":
        mags = np.abs(x[x != 0])
    else:
        raise ValueError(f"side must be one of {SIDES}, got {side!r}")
    if len(mags) < 10:
        raise DegenerateTailError(f"{side} tail has only {len(mags)} non-zero magnitudes (need 10)")
    return TailSample(side, np.sort(mags)[::-1], len(x))


def _hill(values: np.ndarray, m: int) -> float:
    logs = np.log(values[: m + 1])
    return float(np.mean(logs[:m]) - logs[m])


def hill_gamma(t: TailSample, m: int) -> TailEstimate:
    """Hill estimate from the ``m`` largest magnitudes above the (m+1)-th."""
    m = int(m)
    if not 1 <= m < len(t.values):
        raise ValueError(f"m={m} outside [1, {len(t.values) - 1}]")
    gamma = _hill(t.values, m)
    if not gamma > 0:
        raise DegenerateTailError(f"{t.side} tail: top {m} values all tie with the threshold (gamma = 0)")
    return TailEstimate(side=t.side, m=m, threshold_value=float(t.values[m]), gamma=gamma, n=t.n_source)


def select_threshold(t: TailSample) -> ThresholdSelection:
    """Adaptive MSE-minimizing threshold count ``m = lambda * n^(2/3)``.

    Preliminary tail indices ``a1, a2`` come from Hill fits at ``m1 = n^0.6``
    and ``m2 = n^0.9`` (rounded), and

        lambda = |a1 / (sqrt(2) * (n / m2) * (a1 - a2))| ** (2/3)

    The result is clamped to ``[2, n // 2]``; when ``a1 == a2`` or lambda is
    not finite, ``m`` falls back to ``floor(n^(2/3))``.
    """
    n = len(t.values)
    if n < 50:
        raise ValueError(f"threshold selection needs at least 50 magnitudes, got {n}")
    m1 = int(round(n**0.6))
    m2 = min(int(round(n**0.9)), n - 1)
    g1 = _hill(t.values, m1)
    g2 = _hill(t.values, m2)
    fallback = int(math.floor(n ** (2.0 / 3.0)))

    lam = math.nan
    if g1 > 0 and g2 > 0 and g1 != g2:
        a1, a2 = 1.0 / g1, 1.0 / g2
        lam = abs(a1 / (math.sqrt(2.0) * (n / m2) * (a1 - a2))) ** (2.0 / 3.0)
    if math.isfinite(lam) and lam > 0:
        m_star, used = int(round(lam * n ** (2.0 / 3.0))), False
    else:
        m_star, used = fallback, True
    m_star = min(max(m_star, 2), n // 2)
    return ThresholdSelection(n, m1, m2, g1, g2, float(lam), m_star, used)


def estimate_tail(r: ReturnSeries | np.ndarray, side: Side = "both",
                  return_selection: bool = False):
    t = tail_sample(r, side)
    sel = select_threshold(t)
    est = hill_gamma(t, sel.m_star)
    return (est, sel) if return_selection else est


def tail_stability(a: TailEstimate, b: TailEstimate, kind: str = "tail_symmetry") -> TailTestResult:
    """Signed z-statistic for equality of two tail indices (positive when ``a`` is larger)."""
    stat = (a.alpha - b.alpha) / math.sqrt(a.alpha**2 / a.m + b.alpha**2 / b.m)
    return TailTestResult(kind, stat, STABILITY_CRITICAL, abs(stat) > STABILITY_CRITICAL)


def moment_test(t: TailEstimate, k: float,
                alternative: Literal["greater", "less"] = "greater") -> TailTestResult:
    """One-sided z-test of the tail index against moment order ``k``.

    ``alternative="greater"`` tests H0: alpha <= k (the k-th moment is
    infinite), rejecting when the statistic exceeds 1.64.
    ``alternative="less"`` tests H0: alpha >= k, rejecting below -1.64.
    """
    if not k > 0:
        raise ValueError("moment order must be positive")
    stat = (t.alpha - k) * math.sqrt(t.m) / t.alpha
    if alternative == "greater":
        return TailTestResult("moment_k", stat, MOMENT_CRITICAL, stat > MOMENT_CRITICAL, alternative)
    if alternative == "less":
        return TailTestResult("moment_k", stat, -MOMENT_CRITICAL, stat < -MOMENT_CRITICAL, alternative)
    raise ValueError("alternative must be 'greater' or 'less'")


def top_extremes(r: ReturnSeries, k: int = 5) -> dict:
    """The ``k`` highest and ``k`` lowest returns with their dates, most extreme first."""
    if not isinstance(r, ReturnSeries):
        r = ReturnSeries.from_values(r)
    if k < 1 or k > r.n / 2:
        raise ValueError(f"k={k} must lie in [1, n/2] for n={r.n}")
    order = np.argsort(r.values, kind="stable")
    low = order[:k]
    high = order[::-1][:k]
    return {
        "highest": [(r.dates[i], float(r.values[i])) for i in high],
        "lowest": [(r.dates[i], float(r.values[i])) for i in low],
    }
