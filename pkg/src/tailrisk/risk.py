"""Extreme quantiles and exceedance probabilities from a fitted Hill tail.

Both measures extrapolate the power law above the threshold order
statistic ``r_t``, which is exceeded by ``m`` of the ``n`` source returns:

    r_p = r_t * (m / (n p)) ** gamma          P(X > x) = (m / n) * (x / r_t) ** -alpha
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence


from .tails import TailEstimate

__all__ = [
    "QuantileEntry",
    "QuantileGrid",
    "ProbabilityEntry",
    "ProbabilityGrid",
    "quantile",
    "quantile_grid",
    "excess_probability",
    "probability_grid",
    "default_probabilities",
    "DEFAULT_LEVELS",
]

DEFAULT_LEVELS = (5.0, 3.0, 2.5, 2.0, 1.5, 1.0)


def _tail_fraction(t: TailEstimate) -> float:
    if t.n <= 0:
        raise ValueError("estimate carries no source sample size")
    return t.m / t.n


def quantile(t: TailEstimate, p: float) -> float:
    """Return level exceeded with probability ``p``."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"tail probability must lie in (0, 1), got {p}")
    return float(t.threshold_value * (_tail_fraction(t) / p) ** t.gamma)


def excess_probability(t: TailEstimate, x: float) -> float:
    """Probability of a move larger than ``x``; capped at ``m/n`` below the threshold."""
    if not x > 0:
        raise ValueError(f"level must be positive, got {x}")
    frac = _tail_fraction(t)
    if x < t.threshold_value:
        return frac
    return float(frac * (x / t.threshold_value) ** (-t.alpha))


@dataclass(frozen=True)
class QuantileEntry:
    p: float
    level: float
    in_sample: bool
    extrapolated: bool  # p < m/n, inside the fitted power-law region


@dataclass(frozen=True)
class QuantileGrid:
    estimate: TailEstimate
    entries: tuple[QuantileEntry, ...]

    def __post_init__(self):
        levels = [e.level for e in self.entries]
        if any(b <= a for a, b in zip(levels, levels[1:])):
            raise AssertionError("quantile grid must increase as p decreases")


@dataclass(frozen=True)
class ProbabilityEntry:
    level: float
    probability: float
    in_region: bool  # level at or above the threshold value

    @property
    def percent(self) -> float:
        return 100.0 * self.probability


@dataclass(frozen=True)
class ProbabilityGrid:
    estimate: TailEstimate
    entries: tuple[ProbabilityEntry, ...]

    def __post_init__(self):
        probs = [e.probability for e in self.entries]
        if any(not 0.0 < q < 1.0 for q in probs):
            raise AssertionError("exceedance probabilities must lie in (0, 1)")
        # entries run from high to low level, so probabilities rise
        if any(b < a for a, b in zip(probs, probs[1:])):
            raise AssertionError("exceedance probability must not increase with the level")
        inside = [e.probability for e in self.entries if e.in_region]
        if any(b <= a for a, b in zip(inside, inside[1:])):
            raise AssertionError("exceedance probability must strictly decrease inside the tail region")


def default_probabilities(n: int) -> tuple[float, ...]:
    return (0.05, 0.01, 0.005, 1.0 / n, 1.0 / (2 * n), 1.0 / (4 * n))


def quantile_grid(t: TailEstimate, probs: Sequence[float] | None = None) -> QuantileGrid:
    if probs is None:
        probs = default_probabilities(t.n)
    frac = _tail_fraction(t)
    entries = tuple(
        QuantileEntry(p, quantile(t, p), p >= 1.0 / t.n, p < frac)
        for p in sorted(set(probs), reverse=True)
    )
    return QuantileGrid(t, entries)


def probability_grid(t: TailEstimate, levels: Sequence[float] | None = None) -> ProbabilityGrid:
    if levels is None:
        levels = DEFAULT_LEVELS
    entries = tuple(
        ProbabilityEntry(x, excess_probability(t, x), x >= t.threshold_value)
        for x in sorted(set(levels), reverse=True)
    )
    return ProbabilityGrid(t, entries)
