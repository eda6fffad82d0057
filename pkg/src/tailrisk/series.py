"""Rate series ingestion, percent log returns, period splits and descriptive statistics."""

from __future__ import annotations

import csv
import datetime as dt
import io
import math
import os
from dataclasses import dataclass, field
from typing import IO, Union

import numpy as np
from scipy import stats

__all__ = [
    "SeriesError",
    "RateSeries",
    "ReturnSeries",
    "SummaryStats",
    "load_series",
    "log_returns",
    "split_period",
    "summary_stats",
    "lilliefors_critical_value",
]


class SeriesError(ValueError):
    """Raised for malformed input series or invalid series operations."""


def _as_date_array(dates) -> np.ndarray:
    return np.asarray(dates, dtype="datetime64[D]")


@dataclass(frozen=True)
class RateSeries:
    """Daily levels (foreign currency per unit of the base currency)."""

    dates: np.ndarray
    levels: np.ndarray
    label: str = "series"

    def __post_init__(self):
        dates = _as_date_array(self.dates)
        levels = np.asarray(self.levels, dtype=float)
        if dates.shape != levels.shape or levels.ndim != 1:
            raise SeriesError("dates and levels must be 1-d and of equal length")
        if not np.all(levels > 0):
            raise SeriesError("levels must be strictly positive")
        if len(dates) > 1 and not np.all(np.diff(dates) > np.timedelta64(0, "D")):
            raise SeriesError("dates must be strictly increasing")
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "levels", levels)

    def __len__(self) -> int:
        return len(self.levels)


@dataclass(frozen=True)
class ReturnSeries:
    """Percent log first differences, ``100 * (ln s_t - ln s_{t-1})``."""

    dates: np.ndarray
    values: np.ndarray
    label: str = "series"

    def __post_init__(self):
        dates = _as_date_array(self.dates)
        values = np.asarray(self.values, dtype=float)
        if dates.shape != values.shape or values.ndim != 1:
            raise SeriesError("dates and values must be 1-d and of equal length")
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return len(self.values)

    def __len__(self) -> int:
        return len(self.values)

    @classmethod
    def from_values(cls, values, label: str = "series", start: str = "2000-01-03") -> "ReturnSeries":
        """Wrap a bare array, attaching consecutive daily dates."""
        values = np.asarray(values, dtype=float)
        dates = np.datetime64(start, "D") + np.arange(len(values))
        return cls(dates, values, label)


@dataclass(frozen=True)
class SummaryStats:
    n: int
    mean: float
    standard_deviation: float
    range: float
    interquartile_range: float
    skewness: float
    excess_kurtosis: float
    skew_z: float
    kurt_z: float
    ks_statistic: float
    ks_critical_5pct: float
    ks_reject_5pct: bool
    moments_defined: bool
    metadata: dict = field(default_factory=dict)

    @property
    def skew_significant(self) -> bool:
        return self.moments_defined and abs(self.skew_z) > 1.96

    @property
    def kurt_significant(self) -> bool:
        return self.moments_defined and abs(self.kurt_z) > 1.96


# --- loading -----------------------------------------------------------------

Source = Union[str, os.PathLike, bytes, IO]


def _read_text(source: Source) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as fh:
            return fh.read()
    data = source.read()
    return data.decode("utf-8") if isinstance(data, bytes) else data


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def load_series(source: Source, delimiter: str = ",", label: str | None = None) -> RateSeries:
    """Parse ``date,level`` records into a date-sorted :class:`RateSeries`.

    ``source`` may be a path, raw bytes or an open (text or binary) stream.
    Blank lines and lines starting with ``#`` are skipped. A first record
    whose level field is not numeric is taken as a header.
    """
    if label is None:
        label = os.path.splitext(os.path.basename(os.fspath(source)))[0] if isinstance(source, (str, os.PathLike)) else "series"
    text = _read_text(source)
    reader = csv.reader(io.StringIO(text), delimiter=delimiter)

    dates: list[dt.date] = []
    levels: list[float] = []
    seen_record = False
    for lineno, row in enumerate(reader, start=1):
        if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
            continue
        if len(row) < 2:
            raise SeriesError(f"record {lineno}: expected 'date{delimiter}level', got {row!r}")
        date_text, level_text = row[0].strip(), row[1].strip()
        if not seen_record and not _is_number(level_text):
            seen_record = True
            continue  # header
        seen_record = True
        try:
            date = dt.date.fromisoformat(date_text)
        except ValueError:
            raise SeriesError(f"record {lineno}: unparseable date {date_text!r}") from None
        try:
            level = float(level_text)
        except ValueError:
            raise SeriesError(f"record {lineno}: unparseable level {level_text!r}") from None
        if not math.isfinite(level) or level <= 0:
            raise SeriesError(f"record {lineno}: level must be positive, got {level_text!r}")
        dates.append(date)
        levels.append(level)

    if len(dates) < 3:
        raise SeriesError(f"need at least 3 records, got {len(dates)}")
    order = np.argsort(np.asarray(dates, dtype="datetime64[D]"), kind="stable")
    sorted_dates = np.asarray(dates, dtype="datetime64[D]")[order]
    dup = np.nonzero(np.diff(sorted_dates) == np.timedelta64(0, "D"))[0]
    if len(dup):
        raise SeriesError(f"duplicate date {sorted_dates[dup[0]]}")
    return RateSeries(sorted_dates, np.asarray(levels)[order], label)


# --- transforms --------------------------------------------------------------


def log_returns(rates: RateSeries) -> ReturnSeries:
    if len(rates) < 2:
        raise SeriesError("need at least 2 levels to form a return")
    values = 100.0 * np.diff(np.log(rates.levels))
    return ReturnSeries(rates.dates[1:], values, rates.label)


def split_period(r: ReturnSeries, boundary) -> tuple[ReturnSeries, ReturnSeries]:
    """Split at ``boundary``: dates strictly before it, then dates on or after it."""
    b = np.datetime64(boundary, "D")
    if r.n == 0 or b <= r.dates[0] or b > r.dates[-1]:
        lo = r.dates[0] if r.n else None
        hi = r.dates[-1] if r.n else None
        raise SeriesError(
            f"split boundary {b} leaves an empty period for {r.label!r} (data span {lo} .. {hi})"
        )
    k = int(np.searchsorted(r.dates, b, side="left"))
    return (
        ReturnSeries(r.dates[:k], r.values[:k], r.label),
        ReturnSeries(r.dates[k:], r.values[k:], r.label),
    )


# --- descriptive statistics --------------------------------------------------


def lilliefors_critical_value(n: int, level: float = 0.05) -> float:
    """KS critical value for normality with estimated mean and variance.

    Uses Stephens' (1974) modified-statistic approximation
    ``c / (sqrt(n) - 0.01 + 0.85 / sqrt(n))``.
    """
    coef = {0.10: 0.819, 0.05: 0.895, 0.025: 0.955, 0.01: 1.035}
    if level not in coef:
        raise ValueError(f"unsupported level {level}; choose from {sorted(coef)}")
    root = math.sqrt(n)
    return coef[level] / (root - 0.01 + 0.85 / root)


def summary_stats(r: ReturnSeries | np.ndarray) -> SummaryStats:
    x = np.asarray(r.values if isinstance(r, ReturnSeries) else r, dtype=float)
    n = len(x)
    if n < 8:
        raise SeriesError(f"summary statistics need at least 8 observations, got {n}")
    mean = float(x.mean())
    dev = x - mean
    m2 = float(np.mean(dev**2))
    sd = math.sqrt(m2)
    q1, q3 = np.quantile(x, [0.25, 0.75])  # linear interpolation
    ks_crit = lilliefors_critical_value(n)
    meta = {
        "moment_convention": "n-denominator",
        "quantile_method": "linear",
        "ks": "standardized by sample mean/sd; Lilliefors critical value (Stephens approximation)",
    }

    if m2 <= 0 or not np.isfinite(m2):
        nan = float("nan")
        return SummaryStats(
            n, mean, sd, float(x.max() - x.min()), float(q3 - q1), nan, nan, nan, nan, nan, ks_crit,
            False, False, meta,
        )

    # standardize first so tiny variances cannot underflow the moment ratios
    z = dev / sd
    skew = float(np.mean(z**3))
    kurt = float(np.mean(z**4)) - 3.0
    ks = stats.kstest(z, "norm").statistic
    return SummaryStats(
        n=n,
        mean=mean,
        standard_deviation=sd,
        range=float(x.max() - x.min()),
        interquartile_range=float(q3 - q1),
        skewness=skew,
        excess_kurtosis=kurt,
        skew_z=skew / math.sqrt(6.0 / n),
        kurt_z=kurt / math.sqrt(24.0 / n),
        ks_statistic=float(ks),
        ks_critical_5pct=ks_crit,
        ks_reject_5pct=bool(ks > ks_crit),
        moments_defined=True,
        metadata=meta,
    )
