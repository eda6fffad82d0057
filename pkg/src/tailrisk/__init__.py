"""Heavy-tail risk analysis for daily exchange-rate returns."""

__version__ = "0.1.0"

from .evd import DistSpec, GevParams, classify_domain, evd_cdf, gev_cdf, gnedenko_ratio, max_stability_check, sample
from .risk import excess_probability, probability_grid, quantile, quantile_grid
from .series import (
    RateSeries,
    ReturnSeries,
    SeriesError,
    SummaryStats,
    load_series,
    log_returns,
    split_period,
    summary_stats,
)
from .stationarity import UnitRootResult, adf_test, pp_test
from .tails import (
    DegenerateTailError,
    TailEstimate,
    ThresholdSelection,
    estimate_tail,
    hill_gamma,
    moment_test,
    select_threshold,
    tail_sample,
    tail_stability,
    top_extremes,
)
from .volatility import GarchFit, garch_fit, garch_simulate, ljung_box

__all__ = [
    "__version__",
    "DistSpec", "GevParams", "classify_domain", "evd_cdf", "gev_cdf", "gnedenko_ratio",
    "max_stability_check", "sample",
    "excess_probability", "probability_grid", "quantile", "quantile_grid",
    "RateSeries", "ReturnSeries", "SeriesError", "SummaryStats", "load_series", "log_returns",
    "split_period", "summary_stats",
    "UnitRootResult", "adf_test", "pp_test",
    "DegenerateTailError", "TailEstimate", "ThresholdSelection", "estimate_tail", "hill_gamma",
    "moment_test", "select_threshold", "tail_sample", "tail_stability", "top_extremes",
    "GarchFit", "garch_fit", "garch_simulate", "ljung_box",
]
