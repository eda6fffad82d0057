"""Augmented Dickey-Fuller and Phillips-Perron unit-root tests."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

__all__ = [
    "UnitRootResult",
    "adf_test",
    "pp_test",
    "select_lags_aic",
    "default_max_lag",
    "pp_bandwidth",
    "tau_critical_value",
    "rho_critical_value",
]

Deterministic = Literal["c", "ct"]

# MacKinnon (2010) response surfaces, single unit root: cv = b0 + b1/T + b2/T^2 + b3/T^3
_TAU_SURFACE = {
    "c": {
        0.01: (-3.43035, -6.5393, -16.786, -79.433),
        0.05: (-2.86154, -2.8903, -4.234, -40.040),
        0.10: (-2.56677, -1.5384, -2.809, 0.0),
    },
    "ct": {
        0.01: (-3.95877, -9.0531, -28.428, -134.155),
        0.05: (-3.41049, -4.3904, -9.036, -45.374),
        0.10: (-3.12705, -2.5856, -3.925, -22.380),
    },
}

# Fuller (1976) Table 8.5.1, 5% quantiles of T(rho_hat - 1), indexed by sample size.
_RHO_TABLE_N = np.array([25.0, 50.0, 100.0, 250.0, 500.0, np.inf])
_RHO_TABLE_5PCT = {
    "c": np.array([-12.5, -13.3, -13.7, -14.0, -14.0, -14.1]),
    "ct": np.array([-17.9, -19.8, -20.7, -21.3, -21.5, -21.8]),
}

CRITICAL_VALUE_SOURCE = {
    "ADF": "MacKinnon (2010) Dickey-Fuller tau response surface",
    "PP_Zt": "MacKinnon (2010) Dickey-Fuller tau response surface",
    "PP_Zrho": "Fuller (1976) normalized-bias table, interpolated in 1/n",
}


@dataclass(frozen=True)
class UnitRootResult:
    test_kind: str
    statistic: float
    lags_or_bandwidth: int
    deterministic_spec: str
    critical_value_5pct: float
    nobs: int
    metadata: dict = field(default_factory=dict)

    @property
    def reject_5pct(self) -> bool:
        return self.statistic < self.critical_value_5pct


def tau_critical_value(nobs: int, spec: Deterministic = "c", level: float = 0.05) -> float:
    b = _TAU_SURFACE[spec][level]
    return b[0] + b[1] / nobs + b[2] / nobs**2 + b[3] / nobs**3


def rho_critical_value(nobs: int, spec: Deterministic = "c") -> float:
    inv = 1.0 / _RHO_TABLE_N
    # np.interp needs increasing abscissae
    return float(np.interp(1.0 / nobs, inv[::-1], _RHO_TABLE_5PCT[spec][::-1]))


def default_max_lag(n: int) -> int:
    return int(12.0 * (n / 100.0) ** 0.25)


def pp_bandwidth(n: int) -> int:
    return int(4.0 * (n / 100.0) ** (2.0 / 9.0))


def _check_spec(spec: str) -> None:
    if spec not in _TAU_SURFACE:
        raise ValueError(f"deterministic spec must be 'c' or 'ct', got {spec!r}")


def _adf_design(y: np.ndarray, lags: int, start: int, spec: str) -> tuple[np.ndarray, np.ndarray]:
    """Regressors [const, (trend), y_{t-1}, dy_{t-1..t-lags}] for dy_t, t >= start."""
    dy = np.diff(y)
    idx = np.arange(start, len(dy))
    cols = [np.ones(len(idx))]
    # centered regressors leave the slopes unchanged (a constant is always present)
    # but keep the design well conditioned under large level shifts
    if spec == "ct":
        cols.append(idx - idx.mean())
    cols.append(y[idx] - y.mean())
    for j in range(1, lags + 1):
        cols.append(dy[idx - j])
    return np.column_stack(cols), dy[idx]


def _aic_path(y: np.ndarray, max_lag: int, spec: str) -> np.ndarray:
    """AIC for lags 0..max_lag on the common sample, from a single QR."""
    X, z = _adf_design(y, max_lag, max_lag, spec)
    nobs = len(z)
    q, _ = np.linalg.qr(X)
    proj = q.T @ z
    base = X.shape[1] - max_lag
    total = float(z @ z)
    ssr = total - np.cumsum(proj**2)[base - 1 :]
    ssr = np.maximum(ssr, np.finfo(float).tiny)
    k = base + np.arange(max_lag + 1)
    return nobs * np.log(ssr / nobs) + 2.0 * k


def select_lags_aic(x, max_lag: int, spec: Deterministic = "c") -> int:
    """AIC-minimizing augmentation order; ties go to the smaller order."""
    if max_lag < 0:
        raise ValueError("max_lag must be non-negative")
    _check_spec(spec)
    y = np.asarray(x, dtype=float)
    if len(y) <= max_lag + 10:
        raise ValueError(f"series of length {len(y)} too short for max_lag={max_lag}")
    if max_lag == 0:
        return 0
    aic = _aic_path(y, max_lag, spec)
    return int(np.argmin(aic))  # argmin returns the first minimum


def adf_test(x, max_lag: int | None = None, spec: Deterministic = "c") -> UnitRootResult:
    """ADF t-test on the lagged level, augmentation order picked by AIC."""
    _check_spec(spec)
    y = np.asarray(x, dtype=float)
    if max_lag is None:
        max_lag = default_max_lag(len(y))
    if len(y) <= max_lag + 10:
        raise ValueError(f"series of length {len(y)} too short for max_lag={max_lag}")
    lags = select_lags_aic(y, max_lag, spec)

    X, z = _adf_design(y, lags, lags, spec)
    q, rmat = np.linalg.qr(X)
    beta = np.linalg.solve(rmat, q.T @ z)
    resid = z - X @ beta
    nobs, k = X.shape
    s2 = float(resid @ resid) / (nobs - k)
    pos = 2 if spec == "ct" else 1
    rinv = np.linalg.inv(rmat)
    var_pos = s2 * float(rinv[pos] @ rinv[pos])
    stat = float(beta[pos] / math.sqrt(var_pos))
    return UnitRootResult(
        test_kind="ADF",
        statistic=stat,
        lags_or_bandwidth=lags,
        deterministic_spec=spec,
        critical_value_5pct=tau_critical_value(nobs, spec),
        nobs=nobs,
        metadata={"max_lag": max_lag, "lag_selection": "AIC", "critical_values": CRITICAL_VALUE_SOURCE["ADF"]},
    )


def _newey_west(u: np.ndarray, bandwidth: int) -> float:
    n = len(u)
    lrv = float(u @ u) / n
    for j in range(1, bandwidth + 1):
        lrv += 2.0 * (1.0 - j / (bandwidth + 1.0)) * float(u[j:] @ u[:-j]) / n
    return lrv


def pp_test(x, variant: Literal["PP_Zt", "PP_Zrho"] = "PP_Zt", spec: Deterministic = "c") -> UnitRootResult:
    """Phillips-Perron Z_t or Z_rho with a Bartlett-kernel long-run variance."""
    _check_spec(spec)
    if variant not in ("PP_Zt", "PP_Zrho"):
        raise ValueError(f"variant must be 'PP_Zt' or 'PP_Zrho', got {variant!r}")
    y = np.asarray(x, dtype=float)
    if len(y) < 50:
        raise ValueError(f"Phillips-Perron needs at least 50 observations, got {len(y)}")

    cols = [np.ones(len(y) - 1)]
    if spec == "ct":
        cols.append(np.arange(1.0, len(y)))
    cols.append(y[:-1])
    X = np.column_stack(cols)
    z = y[1:]
    beta, *_ = np.linalg.lstsq(X, z, rcond=None)
    u = z - X @ beta
    n, k = X.shape
    pos = k - 1
    rho = float(beta[pos])

    bandwidth = pp_bandwidth(n)
    lam2 = _newey_west(u, bandwidth)
    s2 = float(u @ u) / (n - k)
    gamma0 = s2 * (n - k) / n
    sigma2 = s2 * float(np.linalg.inv(X.T @ X)[pos, pos])
    sigma = math.sqrt(sigma2)
    if sigma <= 0:
        raise ValueError("degenerate regression: zero coefficient variance")

    if variant == "PP_Zt":
        lam = math.sqrt(lam2)
        stat = math.sqrt(gamma0 / lam2) * (rho - 1.0) / sigma - 0.5 * ((lam2 - gamma0) / lam) * (n * sigma / math.sqrt(s2))
        cv = tau_critical_value(n, spec)
    else:
        stat = n * (rho - 1.0) - 0.5 * (n**2 * sigma2 / s2) * (lam2 - gamma0)
        cv = rho_critical_value(n, spec)
    return UnitRootResult(
        test_kind=variant,
        statistic=float(stat),
        lags_or_bandwidth=bandwidth,
        deterministic_spec=spec,
        critical_value_5pct=cv,
        nobs=n,
        metadata={"kernel": "Bartlett", "critical_values": CRITICAL_VALUE_SOURCE[variant]},
    )
