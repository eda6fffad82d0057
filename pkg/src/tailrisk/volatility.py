"""GARCH(1,1) with standardized Student-t innovations, plus Ljung-Box diagnostics.

Model, with a constant mean ``mu``::

    r_t = mu + e_t,   e_t = sqrt(h_t) z_t,   z_t ~ t(dof) scaled to unit variance
    h_t = omega + a e_{t-1}^2 + b h_{t-1}

The recursion starts from the sample variance ``h0`` standing in for both
``e_0^2`` and ``h_0``. Fitting maximizes the exact conditional log-likelihood:
a Nelder-Mead pass on an unconstrained reparameterization seeds BHHH
iterations driven by analytic per-observation scores. Standard errors are the
Bollerslev-Wooldridge sandwich ``H^-1 (S'S) H^-1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, signal, special, stats

from .series import ReturnSeries

__all__ = [
    "GarchFit",
    "LjungBoxResult",
    "garch_fit",
    "garch_loglik",
    "garch_scores",
    "conditional_sigma",
    "ljung_box",
    "garch_simulate",
    "PARAM_NAMES",
]

PARAM_NAMES = ("mu", "omega", "a", "b", "dof")

SIMPLEX_MAXITER = 200
BHHH_MAXITER = 500
BHHH_TOL = 1e-7


@dataclass(frozen=True)
class LjungBoxResult:
    statistic: float
    lags: int
    critical_value_5pct: float
    p_value: float

    @property
    def reject_5pct(self) -> bool:
        return self.statistic > self.critical_value_5pct


@dataclass(frozen=True)
class GarchFit:
    mu: float
    omega: float
    a: float
    b: float
    dof: float
    log_likelihood: float
    robust_se: dict
    sigma_path: np.ndarray
    converged: bool
    returns: np.ndarray = field(repr=False)
    h0: float = float("nan")
    simplex_log_likelihood: float = float("nan")
    iterations: int = 0
    message: str = ""

    @property
    def params(self) -> dict:
        return {"mu": self.mu, "omega": self.omega, "a": self.a, "b": self.b, "dof": self.dof}

    @property
    def stationary(self) -> bool:
        return self.a + self.b < 1.0

    @property
    def tstats(self) -> dict:
        return {k: (v / self.robust_se[k] if self.robust_se[k] > 0 else float("nan"))
                for k, v in self.params.items()}

    @property
    def aic(self) -> float:
        return -2.0 * self.log_likelihood + 2.0 * len(PARAM_NAMES)

    @property
    def bic(self) -> float:
        return -2.0 * self.log_likelihood + len(PARAM_NAMES) * math.log(len(self.returns))

    @property
    def standardized_residuals(self) -> np.ndarray:
        return (self.returns - self.mu) / self.sigma_path


# --- likelihood ------------------------------------------------------------------


def _variance_path(eps: np.ndarray, omega: float, a: float, b: float, h0: float) -> np.ndarray:
    e_lag = np.empty_like(eps)
    e_lag[0] = h0
    e_lag[1:] = eps[:-1] ** 2
    h, _ = signal.lfilter([1.0], [1.0, -b], omega + a * e_lag, zi=[b * h0])
    return h


def _loglik_terms(theta, r: np.ndarray, h0: float):
    mu, omega, a, b, nu = theta
    eps = r - mu
    h = _variance_path(eps, omega, a, b, h0)
    x = eps**2 / (h * (nu - 2.0))
    const = special.gammaln((nu + 1.0) / 2.0) - special.gammaln(nu / 2.0) - 0.5 * math.log(math.pi * (nu - 2.0))
    ll = const - 0.5 * np.log(h) - 0.5 * (nu + 1.0) * np.log1p(x)
    return ll, eps, h, x


def garch_loglik(theta, r, h0: float | None = None) -> float:
    """Total conditional log-likelihood at natural parameters ``(mu, omega, a, b, dof)``."""
    r = np.asarray(r, dtype=float)
    if h0 is None:
        h0 = float(np.var(r))
    ll, *_ = _loglik_terms(theta, r, h0)
    return float(ll.sum())


def garch_scores(theta, r, h0: float | None = None) -> np.ndarray:
    """Per-observation gradient of the log-likelihood, shape ``(n, 5)``."""
    r = np.asarray(r, dtype=float)
    if h0 is None:
        h0 = float(np.var(r))
    mu, omega, a, b, nu = theta
    _, eps, h, x = _loglik_terms(theta, r, h0)
    n = len(r)

    e_lag = np.empty(n)
    e_lag[0] = h0
    e_lag[1:] = eps[:-1] ** 2
    h_lag = np.empty(n)
    h_lag[0] = h0
    h_lag[1:] = h[:-1]
    de_lag = np.zeros(n)
    de_lag[1:] = -2.0 * eps[:-1]

    def filt(v):
        return signal.lfilter([1.0], [1.0, -b], v)

    dh = np.column_stack([filt(a * de_lag), filt(np.ones(n)), filt(e_lag), filt(h_lag)])

    dl_dh = -0.5 / h + 0.5 * (nu + 1.0) * x / ((1.0 + x) * h)
    scores = np.empty((n, 5))
    scores[:, :4] = dl_dh[:, None] * dh
    scores[:, 0] += (nu + 1.0) * eps / (h * (nu - 2.0) * (1.0 + x))
    scores[:, 4] = (
        0.5 * special.digamma((nu + 1.0) / 2.0)
        - 0.5 * special.digamma(nu / 2.0)
        - 0.5 / (nu - 2.0)
        - 0.5 * np.log1p(x)
        + 0.5 * (nu + 1.0) * x / ((nu - 2.0) * (1.0 + x))
    )
    return scores


# --- reparameterization: omega > 0, a, b >= 0, a + b < 1, dof > 2 -----------------


def _expit(z):
    return special.expit(z)


def _to_natural(phi) -> np.ndarray:
    mu, lw, zp, zs, ln = phi
    p, s = _expit(zp), _expit(zs)
    return np.array([mu, math.exp(lw), p * s, p * (1.0 - s), 2.0 + math.exp(ln)])


def _to_free(theta) -> np.ndarray:
    mu, omega, a, b, nu = theta
    p = a + b
    s = a / p
    return np.array([mu, math.log(omega), special.logit(p), special.logit(s), math.log(nu - 2.0)])


def _jacobian(phi) -> np.ndarray:
    """d(natural)/d(free), shape (5, 5)."""
    mu, lw, zp, zs, ln = phi
    p, s = _expit(zp), _expit(zs)
    dp, ds = p * (1.0 - p), s * (1.0 - s)
    J = np.zeros((5, 5))
    J[0, 0] = 1.0
    J[1, 1] = math.exp(lw)
    J[2, 2], J[2, 3] = s * dp, p * ds
    J[3, 2], J[3, 3] = (1.0 - s) * dp, -p * ds
    J[4, 4] = math.exp(ln)
    return J


def _safe_loglik(theta, r, h0) -> float:
    with np.errstate(all="ignore"):
        val = garch_loglik(theta, r, h0)
    return val if math.isfinite(val) else -math.inf


def _bhhh(phi, r, h0, maxiter=BHHH_MAXITER, tol=BHHH_TOL):
    ll = _safe_loglik(_to_natural(phi), r, h0)
    converged = False
    it = 0
    for it in range(1, maxiter + 1):
        theta = _to_natural(phi)
        S = garch_scores(theta, r, h0) @ _jacobian(phi)
        g = S.sum(axis=0)
        opg = S.T @ S
        try:
            d = np.linalg.solve(opg, g)
        except np.linalg.LinAlgError:
            d = np.linalg.lstsq(opg, g, rcond=None)[0]
        decrement = float(g @ d)
        if decrement < tol:
            converged = True
            break
        step = 1.0
        while step > 1e-10:
            cand = phi + step * d
            cand_ll = _safe_loglik(_to_natural(cand), r, h0) if np.all(np.abs(cand[1:]) < 50) else -math.inf
            if cand_ll > ll:
                break
            step *= 0.5
        else:
            # no ascent along the BHHH direction: treat as stationary point
            converged = decrement < 1e-3
            break
        phi, ll = cand, cand_ll
    return phi, ll, converged, it


def _robust_se(theta, r, h0) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    S = garch_scores(theta, r, h0)
    B = S.T @ S
    H = np.empty((5, 5))
    for j in range(5):
        step = 1e-5 * max(abs(theta[j]), 1e-3)
        if j == 4:
            # keep the backward point inside dof > 2
            step = min(step, 0.5 * (theta[4] - 2.0))
        up, dn = theta.copy(), theta.copy()
        up[j] += step
        dn[j] -= step
        H[:, j] = (garch_scores(up, r, h0).sum(axis=0) - garch_scores(dn, r, h0).sum(axis=0)) / (2 * step)
    H = 0.5 * (H + H.T)
    Hinv = np.linalg.pinv(H)
    cov = Hinv @ B @ Hinv
    return np.sqrt(np.maximum(np.diag(cov), 0.0))


def garch_fit(r: ReturnSeries | np.ndarray, start: dict | None = None) -> GarchFit:
    """Maximum-likelihood GARCH(1,1)-t fit of a (percent) return series."""
    x = np.asarray(r.values if isinstance(r, ReturnSeries) else r, dtype=float)
    n = len(x)
    if n < 300:
        raise ValueError(f"GARCH fitting needs at least 300 observations, got {n}")
    h0 = float(np.var(x))
    if not h0 > 0:
        raise ValueError("constant series: variance is zero")

    init = {"mu": float(np.mean(x)), "omega": 0.05 * h0, "a": 0.05, "b": 0.90, "dof": 8.0}
    if start:
        init.update(start)
    phi0 = _to_free([init[k] for k in PARAM_NAMES])

    nm = optimize.minimize(
        lambda p: -_safe_loglik(_to_natural(p), x, h0),
        phi0,
        method="Nelder-Mead",
        options={"maxiter": SIMPLEX_MAXITER, "xatol": 1e-6, "fatol": 1e-8},
    )
    phi_nm = nm.x if math.isfinite(nm.fun) else phi0
    ll_nm = _safe_loglik(_to_natural(phi_nm), x, h0)

    phi, ll, converged, iters = _bhhh(phi_nm, x, h0)
    theta = _to_natural(phi)
    se = _robust_se(theta, x, h0)
    mu, omega, a, b, nu = theta
    sigma = np.sqrt(_variance_path(x - mu, omega, a, b, h0))
    msg = "converged" if converged else f"BHHH stopped after {iters} iterations without meeting tolerance"
    return GarchFit(
        mu=float(mu), omega=float(omega), a=float(a), b=float(b), dof=float(nu),
        log_likelihood=float(ll),
        robust_se=dict(zip(PARAM_NAMES, map(float, se))),
        sigma_path=sigma,
        converged=bool(converged),
        returns=x,
        h0=h0,
        simplex_log_likelihood=float(ll_nm),
        iterations=iters,
        message=msg,
    )


def conditional_sigma(f: GarchFit) -> np.ndarray:
    """Recompute the conditional standard deviation path from the stored parameters."""
    return np.sqrt(_variance_path(f.returns - f.mu, f.omega, f.a, f.b, f.h0))


def ljung_box(x, lags: int = 10) -> LjungBoxResult:
    """Portmanteau ``Q = n(n+2) sum_k rho_k^2 / (n-k)`` against chi-square(lags)."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    if lags < 1 or lags >= n / 4:
        raise ValueError(f"lags must be in [1, n/4) for n={n}, got {lags}")
    d = x - x.mean()
    denom = float(d @ d)
    rho = np.array([float(d[k:] @ d[:-k]) / denom for k in range(1, lags + 1)])
    q = n * (n + 2.0) * float(np.sum(rho**2 / (n - np.arange(1, lags + 1))))
    return LjungBoxResult(q, lags, float(stats.chi2.ppf(0.95, lags)), float(stats.chi2.sf(q, lags)))


def garch_simulate(omega: float, a: float, b: float, dof: float, n: int, seed=None,
                   mu: float = 0.0, burn: int = 500) -> np.ndarray:
    """Simulate a GARCH(1,1)-t path; the first ``burn`` draws are discarded."""
    if not (omega > 0 and a >= 0 and b >= 0 and a + b < 1):
        raise ValueError("need omega > 0, a, b >= 0 and a + b < 1")
    if not dof > 2:
        raise ValueError("dof must exceed 2 for a finite variance")
    if n < 1:
        raise ValueError("n must be positive")
    rng = np.random.default_rng(seed)
    total = n + burn
    z = rng.standard_t(dof, total) * math.sqrt((dof - 2.0) / dof)
    eps = np.empty(total)
    h = omega / (1.0 - a - b)
    prev = 0.0
    for t in range(total):
        h = omega + a * prev**2 + b * h if t else h
        eps[t] = math.sqrt(h) * z[t]
        prev = eps[t]
    return mu + eps[burn:]
