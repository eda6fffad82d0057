"""Extreme-value limit laws, heavy/thin-tailed reference distributions and seeded samplers.

Random draws use ``numpy.random.default_rng(seed)`` (PCG64). Pareto, Fréchet,
Cauchy, exponential and uniform draws are inverse-CDF transforms of the
generator's uniforms; normal draws use its standard-normal ziggurat; Student-t
draws are ``Z / sqrt(V / dof)`` with ``Z`` normal and ``V`` chi-square, both from
the same generator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy import integrate, special, stats

__all__ = [
    "GevParams",
    "DistSpec",
    "MaxStabilityReport",
    "gev_cdf",
    "evd_cdf",
    "classify_domain",
    "sample",
    "cdf",
    "survivor",
    "ppf",
    "transform_uniform",
    "gnedenko_ratio",
    "max_stability_check",
    "FAMILIES",
]

Family = Literal["gumbel", "frechet", "weibull"]

_PARAMS = {
    "normal": {"scale": 1.0},
    "lognormal": {"sigma": 1.0, "scale": 1.0},
    "exponential": {"scale": 1.0},
    "uniform": {"scale": 1.0},
    "cauchy": {"scale": 1.0},
    "student_t": {"dof": None, "scale": 1.0},
    "pareto": {"alpha": None, "scale": 1.0},
    "frechet": {"alpha": None, "scale": 1.0},
}
FAMILIES = tuple(_PARAMS)


@dataclass(frozen=True)
class GevParams:
    gamma_shape: float

    @property
    def family(self) -> str:
        return classify_domain(self.gamma_shape)


@dataclass(frozen=True)
class DistSpec:
    family: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in _PARAMS:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        allowed = _PARAMS[self.family]
        unknown = set(self.params) - set(allowed)
        if unknown:
            raise ValueError(f"{self.family}: unknown parameter(s) {sorted(unknown)}")
        full = {}
        for name, default in allowed.items():
            value = self.params.get(name, default)
            if value is None:
                raise ValueError(f"{self.family}: parameter {name!r} is required")
            value = float(value)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{self.family}: parameter {name!r} must be positive, got {value}")
            full[name] = value
        object.__setattr__(self, "params", full)

    @classmethod
    def parse(cls, family: str, *assignments: str) -> "DistSpec":
        """Build from ``name=value`` strings, e.g. ``DistSpec.parse("pareto", "alpha=3")``."""
        params = {}
        for item in assignments:
            name, sep, value = item.partition("=")
            if not sep:
                raise ValueError(f"expected name=value, got {item!r}")
            params[name.strip()] = float(value)
        return cls(family, params)

    @property
    def tail_index(self) -> float | None:
        """Fréchet-domain tail index, or None for thin/bounded tails."""
        if self.family in ("pareto", "frechet"):
            return self.params["alpha"]
        if self.family == "student_t":
            return self.params["dof"]
        if self.family == "cauchy":
            return 1.0
        return None


# --- limit laws --------------------------------------------------------------


def gev_cdf(p: GevParams | float, r):
    """Generalized extreme-value CDF ``exp(-(1 + g r)^(-1/g))``, Gumbel at g = 0."""
    g = p.gamma_shape if isinstance(p, GevParams) else float(p)
    r = np.asarray(r, dtype=float)
    if g == 0.0:
        out = np.exp(-np.exp(-r))
    else:
        z = 1.0 + g * r
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            inner = np.exp(-np.log1p(g * r) / g)
            out = np.exp(-inner)
        # outside the support: below the lower endpoint (g > 0) or above the upper (g < 0)
        out = np.where(z > 0, out, 0.0 if g > 0 else 1.0)
    return out if out.ndim else float(out)


def evd_cdf(family: Family, alpha: float, r):
    """The three extreme-value types: Gumbel, Fréchet(alpha), Weibull(alpha)."""
    r = np.asarray(r, dtype=float)
    if family == "gumbel":
        out = np.exp(-np.exp(-r))
    elif family in ("frechet", "weibull"):
        if not alpha > 0:
            raise ValueError("alpha must be positive")
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            if family == "frechet":
                out = np.where(r > 0, np.exp(-np.power(np.where(r > 0, r, 1.0), -alpha)), 0.0)
            else:
                out = np.where(r <= 0, np.exp(-np.power(np.where(r <= 0, -r, 0.0), alpha)), 1.0)
    else:
        raise ValueError(f"family must be gumbel, frechet or weibull, got {family!r}")
    return out if out.ndim else float(out)


def classify_domain(gamma_shape: float) -> str:
    if gamma_shape > 0:
        return "frechet"
    if gamma_shape < 0:
        return "weibull"
    return "gumbel"


# --- reference distributions ----------------------------------------------------


def ppf(spec: DistSpec, u):
    """Quantile function where it is closed form."""
    u = np.asarray(u, dtype=float)
    p = spec.params
    s = p["scale"] if "scale" in p else 1.0
    f = spec.family
    if f == "pareto":
        return s * (1.0 - u) ** (-1.0 / p["alpha"])
    if f == "frechet":
        return s * (-np.log(u)) ** (-1.0 / p["alpha"])
    if f == "cauchy":
        return s * np.tan(np.pi * (u - 0.5))
    if f == "exponential":
        return -s * np.log1p(-u)
    if f == "uniform":
        return s * u
    if f == "normal":
        return s * special.ndtri(u)
    if f == "lognormal":
        return s * np.exp(p["sigma"] * special.ndtri(u))
    if f == "student_t":
        return s * special.stdtrit(p["dof"], u)
    raise ValueError(f"no quantile function for {f}")


def cdf(spec: DistSpec, x):
    x = np.asarray(x, dtype=float)
    p = spec.params
    s = p.get("scale", 1.0)
    z = x / s
    f = spec.family
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if f == "pareto":
            out = np.where(z >= 1.0, 1.0 - np.power(np.maximum(z, 1.0), -p["alpha"]), 0.0)
        elif f == "frechet":
            out = evd_cdf("frechet", p["alpha"], z)
        elif f == "cauchy":
            out = 0.5 + np.arctan(z) / np.pi
        elif f == "exponential":
            out = np.where(z > 0, -np.expm1(-np.maximum(z, 0.0)), 0.0)
        elif f == "uniform":
            out = np.clip(z, 0.0, 1.0)
        elif f == "normal":
            out = special.ndtr(z)
        elif f == "lognormal":
            out = np.where(z > 0, special.ndtr(np.log(np.where(z > 0, z, 1.0)) / p["sigma"]), 0.0)
        elif f == "student_t":
            out = special.stdtr(p["dof"], z)
        else:  # pragma: no cover - DistSpec validates the family
            raise ValueError(f)
    return np.asarray(out, dtype=float)


def _t_survivor(dof: float, z: float) -> float:
    pdf = stats.t(dof).pdf
    val, _ = integrate.quad(pdf, z, np.inf, epsabs=1e-12, epsrel=1e-12, limit=200)
    return val


def survivor(spec: DistSpec, x: float) -> float:
    """Exact ``1 - F(x)``; Student-t uses adaptive quadrature of the density."""
    p = spec.params
    s = p.get("scale", 1.0)
    z = x / s
    f = spec.family
    if f == "pareto":
        return 1.0 if z < 1 else z ** (-p["alpha"])
    if f == "frechet":
        return 1.0 if z <= 0 else -math.expm1(-(z ** (-p["alpha"])))
    if f == "cauchy":
        return 0.5 - math.atan(z) / math.pi if z <= 0 else math.atan2(1.0, z) / math.pi
    if f == "exponential":
        return 1.0 if z <= 0 else math.exp(-z)
    if f == "uniform":
        return float(np.clip(1.0 - z, 0.0, 1.0))
    if f == "normal":
        return float(special.ndtr(-z))
    if f == "lognormal":
        return 1.0 if z <= 0 else float(special.ndtr(-math.log(z) / p["sigma"]))
    if f == "student_t":
        return _t_survivor(p["dof"], z)
    raise ValueError(f"no survivor function for {f}")  # pragma: no cover


def sample(spec: DistSpec, n: int, seed: int | np.random.Generator | None = None) -> np.ndarray:
    if n < 1:
        raise ValueError(f"sample size must be at least 1, got {n}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    f = spec.family
    p = spec.params
    if f == "normal":
        return p["scale"] * rng.standard_normal(n)
    if f == "lognormal":
        return p["scale"] * np.exp(p["sigma"] * rng.standard_normal(n))
    if f == "student_t":
        z = rng.standard_normal(n)
        v = rng.chisquare(p["dof"], n)
        return p["scale"] * z / np.sqrt(v / p["dof"])
    # open interval avoids u = 0 (infinite Pareto/Fréchet draws)
    u = rng.random(n)
    u = np.where(u == 0.0, np.nextafter(0.0, 1.0), u)
    return transform_uniform(spec, u)


def transform_uniform(spec: DistSpec, u):
    """Map uniforms on (0, 1) to draws; Pareto uses the survivor inverse ``u^(-1/alpha)``."""
    u = np.asarray(u, dtype=float)
    if spec.family == "pareto":
        return spec.params["scale"] * u ** (-1.0 / spec.params["alpha"])
    return ppf(spec, u)


def gnedenko_ratio(spec: DistSpec, t: float, r: float) -> float:
    """Tail ratio ``(1 - F(t r)) / (1 - F(t))``, which tends to ``r^-alpha`` in the Fréchet domain."""
    if not r > 0:
        raise ValueError("r must be positive")
    p = spec.params
    if spec.family == "pareto" and t >= p["scale"] and t * r >= p["scale"]:
        return r ** (-p["alpha"])
    if spec.family == "normal":
        # log-space keeps the ratio representable far into the tail
        s = p["scale"]
        return float(np.exp(special.log_ndtr(-t * r / s) - special.log_ndtr(-t / s)))
    den = survivor(spec, t)
    if den == 0.0:
        raise ValueError(f"survivor underflows at t={t}")
    return survivor(spec, t * r) / den


@dataclass(frozen=True)
class MaxStabilityReport:
    family: str
    alpha: float
    block: int
    reps: int
    scale_factor: float
    ks_statistic: float
    p_value: float
    passed: bool


def max_stability_check(spec: DistSpec, block: int, reps: int, seed=None, level: float = 0.05) -> MaxStabilityReport:
    """Compare block maxima with ``block^(1/alpha) * R``, ``R`` from the Fréchet limit.

    Two-sample KS between ``reps`` block maxima and ``reps`` independent
    rescaled Fréchet draws with the same index and scale.
    """
    if spec.family not in ("frechet", "pareto"):
        raise ValueError(f"max-stability check needs a Fréchet or Pareto spec, got {spec.family}")
    if block < 1 or reps < 2:
        raise ValueError("block must be >= 1 and reps >= 2")
    alpha = spec.params["alpha"]
    rng = np.random.default_rng(seed)
    maxima = sample(spec, block * reps, rng).reshape(reps, block).max(axis=1)
    limit = DistSpec("frechet", {"alpha": alpha, "scale": spec.params["scale"]})
    factor = block ** (1.0 / alpha)
    scaled = factor * sample(limit, reps, rng)
    res = stats.ks_2samp(maxima, scaled)
    return MaxStabilityReport(spec.family, alpha, block, reps, factor, float(res.statistic),
                              float(res.pvalue), bool(res.pvalue >= level))
