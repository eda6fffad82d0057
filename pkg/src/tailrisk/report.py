"""End-to-end pipeline: loads series, runs every analysis section, and serializes the bundle."""

from __future__ import annotations

import csv
import datetime
import io
import json
import math
import os
import platform
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np
import scipy

from . import __version__
from .risk import DEFAULT_LEVELS, probability_grid, quantile_grid
from .series import RateSeries, ReturnSeries, SeriesError, load_series, log_returns, split_period, summary_stats
from .stationarity import adf_test, pp_test
from .tails import SIDES, estimate_tail, moment_test, tail_stability, top_extremes
from .volatility import garch_fit, ljung_box

__all__ = [
    "AnalysisConfig",
    "ReportBundle",
    "SECTIONS",
    "run_pipeline",
    "emit",
    "write_outputs",
    "parse_config_file",
]

SECTIONS = ("summary", "unitroot", "tails", "extremes", "quantiles", "probabilities", "garch")


@dataclass(frozen=True)
class AnalysisConfig:
    inputs: tuple  # of (path, label)
    boundary: str | None = None
    sides: tuple = SIDES
    probabilities: tuple | None = None
    levels: tuple = DEFAULT_LEVELS
    output_format: str = "json"
    trace: bool = False
    seed: int = 0
    sections: tuple = SECTIONS
    lb_lags: int = 10
    extremes_k: int = 5

    def __post_init__(self):
        if not self.inputs:
            raise ValueError("at least one input series is required")
        if self.probabilities is not None and (
            not self.probabilities or any(not 0 < p < 1 for p in self.probabilities)
        ):
            raise ValueError("quantile probabilities must be a non-empty list in (0, 1)")
        if not self.levels or any(x <= 0 for x in self.levels):
            raise ValueError("exceedance levels must be a non-empty list of positive values")
        if self.output_format not in ("json", "csv"):
            raise ValueError(f"format must be json or csv, got {self.output_format!r}")
        bad = set(self.sides) - set(SIDES)
        if bad or not self.sides:
            raise ValueError(f"sides must be drawn from {SIDES}")
        unknown = set(self.sections) - set(SECTIONS)
        if unknown:
            raise ValueError(f"unknown section(s) {sorted(unknown)}")
        if self.boundary is not None:
            np.datetime64(self.boundary, "D")  # raises on malformed dates

    def echo(self) -> dict:
        d = asdict(self)
        d["inputs"] = [{"path": p, "label": lab} for p, lab in self.inputs]
        d["probabilities"] = "default: 0.05, 0.01, 0.005, 1/n, 1/(2n), 1/(4n)" if self.probabilities is None else list(self.probabilities)
        for key in ("sides", "levels", "sections"):
            d[key] = list(d[key])
        return d


@dataclass
class ReportBundle:
    series: dict
    cross_period: dict | None
    metadata: dict

    def to_dict(self) -> dict:
        return {"series": self.series, "cross_period": self.cross_period, "metadata": self.metadata}

    @classmethod
    def from_dict(cls, d: dict) -> "ReportBundle":
        return cls(d["series"], d["cross_period"], d["metadata"])

    @property
    def degraded(self) -> list:
        return self.metadata["flags"]["degraded_sections"]


# --- JSON-safe conversion ---------------------------------------------------------


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if obj.dtype.kind == "M":
            return [str(d) for d in obj.astype("datetime64[D]")]
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.datetime64):
        return str(obj.astype("datetime64[D]"))
    if isinstance(obj, datetime.date):
        return obj.isoformat()
    return obj


# --- per-series analysis ----------------------------------------------------------


class _Recorder:
    """Collects the operation behind every section and any degradation flags."""

    def __init__(self, label: str):
        self.label = label
        self.operations: list = []
        self.degraded: list = []
        self.fallbacks: list = []
        self.nonconverged: list = []

    def run(self, path: str, operation: str, fn, **args):
        self.operations.append({"path": f"{self.label}/{path}", "operation": operation, "args": _clean(args)})
        try:
            return fn(), None
        except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
            self.degraded.append({"path": f"{self.label}/{path}", "error": str(exc)})
            return None, {"status": "degraded", "error": str(exc)}


def _prob_label(p: float, n: int) -> str:
    named = {0.05: "r_p(95)", 0.01: "r_p(99)", 0.005: "r_p(99.5)"}
    if p in named:
        return named[p]
    for mult, name in ((1, "r_p(1/n)"), (2, "r_p(1/2n)"), (4, "r_p(1/4n)")):
        if p == 1.0 / (mult * n):
            return name
    return f"r_p({p:g})"


def _level_label(x: float) -> str:
    return f"P_r{x:g}%"


def _unitroot_section(rec: _Recorder, period: str, log_levels: np.ndarray, returns: np.ndarray) -> dict:
    out = {}
    for name, data in (("levels", log_levels), ("returns", returns)):
        block = {}
        for kind, fn in (
            ("ADF", lambda d=data: adf_test(d)),
            ("PP_Zt", lambda d=data: pp_test(d, "PP_Zt")),
            ("PP_Zrho", lambda d=data: pp_test(d, "PP_Zrho")),
        ):
            res, err = rec.run(f"{period}/unitroot/{name}/{kind}", f"stationarity.{'adf_test' if kind == 'ADF' else 'pp_test'}",
                               fn, variant=kind, spec="c")
            block[kind] = err or {
                "statistic": res.statistic,
                "lags_or_bandwidth": res.lags_or_bandwidth,
                "deterministic_spec": res.deterministic_spec,
                "critical_value_5pct": res.critical_value_5pct,
                "reject_5pct": res.reject_5pct,
                "nobs": res.nobs,
                "critical_value_source": res.metadata["critical_values"],
            }
        out[name] = block
    return out


def _analyse_period(rec: _Recorder, cfg: AnalysisConfig, period: str, r: ReturnSeries, rates: RateSeries) -> dict:
    want = set(cfg.sections)
    out: dict = {"n": r.n, "first_date": r.dates[0], "last_date": r.dates[-1]}

    if "summary" in want:
        s, err = rec.run(f"{period}/summary", "series_core.summary_stats", lambda: summary_stats(r))
        out["summary"] = err or {
            "n": s.n, "mean": s.mean, "standard_deviation": s.standard_deviation, "range": s.range,
            "interquartile_range": s.interquartile_range, "skewness": s.skewness,
            "excess_kurtosis": s.excess_kurtosis, "skew_z": s.skew_z, "kurt_z": s.kurt_z,
            "skew_significant": s.skew_significant, "kurt_significant": s.kurt_significant,
            "ks_statistic": s.ks_statistic, "ks_critical_5pct": s.ks_critical_5pct,
            "ks_reject_5pct": s.ks_reject_5pct, "moments_defined": s.moments_defined, "conventions": s.metadata,
        }

    if "unitroot" in want:
        mask = (rates.dates >= r.dates[0] - np.timedelta64(0, "D")) & (rates.dates <= r.dates[-1])
        # include the level preceding the first return of the period
        first = max(int(np.argmax(mask)) - 1, 0)
        last = int(len(mask) - np.argmax(mask[::-1]))
        out["unitroot"] = _unitroot_section(rec, period, np.log(rates.levels[first:last]), r.values)

    estimates = {}
    need_tails = want & {"tails", "quantiles", "probabilities"}
    if need_tails:
        tails = {}
        sides = tuple(cfg.sides) if "tails" in want else ("both",)
        for side in sides:
            res, err = rec.run(f"{period}/tails/{side}", "tail_estimation.estimate_tail",
                               lambda sd=side: estimate_tail(r, sd, return_selection=True), side=side)
            if err:
                tails[side] = err
                continue
            est, sel = res
            estimates[side] = est
            entry = est.to_dict()
            entry["fallback_used"] = sel.fallback_used
            if sel.fallback_used:
                rec.fallbacks.append(f"{rec.label}/{period}/tails/{side}")
            if cfg.trace:
                entry["threshold_selection"] = {
                    "n": sel.n, "m1": sel.m1, "m2": sel.m2, "gamma1": sel.gamma1, "gamma2": sel.gamma2,
                    "alpha1": sel.alpha1, "alpha2": sel.alpha2, "lambda": sel.lam, "m_star": sel.m_star,
                    "fallback_used": sel.fallback_used,
                }
            tails[side] = entry
        tests = {}
        if "upper" in estimates and "lower" in estimates:
            t, _ = rec.run(f"{period}/tests/tail_symmetry", "tail_estimation.tail_stability",
                           lambda: tail_stability(estimates["upper"], estimates["lower"]), a="upper", b="lower")
            tests["tail_symmetry"] = asdict(t)
        if "both" in estimates:
            for k, alt in ((2.0, "greater"), (4.0, "less")):
                t, _ = rec.run(f"{period}/tests/moment_{k:g}", "tail_estimation.moment_test",
                               lambda k=k, alt=alt: moment_test(estimates["both"], k, alt), k=k, alternative=alt)
                tests[f"moment_{k:g}"] = asdict(t)
        if "tails" in want:
            out["tails"] = tails
            out["tail_tests"] = tests

    if "extremes" in want:
        k = min(cfg.extremes_k, r.n // 2)
        ex, err = rec.run(f"{period}/extremes", "tail_estimation.top_extremes", lambda: top_extremes(r, k), k=k)
        out["extremes"] = err or {
            kind: [{"date": d, "value": v} for d, v in rows] for kind, rows in ex.items()
        }

    est = estimates.get("both")
    if "quantiles" in want:
        if est is None:
            out["quantiles"] = {"status": "degraded", "error": "no combined-tail estimate"}
        else:
            g, err = rec.run(f"{period}/quantiles", "risk_measures.quantile_grid",
                             lambda: quantile_grid(est, cfg.probabilities), side="both",
                             probabilities=cfg.probabilities if cfg.probabilities is not None else "default")
            out["quantiles"] = err or {
                "side": "both",
                "entries": [
                    {"p": e.p, "label": _prob_label(e.p, est.n), "level": e.level, "in_sample": e.in_sample,
                     "extrapolated": e.extrapolated}
                    for e in g.entries
                ],
            }
    if "probabilities" in want:
        if est is None:
            out["probabilities"] = {"status": "degraded", "error": "no combined-tail estimate"}
        else:
            g, err = rec.run(f"{period}/probabilities", "risk_measures.probability_grid",
                             lambda: probability_grid(est, cfg.levels), side="both", levels=cfg.levels)
            out["probabilities"] = err or {
                "side": "both",
                "entries": [
                    {"level": e.level, "label": _level_label(e.level), "probability": e.probability,
                     "percent": e.percent, "in_region": e.in_region}
                    for e in g.entries
                ],
            }

    if "garch" in want:
        fit, err = rec.run(f"{period}/garch", "volatility.garch_fit", lambda: garch_fit(r))
        if err:
            out["garch"] = err
        else:
            z = fit.standardized_residuals
            lags = cfg.lb_lags
            lb, lb_err = rec.run(f"{period}/garch/ljung_box", "volatility.ljung_box", lambda: ljung_box(z, lags), lags=lags)
            lb2, lb2_err = rec.run(f"{period}/garch/ljung_box_squared", "volatility.ljung_box",
                                   lambda: ljung_box(z**2, lags), lags=lags, squared=True)
            if not fit.converged:
                rec.nonconverged.append(f"{rec.label}/{period}/garch")
                rec.degraded.append({"path": f"{rec.label}/{period}/garch", "error": fit.message})
            out["garch"] = {
                "params": fit.params,
                "robust_se": fit.robust_se,
                "tstats": fit.tstats,
                "log_likelihood": fit.log_likelihood,
                "aic": fit.aic,
                "bic": fit.bic,
                "converged": fit.converged,
                "stationary": fit.stationary,
                "message": fit.message,
                "ljung_box": lb_err or asdict(lb) | {"reject_5pct": lb.reject_5pct},
                "ljung_box_squared": lb2_err or asdict(lb2) | {"reject_5pct": lb2.reject_5pct},
                "sigma_path": {"dates": r.dates, "values": fit.sigma_path},
            }
    return out


def _analyse_series(cfg: AnalysisConfig, label: str, rates: RateSeries):
    rec = _Recorder(label)
    r = log_returns(rates)
    result = {
        "label": label,
        "n_levels": len(rates),
        "levels": {"dates": rates.dates, "log_levels": np.log(rates.levels)},
        "returns": {"dates": r.dates, "values": r.values},
        "periods": {},
    }
    if cfg.boundary is None:
        periods = {"FULL": r}
    else:
        pre, post = split_period(r, cfg.boundary)
        periods = {"PRE": pre, "POST": post}
    for name, part in periods.items():
        result["periods"][name] = _analyse_period(rec, cfg, name, part, rates)
    return result, rec


def _cross_period(series: dict, boundary) -> dict | None:
    """Antisymmetric matrix of stability statistics over all combined-tail estimates."""
    from .tails import TailEstimate

    keys, ests = [], []
    for label, s in series.items():
        for period, body in s["periods"].items():
            both = body.get("tails", {}).get("both")
            if both and "alpha" in both:
                keys.append(f"{label}/{period}")
                ests.append(TailEstimate(side="both", m=both["m"], threshold_value=both["threshold_value"],
                                         gamma=both["gamma"], n=both["n"]))
    if not keys:
        return None
    mat = [[tail_stability(a, b, kind="cross_period").statistic for b in ests] for a in ests]
    out = {"keys": keys, "matrix": mat, "critical_value": 1.96}
    if boundary is not None:
        post = [i for i, k in enumerate(keys) if k.endswith("/POST")]
        pre = [i for i, k in enumerate(keys) if k.endswith("/PRE")]
        out["post_vs_pre"] = {
            "rows": [keys[i].rsplit("/", 1)[0] for i in post],
            "columns": [keys[j].rsplit("/", 1)[0] for j in pre],
            "values": [[mat[i][j] for j in pre] for i in post],
        }
    return out


def run_pipeline(cfg: AnalysisConfig) -> ReportBundle:
    # read everything up front so unreadable input fails before any computation
    loaded = []
    for path, label in cfg.inputs:
        try:
            loaded.append((label, load_series(path, label=label)))
        except OSError as exc:
            raise SeriesError(f"cannot read input {path!r}: {exc.strerror or exc}") from None

    with ThreadPoolExecutor(max_workers=min(4, len(loaded))) as pool:
        results = list(pool.map(lambda item: _analyse_series(cfg, *item), loaded))

    series, operations, degraded, fallbacks, nonconverged = {}, [], [], [], []
    for (label, _), (body, rec) in zip(loaded, results):
        series[label] = body
        operations += rec.operations
        degraded += rec.degraded
        fallbacks += rec.fallbacks
        nonconverged += rec.nonconverged

    cross = _cross_period(series, cfg.boundary) if set(cfg.sections) & {"tails"} else None
    metadata = {
        "versions": {
            "tailrisk": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": platform.python_version(),
        },
        "config": cfg.echo(),
        "defaults": {
            "split_boundary": cfg.boundary if cfg.boundary is not None else "none (single FULL period)",
            "quantile_probabilities": "0.05, 0.01, 0.005, 1/n, 1/(2n), 1/(4n)" if cfg.probabilities is None else "user",
            "quantile_and_probability_side": "both",
            "moment_tests": "k=2 (H0 alpha<=2), k=4 (H0 alpha>=4), critical 1.64",
            "unit_root_spec": "constant, no trend",
            "adf_max_lag": "floor(12 (n/100)^(1/4)), AIC selection",
            "pp_bandwidth": "floor(4 (n/100)^(2/9)), Bartlett kernel",
            "ljung_box_lags": cfg.lb_lags,
        },
        "flags": {
            "degraded_sections": degraded,
            "threshold_fallbacks": fallbacks,
            "garch_nonconverged": nonconverged,
        },
        "operations": operations,
    }
    return ReportBundle(_clean(series), _clean(cross), _clean(metadata))


# --- emission ---------------------------------------------------------------------


def _fmt(v, digits=3):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return f"{v:.{digits}f}"
    return str(v)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _periods(bundle: ReportBundle):
    for label, s in bundle.series.items():
        for period, body in s["periods"].items():
            yield label, period, body


def _tables(bundle: ReportBundle) -> dict:
    files = {}

    rows = []
    for label, period, b in _periods(bundle):
        ur = b.get("unitroot")
        if not ur:
            continue
        row = [label, period]
        for block in ("levels", "returns"):
            for kind in ("ADF", "PP_Zt", "PP_Zrho"):
                cell = ur[block][kind]
                row += [_fmt(cell.get("statistic"), 2), _fmt(cell.get("reject_5pct"))]
        rows.append(row)
    if rows:
        head = ["label", "period"]
        for block in ("levels", "returns"):
            for kind in ("adf", "pp_zt", "pp_zrho"):
                head += [f"{kind}_{block}", f"{kind}_{block}_reject"]
        files["unitroot.csv"] = _csv(head, rows)

    rows = []
    for label, period, b in _periods(bundle):
        s = b.get("summary")
        if not s or "mean" not in s:
            continue
        rows.append([label, period] + [_fmt(s[k]) for k in (
            "mean", "standard_deviation", "range", "interquartile_range", "skewness", "skew_significant",
            "excess_kurtosis", "kurt_significant", "ks_statistic", "ks_reject_5pct")])
    if rows:
        files["summary.csv"] = _csv(
            ["label", "period", "mean", "standard_deviation", "range", "interquartile_range", "skew", "skew_sig",
             "kurt", "kurt_sig", "ks", "ks_reject"], rows)

    rows = []
    for label, period, b in _periods(bundle):
        tails = b.get("tails")
        if not tails:
            continue
        row = [label, period]
        for side in SIDES:
            t = tails.get(side) or {}
            row += [_fmt(t.get("alpha"), 2), _fmt(t.get("se_alpha"), 2), _fmt(t.get("m"))]
        tests = b.get("tail_tests", {})
        row += [_fmt(tests.get(k, {}).get("statistic"), 2) for k in ("tail_symmetry", "moment_2", "moment_4")]
        rows.append(row)
    if rows:
        files["tails.csv"] = _csv(
            ["label", "period", "alpha_lower", "se_lower", "m_lower", "alpha_upper", "se_upper", "m_upper",
             "alpha_both", "se_both", "m_both", "upper_minus_lower", "moment_2", "moment_4"], rows)

    rows = []
    for label, period, b in _periods(bundle):
        ex = b.get("extremes")
        if not ex or "highest" not in ex:
            continue
        for kind in ("highest", "lowest"):
            rows.append([label, period, kind] + [_fmt(e["value"], 2) for e in ex[kind]])
    if rows:
        k = max(len(r) for r in rows) - 3
        files["extremes.csv"] = _csv(["label", "period", "kind"] + [str(i) for i in range(1, k + 1)], rows)

    cross = bundle.cross_period
    if cross:
        if "post_vs_pre" in cross:
            pv = cross["post_vs_pre"]
            files["post_vs_pre_stability.csv"] = _csv(
                ["post\\pre"] + pv["columns"],
                [[r] + [_fmt(v, 2) for v in vals] for r, vals in zip(pv["rows"], pv["values"])])
        files["stability_matrix.csv"] = _csv(
            [""] + cross["keys"], [[k] + [_fmt(v, 2) for v in row] for k, row in zip(cross["keys"], cross["matrix"])])

    for section, fname, key, vkey, digits in (
        ("quantiles", "quantiles.csv", "label", "level", 2),
        ("probabilities", "exceedance_probabilities.csv", "label", "percent", 2),
    ):
        cols, rows = [], []
        for label, period, b in _periods(bundle):
            g = b.get(section)
            if not g or "entries" not in g:
                continue
            cells = {e[key]: e[vkey] for e in g["entries"]}
            for c in cells:
                if c not in cols:
                    cols.append(c)
            rows.append((label, period, cells))
        if rows:
            files[fname] = _csv(["label", "period"] + cols,
                                [[lab, per] + [_fmt(cells.get(c), digits) for c in cols] for lab, per, cells in rows])

    rows = []
    for label, period, b in _periods(bundle):
        g = b.get("garch")
        if not g or "params" not in g:
            continue
        p, t = g["params"], g["tstats"]
        lb, lb2 = g["ljung_box"], g["ljung_box_squared"]
        rows.append([label, period] + [_fmt(p[k], 4) for k in ("mu", "omega", "a", "b", "dof")]
                    + [_fmt(t[k], 3) for k in ("mu", "omega", "a", "b", "dof")]
                    + [_fmt(g["log_likelihood"], 3), _fmt(g["aic"], 3), _fmt(g["bic"], 3),
                       _fmt(lb.get("statistic"), 3), _fmt(lb2.get("statistic"), 3), _fmt(g["converged"])])
    if rows:
        files["garch.csv"] = _csv(
            ["label", "period", "mu", "omega", "a", "b", "dof", "t_mu", "t_omega", "t_a", "t_b", "t_dof",
             "log_likelihood", "aic", "bic", "ljung_box", "ljung_box_squared", "converged"], rows)
    return files


def _plot_files(bundle: ReportBundle) -> dict:
    files = {}
    for label, s in bundle.series.items():
        lv = s["levels"]
        files[f"plot_log_levels_{label}.csv"] = _csv(["date", "value"], zip(lv["dates"], map(repr, lv["log_levels"])))
        rt = s["returns"]
        files[f"plot_returns_{label}.csv"] = _csv(["date", "value"], zip(rt["dates"], map(repr, rt["values"])))
        for period, body in s["periods"].items():
            g = body.get("garch")
            if g and "sigma_path" in g:
                sp = g["sigma_path"]
                files[f"plot_sigma_{label}_{period}.csv"] = _csv(["date", "value"], zip(sp["dates"], map(repr, sp["values"])))
    return files


def emit(bundle: ReportBundle, fmt: str = "json"):
    """Serialize the bundle: one JSON document (str) or a ``{filename: csv_text}`` mapping."""
    if fmt == "json":
        return json.dumps(bundle.to_dict(), indent=2, allow_nan=False) + "\n"
    if fmt == "csv":
        return {**_tables(bundle), **_plot_files(bundle)}
    raise ValueError(f"format must be json or csv, got {fmt!r}")


def write_outputs(bundle: ReportBundle, fmt: str, destination: str | None, stream=None) -> list:
    """Write emitted output to ``destination`` (file for JSON, directory for CSV) or ``stream``."""
    out = emit(bundle, fmt)
    if destination is None:
        if fmt == "json":
            stream.write(out)
        else:
            for name, text in out.items():
                if name.startswith("plot_"):
                    continue
                stream.write(f"# {name}\n{text}\n")
        return []
    try:
        if fmt == "json":
            parent = os.path.dirname(os.path.abspath(destination))
            os.makedirs(parent, exist_ok=True)
            with open(destination, "w", encoding="utf-8", newline="") as fh:
                fh.write(out)
            return [destination]
        os.makedirs(destination, exist_ok=True)
        written = []
        for name, text in out.items():
            path = os.path.join(destination, name)
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
            written.append(path)
        return written
    except OSError as exc:
        raise OSError(f"cannot write output to {destination!r}: {exc.strerror or exc}") from None


# --- config files -----------------------------------------------------------------


def parse_config_file(path: str) -> dict:
    """Read ``key = value`` lines; ``input`` may repeat. Returns raw strings."""
    cfg: dict = {"input": []}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, value = key.strip().lower(), value.strip()
            if key == "input":
                cfg["input"].append(value)
            else:
                cfg[key] = value
    return cfg
