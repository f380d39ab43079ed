"""Post-processing of event logs into accumulation curves and fits.

Produces per-condition average cumulative series with termination-aware
truncation, group-size-1 baseline predictions (the size-1 curve sped up n
times), power-law fits a*t**b in linear space seeded by log-log least squares,
and the normalized-RMSE contrast between invention and improvement. All
outputs are plot-ready CSVs.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .engine import Event

METRICS = ("goals", "inventions", "improvements", "junk")
METRIC_EVENT = {
    "goals": "goal",
    "inventions": "invention",
    "improvements": "improvement",
    "junk": "junk",
}


class AnalysisError(ValueError):
    """Bad metric name, empty input, or unusable experiment directory."""


class FitError(AnalysisError):
    """Power fit undefined for this series."""


@dataclass
class CumulativeSeries:
    """Cumulative count at every trial 1..len(values)."""

    metric: str
    values: np.ndarray

    @property
    def n_trials(self) -> int:
        return len(self.values)

    def points(self) -> list[tuple[int, float]]:
        return [(t + 1, float(v)) for t, v in enumerate(self.values)]


@dataclass
class PowerFit:
    """Least-squares fit of y = a * t**b with range-normalized RMSE."""

    a: float
    b: float
    rmse: float
    nrmse: float
    loglog_a: float
    loglog_b: float
    iterations: int


def _event_pairs(events):
    for e in events:
        if isinstance(e, Event):
            yield e.trial, e.event
        else:
            yield int(e[0]), e[1]


def cumulative(events, metric: str, n_trials: int | None = None) -> CumulativeSeries:
    """Count matching events up to each trial 1..n_trials."""
    if metric not in METRIC_EVENT:
        raise AnalysisError(f"unknown metric {metric!r}; expected one of {METRICS}")
    wanted = METRIC_EVENT[metric]
    pairs = list(_event_pairs(events))
    if n_trials is None:
        n_trials = max((t for t, _ in pairs), default=0)
    counts = np.zeros(n_trials + 1, dtype=np.float64)
    for trial, name in pairs:
        if name == wanted and trial <= n_trials:
            counts[trial] += 1.0
    return CumulativeSeries(metric, np.cumsum(counts[1:]))


def average_series(series_list: list[CumulativeSeries]) -> CumulativeSeries:
    """Pointwise mean, truncated at the shortest series (earliest termination)."""
    if not series_list:
        raise AnalysisError("average_series needs at least one series")
    metric = series_list[0].metric
    t = min(s.n_trials for s in series_list)
    stacked = np.vstack([s.values[:t] for s in series_list])
    return CumulativeSeries(metric, stacked.mean(axis=0))


def scale_baseline(size1_avg: CumulativeSeries, n: int) -> CumulativeSeries:
    """Size-1 curve sped up n times: value at trial t is the size-1 value at n*t."""
    if n < 1:
        raise AnalysisError("group size must be >= 1")
    return CumulativeSeries(size1_avg.metric, size1_avg.values[n - 1 :: n].copy())


def _sse(t: np.ndarray, y: np.ndarray, a: float, b: float) -> float:
    with np.errstate(over="ignore", invalid="ignore"):
        r = y - a * np.power(t, b)
        s = float(np.dot(r, r))
    return s if math.isfinite(s) else math.inf


def fit_power(series: CumulativeSeries, max_iter: int = 100, rel_tol: float = 1e-9) -> PowerFit:
    """Fit y = a * t**b by damped Gauss-Newton on the linear-space residuals.

    Initialization is ordinary least squares on (log t, log y) over the y > 0
    points; the refinement minimizes the plain sum of squared residuals over
    every point. Steps that raise the SSE (or drive a nonpositive) are halved.
    """
    y = np.asarray(series.values, dtype=np.float64)
    t = np.arange(1, len(y) + 1, dtype=np.float64)
    pos = y > 0
    if int(pos.sum()) < 3:
        raise FitError("need at least 3 positive points to fit a power law")

    slope, intercept = np.polyfit(np.log(t[pos]), np.log(y[pos]), 1)
    loglog_a, loglog_b = float(math.exp(intercept)), float(slope)

    a, b = loglog_a, loglog_b
    sse = _sse(t, y, a, b)
    iterations = 0
    for _ in range(max_iter):
        iterations += 1
        with np.errstate(over="ignore", invalid="ignore"):
            f = a * np.power(t, b)
            r = y - f
            jac = np.column_stack((np.power(t, b), f * np.log(t)))
        if not np.all(np.isfinite(jac)):
            break
        delta, *_ = np.linalg.lstsq(jac, r, rcond=None)
        step = 1.0
        new_a, new_b, new_sse = a, b, sse
        while step >= 1e-12:
            ca, cb = a + step * delta[0], b + step * delta[1]
            if ca > 0:
                c_sse = _sse(t, y, ca, cb)
                if c_sse <= sse:
                    new_a, new_b, new_sse = ca, cb, c_sse
                    break
            step *= 0.5
        if step < 1e-12:
            break
        rel = max(abs(new_a - a) / (abs(a) + 1e-300), abs(new_b - b) / (abs(b) + 1e-300))
        a, b, sse = new_a, new_b, new_sse
        if rel < rel_tol:
            break

    rmse = math.sqrt(sse / len(y))
    y_range = float(y.max() - y.min())
    if y_range > 0:
        nrmse = rmse / y_range
    else:
        nrmse = 0.0 if rmse == 0.0 else math.inf
    return PowerFit(a=float(a), b=float(b), rmse=rmse, nrmse=nrmse,
                    loglog_a=loglog_a, loglog_b=loglog_b, iterations=iterations)


# ---------------------------------------------------------------------------
# experiment-directory reporting


def read_summary(path: str) -> list[dict]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            row = dict(zip(header, parts))
            rows.append(
                {
                    "group_size": int(row["group_size"]),
                    "replication": int(row["replication"]),
                    "seed": int(row["seed"]),
                    "termination_trial": int(row["termination_trial"]),
                    "goals_met": int(row["goals_met"]),
                    "inventions": int(row["inventions"]),
                    "improvements": int(row["improvements"]),
                    "junk": int(row["junk"]),
                }
            )
    return rows


def _manifest_write_junk(experiment_dir: str) -> bool:
    path = os.path.join(experiment_dir, "manifest.txt")
    if not os.path.exists(path):
        return True
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line.startswith("write_junk"):
                _, _, raw = line.partition("=")
                return raw.strip().lower() in ("true", "1", "yes")
    return True


def _load_event_counts(path: str, n_trials: int) -> dict[str, np.ndarray]:
    """Per-trial counts (index 0 = trial 1) for each event kind."""
    counts = {name: np.zeros(n_trials, dtype=np.float64) for name in METRIC_EVENT.values()}
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if not header.startswith("trial,agent,event"):
            raise AnalysisError(f"{path}: unrecognized header")
        for line in fh:
            parts = line.rstrip("\n").split(",")
            if len(parts) < 3:
                raise AnalysisError(f"{path}: short row")
            trial = int(parts[0])
            if 1 <= trial <= n_trials:
                arr = counts.get(parts[2])
                if arr is None:
                    raise AnalysisError(f"{path}: unknown event {parts[2]!r}")
                arr[trial - 1] += 1.0
    return counts


def _write_series_csv(path: str, series: CumulativeSeries) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("trial,value\n")
        for t, v in enumerate(series.values, start=1):
            fh.write(f"{t},{v!r}\n")


def report(experiment_dir: str, out_dir: str, metrics=METRICS) -> dict:
    """Write average-series, baseline, and fit CSVs for a finished experiment.

    Unreadable job files are excluded with a note and the analysis proceeds on
    the remaining replications.
    """
    for metric in metrics:
        if metric not in METRIC_EVENT:
            raise AnalysisError(f"unknown metric {metric!r}; expected one of {METRICS}")
    summary_path = os.path.join(experiment_dir, "summary.csv")
    if not os.path.exists(summary_path):
        raise AnalysisError(f"no summary.csv in {experiment_dir}")
    rows = read_summary(summary_path)
    if not rows:
        raise AnalysisError("summary.csv has no completed jobs")
    write_junk = _manifest_write_junk(experiment_dir)
    os.makedirs(out_dir, exist_ok=True)

    notes: list[str] = []
    averages: dict[tuple[int, str], CumulativeSeries] = {}
    group_sizes = sorted({r["group_size"] for r in rows})

    for g in group_sizes:
        per_metric: dict[str, list[CumulativeSeries]] = {m: [] for m in metrics}
        for row in (r for r in rows if r["group_size"] == g):
            path = os.path.join(
                experiment_dir, f"g{g}_r{row['replication']}.events.csv"
            )
            try:
                counts = _load_event_counts(path, row["termination_trial"])
            except (OSError, ValueError, AnalysisError) as exc:
                notes.append(f"excluded g{g} r{row['replication']}: {exc}")
                continue
            if not write_junk:
                counts["junk"] = (
                    g - counts["invention"] - counts["improvement"]
                )
            for m in metrics:
                per_metric[m].append(
                    CumulativeSeries(m, np.cumsum(counts[METRIC_EVENT[m]]))
                )
        for m in metrics:
            if not per_metric[m]:
                notes.append(f"no usable replications for g{g} {m}")
                continue
            avg = average_series(per_metric[m])
            averages[(g, m)] = avg
            _write_series_csv(os.path.join(out_dir, f"avg_g{g}_{m}.csv"), avg)

    if 1 in group_sizes:
        for g in group_sizes:
            for m in metrics:
                base = averages.get((1, m))
                if base is None:
                    continue
                series = scale_baseline(base, g)
                _write_series_csv(
                    os.path.join(out_dir, f"baseline_g{g}_{m}.csv"), series
                )
    else:
        notes.append("no size-1 condition: baseline predictions skipped")

    fits: dict[tuple[int, str], PowerFit] = {}
    fit_metrics = [m for m in ("inventions", "improvements") if m in metrics]
    if fit_metrics:
        with open(os.path.join(out_dir, "fits.csv"), "w", encoding="utf-8", newline="\n") as fh:
            fh.write("group_size,metric,a,b,rmse,nrmse,loglog_a,loglog_b\n")
            for g in group_sizes:
                for m in fit_metrics:
                    avg = averages.get((g, m))
                    if avg is None:
                        continue
                    try:
                        fit = fit_power(avg)
                    except FitError as exc:
                        notes.append(f"fit skipped for g{g} {m}: {exc}")
                        continue
                    fits[(g, m)] = fit
                    fh.write(
                        f"{g},{m},{fit.a!r},{fit.b!r},{fit.rmse!r},{fit.nrmse!r},"
                        f"{fit.loglog_a!r},{fit.loglog_b!r}\n"
                    )
    if "inventions" in metrics and "improvements" in metrics:
        with open(
            os.path.join(out_dir, "nrmse_comparison.csv"), "w", encoding="utf-8", newline="\n"
        ) as fh:
            fh.write("group_size,nrmse_invention,nrmse_improvement\n")
            for g in group_sizes:
                fi = fits.get((g, "inventions"))
                fp = fits.get((g, "improvements"))
                if fi is None or fp is None:
                    continue
                fh.write(f"{g},{fi.nrmse!r},{fp.nrmse!r}\n")

    with open(os.path.join(out_dir, "analysis_notes.txt"), "w", encoding="utf-8", newline="\n") as fh:
        if notes:
            fh.write("\n".join(notes) + "\n")
        else:
            fh.write("no exclusions\n")

    return {"averages": averages, "fits": fits, "notes": notes}
