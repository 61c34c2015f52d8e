"""Analytics over run logs: throughput, regressions, error rates, motion.

All statistics work on TrialRecord streams pooled from one or more runs.
Conventions follow the usual pointing-study treatment: per-trial
throughput ID/MT averaged over trials, normal-approximation CIs for
means, Wilson intervals for rates, and a t-based interval for regression
slopes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy import stats as _sps

from .records import RunLog, TrialRecord

WARMUP_TRIALS = 5
Z95 = 1.96


def _flatten(logs) -> list[TrialRecord]:
    if isinstance(logs, RunLog):
        return list(logs.records)
    out: list[TrialRecord] = []
    for log in logs:
        if isinstance(log, TrialRecord):
            out.append(log)
        else:
            out.extend(log.records)
    return out


def _logs(logs) -> list[RunLog]:
    return [logs] if isinstance(logs, RunLog) else list(logs)


def exclude_warmup(log: RunLog, k: int = WARMUP_TRIALS) -> RunLog:
    """Drop trials with trial_idx <= k. Idempotent for a fixed k.

    If nothing survives, the log is returned empty with a warning marker
    rather than raising, so batch pipelines keep going.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    kept = tuple(r for r in log.records if r.trial_idx > k)
    warnings = log.warnings
    if not kept and log.records:
        note = "warm-up exclusion k=%d removed all %d trials" % (k, len(log.records))
        if note not in warnings:
            warnings = warnings + (note,)
    return log.with_records(kept, warmup_excluded_k=k, warnings=warnings)


def includes_warmup(logs, k: int = WARMUP_TRIALS) -> bool:
    return any(r.trial_idx <= k for r in _flatten(logs))


@dataclass(frozen=True)
class ThroughputSummary:
    n: int
    mean: float
    median: float
    sd: float
    ci95: tuple[float, float]


def per_trial_throughput(records: Iterable[TrialRecord]) -> list[float]:
    """Bits per second for each trial: id_bits / (mt_ms / 1000)."""
    return [r.id_bits / (r.mt_ms / 1000.0) for r in records]


def throughput(logs) -> ThroughputSummary:
    tps = per_trial_throughput(_flatten(logs))
    if not tps:
        raise ValueError("no trials to summarize")
    arr = np.asarray(tps)
    n = len(arr)
    mean = float(arr.mean())
    sd = float(arr.std(ddof=1)) if n > 1 else 0.0
    half = Z95 * sd / math.sqrt(n)
    return ThroughputSummary(
        n=n,
        mean=mean,
        median=float(np.median(arr)),
        sd=sd,
        ci95=(mean - half, mean + half),
    )


@dataclass(frozen=True)
class LinearFit:
    slope: float
    intercept: float
    r2: float
    slope_ci95: tuple[float, float]
    n: int


def fit_linear(x: Sequence[float], y: Sequence[float]) -> LinearFit:
    """Ordinary least squares y = a + b x with a t-based 95% CI on b."""
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if xa.shape != ya.shape or xa.ndim != 1:
        raise ValueError("x and y must be 1-d and the same length")
    n = len(xa)
    if n < 2:
        raise ValueError("need at least two points")
    xbar = xa.mean()
    ybar = ya.mean()
    sxx = float(((xa - xbar) ** 2).sum())
    if sxx == 0.0:
        raise ValueError("x is constant; slope undefined")
    sxy = float(((xa - xbar) * (ya - ybar)).sum())
    slope = sxy / sxx
    intercept = ybar - slope * xbar
    resid = ya - (intercept + slope * xa)
    sse = float((resid ** 2).sum())
    sst = float(((ya - ybar) ** 2).sum())
    # exact fits: clamp instead of reporting 1 - epsilon
    if sse <= 1e-12 * max(sst, 1.0):
        r2 = 1.0
    elif sst == 0.0:
        r2 = 0.0
    else:
        r2 = 1.0 - sse / sst
    if n > 2:
        sigma2 = sse / (n - 2)
        se = math.sqrt(sigma2 / sxx)
        tq = float(_sps.t.ppf(0.975, n - 2))
        ci = (slope - tq * se, slope + tq * se)
    else:
        ci = (-math.inf, math.inf)
    return LinearFit(slope=slope, intercept=intercept, r2=r2, slope_ci95=ci, n=n)


@dataclass(frozen=True)
class ErrorRate:
    errors: int
    trials: int
    rate: float
    ci95: tuple[float, float]


def wilson_interval(successes: int, trials: int, z: float = Z95) -> tuple[float, float]:
    if trials == 0:
        raise ValueError("no trials")
    p = successes / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


def error_rate(logs) -> ErrorRate:
    records = _flatten(logs)
    if not records:
        raise ValueError("no trials")
    errors = sum(1 for r in records if r.error)
    n = len(records)
    return ErrorRate(errors=errors, trials=n, rate=errors / n, ci95=wilson_interval(errors, n))


@dataclass(frozen=True)
class StrokeStats:
    n: int
    mean: float
    min: int
    max: int


def stroke_stats(logs) -> StrokeStats:
    records = _flatten(logs)
    if not records:
        raise ValueError("no trials")
    strokes = [r.strokes for r in records]
    return StrokeStats(n=len(strokes), mean=sum(strokes) / len(strokes),
                       min=min(strokes), max=max(strokes))


@dataclass(frozen=True)
class MotionSummary:
    pointer_travel_px: float
    saved_px: float
    accepts: int
    saved_per_accept: Optional[float]
    clicks: int
    keypresses: int


def motion_accounting(logs) -> MotionSummary:
    """Pointer travel vs travel avoided. saved_per_accept is None (absent)
    when the logs contain no accepted chords to attribute savings to."""
    travel = 0.0
    saved = 0.0
    accepts = 0
    clicks = 0
    keypresses = 0
    for log in _logs(logs):
        for r in log.records:
            travel += r.pointer_travel_px
            saved += r.saved_px
            clicks += r.clicks
            keypresses += r.keypresses
            if log.device == "pad":
                # CSV v1 has no accepts column; a pad trial ends in exactly
                # one accept unless it died in a discard (error, nothing saved)
                if not (r.error and r.saved_px == 0):
                    accepts += 1
    per = saved / accepts if accepts else None
    return MotionSummary(
        pointer_travel_px=travel,
        saved_px=saved,
        accepts=accepts,
        saved_per_accept=per,
        clicks=clicks,
        keypresses=keypresses,
    )


def learning_curve(logs, baseline_after: int = WARMUP_TRIALS) -> list[tuple[int, float]]:
    """Mean movement time per trial ordinal, normalized by the steady state.

    Output pairs (ordinal, mean mt at ordinal / mean mt at ordinals >
    baseline_after). Flat input gives ratios of 1.
    """
    records = _flatten(logs)
    if not records:
        raise ValueError("no trials")
    base = [r.mt_ms for r in records if r.trial_idx > baseline_after]
    if not base:
        raise ValueError("no trials beyond ordinal %d to normalize by" % baseline_after)
    denom = sum(base) / len(base)
    by_ordinal: dict = {}
    for r in records:
        by_ordinal.setdefault(r.trial_idx, []).append(r.mt_ms)
    out = []
    for j in sorted(by_ordinal):
        vals = by_ordinal[j]
        out.append((j, (sum(vals) / len(vals)) / denom))
    return out


def segment_strokes(samples: Sequence[tuple[float, float, float]],
                    pause_ms: float = 100.0) -> int:
    """Count gesture segments in a (t, x, y) pointer sample stream.

    A new segment starts when motion resumes after a pause of at least
    `pause_ms`. Streams with no motion count zero segments.
    """
    if pause_ms <= 0:
        raise ValueError("pause_ms must be positive")
    segments = 0
    last_motion_t: Optional[float] = None
    for (t0, x0, y0), (t1, x1, y1) in zip(samples, samples[1:]):
        if t1 < t0:
            raise ValueError("pointer samples must be time-ordered")
        if (x1, y1) != (x0, y0):
            if last_motion_t is None or (t0 - last_motion_t) >= pause_ms:
                segments += 1
            last_motion_t = t1
    return segments


# --- condition summary table -------------------------------------------------

_ROWS = (
    ("n_trials", "N trials"),
    ("mean_strokes", "Mean strokes"),
    ("min_strokes", "Min strokes"),
    ("max_strokes", "Max strokes"),
    ("mean_tp", "Mean TP (bps)"),
    ("tp_ci95", "TP 95% CI"),
    ("median_tp", "Median TP (bps)"),
    ("sd_tp", "SD TP (bps)"),
    ("error_rate", "Error rate"),
)


def summarize_conditions(logs) -> dict:
    """Per-condition summary statistics, keyed by condition name."""
    grouped: dict = {}
    for log in _logs(logs):
        grouped.setdefault(log.condition, []).append(log)
    out: dict = {}
    for condition in sorted(grouped):
        group = grouped[condition]
        records = _flatten(group)
        if not records:
            out[condition] = {"n_trials": 0, "includes_warmup": False}
            continue
        tp = throughput(group)
        st = stroke_stats(group)
        er = error_rate(group)
        out[condition] = {
            "n_trials": tp.n,
            "mean_strokes": st.mean,
            "min_strokes": st.min,
            "max_strokes": st.max,
            "mean_tp": tp.mean,
            "tp_ci95": tp.ci95,
            "median_tp": tp.median,
            "sd_tp": tp.sd,
            "error_rate": er.rate,
            "error_ci95": er.ci95,
            "includes_warmup": includes_warmup(group),
        }
    return out


def _cell(row_key: str, summary: dict) -> str:
    if not summary or summary.get("n_trials", 0) == 0:
        return "-"
    value = summary.get(row_key)
    if value is None:
        return "-"
    if row_key == "n_trials":
        return "%d" % value
    if row_key in ("min_strokes", "max_strokes"):
        return "%d" % value
    if row_key == "tp_ci95":
        return "[%.2f, %.2f]" % value
    if row_key == "error_rate":
        return "%.1f%%" % (100.0 * value)
    return "%.2f" % value


def summary_table(logs) -> str:
    """Human-readable condition summary; flags data that still has warm-up."""
    summaries = summarize_conditions(logs)
    conditions = list(summaries)
    label_w = max(len(label) for _, label in _ROWS)
    col_w = {c: max(len(c), 12) for c in conditions}
    header = " " * label_w + "  " + "  ".join(c.rjust(col_w[c]) for c in conditions)
    lines = [header]
    for key, label in _ROWS:
        cells = [_cell(key, summaries[c]).rjust(col_w[c]) for c in conditions]
        lines.append(label.ljust(label_w) + "  " + "  ".join(cells))
    if any(s.get("includes_warmup") for s in summaries.values()):
        lines.append("note: includes warm-up trials (not excluded)")
    return "\n".join(lines)
