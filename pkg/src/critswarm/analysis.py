"""Run traces, improvement events, swarm-size change statistics and power-law fits."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .core import Metric

TRACE_COLUMNS = ("iteration", "best_fitness", "metric", "omega", "alpha1", "alpha2")
EVENT_COLUMNS = ("iteration", "best_fitness")

DEFAULT_BINS = 40
DEFAULT_LOW = 1e-2
DEFAULT_HIGH = 1e4


class AnalysisError(ValueError):
    pass


class FitError(AnalysisError):
    pass


@dataclass
class RunTrace:
    """Per-iteration record of one run.

    Column arrays all have one entry per completed iteration; ``iteration``
    starts at 1.  ``initial_best_fitness`` is the best value of the initial
    population, before any move.
    """

    iteration: np.ndarray
    best_fitness: np.ndarray
    metric: np.ndarray
    omega: np.ndarray
    alpha1: np.ndarray
    alpha2: np.ndarray
    improvement_events: list[tuple[int, float]] = field(default_factory=list)
    algorithm: str = ""
    metric_kind: str = Metric.VELOCITY_NORM.value
    seed: int = 0
    initial_best_fitness: float | None = None
    max_iterations: int | None = None
    status: str = "completed"
    config: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.iteration)

    @property
    def final_best(self) -> float:
        if len(self) == 0:
            return float(self.initial_best_fitness)
        return float(self.best_fitness[-1])

    @property
    def horizon(self) -> int:
        """Nominal run length; a run that stopped early keeps its best thereafter."""
        return int(self.max_iterations) if self.max_iterations else len(self)

    def best_at(self, iteration: int) -> float:
        """Global best after ``iteration`` moves (held constant past an early stop)."""
        k = int(np.searchsorted(self.iteration, iteration, side="right")) - 1
        if k < 0:
            return float(self.initial_best_fitness)
        return float(self.best_fitness[k])

    def events_after(self, fraction: float) -> list[tuple[int, float]]:
        """Events strictly inside the final ``fraction`` of the nominal horizon."""
        start = self.horizon * (1.0 - fraction)
        return [e for e in self.improvement_events if e[0] > start]


class TraceRecorder:
    """Accumulates rows during a run and builds the :class:`RunTrace`."""

    def __init__(self, **meta):
        self._rows: list[tuple] = []
        self.events: list[tuple[int, float]] = []
        self.meta = meta

    def record(self, iteration: int, best: float, metric: float, params: Sequence[float]) -> None:
        previous = self._rows[-1][1] if self._rows else self.meta.get("initial_best_fitness")
        if previous is not None and best < previous:
            self.events.append((iteration, best))
        self._rows.append((iteration, best, metric, *params))

    def build(self, status: str = "completed") -> RunTrace:
        cols = list(zip(*self._rows)) if self._rows else [()] * len(TRACE_COLUMNS)
        arrays = [np.asarray(c, dtype=int if i == 0 else float) for i, c in enumerate(cols)]
        return RunTrace(*arrays, improvement_events=list(self.events), status=status, **self.meta)


def improvement_events(iterations: Sequence[int], best: Sequence[float], initial: float | None = None) -> list[tuple[int, float]]:
    """One event per strict decrease of the best-fitness series."""
    events = []
    previous = initial
    for it, b in zip(iterations, best):
        if previous is not None and b < previous:
            events.append((int(it), float(b)))
        previous = b
    return events


def extract_improvement_events(trace: RunTrace) -> list[tuple[int, float]]:
    return improvement_events(trace.iteration, trace.best_fitness, trace.initial_best_fitness)


def size_change_series(trace: RunTrace) -> np.ndarray:
    """Absolute iteration-to-iteration change of the mean centroid distance."""
    if trace.metric_kind != Metric.CENTROID_DISTANCE.value:
        raise AnalysisError(f"size changes need a centroid_distance trace, got {trace.metric_kind}")
    if len(trace) < 2:
        raise AnalysisError("size changes need at least two iterations")
    # a run cut short by divergence may end on an infinite metric; the
    # resulting NaN change is dropped later as a non-finite value
    with np.errstate(invalid="ignore"):
        return np.abs(np.diff(trace.metric))


@dataclass(frozen=True)
class HistogramFit:
    bin_edges: np.ndarray
    counts: np.ndarray
    overshoot_count: int
    discard_count: int = 0
    fitted_exponent: float = math.nan
    fitted_prefactor: float = math.nan
    fit_range: tuple[float, float] | None = None
    fit_residual: float = math.nan

    @property
    def bins(self) -> int:
        return len(self.counts)

    @property
    def centers(self) -> np.ndarray:
        return np.sqrt(self.bin_edges[:-1] * self.bin_edges[1:])

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.bin_edges)

    @property
    def densities(self) -> np.ndarray:
        return self.counts / self.widths

    def default_fit_range(self) -> tuple[float, float]:
        """Centres of the second and second-to-last non-empty bins."""
        nz = np.flatnonzero(self.counts)
        if len(nz) < 5:
            raise FitError("need at least five non-empty bins for the default fit range")
        c = self.centers
        return float(c[nz[1]]), float(c[nz[-2]])

    def to_dict(self) -> dict:
        return {
            "bin_edges": [float(e) for e in self.bin_edges],
            "counts": [int(c) for c in self.counts],
            "overshoot_count": int(self.overshoot_count),
            "discard_count": int(self.discard_count),
            "fitted_exponent": _json_float(self.fitted_exponent),
            "fitted_prefactor": _json_float(self.fitted_prefactor),
            "fit_range": None if self.fit_range is None else [float(v) for v in self.fit_range],
            "fit_residual": _json_float(self.fit_residual),
        }


def log_binned_histogram(values, bins: int = DEFAULT_BINS, low: float = DEFAULT_LOW, high: float = DEFAULT_HIGH) -> HistogramFit:
    """Count ``values`` in geometric bins on [low, high].

    Values above ``high`` go to the overshoot tally; values below ``low``
    (including exact zeros) and non-finite values are discarded and counted.
    """
    if not low > 0:
        raise ValueError("log bins need low > 0")
    if not high > low:
        raise ValueError("need high > low")
    if int(bins) < 1:
        raise ValueError("bins must be positive")
    v = np.asarray(values, dtype=float).ravel()
    finite = np.isfinite(v)
    over = finite & (v > high)
    keep = finite & (v >= low) & (v <= high)
    edges = np.geomspace(low, high, int(bins) + 1)
    edges[0], edges[-1] = low, high
    counts, _ = np.histogram(v[keep], bins=edges)
    discards = len(v) - int(keep.sum()) - int(over.sum())
    return HistogramFit(edges, counts.astype(np.int64), int(over.sum()), discards)


def fit_loglog(x, y) -> tuple[float, float, float]:
    """Least-squares line through (log10 x, log10 y): slope, prefactor, RMS residual."""
    lx, ly = np.log10(np.asarray(x, dtype=float)), np.log10(np.asarray(y, dtype=float))
    design = np.column_stack([lx, np.ones_like(lx)])
    (slope, intercept), *_ = np.linalg.lstsq(design, ly, rcond=None)
    resid = ly - (slope * lx + intercept)
    return float(slope), float(10.0**intercept), float(np.sqrt(np.mean(resid**2)))


def _fit(hist: HistogramFit, fit_range):
    if fit_range is None:
        fit_range = hist.default_fit_range()
    lo, hi = fit_range
    c = hist.centers
    sel = (hist.counts > 0) & (c >= lo) & (c <= hi)
    if sel.sum() < 3:
        raise FitError(f"need at least three non-empty bins in {fit_range}, found {int(sel.sum())}")
    return (*fit_loglog(c[sel], hist.densities[sel]), (float(lo), float(hi)))


def fit_powerlaw(hist: HistogramFit, fit_range: tuple[float, float] | None = None) -> tuple[float, float]:
    """Slope and prefactor of ``density = prefactor * x**slope`` over ``fit_range``.

    Density is count per unit bin width; the slope is negative for a decaying law.
    """
    slope, prefactor, _, _ = _fit(hist, fit_range)
    return slope, prefactor


def fit_histogram(hist: HistogramFit, fit_range: tuple[float, float] | None = None) -> HistogramFit:
    slope, prefactor, residual, used = _fit(hist, fit_range)
    return replace(hist, fitted_exponent=slope, fitted_prefactor=prefactor, fit_range=used, fit_residual=residual)


def quantile_summary(values: Iterable[float]) -> dict:
    v = np.asarray(list(values), dtype=float)
    if v.size == 0:
        raise ValueError("no values to summarise")
    q = np.percentile(v, [0, 25, 50, 75, 100])
    return {"n": int(v.size), "min": float(q[0]), "q1": float(q[1]), "median": float(q[2]), "q3": float(q[3]), "max": float(q[4])}


def summarize_runs(traces: Sequence[RunTrace], snapshot_iterations: Sequence[int] = ()) -> dict:
    """Quartile summary of final best fitness per algorithm, plus snapshots."""
    if not traces:
        raise ValueError("summarize_runs needs at least one trace")
    groups: dict[str, list[RunTrace]] = {}
    for t in traces:
        groups.setdefault(t.algorithm, []).append(t)
    out = {}
    for name in sorted(groups):
        runs = groups[name]
        out[name] = {
            "final": quantile_summary(t.final_best for t in runs),
            "snapshots": {str(k): quantile_summary(t.best_at(k) for t in runs) for k in snapshot_iterations},
            "events": [len(t.improvement_events) for t in runs],
            "status": [t.status for t in runs],
        }
    return out


# --- persistence -----------------------------------------------------------

def _fmt(x) -> str:
    return repr(float(x))


def _json_float(x):
    x = float(x)
    return x if math.isfinite(x) else None


def write_trace(trace: RunTrace, stem: Path) -> list[Path]:
    """Write ``<stem>_trace.csv``, ``<stem>_events.csv`` and ``<stem>_meta.json``."""
    stem = Path(stem)
    paths = [stem.with_name(stem.name + s) for s in ("_trace.csv", "_events.csv", "_meta.json")]
    with open(paths[0], "w", newline="") as fh:
        fh.write(",".join(TRACE_COLUMNS) + "\n")
        for row in zip(trace.iteration, trace.best_fitness, trace.metric, trace.omega, trace.alpha1, trace.alpha2):
            fh.write(str(int(row[0])) + "," + ",".join(_fmt(v) for v in row[1:]) + "\n")
    with open(paths[1], "w", newline="") as fh:
        fh.write(",".join(EVENT_COLUMNS) + "\n")
        for it, b in trace.improvement_events:
            fh.write(f"{int(it)},{_fmt(b)}\n")
    meta = {
        "algorithm": trace.algorithm,
        "metric_kind": trace.metric_kind,
        "seed": int(trace.seed),
        "initial_best_fitness": trace.initial_best_fitness,
        "max_iterations": trace.max_iterations,
        "status": trace.status,
        "config": trace.config,
    }
    paths[2].write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return paths


def read_trace(stem: Path) -> RunTrace:
    """Inverse of :func:`write_trace`; accepts the stem or the ``_trace.csv`` path."""
    stem = Path(stem)
    if stem.name.endswith("_trace.csv"):
        stem = stem.with_name(stem.name[: -len("_trace.csv")])
    trace_path = stem.with_name(stem.name + "_trace.csv")
    with open(trace_path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != TRACE_COLUMNS:
            raise AnalysisError(f"{trace_path}: unexpected header {header}")
        rows = list(reader)
    cols = list(zip(*rows)) if rows else [()] * len(TRACE_COLUMNS)
    arrays = [np.asarray(c, dtype=int if i == 0 else float) for i, c in enumerate(cols)]
    meta_path = stem.with_name(stem.name + "_meta.json")
    meta = json.loads(meta_path.read_text()) if meta_path.exists() else {}
    events = []
    events_path = stem.with_name(stem.name + "_events.csv")
    if events_path.exists():
        with open(events_path, newline="") as fh:
            reader = csv.reader(fh)
            next(reader)
            events = [(int(i), float(b)) for i, b in reader]
    else:
        events = improvement_events(arrays[0], arrays[1], meta.get("initial_best_fitness"))
    return RunTrace(*arrays, improvement_events=events, **meta)


def histogram_for_trace(trace: RunTrace, bins: int = DEFAULT_BINS, low: float = DEFAULT_LOW, high: float = DEFAULT_HIGH, fit_range=None) -> HistogramFit:
    """Histogram of swarm-size changes, fitted when enough bins are populated."""
    hist = log_binned_histogram(size_change_series(trace), bins, low, high)
    try:
        return fit_histogram(hist, fit_range)
    except FitError:
        return hist
