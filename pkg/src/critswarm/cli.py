"""Experiment harness: ``key = value`` configs, seeded batches, traces on disk.

Config files use the same keys as the long command-line flags (with ``-``
written as ``_``); flags given on the command line win.  Example::

    algorithm = pso, crips
    function = schwefel
    dims = 20
    particles = 25
    iterations = 10000
    runs = 10
    seed = 1000
    snapshot = 1000
    out = results/compare

Run ``r`` of a batch uses seed ``seed + r`` for every algorithm.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable

from .analysis import (
    DEFAULT_BINS,
    DEFAULT_HIGH,
    DEFAULT_LOW,
    AnalysisError,
    histogram_for_trace,
    read_trace,
    summarize_runs,
    write_trace,
)
from .core import DEFAULT_PARAMS, LD_PARAMS, Algorithm, ConfigError, Metric, PsoParams, RunConfig
from .runner import run

log = logging.getLogger(__name__)

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 2, 3


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _int_list(text: str) -> list[int]:
    return [int(t) for t in text.replace(",", " ").split()]


def _float_list(text: str) -> list[float]:
    return [float(t) for t in text.replace(",", " ").split()]


def _name_list(text: str) -> list[str]:
    return [t.strip().lower() for t in text.split(",") if t.strip()]


# key -> parser; every key is optional except ``algorithm``
KEYS: dict[str, Callable[[str], object]] = {
    "algorithm": _name_list,
    "function": lambda s: s.strip().lower(),
    "dims": int,
    "particles": int,
    "iterations": int,
    "runs": int,
    "seed": int,
    "epsilon": float,
    "metric": lambda s: s.strip().lower(),
    "sigma": float,
    "vmax": float,
    "out": str,
    "snapshot": _int_list,
    "omega": float,
    "alpha1": float,
    "alpha2": float,
    "omega_start": float,
    "omega_end": float,
    "goal_tolerance": float,
    "shift": _float_list,
    "penalty": float,
    "velocity_init_fraction": float,
    "controller_sign": lambda s: s.strip().lower(),
    "asynchronous": _bool,
    "powerlaw_exponent": float,
    "min_step": float,
    "max_step": float,
    "jobs": int,
    "histogram": _bool,
    "hist_bins": int,
    "hist_low": float,
    "hist_high": float,
}
REQUIRED = ("algorithm",)


@dataclass
class ExperimentSpec:
    configs: list[RunConfig]
    repetitions: int = 1
    base_seed: int = 0
    output_directory: Path = Path("runs")
    snapshot_iterations: list[int] = field(default_factory=list)
    jobs: int = 1
    histogram: bool = False
    hist_bins: int = DEFAULT_BINS
    hist_low: float = DEFAULT_LOW
    hist_high: float = DEFAULT_HIGH

    def run_configs(self) -> list[RunConfig]:
        """Every (algorithm, repetition) pair, algorithm-major."""
        out = []
        for cfg in self.configs:
            for r in range(self.repetitions):
                out.append(_with_seed(cfg, self.base_seed + r))
        return out


def _with_seed(cfg: RunConfig, seed: int) -> RunConfig:
    return replace(cfg, seed=seed)


def parse_text(text: str) -> dict[str, str]:
    """Raw ``key = value`` pairs; ``#`` starts a comment."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (p.strip() for p in line.split("=", 1))
        key = key.replace("-", "_").lower()
        raw[key] = value
    return raw


def parse_config(text: str, overrides: dict[str, str] | None = None) -> ExperimentSpec:
    """Validate a config text (plus string overrides) into an :class:`ExperimentSpec`.

    Raises:
        ConfigError: naming the offending key.
    """
    raw = parse_text(text)
    raw.update({k.replace("-", "_"): v for k, v in (overrides or {}).items() if v is not None})
    values = {}
    for key, text_value in raw.items():
        if key not in KEYS:
            raise ConfigError(f"unknown key {key!r}")
        if text_value == "":
            continue
        try:
            values[key] = KEYS[key](text_value)
        except ValueError as exc:
            raise ConfigError(f"{key}: cannot parse {text_value!r} ({exc})") from None
    for key in REQUIRED:
        if not values.get(key):
            raise ConfigError(f"missing required key {key!r}")

    for key in ("runs", "jobs", "hist_bins"):
        if key in values and values[key] < 1:
            raise ConfigError(f"{key} must be a positive integer")
    if any(s < 0 for s in values.get("snapshot", [])):
        raise ConfigError("snapshot iterations must be non-negative")

    configs = []
    for name in values["algorithm"]:
        try:
            algorithm = Algorithm(name)
        except ValueError:
            raise ConfigError(f"algorithm: unknown value {name!r}") from None
        base = LD_PARAMS if algorithm is Algorithm.PSO_LD else DEFAULT_PARAMS
        params = PsoParams(
            values.get("omega", base.omega), values.get("alpha1", base.alpha1), values.get("alpha2", base.alpha2)
        )
        kwargs = dict(
            algorithm=algorithm,
            dimension=values.get("dims", 20),
            particle_count=values.get("particles", 25),
            max_iterations=values.get("iterations", 10_000),
            seed=values.get("seed", 0),
            objective_name=values.get("function", "schwefel"),
            initial_params=params,
            metric=values.get("metric", Metric.VELOCITY_NORM.value),
            sigma=values.get("sigma"),
            vmax=values.get("vmax"),
            omega_start=values.get("omega_start"),
            omega_end=values.get("omega_end"),
            shift=tuple(values["shift"]) if "shift" in values else None,
            penalty=values.get("penalty"),
            max_step=values.get("max_step"),
        )
        for key in ("epsilon", "goal_tolerance", "velocity_init_fraction", "controller_sign",
                    "asynchronous", "powerlaw_exponent", "min_step"):
            if key in values:
                kwargs[key] = values[key]
        cfg = RunConfig(**kwargs)
        cfg.objective()  # unknown function or bad shift fails here
        configs.append(cfg)

    return ExperimentSpec(
        configs=configs,
        repetitions=values.get("runs", 1),
        base_seed=values.get("seed", 0),
        output_directory=Path(values.get("out", "runs")),
        snapshot_iterations=values.get("snapshot", []),
        jobs=values.get("jobs", 1),
        histogram=values.get("histogram", False),
        hist_bins=values.get("hist_bins", DEFAULT_BINS),
        hist_low=values.get("hist_low", DEFAULT_LOW),
        hist_high=values.get("hist_high", DEFAULT_HIGH),
    )


def run_stem(out: Path, algorithm: str, index: int) -> Path:
    return Path(out) / algorithm / f"run_{index:03d}"


def run_experiment(spec: ExperimentSpec) -> int:
    """Run every repetition, persist traces and the batch summary; return an exit code."""
    configs = spec.run_configs()
    try:
        for cfg in spec.configs:
            (spec.output_directory / cfg.algorithm.value).mkdir(parents=True, exist_ok=True)
        if spec.jobs > 1:
            with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
                traces = list(pool.map(run, configs))
        else:
            traces = [run(cfg) for cfg in configs]
        for i, trace in enumerate(traces):
            stem = run_stem(spec.output_directory, trace.algorithm, i % spec.repetitions)
            write_trace(trace, stem)
            if spec.histogram and trace.metric_kind == Metric.CENTROID_DISTANCE.value and len(trace) >= 2:
                hist = histogram_for_trace(trace, spec.hist_bins, spec.hist_low, spec.hist_high)
                _write_json(stem.with_name(stem.name + "_hist.json"), hist.to_dict())
            log.info("%s run %d: final best %.6g (%s)", trace.algorithm, trace.seed, trace.final_best, trace.status)
        summary = {
            "repetitions": spec.repetitions,
            "base_seed": spec.base_seed,
            "snapshot_iterations": list(spec.snapshot_iterations),
            "algorithms": summarize_runs(traces, spec.snapshot_iterations),
        }
        _write_json(spec.output_directory / "summary.json", summary)
    except OSError as exc:
        log.error("I/O failure: %s", exc)
        return EXIT_IO
    return EXIT_OK


def load_batch(out: Path) -> list:
    """Read back every persisted trace below ``out`` in write order."""
    stems = sorted(p for p in Path(out).glob("*/run_*_trace.csv"))
    return [read_trace(p) for p in stems]


def _write_json(path: Path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="critswarm", description="Run seeded PSO / critical-swarm / random-search batches.")
    p.add_argument("--config", type=Path, help="key = value config file")
    p.add_argument("--algorithm", help="comma list of: " + ", ".join(a.value for a in Algorithm))
    p.add_argument("--function", help="schwefel, griewank or shifted_griewank")
    p.add_argument("--dims")
    p.add_argument("--particles")
    p.add_argument("--iterations")
    p.add_argument("--runs")
    p.add_argument("--seed")
    p.add_argument("--epsilon")
    p.add_argument("--metric", help="velocity_norm, centroid_distance or interparticle_distance")
    p.add_argument("--sigma")
    p.add_argument("--vmax")
    p.add_argument("--out")
    p.add_argument("--snapshot", action="append", help="iteration to snapshot (repeatable)")
    p.add_argument("--jobs")
    p.add_argument("--histogram", action="store_const", const="true")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="any other config key")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        text = args.config.read_text() if args.config else ""
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    overrides = {}
    for key in ("algorithm", "function", "dims", "particles", "iterations", "runs", "seed", "epsilon",
                "metric", "sigma", "vmax", "out", "jobs", "histogram"):
        overrides[key] = getattr(args, key)
    if args.snapshot:
        overrides["snapshot"] = ",".join(args.snapshot)
    for item in args.set:
        if "=" not in item:
            print(f"error: --set expects KEY=VALUE, got {item!r}", file=sys.stderr)
            return EXIT_CONFIG
        k, v = item.split("=", 1)
        overrides[k.strip()] = v.strip()
    try:
        spec = parse_config(text, overrides)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run_experiment(spec)


def analyze_main(argv: list[str] | None = None) -> int:
    """Histogram and power-law fit of swarm-size changes for existing traces."""
    p = argparse.ArgumentParser(prog="critswarm-analyze", description=analyze_main.__doc__)
    p.add_argument("traces", nargs="+", type=Path, help="*_trace.csv files")
    p.add_argument("--bins", type=int, default=DEFAULT_BINS)
    p.add_argument("--low", type=float, default=DEFAULT_LOW)
    p.add_argument("--high", type=float, default=DEFAULT_HIGH)
    p.add_argument("--fit-range", type=float, nargs=2, default=None)
    args = p.parse_args(argv)
    status = EXIT_OK
    for path in args.traces:
        try:
            trace = read_trace(path)
            hist = histogram_for_trace(trace, args.bins, args.low, args.high, args.fit_range)
        except (AnalysisError, ValueError) as exc:
            print(f"{path}: {exc}", file=sys.stderr)
            status = EXIT_CONFIG
            continue
        except OSError as exc:
            print(f"{path}: {exc}", file=sys.stderr)
            return EXIT_IO
        stem = str(path)[: -len("_trace.csv")] if str(path).endswith("_trace.csv") else str(path)
        _write_json(Path(stem + "_hist.json"), hist.to_dict())
        print(f"{path}: exponent {hist.fitted_exponent:.3f}, overshoot {hist.overshoot_count}")
    return status


if __name__ == "__main__":
    sys.exit(main())
