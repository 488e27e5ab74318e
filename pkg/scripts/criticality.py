"""Sweep epsilon on a large swarm and fit the swarm-size change histogram.

    python3 scripts/criticality.py [--iterations 50000] [--particles 250] [--out results/eps]
"""
import argparse
import json
from pathlib import Path

from critswarm import RunConfig, run
from critswarm.analysis import histogram_for_trace, write_trace


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--epsilons", type=float, nargs="+", default=[0.075, 0.15, 0.5])
    p.add_argument("--iterations", type=int, default=50_000)
    p.add_argument("--particles", type=int, default=250)
    p.add_argument("--seed", type=int, default=2024)
    p.add_argument("--sign", default="stabilizing", choices=("stabilizing", "verbatim"))
    p.add_argument("--out", type=Path, default=None)
    args = p.parse_args()

    for eps in args.epsilons:
        trace = run(RunConfig(algorithm="crips", particle_count=args.particles, max_iterations=args.iterations,
                              seed=args.seed, epsilon=eps, metric="centroid_distance", controller_sign=args.sign))
        hist = histogram_for_trace(trace)
        print(f"eps={eps:<6} status={trace.status:<9} records={len(trace):<6} "
              f"exponent={hist.fitted_exponent:.3f} overshoot={hist.overshoot_count} final={trace.final_best:.1f}")
        if args.out:
            args.out.mkdir(parents=True, exist_ok=True)
            stem = args.out / f"eps_{eps:g}"
            write_trace(trace, stem)
            Path(f"{stem}_hist.json").write_text(json.dumps(hist.to_dict(), indent=2, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
