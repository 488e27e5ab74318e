"""Run the comparison batch and print medians and late-improvement counts.

    python3 scripts/compare.py [--runs 10] [--iterations 10000] [--sign stabilizing]
"""
import argparse

import numpy as np

from critswarm import RunConfig, run

ALGORITHMS = ("pso", "pso_vmax", "pso_ld", "crips", "rand_uniform", "rand_powerlaw")


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--iterations", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=1000)
    p.add_argument("--snapshot", type=int, default=1000)
    p.add_argument("--sign", default="stabilizing", choices=("stabilizing", "verbatim"))
    p.add_argument("--metric", default="velocity_norm")
    args = p.parse_args()

    print(f"{'algorithm':<14}{'median':>10}{'@snap':>10}{'late10%':>9}{'late50%':>9}  status")
    for alg in ALGORITHMS:
        traces = [
            run(RunConfig(algorithm=alg, max_iterations=args.iterations, seed=args.seed + r,
                          controller_sign=args.sign, metric=args.metric))
            for r in range(args.runs)
        ]
        final = np.median([t.final_best for t in traces])
        snap = np.median([t.best_at(args.snapshot) for t in traces])
        late10 = sum(1 for t in traces if t.events_after(0.1))
        late50 = sum(len(t.events_after(0.5)) for t in traces)
        statuses = sorted({t.status for t in traces})
        print(f"{alg:<14}{final:>10.1f}{snap:>10.1f}{late10:>9}{late50:>9}  {','.join(statuses)}")


if __name__ == "__main__":
    main()
