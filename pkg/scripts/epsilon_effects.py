#!/usr/bin/env python3
"""Effect-size summary: mean per-model metric scores over the (N, K) grid.

For each perturbation rate, averages the per-model scores of bootstrapped
simulated test sets over the full N x K grid, printing one block per
epsilon: score(A), score(B) and their gap for MAE, Wins and MEMD (MEMD both
raw and under the documented display factor).
"""

import argparse
import sys

from raterpower import ExperimentConfig, SamplingStrategy, mean_metric_scores
from raterpower.cli import MEMD_PAPER_SCALE
from raterpower.metrics import MetricId

GRID = [(n, k) for n in (25, 50, 100, 250, 500, 1000) for k in (1, 5, 10, 25, 50, 100)]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--samples", type=int, default=150)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--threads", type=int, default=4)
    parser.add_argument("--phi", default="all,boot")
    parser.add_argument("--epsilons", default="0.005,0.01,0.02,0.1")
    args = parser.parse_args()

    phi = SamplingStrategy.parse(args.phi)
    metrics = (MetricId.MAE, MetricId.WINS, MetricId.MEMD)
    for eps in (float(e) for e in args.epsilons.split(",")):
        acc = {m: {"score_a": 0.0, "score_b": 0.0} for m in metrics}
        for (n, k) in GRID:
            config = ExperimentConfig(
                n_items=n, k_responses=k, epsilon=eps, phi=phi,
                seed=args.seed, metrics=metrics,
            )
            scores = mean_metric_scores(config, args.samples, threads=args.threads)
            for m in metrics:
                acc[m]["score_a"] += scores[m]["score_a"] / len(GRID)
                acc[m]["score_b"] += scores[m]["score_b"] / len(GRID)
        print(f"epsilon={eps}")
        for m in metrics:
            a, b = acc[m]["score_a"], acc[m]["score_b"]
            line = f"  {m.value:<5} A={a:.4f} B={b:.4f} delta={abs(b - a):.4f}"
            if m == MetricId.MEMD:
                line += (
                    f"  (x{MEMD_PAPER_SCALE:g}: A={a * MEMD_PAPER_SCALE:.4f}"
                    f" B={b * MEMD_PAPER_SCALE:.4f})"
                )
            print(line)
    return 0


if __name__ == "__main__":
    sys.exit(main())
