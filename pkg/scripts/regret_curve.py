"""Expected regret of a dynamic pricing strategy at several horizons."""

import argparse
import csv

import numpy as np

from multiunit.distributions import ExponentialTruncated, ProblemInstance, Uniform
from multiunit.dynpricing import regret, simulate, strategy_eps_grid, strategy_two_point
from multiunit.optimizer import maximize


def instance(name):
    u = Uniform(v_bar=1.0)
    if name == "k1":
        return ProblemInstance(demands=(1,), weights=(1.0,), marginals=(u,), v_bar=1.0)
    return ProblemInstance(demands=(1, 2), weights=(0.5, 0.5),
                           marginals=(u, ExponentialTruncated(v_bar=1.0, rate=1.0)), v_bar=1.0)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--instance", choices=["k1", "k2"], default="k2")
    ap.add_argument("--strategy", choices=["two-point", "eps-grid"], default="two-point")
    ap.add_argument("--rounds", type=int, default=200_000)
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--csv", default=None, help="write (seed, T, regret) rows here")
    args = ap.parse_args()
    inst = instance(args.instance)
    star = maximize(inst).rev_star
    factory = strategy_two_point() if args.strategy == "two-point" else strategy_eps_grid()
    checkpoints = [t for t in np.unique(np.geomspace(1000, args.rounds, 8).astype(int))]
    rows = []
    for seed in range(args.seeds):
        trace = simulate(inst, factory, args.rounds, seed)
        for T in checkpoints:
            rep = regret(trace, inst, rev_star=star, upto=int(T))
            rows.append((seed, int(T), rep.expected_average_regret, rep.cumulative_expected_regret))
    print(f"optimal revenue {star:.6f}")
    print(f"{'T':>8} {'mean avg regret':>16} {'mean cum regret':>16}")
    for T in checkpoints:
        sel = [r for r in rows if r[1] == T]
        print(f"{T:>8} {np.mean([r[2] for r in sel]):>16.6f} {np.mean([r[3] for r in sel]):>16.2f}")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["seed", "T", "average_regret", "cumulative_regret"])
            wr.writerows(rows)


if __name__ == "__main__":
    main()
