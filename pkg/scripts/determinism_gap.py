"""Randomized minus deterministic revenue on discretized uniform values."""

import argparse
import time

from multiunit.oracle import deterministic_optimal, discretized_uniform, lp_optimal


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[5, 10, 25, 50, 100])
    ap.add_argument("--demands", type=int, nargs="+", default=[1, 2])
    args = ap.parse_args()
    print(f"{'N':>5} {'types':>6} {'randomized':>12} {'deterministic':>14} {'gap':>11} {'secs':>6}")
    for n in args.sizes:
        inst = discretized_uniform(n, demands=args.demands)
        t0 = time.perf_counter()
        _, lp = lp_optimal(inst)
        _, det = deterministic_optimal(inst)
        print(f"{n:>5} {inst.n:>6} {lp:>12.8f} {det:>14.8f} {lp - det:>11.2e} "
              f"{time.perf_counter() - t0:>6.2f}")


if __name__ == "__main__":
    main()
