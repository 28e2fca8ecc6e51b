"""Revenue along a segment of ordered prices where a threshold passes v_bar.

With two uniform buyers on [0, 1], d = (1, 2) and the big bundle priced at 2,
the big bundle never sells, so revenue is p1 (1 - p1) up to p1 = 1 and zero
after. The kink at p1 = 1 is convex. Lowering prices that no buyer would pay
(``retract``) keeps revenue the same and moves the segment into the region
where revenue is concave.
"""

import argparse

import numpy as np

from multiunit.distributions import ProblemInstance, Uniform
from multiunit.optimizer import retract
from multiunit.revenue import rev


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.parse_args()
    u = Uniform(v_bar=1.0)
    inst = ProblemInstance(demands=(1, 2), weights=(0.5, 0.5), marginals=(u, u), v_bar=1.0)
    a, b = np.array([0.9, 2.0]), np.array([1.5, 2.0])
    mid = 0.5 * (a + b)
    print(f"Rev(a) = {rev(a, inst):.4f}, Rev(b) = {rev(b, inst):.4f}, Rev(mid) = {rev(mid, inst):.4f}")
    print(f"midpoint excess over the chord: {0.5 * (rev(a, inst) + rev(b, inst)) - rev(mid, inst):.4f}")
    for p in (a, mid, b):
        r = retract(p, inst)
        print(f"retract({p}) = {r}, revenue {rev(p, inst):.4f} -> {rev(r, inst):.4f}")


if __name__ == "__main__":
    main()
