"""Random generators for DMR problem instances, used by tests and scripts.

Every marginal produced here has a concave revenue curve on ``[0, v_bar]``
and support reaching ``v_bar``:

* uniform on ``[a, v_bar]``,
* constant elasticity truncated at ``v_bar`` with ``epsilon <= -1``,
* exponential truncated at ``v_bar`` with ``rate <= 2 / v_bar``,
* piecewise-linear CDF from 0 with non-decreasing slopes (convex CDF),
* two-component mixtures of the above (``v (1 - F)`` is linear in ``F``).
"""

from __future__ import annotations

import numpy as np

from .distributions import (ConstantElasticity, ExponentialTruncated, Marginal, Mixture,
                            PiecewiseLinearCDF, ProblemInstance, Uniform)

FAMILIES = ("uniform", "constant_elasticity", "exponential_truncated",
            "piecewise_linear_cdf", "mixture")


def random_marginal(rng: np.random.Generator, v_bar: float, family: str | None = None) -> Marginal:
    family = family or FAMILIES[int(rng.integers(len(FAMILIES)))]
    if family == "uniform":
        return Uniform(v_bar=v_bar, low=float(rng.uniform(0.0, 0.6)) * v_bar, high=v_bar)
    if family == "constant_elasticity":
        return ConstantElasticity(v_bar=v_bar, a=float(rng.uniform(0.05, 0.5)) * v_bar,
                                  epsilon=float(rng.uniform(-3.0, -1.0)))
    if family == "exponential_truncated":
        return ExponentialTruncated(v_bar=v_bar, rate=float(rng.uniform(0.2, 2.0)) / v_bar)
    if family == "piecewise_linear_cdf":
        n = int(rng.integers(2, 5))
        xs = np.sort(rng.uniform(0.05, 0.95, n - 1)) * v_bar
        xs = np.concatenate([[0.0], xs, [v_bar]])
        slopes = np.sort(rng.uniform(0.1, 1.0, n))
        mass = np.concatenate([[0.0], np.cumsum(slopes * np.diff(xs))])
        F = mass / mass[-1]
        return PiecewiseLinearCDF(v_bar=v_bar, knots=tuple(zip(xs.tolist(), F.tolist())))
    if family == "mixture":
        simple = FAMILIES[:4]
        parts = tuple(random_marginal(rng, v_bar, simple[int(rng.integers(4))]) for _ in range(2))
        w = float(rng.uniform(0.2, 0.8))
        return Mixture(v_bar=v_bar, components=parts, weights=(w, 1.0 - w))
    raise ValueError(f"unknown family {family!r}")


def random_demands(rng: np.random.Generator, k: int, max_demand: int = 6) -> tuple[int, ...]:
    return tuple(int(x) for x in np.sort(rng.choice(np.arange(1, max_demand + 1), k, replace=False)))


def random_dmr_instance(rng: np.random.Generator, k: int, v_bar: float | None = None,
                        families: tuple[str, ...] | None = None) -> ProblemInstance:
    """Random instance with ``k`` distinct demands and DMR marginals."""
    v_bar = float(rng.uniform(0.5, 3.0)) if v_bar is None else float(v_bar)
    fams = families or FAMILIES
    margs = tuple(random_marginal(rng, v_bar, fams[int(rng.integers(len(fams)))]) for _ in range(k))
    w = rng.dirichlet(np.full(k, 2.0))
    w = np.maximum(w, 0.05)
    w /= w.sum()
    return ProblemInstance(demands=random_demands(rng, k), weights=tuple(w.tolist()),
                           marginals=margs, v_bar=v_bar)


def random_ordered_prices(rng: np.random.Generator, inst: ProblemInstance, n: int | None = None):
    """Uniform draws from the ordered cone ``0 <= p_1 <= ... <= p_k <= d_k v_bar``."""
    size = (inst.k,) if n is None else (n, inst.k)
    return np.sort(rng.uniform(0.0, inst.upper, size), axis=-1)


def random_bounded_prices(rng: np.random.Generator, inst: ProblemInstance, n: int | None = None):
    """Ordered prices whose increments ``p_j - p_{j-1}`` stay below ``v_bar (d_j - d_{j-1})``."""
    box = inst.v_bar * np.diff(np.array((0,) + inst.demands, dtype=float))
    size = (inst.k,) if n is None else (n, inst.k)
    return np.cumsum(rng.uniform(0.0, 1.0, size) * box, axis=-1)
