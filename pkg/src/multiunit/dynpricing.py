"""Repeated posted pricing against i.i.d. buyers with bandit feedback.

Each round the strategy posts an ordered price vector, a buyer type is
drawn, the buyer takes the best bundle, and the strategy is told only which
bundle was bought. Strategies are built from a :class:`PriceDomain` (the
demand levels and ``v_bar``) and a random generator; they never see the
value distribution or the sampled types.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Protocol

import numpy as np

from .distributions import ProblemInstance
from .optimizer import OptimizeConfig, _ordered_lattice, maximize, project_ordered, retract
from .revenue import rev

_TYPE_CHUNK = 4096


@dataclass(frozen=True)
class PriceDomain:
    """What a seller knows: bundle sizes and the value ceiling."""

    demands: tuple[int, ...]
    v_bar: float

    @property
    def k(self) -> int:
        return len(self.demands)

    @property
    def upper(self) -> float:
        return self.demands[-1] * self.v_bar

    def feasible(self, p) -> np.ndarray:
        """Project onto ordered prices, then lower prices no buyer would pay."""
        arr = np.asarray(p, dtype=float)
        if arr.ndim == 2:
            proj = np.array([project_ordered(row, self.upper) for row in arr])
            return retract(proj, self)
        # scalar path: this runs several times per simulated round
        vals = arr.tolist()
        if any(b < a for a, b in zip(vals, vals[1:])):
            vals = project_ordered(arr, self.upper).tolist()
        else:
            vals = [min(max(x, 0.0), self.upper) for x in vals]
        dem = (0,) + self.demands
        out = [0.0]
        for j in range(1, len(dem)):
            cap = min(out[l] + self.v_bar * (dem[j] - dem[l]) for l in range(j))
            out.append(min(vals[j - 1], cap))
        return np.array(out[1:])


class Strategy(Protocol):
    name: str

    def post(self) -> np.ndarray: ...

    def observe(self, bundle: int) -> None: ...


StrategyFactory = Callable[[PriceDomain, np.random.Generator], Strategy]


class _Fixed:
    name = "fixed"

    def __init__(self, p):
        self.p = np.asarray(p, dtype=float)

    def post(self):
        return self.p

    def observe(self, bundle):
        pass


def strategy_fixed(p) -> StrategyFactory:
    """Always post ``p``."""
    def make(dom: PriceDomain, rng: np.random.Generator):
        arr = np.asarray(p, dtype=float)
        if arr.shape != (dom.k,):
            raise ValueError("fixed price vector has the wrong length")
        return _Fixed(arr)
    return make


class _EpsGrid:
    name = "eps-grid"

    def __init__(self, arms, eps0, rng):
        self.arms = arms
        self.eps0 = eps0
        self.rng = rng
        self.pulls = np.zeros(len(arms))
        self.totals = np.zeros(len(arms))
        self.t = 0
        self.current = 0

    def post(self):
        self.t += 1
        eps = min(1.0, self.eps0 / self.t ** (1.0 / 3.0))
        if self.rng.random() < eps:
            self.current = int(self.rng.integers(len(self.arms)))
        else:
            with np.errstate(invalid="ignore", divide="ignore"):
                means = np.where(self.pulls > 0, self.totals / self.pulls, np.inf)
            self.current = int(np.argmax(means))
        return self.arms[self.current]

    def observe(self, bundle):
        price = 0.0 if bundle == 0 else float(self.arms[self.current][bundle - 1])
        self.pulls[self.current] += 1
        self.totals[self.current] += price


def strategy_eps_grid(resolution: int = 11, eps0: float = 1.0) -> StrategyFactory:
    """Epsilon-greedy over an ordered lattice of feasible price vectors.

    Exploration probability is ``min(1, eps0 / t^(1/3))``; unplayed arms are
    tried before any exploitation.
    """
    def make(dom: PriceDomain, rng: np.random.Generator):
        pts = _ordered_lattice(np.zeros(dom.k), np.full(dom.k, dom.upper), resolution)
        arms = np.unique(np.round(dom.feasible(pts), 12), axis=0)
        return _EpsGrid(arms, eps0, rng)
    return make


class _TwoPoint:
    name = "two-point"

    def __init__(self, dom, rng, eta0, delta0, t0, delta_decay, start):
        self.dom = dom
        self.rng = rng
        self.eta0 = eta0
        self.delta0 = delta0
        self.t0 = t0
        self.delta_decay = delta_decay
        self.p_hat = dom.feasible(start)
        self.pair = 0
        self.phase = 0
        self.plus = self.minus = self.p_hat
        self.r_plus = 0.0
        self.posted = self.p_hat

    def _new_pair(self):
        self.pair += 1
        delta = self.delta0 * self.dom.upper / (self.pair + self.t0) ** self.delta_decay
        u = self.rng.normal(size=self.dom.k)
        u /= np.linalg.norm(u)
        self.plus = self.dom.feasible(self.p_hat + delta * u)
        self.minus = self.dom.feasible(self.p_hat - delta * u)

    def post(self):
        if self.phase == 0:
            self._new_pair()
            self.posted = self.plus
        else:
            self.posted = self.minus
        return self.posted

    def observe(self, bundle):
        r = 0.0 if bundle == 0 else float(self.posted[bundle - 1])
        if self.phase == 0:
            self.r_plus = r
            self.phase = 1
            return
        self.phase = 0
        diff = self.plus - self.minus
        norm2 = float(diff @ diff)
        if norm2 == 0.0:
            return
        grad = self.dom.k * (self.r_plus - r) * diff / norm2
        eta = self.eta0 * self.dom.upper ** 2 / (self.pair + self.t0)
        self.p_hat = self.dom.feasible(self.p_hat + eta * grad)


def strategy_two_point(eta0: float = 1.0, delta0: float = 0.25, t0: float = 50.0,
                       delta_decay: float = 0.25, start=None) -> StrategyFactory:
    """Zeroth-order ascent from paired posts ``p_hat +- delta_t u``.

    Each pair of rounds uses a fresh random unit direction ``u``. The
    revenue difference between the two posts gives the gradient estimate
    ``k (r+ - r-) (x+ - x-) / |x+ - x-|^2``, followed by the step
    ``p_hat <- feasible(p_hat + eta_t g)``. Schedules over pair index ``s``:
    ``eta_t = eta0 U^2 / (s + t0)`` and ``delta_t = delta0 U / (s + t0)^delta_decay``
    with ``U = d_k v_bar``.
    """
    def make(dom: PriceDomain, rng: np.random.Generator):
        p0 = np.asarray(start, float) if start is not None else \
            0.5 * dom.v_bar * np.asarray(dom.demands, float)
        return _TwoPoint(dom, rng, eta0, delta0, t0, delta_decay, p0)
    return make


@dataclass
class SimulationTrace:
    prices: np.ndarray        # (T, k)
    values: np.ndarray        # (T,)
    demand_index: np.ndarray  # (T,), 1..k
    bundles: np.ndarray       # (T,), 0..k
    revenue: np.ndarray       # (T,)
    seed: int
    strategy: str

    @property
    def T(self) -> int:
        return len(self.revenue)

    def to_csv(self, path: str | Path) -> None:
        k = self.prices.shape[1]
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["round"] + [f"p{i}" for i in range(1, k + 1)] +
                        ["value", "demand_index", "bundle", "revenue"])
            for t in range(self.T):
                wr.writerow([t + 1] + [repr(float(x)) for x in self.prices[t]] +
                            [repr(float(self.values[t])), int(self.demand_index[t]),
                             int(self.bundles[t]), repr(float(self.revenue[t]))])


def _sample_types(inst: ProblemInstance, T: int, rng: np.random.Generator):
    """Draw types in fixed-size chunks so a longer run extends a shorter one."""
    idx_parts, val_parts = [], []
    q = np.asarray(inst.weights)
    drawn = 0
    while drawn < T:
        idx = rng.choice(inst.k, size=_TYPE_CHUNK, p=q) + 1
        u = rng.random(_TYPE_CHUNK)
        v = np.empty(_TYPE_CHUNK)
        for i in range(1, inst.k + 1):
            mask = idx == i
            if mask.any():
                v[mask] = inst.marginals[i - 1].ppf(u[mask])
        idx_parts.append(idx)
        val_parts.append(v)
        drawn += _TYPE_CHUNK
    return np.concatenate(idx_parts)[:T], np.concatenate(val_parts)[:T]


def simulate(inst: ProblemInstance, strategy: StrategyFactory, T: int, seed: int) -> SimulationTrace:
    """Run ``T`` rounds. Buyer types and strategy randomness use separate
    streams derived from ``seed``; ties go to the larger bundle."""
    if T < 1:
        raise ValueError("T must be at least 1")
    buyer_ss, strat_ss = np.random.SeedSequence(seed).spawn(2)
    demand_idx, values = _sample_types(inst, T, np.random.default_rng(buyer_ss))
    dom = PriceDomain(inst.demands, inst.v_bar)
    strat = strategy(dom, np.random.default_rng(strat_ss))
    k = inst.k
    dem = [0] + list(inst.demands)
    prices = np.empty((T, k))
    values_list = values.tolist()
    idx_list = [int(x) for x in demand_idx]
    bundles = np.empty(T, dtype=int)
    paid = np.empty(T)
    for t in range(T):
        posted = strat.post()
        prices[t] = posted
        p = prices[t].tolist()
        if len(p) != k or p[0] < 0.0 or any(b < a for a, b in zip(p, p[1:])):
            raise ValueError(f"strategy posted an unordered price vector {p}")
        v = values_list[t]
        i = idx_list[t]
        best_j, best_u = 0, 0.0
        for j in range(1, i + 1):
            util = v * dem[j] - p[j - 1]
            if util >= best_u:
                best_j, best_u = j, util
        bundles[t] = best_j
        paid[t] = 0.0 if best_j == 0 else p[best_j - 1]
        strat.observe(best_j)
    return SimulationTrace(prices, values, demand_idx, bundles, paid, seed, strat.name)


@dataclass(frozen=True)
class RegretReport:
    T: int
    cumulative_revenue: float
    rev_star: float
    baseline: float
    average_regret: float
    average_regret_stderr: float
    expected_average_regret: float
    cumulative_expected_regret: float


def optimal_revenue(inst: ProblemInstance, cfg: OptimizeConfig | None = None) -> float:
    return maximize(inst, cfg).rev_star


def regret(trace: SimulationTrace, inst: ProblemInstance, rev_star: float | None = None,
           upto: int | None = None) -> RegretReport:
    """Regret against the best fixed price vector over the first ``upto`` rounds.

    ``average_regret`` uses realized revenue (noisy, may be negative);
    ``expected_average_regret`` replaces each round's revenue by the expected
    revenue of the prices posted that round.
    """
    if rev_star is None:
        rev_star = optimal_revenue(inst)
    T = trace.T if upto is None else int(upto)
    if not 1 <= T <= trace.T:
        raise ValueError("upto must lie in [1, T]")
    realized = trace.revenue[:T]
    total = float(realized.sum())
    sd = float(realized.std(ddof=1)) if T > 1 else 0.0
    uniq, inverse = np.unique(trace.prices[:T], axis=0, return_inverse=True)
    expected = rev(uniq, inst)[np.asarray(inverse).ravel()]
    exp_total = float(expected.sum())
    return RegretReport(
        T=T,
        cumulative_revenue=total,
        rev_star=rev_star,
        baseline=T * rev_star,
        average_regret=rev_star - total / T,
        average_regret_stderr=sd / math.sqrt(T),
        expected_average_regret=rev_star - exp_total / T,
        cumulative_expected_regret=T * rev_star - exp_total,
    )
