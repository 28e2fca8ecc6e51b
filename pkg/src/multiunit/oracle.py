"""Exact optima for a buyer with finitely many types ``(v, d)``.

``lp_optimal`` solves for the best randomized mechanism. Each type ``t``
receives exactly ``d(t)`` units with probability ``w(t)`` (nothing
otherwise) and pays ``p(t)`` in expectation. A type that reports ``t'``
gets ``v(t) min(d(t), d(t')) w(t') - p(t')``.

``deterministic_optimal`` searches menus of fixed bundles, one per distinct
demand, and returns the best one.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .simplex import LPError, solve_lp


class InvalidMechanism(ValueError):
    pass


class SizeError(ValueError):
    pass


@dataclass(frozen=True)
class DiscreteInstance:
    types: tuple[tuple[float, int], ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        types = tuple((float(v), int(d)) for v, d in self.types)
        object.__setattr__(self, "types", types)
        object.__setattr__(self, "probs", tuple(float(q) for q in self.probs))
        if not types or len(types) != len(self.probs):
            raise ValueError("types and probs must be non-empty and of equal length")
        if any(v < 0.0 or d < 1 for v, d in types):
            raise ValueError("types need v >= 0 and d >= 1")
        if any(q < 0.0 for q in self.probs) or abs(sum(self.probs) - 1.0) > 1e-12:
            raise ValueError("probs must be non-negative and sum to 1")

    @property
    def n(self) -> int:
        return len(self.types)

    @property
    def demands(self) -> tuple[int, ...]:
        return tuple(sorted({d for _, d in self.types}))


@dataclass(frozen=True)
class Mechanism:
    """Per-type probability ``w`` of receiving all ``d`` units and payment ``p``."""

    w: tuple[float, ...]
    p: tuple[float, ...]

    def utility(self, inst: DiscreteInstance, t: int, report: int):
        v, d = inst.types[t]
        d_r = inst.types[report][1]
        if isinstance(self.w[report], Fraction):
            v = Fraction(v)  # stay exact for exact mechanisms
        return v * min(d, d_r) * self.w[report] - self.p[report]

    def revenue(self, inst: DiscreteInstance):
        return sum(q * p for q, p in zip(inst.probs, self.p))

    def violations(self, inst: DiscreteInstance) -> tuple[float, float]:
        """Largest EIC and EIR violations (positive means violated)."""
        V = np.array([v for v, _ in inst.types])
        D = np.array([d for _, d in inst.types])
        w, p = np.asarray(self.w, float), np.asarray(self.p, float)
        truthful = V * D * w - p
        deviate = V[:, None] * np.minimum(D[:, None], D[None, :]) * w[None, :] - p[None, :]
        eic = float(np.max(deviate - truthful[:, None]))
        eir = float(np.max(-truthful))
        return eic, eir


def _ic_rows(V, D, pairs, n):
    """Rows of ``v_t min(d_t, d_s) w_s - p_s - v_t d_t w_t + p_t <= 0``."""
    A = np.zeros((len(pairs), 2 * n))
    for r, (t, s) in enumerate(pairs):
        A[r, s] += V[t] * min(D[t], D[s])
        A[r, n + s] -= 1.0
        A[r, t] -= V[t] * D[t]
        A[r, n + t] += 1.0
    return A


def local_pairs(inst: DiscreteInstance) -> list[tuple[int, int]]:
    """Deviations to the neighbouring values within each demand and to the
    nearest value of every other demand."""
    by_demand: dict[int, list[int]] = {}
    for t, (v, d) in enumerate(inst.types):
        by_demand.setdefault(d, []).append(t)
    for d in by_demand:
        by_demand[d].sort(key=lambda t: inst.types[t][0])
    pairs = set()
    for d, members in by_demand.items():
        for a, b in zip(members, members[1:]):
            pairs.update({(a, b), (b, a)})
    for t, (v, d) in enumerate(inst.types):
        for d2, members in by_demand.items():
            if d2 == d:
                continue
            vals = np.array([inst.types[s][0] for s in members])
            pos = int(np.searchsorted(vals, v))
            for x in (pos - 1, pos):
                if 0 <= x < len(members):
                    pairs.add((t, members[x]))
    return sorted(pairs)


def lp_optimal(inst: DiscreteInstance, max_types: int = 200,
               check_tol: float = 1e-8, mode: str = "all_pairs",
               max_rounds: int = 200) -> tuple[Mechanism, float]:
    """Revenue-optimal randomized mechanism under EIC and EIR.

    ``mode="all_pairs"`` enforces incentive constraints between every pair
    of types. They are added lazily: solve with the local deviations, add
    the most violated deviation of every type, and repeat until none is
    violated. The final solution is optimal for the full all-pairs program
    because it is feasible for it and optimal for a relaxation of it.
    ``mode="local"`` stops after the local deviations, without the final
    feasibility check.
    """
    n = inst.n
    if n > max_types:
        raise SizeError(f"{n} types exceeds the cap of {max_types}")
    if mode not in ("all_pairs", "local"):
        raise ValueError(f"unknown mode {mode!r}")
    V = np.array([v for v, _ in inst.types])
    D = np.array([d for _, d in inst.types], dtype=float)
    fixed = np.vstack([
        np.hstack([-np.diag(V * D), np.eye(n)]),          # EIR
        np.hstack([np.eye(n), np.zeros((n, n))]),         # w <= 1
    ])
    fixed_b = np.concatenate([np.zeros(n), np.ones(n)])
    c = np.concatenate([np.zeros(n), np.asarray(inst.probs)])
    pairs = local_pairs(inst)
    active = set(pairs)
    units = np.minimum(D[:, None], D[None, :])
    for _ in range(max_rounds):
        A = np.vstack([_ic_rows(V, D, pairs, n), fixed])
        b = np.concatenate([np.zeros(len(pairs)), fixed_b])
        res = solve_lp(c, A, b)
        w = np.minimum(res.x[:n], 1.0)
        p = res.x[n:]
        # pivoting round-off can leave p a few ulps above v d w (e.g. w = 0, p = 1e-15)
        cap = V * D * w
        p = np.where((p > cap) & (p - cap <= 1e-12 * np.maximum(1.0, V * D)), cap, p)
        mech = Mechanism(tuple(float(x) for x in w), tuple(float(x) for x in p))
        if mode == "local":
            return mech, float(mech.revenue(inst))
        truthful = V * D * w - p
        gain = V[:, None] * units * w[None, :] - p[None, :] - truthful[:, None]
        np.fill_diagonal(gain, -np.inf)
        worst = np.argmax(gain, axis=1)
        new = [(t, int(s)) for t, s in enumerate(worst)
               if gain[t, s] > 1e-10 and (t, int(s)) not in active]
        if not new:
            break
        active.update(new)
        pairs = sorted(active)
    else:
        raise LPError("constraint generation did not converge", {"rounds": max_rounds})
    eic, eir = mech.violations(inst)
    if eic > check_tol or eir > check_tol:
        raise LPError("solution violates constraints after solve",
                      {"eic": eic, "eir": eir, "pivots": res.pivots})
    return mech, float(mech.revenue(inst))


def menu_revenue(inst: DiscreteInstance, bundles: Sequence[int], prices) -> np.ndarray:
    """Expected revenue of fixed-bundle menus, buyer ties broken for the seller.

    ``prices`` is ``(C, m)`` for ``C`` candidate menus over the ``m`` bundle
    sizes in ``bundles``; ``inf`` marks a bundle that is not offered.
    """
    P = np.atleast_2d(np.asarray(prices, dtype=float))
    V = np.array([v for v, _ in inst.types])
    Dm = np.array([d for _, d in inst.types], dtype=float)
    sizes = np.asarray(bundles, dtype=float)
    units = np.minimum(Dm[:, None], sizes[None, :])              # (n, m)
    util = V[:, None] * units                                     # (n, m)
    scale = max(1.0, float(np.max(V * Dm)))
    out = np.empty(len(P))
    chunk = max(1, 2_000_000 // max(1, inst.n * len(sizes)))
    probs = np.asarray(inst.probs)
    for s in range(0, len(P), chunk):
        Pc = P[s:s + chunk]
        U = util[None, :, :] - Pc[:, None, :]                     # (C, n, m)
        U = np.concatenate([U, np.zeros(U.shape[:2] + (1,))], axis=2)
        Pz = np.concatenate([Pc, np.zeros((len(Pc), 1))], axis=1)
        best = U.max(axis=2, keepdims=True)
        tied = U >= best - 1e-9 * scale
        paid = np.where(tied, Pz[:, None, :], -np.inf).max(axis=2)
        out[s:s + chunk] = paid @ probs
    return out


def _forests(m: int):
    """Parent maps for ``m`` bundles: parent is ``-1`` (not offered), ``m``
    (the empty option, price 0) or another bundle, with no cycles."""
    for parents in itertools.product(range(-1, m + 1), repeat=m):
        if any(parents[j] == j for j in range(m)):
            continue
        ok = True
        for j in range(m):
            seen, cur = set(), j
            while 0 <= cur < m:
                if cur in seen:
                    ok = False
                    break
                seen.add(cur)
                cur = parents[cur]
            if not ok:
                break
        if ok:
            yield parents


def deterministic_optimal(inst: DiscreteInstance, max_demands: int = 4,
                          max_candidates: int = 20_000_000) -> tuple[dict[int, float], float]:
    """Best menu with one fixed bundle per distinct demand.

    Some optimal menu has every offered price tight: each offered bundle
    ``j`` has a type indifferent between it and another option ``l``, and
    following these indifferences from any offered bundle reaches the empty
    option. (If a group of offered bundles had no such link, raising all
    their prices together by a small amount keeps every buyer's choice and
    raises revenue.) Each price is then the parent's price plus
    ``v (min(d, d_j) - min(d, d_l))`` for some type ``(v, d)``, so
    enumerating parent forests and types covers an optimum.

    Returns ``({demand: price}, revenue)``; bundles not offered are omitted.
    """
    bundles = inst.demands
    m = len(bundles)
    if m > max_demands:
        raise SizeError(f"{m} distinct demands exceeds exhaustive limit {max_demands}")
    sizes = list(bundles) + [0]          # index m is the empty option
    steps = {}
    for j in range(m):
        for l in range(m + 1):
            if l == j:
                continue
            vals = {v * (min(d, sizes[j]) - min(d, sizes[l])) for v, d in inst.types}
            steps[j, l] = np.array(sorted(vals))

    best_rev, best_prices = 0.0, np.full(m, np.inf)
    for parents in _forests(m):
        order = []
        placed = set()
        while len(order) < m:
            for j in range(m):
                if j in placed:
                    continue
                par = parents[j]
                if par < 0 or par == m or par in placed:
                    order.append(j)
                    placed.add(j)
        offered = [j for j in range(m) if parents[j] >= 0]
        count = int(np.prod([len(steps[j, parents[j]]) for j in offered])) if offered else 1
        if count > max_candidates:
            raise SizeError(f"{count} candidate menus exceeds limit {max_candidates}")
        grids = [steps[j, parents[j]] for j in offered]
        combos = np.array(list(itertools.product(*grids))) if offered else np.zeros((1, 0))
        P = np.full((len(combos), m), np.inf)
        col = {j: x for x, j in enumerate(offered)}
        for j in order:
            if parents[j] < 0:
                continue
            base = 0.0 if parents[j] == m else P[:, parents[j]]
            P[:, j] = base + combos[:, col[j]]
        vals = menu_revenue(inst, bundles, P)
        i = int(np.argmax(vals))
        if vals[i] > best_rev + 1e-12:
            best_rev, best_prices = float(vals[i]), P[i]
    menu = {d: float(x) for d, x in zip(bundles, best_prices) if np.isfinite(x)}
    return menu, best_rev


def determinism_gap(inst: DiscreteInstance) -> float:
    """Optimal randomized revenue minus optimal deterministic revenue."""
    _, lp_rev = lp_optimal(inst)
    _, det_rev = deterministic_optimal(inst)
    return lp_rev - det_rev


def expost_payments(mech: Mechanism) -> tuple[tuple[float, float], ...]:
    """Realized payments ``(on allocation, on no allocation)`` per type.

    The expected payment is scaled by ``A / E[A]`` for realized unit count
    ``A``; with allocations on ``{0, d}`` this is ``p / w`` when the units
    arrive and ``0`` otherwise.
    """
    out = []
    for w, p in zip(mech.w, mech.p):
        zero = p * 0  # same number type as the input, so Fractions stay exact
        if w <= 0:
            if p > 0:
                raise InvalidMechanism("positive payment with zero allocation probability")
            out.append((zero, zero))
        else:
            out.append((p / w, zero))
    return tuple(out)


@dataclass(frozen=True)
class GeneralMechanism:
    """Per-type lottery over unit counts ``{units: probability}`` and payment."""

    lotteries: tuple[dict, ...]
    p: tuple


def support_transform(mech: GeneralMechanism, inst: DiscreteInstance) -> Mechanism:
    """Replace every allocation of ``a < d`` units by ``d`` units w.p. ``a / d``.

    Extra units beyond ``d`` are worthless, so the type's allocation
    probability becomes ``E[min(A, d)] / d`` and the payment is unchanged.
    Exact when given ``Fraction`` inputs.
    """
    w = []
    for lot, (_, d) in zip(mech.lotteries, inst.types):
        w.append(sum(Fraction(prob) * Fraction(min(a, d), d) for a, prob in lot.items()))
    return Mechanism(tuple(w), tuple(mech.p))


def menu_as_mechanism(inst: DiscreteInstance, menu: dict[int, float]) -> GeneralMechanism:
    """Deterministic mechanism induced by a fixed-bundle menu (exact arithmetic).

    Each type picks its best bundle with seller-favourable ties and gets
    that many units with probability one.
    """
    options = [(0, Fraction(0))] + [(s, Fraction(p)) for s, p in sorted(menu.items())]
    lots, pays = [], []
    for v, d in inst.types:
        fv = Fraction(v)
        best = max(options, key=lambda o: (fv * min(d, o[0]) - o[1], o[1]))
        lots.append({best[0]: Fraction(1)})
        pays.append(best[1])
    return GeneralMechanism(tuple(lots), tuple(pays))


def general_truthful_utility(mech: GeneralMechanism, inst: DiscreteInstance, t: int):
    v, d = inst.types[t]
    fv = Fraction(v)
    return sum(Fraction(prob) * fv * min(a, d) for a, prob in mech.lotteries[t].items()) - mech.p[t]


def discretized_uniform(n_values: int, demands: Sequence[int] = (1, 2),
                        weights: Sequence[float] | None = None) -> DiscreteInstance:
    """Midpoint grid ``(m - 1/2) / n`` of a uniform ``[0, 1]`` value per demand."""
    weights = weights or [1.0 / len(demands)] * len(demands)
    types, probs = [], []
    for d, q in zip(demands, weights):
        for m in range(1, n_values + 1):
            types.append(((m - 0.5) / n_values, d))
            probs.append(q / n_values)
    total = sum(probs)
    return DiscreteInstance(tuple(types), tuple(x / total for x in probs))
