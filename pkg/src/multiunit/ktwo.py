"""Closed-form optimal prices when there are exactly two demand levels.

With two bundles the optimum is described by two cut-off values: ``v1``,
above which a low-demand buyer buys, and ``v2``, above which a high-demand
buyer buys the big bundle. Four candidate pairs cover every case, and each
reduces to a one-dimensional concave (or unimodal) problem.

Objectives are weighted by the demand probabilities ``q1, q2``; with
``q1 = q2`` they are proportional to the unweighted textbook forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import Marginal, ProblemInstance
from .numerics import golden_section_max
from .revenue import rev

CASES = ("separate_monopoly", "linked_pair", "equal_thresholds", "bundle_only")


@dataclass(frozen=True)
class Candidate:
    case_id: str
    v1: float
    v2: float
    revenue: float
    feasible: bool
    prices: tuple[float, float]


@dataclass(frozen=True)
class KTwoSolution:
    v1_star: float
    v2_star: float
    case_id: str
    prices: tuple[float, float]
    revenue: float
    candidates: tuple[Candidate, ...] = ()


def _argmax_1d(f, lo: float, hi: float, grid: int = 2001, tol: float = 1e-10) -> float:
    """Grid scan to bracket the best point, then golden section inside it.

    The scan guards against the convex kink that appears when a clipped
    argument runs past ``v_bar``; the golden section does the fine work.
    """
    xs = np.linspace(lo, hi, grid)
    vals = np.array([f(x) for x in xs])
    i = int(np.argmax(vals))
    a, b = xs[max(i - 1, 0)], xs[min(i + 1, grid - 1)]
    x = golden_section_max(f, a, b, tol=tol)
    return x if f(x) >= vals[i] else float(xs[i])


def monopoly_threshold(m: Marginal, d: int = 1) -> float:
    """Value maximising ``v d (1 - F(v))``; ``d`` only rescales the objective."""
    return _argmax_1d(lambda v: v * (1.0 - m.cdf_clipped(v)), 0.0, m.v_bar)


def _check_k2(inst: ProblemInstance) -> None:
    if inst.k != 2:
        raise ValueError(f"closed form needs exactly two demands, got k={inst.k}")


def candidate_objectives(inst: ProblemInstance) -> tuple[Candidate, ...]:
    """The four candidate ``(v1, v2)`` pairs with revenue and feasibility.

    Infeasible candidates carry revenue ``-inf``.
    """
    _check_k2(inst)
    d1, d2 = inst.demands
    q1, q2 = inst.weights
    F1, F2 = inst.marginals[0].cdf_clipped, inst.marginals[1].cdf_clipped
    vb = inst.v_bar
    slack = 1e-12 * max(1.0, vb)

    def S1(v):
        return 1.0 - F1(v)

    def S2(v):
        return 1.0 - F2(v)

    vh1 = monopoly_threshold(inst.marginals[0], d1)
    vh2 = monopoly_threshold(inst.marginals[1], d2)

    out = []
    # separate monopoly prices for each bundle
    ok = vh2 - slack <= vh1 <= d2 / d1 * vh2 + slack
    r = q1 * vh1 * d1 * S1(vh1) + q2 * vh2 * d2 * S2(vh2)
    out.append(Candidate(CASES[0], vh1, vh2, r if ok else -math.inf, ok,
                         (vh1 * d1, vh2 * d2)))

    # low bundle sold to both demand levels, top-up priced at the high monopoly value
    v1 = _argmax_1d(lambda v: v * d1 * (q1 * S1(v) + q2 * S2(v)), 0.0, vb)
    ok = v1 <= vh2 + slack
    r = v1 * d1 * (q1 * S1(v1) + q2 * S2(v1)) + q2 * vh2 * (d2 - d1) * S2(vh2)
    out.append(Candidate(CASES[1], v1, vh2, r if ok else -math.inf, ok,
                         (v1 * d1, vh2 * d2 - (vh2 - v1) * d1)))

    # one per-unit price for both bundles
    v = _argmax_1d(lambda x: x * (q1 * d1 * S1(x) + q2 * d2 * S2(x)), 0.0, vb)
    r = v * (q1 * d1 * S1(v) + q2 * d2 * S2(v))
    out.append(Candidate(CASES[2], v, v, r, True, (v * d1, v * d2)))

    # one price for both bundles
    def bundle(x):
        return x * d2 * (q2 * S2(x) + q1 * S1(x * d2 / d1))

    v2 = _argmax_1d(bundle, 0.0, vb)
    out.append(Candidate(CASES[3], v2 * d2 / d1, v2, bundle(v2), True,
                         (v2 * d2, v2 * d2)))
    return tuple(out)


def solve_k2(inst: ProblemInstance) -> KTwoSolution:
    """Best feasible candidate; ties go to the earlier case in :data:`CASES`."""
    _check_k2(inst)
    cands = candidate_objectives(inst)
    best = cands[0]
    for c in cands[1:]:
        if c.revenue > best.revenue:
            best = c
    return KTwoSolution(best.v1, best.v2, best.case_id, best.prices, best.revenue, cands)


def revenue_gap(sol: KTwoSolution, inst: ProblemInstance) -> float:
    """Difference between the candidate formula and the general revenue."""
    return abs(sol.revenue - rev(np.array(sol.prices), inst))
