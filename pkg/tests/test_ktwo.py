import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import brentq

from multiunit.distributions import ExponentialTruncated, ProblemInstance, Uniform
from multiunit.instances import random_dmr_instance
from multiunit.ktwo import CASES, candidate_objectives, monopoly_threshold, revenue_gap, solve_k2
from multiunit.optimizer import grid_search, maximize
from multiunit.revenue import rev


def test_uniform_two_bundles():
    u = Uniform(v_bar=1.0)
    inst = ProblemInstance(demands=(1, 2), weights=(0.5, 0.5), marginals=(u, u), v_bar=1.0)
    sol = solve_k2(inst)
    assert sol.revenue == pytest.approx(0.375, abs=1e-9)
    assert sol.prices[0] <= sol.prices[1]
    assert sol.case_id in CASES


def test_monopoly_threshold_uniform_and_exponential():
    assert monopoly_threshold(Uniform(v_bar=1.0)) == pytest.approx(0.5, abs=1e-8)
    # maximiser of v (e^{-v} - e^{-5}) solves e^{-v} (1 - v) = e^{-5}
    root = brentq(lambda v: np.exp(-v) * (1 - v) - np.exp(-5.0), 0.0, 1.0, xtol=1e-14)
    assert monopoly_threshold(ExponentialTruncated(v_bar=5.0, rate=1.0)) == pytest.approx(root, abs=1e-7)


def test_rejects_wrong_k():
    u = Uniform(v_bar=1.0)
    inst = ProblemInstance(demands=(1,), weights=(1.0,), marginals=(u,), v_bar=1.0)
    with pytest.raises(ValueError):
        solve_k2(inst)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_every_candidate_formula_matches_general_revenue(seed):
    rng = np.random.default_rng(seed)
    inst = random_dmr_instance(rng, 2)
    for c in candidate_objectives(inst):
        if c.feasible:
            assert c.prices[0] <= c.prices[1] + 1e-12
            assert c.revenue == pytest.approx(rev(np.array(c.prices), inst), abs=1e-9)


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_closed_form_matches_ascent_and_grid(seed):
    rng = np.random.default_rng(seed)
    inst = random_dmr_instance(rng, 2)
    sol = solve_k2(inst)
    assert revenue_gap(sol, inst) <= 1e-9
    assert sol.revenue == pytest.approx(maximize(inst).rev_star, abs=1e-6)
    assert sol.revenue == pytest.approx(grid_search(inst, 101, refine_to=1e-4).rev_star, abs=1e-4)


def test_pricing_rules_are_one_of_the_three_forms():
    rng = np.random.default_rng(2)
    for _ in range(10):
        inst = random_dmr_instance(rng, 2)
        d1, d2 = inst.demands
        sol = solve_k2(inst)
        P1, P2 = sol.prices
        v1, v2 = sol.v1_star, sol.v2_star
        forms = [
            (v1 * d1, v2 * d2 - (v2 - v1) * d1),
            (v1 * d1, v2 * d2),
            (v2 * d2, v2 * d2),
        ]
        assert any(abs(P1 - a) < 1e-9 and abs(P2 - b) < 1e-9 for a, b in forms)
