import csv

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from multiunit.distributions import ProblemInstance, Uniform
from multiunit.dynpricing import (PriceDomain, regret, simulate, strategy_eps_grid,
                                  strategy_fixed, strategy_two_point)
from multiunit.optimizer import increment_bounds
from multiunit.revenue import rev


@pytest.fixture
def k1():
    u = Uniform(v_bar=1.0)
    return ProblemInstance(demands=(1,), weights=(1.0,), marginals=(u,), v_bar=1.0)


@pytest.fixture
def k2():
    u = Uniform(v_bar=1.0)
    return ProblemInstance(demands=(1, 2), weights=(0.5, 0.5), marginals=(u, u), v_bar=1.0)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-3, 6), min_size=3, max_size=3))
def test_feasible_lands_in_bounded_ordered_set(p):
    dom = PriceDomain((1, 2, 4), 1.0)
    q = dom.feasible(np.array(p))
    assert q[0] >= 0 and np.all(np.diff(q) >= -1e-12)
    assert np.all(np.diff(np.concatenate([[0], q])) <= np.array([1, 1, 2]) + 1e-12)
    batch = dom.feasible(np.array([p, p]))
    assert np.allclose(batch[0], q)


def test_fixed_strategy_realised_revenue(k2):
    trace = simulate(k2, strategy_fixed((0.4, 0.7)), 200_000, seed=3)
    assert trace.revenue.mean() == pytest.approx(0.3475, abs=4 * trace.revenue.std() / np.sqrt(trace.T))
    rep = regret(trace, k2, rev_star=0.375)
    assert rep.expected_average_regret == pytest.approx(0.375 - 0.3475, abs=1e-12)


def test_runs_are_reproducible_and_prefix_consistent(k2):
    a = simulate(k2, strategy_two_point(), 5000, seed=11)
    b = simulate(k2, strategy_two_point(), 5000, seed=11)
    c = simulate(k2, strategy_two_point(), 9000, seed=11)
    assert np.array_equal(a.prices, b.prices) and np.array_equal(a.revenue, b.revenue)
    assert np.array_equal(a.values, c.values[:5000])
    assert np.array_equal(a.prices, c.prices[:5000])


def test_buyer_best_response_in_trace(k2):
    trace = simulate(k2, strategy_eps_grid(), 3000, seed=5)
    dem = np.array([0, 1, 2])
    for t in range(0, 3000, 97):
        i = trace.demand_index[t]
        p = np.concatenate([[0.0], trace.prices[t]])
        util = trace.values[t] * dem[: i + 1] - p[: i + 1]
        assert util[trace.bundles[t]] == util.max()


def test_posted_prices_are_feasible(k2):
    trace = simulate(k2, strategy_two_point(), 4000, seed=1)
    assert np.all(np.diff(trace.prices, axis=1) >= 0)
    inc = np.diff(np.concatenate([np.zeros((trace.T, 1)), trace.prices], axis=1), axis=1)
    assert np.all(inc <= increment_bounds(k2) + 1e-12)


def test_two_point_converges_on_one_bundle(k1):
    trace = simulate(k1, strategy_two_point(), 100_000, seed=0)
    assert abs(trace.prices[-1, 0] - 0.5) < 0.05
    early = regret(trace, k1, rev_star=0.25, upto=10_000)
    late = regret(trace, k1, rev_star=0.25)
    assert late.expected_average_regret < early.expected_average_regret


def test_regret_report_fields(k1):
    trace = simulate(k1, strategy_fixed((0.5,)), 1000, seed=2)
    rep = regret(trace, k1, rev_star=0.25)
    assert rep.T == 1000 and rep.baseline == pytest.approx(250.0)
    assert rep.cumulative_expected_regret == pytest.approx(0.0, abs=1e-9)
    with pytest.raises(ValueError):
        regret(trace, k1, rev_star=0.25, upto=2000)


def test_trace_csv(tmp_path, k2):
    trace = simulate(k2, strategy_fixed((0.4, 0.7)), 50, seed=0)
    path = tmp_path / "t.csv"
    trace.to_csv(path)
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["round", "p1", "p2", "value", "demand_index", "bundle", "revenue"]
    assert len(rows) == 51
    assert float(rows[1][3]) == trace.values[0]


def test_bad_strategy_rejected(k2):
    with pytest.raises(ValueError):
        simulate(k2, strategy_fixed((0.7, 0.4)), 10, seed=0)
    with pytest.raises(ValueError):
        simulate(k2, strategy_fixed((0.4,)), 10, seed=0)
    with pytest.raises(ValueError):
        simulate(k2, strategy_fixed((0.4, 0.7)), 0, seed=0)


def test_expected_regret_uses_posted_prices(k2):
    trace = simulate(k2, strategy_eps_grid(resolution=5), 2000, seed=4)
    rep = regret(trace, k2, rev_star=0.375)
    want = 0.375 - np.mean([rev(p, k2) for p in trace.prices])
    assert rep.expected_average_regret == pytest.approx(want, abs=1e-12)
