import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from multiunit.oracle import (DiscreteInstance, GeneralMechanism, InvalidMechanism, Mechanism,
                              SizeError, deterministic_optimal, discretized_uniform,
                              expost_payments, general_truthful_utility, lp_optimal,
                              menu_as_mechanism, menu_revenue, support_transform)
from multiunit.simplex import LPError, solve_lp

EXAMPLE = DiscreteInstance(types=((1, 3), (1, 2), (6, 1)), probs=(1 / 3, 1 / 3, 1 / 3))


def highs_revenue(inst: DiscreteInstance) -> float:
    """All-pairs LP solved by HiGHS, built independently of the package."""
    n = inst.n
    V = np.array([v for v, _ in inst.types])
    D = np.array([d for _, d in inst.types], float)
    rows = []
    for t in range(n):
        for s in range(n):
            if s == t:
                continue
            r = np.zeros(2 * n)
            r[s] += V[t] * min(D[t], D[s])
            r[n + s] -= 1
            r[t] -= V[t] * D[t]
            r[n + t] += 1
            rows.append(r)
        r = np.zeros(2 * n)
        r[t] = -V[t] * D[t]
        r[n + t] = 1
        rows.append(r)
    res = linprog(-np.concatenate([np.zeros(n), inst.probs]), A_ub=np.array(rows),
                  b_ub=np.zeros(len(rows)), bounds=[(0, 1)] * n + [(0, None)] * n, method="highs")
    assert res.status == 0
    return -res.fun


def brute_force_menu(inst: DiscreteInstance) -> float:
    """Exhaustive search over integer prices (exact when values are integers)."""
    bundles = inst.demands
    top = int(max(v * d for v, d in inst.types))
    choices = [np.inf] + list(range(top + 1))
    P = np.array(list(itertools.product(choices, repeat=len(bundles))), dtype=float)
    return float(menu_revenue(inst, bundles, P).max())


# -- simplex ------------------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_simplex_matches_highs(seed):
    rng = np.random.default_rng(seed)
    m, n = int(rng.integers(1, 12)), int(rng.integers(1, 12))
    A = rng.uniform(-1, 2, (m, n))
    b = rng.uniform(0, 3, m)
    c = rng.uniform(-1, 2, n)
    # a box keeps the program bounded
    A = np.vstack([A, np.eye(n)])
    b = np.concatenate([b, np.full(n, 5.0)])
    ours = solve_lp(c, A, b)
    ref = linprog(-c, A_ub=A, b_ub=b, bounds=[(0, None)] * n, method="highs")
    assert ours.objective == pytest.approx(-ref.fun, abs=1e-8)
    assert np.all(A @ ours.x <= b + 1e-8)


def test_simplex_degenerate_cycling_example():
    # Beale's example cycles under a naive rule
    c = np.array([0.75, -150, 0.02, -6])
    A = np.array([[0.25, -60, -0.04, 9], [0.5, -90, -0.02, 3], [0, 0, 1, 0]])
    b = np.array([0, 0, 1.0])
    res = solve_lp(c, A, b)
    assert res.objective == pytest.approx(0.05)


def test_simplex_unbounded_and_bad_input():
    with pytest.raises(LPError):
        solve_lp(np.array([1.0]), np.array([[-1.0]]), np.array([1.0]))
    with pytest.raises(ValueError):
        solve_lp(np.array([1.0]), np.array([[1.0]]), np.array([-1.0]))


# -- LP oracle -------------------------------------------------------------------

def test_example_lp_and_menu():
    mech, lp_rev = lp_optimal(EXAMPLE)
    assert lp_rev == pytest.approx(2.5, abs=1e-9)
    menu, det_rev = deterministic_optimal(EXAMPLE)
    assert det_rev == pytest.approx(7 / 3, abs=1e-9)
    assert menu_revenue(EXAMPLE, (1, 2, 3), [[3, 3, 3]])[0] == pytest.approx(2.0)
    eic, eir = mech.violations(EXAMPLE)
    assert eic <= 1e-9 and eir <= 1e-9


def small_instance(rng, integer=False):
    n = int(rng.integers(2, 7))
    demands = rng.integers(1, 4, n)
    values = rng.integers(1, 6, n).astype(float) if integer else rng.uniform(0.1, 3.0, n)
    probs = rng.dirichlet(np.ones(n))
    probs = probs / probs.sum()
    probs[-1] = 1.0 - probs[:-1].sum()
    return DiscreteInstance(tuple(zip(values.tolist(), demands.tolist())), tuple(probs.tolist()))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_lp_matches_highs(seed):
    inst = small_instance(np.random.default_rng(seed))
    _, ours = lp_optimal(inst)
    assert ours == pytest.approx(highs_revenue(inst), abs=1e-8)


def test_lp_matches_highs_on_grid_instance():
    inst = discretized_uniform(25)
    _, ours = lp_optimal(inst)
    assert ours == pytest.approx(highs_revenue(inst), abs=1e-8)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_deterministic_matches_brute_force(seed):
    inst = small_instance(np.random.default_rng(seed), integer=True)
    _, ours = deterministic_optimal(inst)
    assert ours == pytest.approx(brute_force_menu(inst), abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_randomization_never_hurts(seed):
    inst = small_instance(np.random.default_rng(seed))
    _, lp = lp_optimal(inst)
    _, det = deterministic_optimal(inst)
    assert lp >= det - 1e-9


def test_local_mode_is_a_relaxation():
    inst = discretized_uniform(10, demands=(1, 2, 3))
    _, full = lp_optimal(inst)
    _, local = lp_optimal(inst, mode="local")
    assert local >= full - 1e-9


def test_size_limits():
    with pytest.raises(SizeError):
        lp_optimal(discretized_uniform(150))
    inst = DiscreteInstance(tuple((1.0, d) for d in range(1, 6)), (0.2,) * 5)
    with pytest.raises(SizeError):
        deterministic_optimal(inst)


def test_instance_validation():
    with pytest.raises(ValueError):
        DiscreteInstance(((1.0, 0),), (1.0,))
    with pytest.raises(ValueError):
        DiscreteInstance(((1.0, 1),), (0.5,))


# -- transforms ---------------------------------------------------------------------

def test_expost_payments_example():
    mech, _ = lp_optimal(EXAMPLE)
    pays = expost_payments(mech)
    t = EXAMPLE.types.index((1.0, 2))
    assert mech.w[t] == pytest.approx(0.75)
    assert pays[t][0] == pytest.approx(2.0)
    assert pays[t][1] == 0.0


def test_expost_rejects_payment_without_allocation():
    with pytest.raises(InvalidMechanism):
        expost_payments(Mechanism((0.0,), (1.0,)))


def test_support_transform_is_exact():
    inst = DiscreteInstance(((2, 3), (1, 1)), (0.5, 0.5))
    mech = GeneralMechanism(({1: Fraction(1, 2), 3: Fraction(1, 2)}, {2: Fraction(1)}),
                            (Fraction(2), Fraction(1, 2)))
    out = support_transform(mech, inst)
    assert out.w == (Fraction(2, 3), Fraction(1))
    for t in range(inst.n):
        assert out.utility(inst, t, t) == general_truthful_utility(mech, inst, t)


def test_menu_as_mechanism_seller_favourable_ties():
    inst = DiscreteInstance(((1, 2),), (1.0,))
    gm = menu_as_mechanism(inst, {1: 1, 2: 2})
    assert gm.lotteries[0] == {2: 1}
    assert gm.p[0] == 2
