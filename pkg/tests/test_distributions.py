import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, stats

from multiunit.distributions import (ConstantElasticity, DomainError, ExponentialTruncated,
                                     PiecewiseLinearCDF, ProblemInstance, SingularityError,
                                     TruncatedNormal, Uniform, is_dmr, is_regular,
                                     marginal_from_spec, marginal_to_spec, mixture)
from multiunit.instances import FAMILIES, random_marginal


def test_uniform_basics():
    m = Uniform(v_bar=1.0)
    assert m.cdf(0.5) == 0.5
    assert m.revenue_curve(0.5) == 0.25
    assert m.virtual_value(1.0) == 1.0
    assert is_dmr(m) and is_regular(m)


def test_uniform_matches_scipy():
    m = Uniform(v_bar=2.0, low=0.5, high=2.0)
    ref = stats.uniform(loc=0.5, scale=1.5)
    v = np.linspace(0.0, 2.0, 101)
    assert np.allclose(m.cdf(v), ref.cdf(v), atol=1e-15)


def test_exponential_matches_scipy_truncexpon():
    m = ExponentialTruncated(v_bar=3.0, rate=0.7)
    ref = stats.truncexpon(b=3.0 * 0.7, scale=1 / 0.7)
    v = np.linspace(0.0, 2.999, 57)
    assert np.allclose(m.cdf(v), ref.cdf(v), atol=1e-13)
    assert np.allclose(m.pdf(v), ref.pdf(v), rtol=1e-12)


def test_truncated_normal_matches_scipy():
    m = TruncatedNormal(v_bar=1.0, mu=0.4, sigma=0.3)
    ref = stats.truncnorm((0 - 0.4) / 0.3, (1 - 0.4) / 0.3, loc=0.4, scale=0.3)
    v = np.linspace(0.0, 1.0, 41)
    assert np.allclose(m.cdf(v), ref.cdf(v), atol=1e-13)
    assert np.allclose(m.pdf(v), ref.pdf(v), rtol=1e-12)


def test_constant_elasticity_untruncated_reference_values():
    unit = ConstantElasticity(v_bar=math.inf, a=1.0, epsilon=-1.0)
    assert unit.cdf(2.0) == pytest.approx(0.5)
    assert unit.revenue_curve(3.0) == pytest.approx(1.0)
    sq = ConstantElasticity(v_bar=math.inf, a=1.0, epsilon=-2.0)
    assert sq.virtual_value(3.0) == pytest.approx(-3.0)


def test_exponential_untruncated_virtual_value():
    m = ExponentialTruncated(v_bar=math.inf, rate=1.0)
    assert m.virtual_value(2.5) == pytest.approx(1.5)


def test_domain_and_singularity_errors():
    m = Uniform(v_bar=1.0, low=0.2, high=1.0)
    with pytest.raises(DomainError):
        m.cdf(1.5)
    with pytest.raises(DomainError):
        m.pdf(-0.1)
    with pytest.raises(SingularityError):
        m.virtual_value(0.1)


def test_constructor_validation():
    with pytest.raises(ValueError):
        Uniform(v_bar=1.0, low=0.5, high=0.2)
    with pytest.raises(ValueError):
        ConstantElasticity(v_bar=1.0, a=2.0, epsilon=-1.0)
    with pytest.raises(ValueError):
        PiecewiseLinearCDF(v_bar=1.0, knots=((0.0, 0.0), (0.5, 0.7), (0.8, 0.6), (1.0, 1.0)))
    with pytest.raises(ValueError):
        mixture([Uniform(v_bar=1.0), Uniform(v_bar=2.0, high=2.0)], [0.5, 0.5])


@pytest.mark.parametrize("family", FAMILIES)
def test_pdf_integrates_to_cdf(family):
    rng = np.random.default_rng(hash(family) % 2**32)
    m = random_marginal(rng, 1.7, family)
    pts = sorted({0.0, 1.7, *[b for b in m.breakpoints() if 0 < b < 1.7]})
    for x in (0.3, 0.9, 1.7):
        cuts = [p for p in pts if p < x] + [x]
        mass = sum(integrate.quad(lambda t: float(m.pdf(t)), a, b, epsabs=1e-13)[0]
                   for a, b in zip(cuts[:-1], cuts[1:]))
        assert mass == pytest.approx(m.cdf(x), abs=1e-9)


@pytest.mark.parametrize("family", FAMILIES)
def test_ppf_inverts_cdf(family):
    rng = np.random.default_rng(7)
    m = random_marginal(rng, 2.0, family)
    u = np.linspace(0.001, 0.999, 199)
    assert np.allclose(m.cdf(m.ppf(u)), u, atol=1e-10)
    assert isinstance(m.ppf(0.25), float)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), fam=st.sampled_from(FAMILIES))
def test_cdf_monotone_and_normalised(seed, fam):
    m = random_marginal(np.random.default_rng(seed), 1.3, fam)
    v = np.linspace(0.0, 1.3, 301)
    F = m.cdf(v)
    assert F[0] >= 0.0 and F[-1] == pytest.approx(1.0, abs=1e-12)
    assert np.all(np.diff(F) >= -1e-15)
    assert np.all(m.pdf(v) >= 0.0)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), fam=st.sampled_from(FAMILIES))
def test_generated_marginals_are_dmr(seed, fam):
    m = random_marginal(np.random.default_rng(seed), 1.0, fam)
    assert is_dmr(m).ok


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_mixture_of_dmr_is_dmr(seed):
    rng = np.random.default_rng(seed)
    parts = [random_marginal(rng, 2.0, f) for f in FAMILIES[:4]]
    w = rng.dirichlet(np.ones(4))
    w = w / w.sum()
    assert is_dmr(mixture(parts, w.tolist())).ok


def test_dmr_chord_check_matches_analytic_on_piecewise():
    # convex CDF -> increasing density -> concave revenue
    good = PiecewiseLinearCDF(v_bar=1.0, knots=((0.0, 0.0), (0.5, 0.2), (1.0, 1.0)))
    assert is_dmr(good).ok
    # concave CDF with a big drop in density: revenue kinks upward
    bad = PiecewiseLinearCDF(v_bar=1.0, knots=((0.0, 0.0), (0.5, 0.9), (1.0, 1.0)))
    verdict = is_dmr(bad)
    assert not verdict.ok
    lo, mid, hi = verdict.witness
    R = bad.revenue_curve
    assert R(mid) < 0.5 * (R(lo) + R(hi))


def test_exponential_witness_is_a_real_chord_violation():
    m = ExponentialTruncated(v_bar=10.0, rate=1.0)
    verdict = is_dmr(m)
    assert not verdict.ok
    lo, mid, hi = verdict.witness
    assert lo >= 2.0 - 1e-2
    R = m.revenue_curve
    assert R(mid) < 0.5 * (R(lo) + R(hi))


def test_truncation_can_restore_regularity():
    # virtual value of the truncated law is phi + S(v_bar)/f, which is
    # increasing when v_bar is small
    assert not is_regular(ConstantElasticity(v_bar=100.0, a=1.0, epsilon=-2.0))
    assert is_regular(ConstantElasticity(v_bar=5.0, a=1.0, epsilon=-2.0))


def test_spec_round_trip():
    rng = np.random.default_rng(3)
    for fam in FAMILIES:
        m = random_marginal(rng, 1.5, fam)
        assert marginal_from_spec(marginal_to_spec(m), 1.5) == m


def test_spec_rejects_unknown_keys():
    with pytest.raises(ValueError):
        marginal_from_spec({"kind": "uniform", "params": {"low": 0.0, "high": 1.0, "x": 1}}, 1.0)
    with pytest.raises(ValueError):
        marginal_from_spec({"kind": "pareto", "params": {}}, 1.0)


def test_problem_instance_validation():
    u = Uniform(v_bar=1.0)
    ProblemInstance(demands=(1, 2), weights=(0.5, 0.5), marginals=(u, u), v_bar=1.0)
    with pytest.raises(ValueError):
        ProblemInstance(demands=(2, 1), weights=(0.5, 0.5), marginals=(u, u), v_bar=1.0)
    with pytest.raises(ValueError):
        ProblemInstance(demands=(1, 2), weights=(0.6, 0.5), marginals=(u, u), v_bar=1.0)
    with pytest.raises(ValueError):
        ProblemInstance(demands=(1,), weights=(1.0,),
                        marginals=(ExponentialTruncated(v_bar=math.inf),), v_bar=math.inf)
