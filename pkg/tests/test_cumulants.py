import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fisherclt.cumulants import (CumulantVector, DegenerateDistributionError, MomentVector,
                                 analytic_cumulants, cumulants_to_moments,
                                 cumulants_to_raw_moments, empirical_cumulants,
                                 index_solutions, moments_to_cumulants,
                                 positive_compositions, raw_cumulants)


def test_normal_moments_give_vanishing_cumulants():
    m = MomentVector((0, 1, 0, 3, 0, 15))
    c = moments_to_cumulants(m)
    assert c.gamma == (0, 1, 0, 0, 0, 0)


def test_exponential_standardization():
    m = MomentVector(tuple(Fraction(math.factorial(r)) for r in range(1, 5)))
    c = moments_to_cumulants(m)
    assert c.g(3) == 2
    assert c.g(4) == 6


def test_uniform_standardization():
    m = MomentVector((Fraction(0), Fraction(1), Fraction(0), Fraction(9, 5)))
    c = moments_to_cumulants(m)
    assert c.g(3) == 0
    assert c.g(4) == Fraction(-6, 5)


def test_degenerate_raises():
    with pytest.raises(DegenerateDistributionError):
        moments_to_cumulants(MomentVector((Fraction(1), Fraction(1))))


_gammas = st.lists(st.fractions(min_value=-2, max_value=2, max_denominator=10),
                   min_size=1, max_size=6)


@given(_gammas)
def test_round_trip_cumulants_moments(extra):
    c = CumulantVector((Fraction(0), Fraction(1)) + tuple(extra))
    m = cumulants_to_moments(c)
    back = moments_to_cumulants(m)
    assert back.gamma == c.gamma


@given(_gammas, st.integers(min_value=1, max_value=5))
def test_scale_law_on_raw_recursion(extra, a):
    kappa = [Fraction(0), Fraction(1)] + list(extra)
    m = cumulants_to_raw_moments(kappa)
    scaled_m = [mi * Fraction(a) ** (i + 1) for i, mi in enumerate(m)]
    scaled_kappa = raw_cumulants(scaled_m)
    for r, (k1, k2) in enumerate(zip(kappa, scaled_kappa), start=1):
        assert k2 == k1 * Fraction(a) ** r


def test_index_solution_counts_match_partitions():
    assert [len(index_solutions(k)) for k in range(1, 6)] == [1, 2, 3, 5, 7]


def test_index_solutions_examples():
    sols = {s.rs: s.j for s in index_solutions(2)}
    assert sols == {(2, 0): 2, (0, 1): 1}
    sols3 = {s.rs: s.j for s in index_solutions(3)}
    assert sols3 == {(3, 0, 0): 3, (1, 1, 0): 2, (0, 0, 1): 1}


@given(st.integers(min_value=1, max_value=10))
def test_index_solutions_satisfy_constraint(k):
    for sol in index_solutions(k):
        assert sum((i + 1) * r for i, r in enumerate(sol.rs)) == k
        assert sol.j == sum(sol.rs)


def test_positive_compositions_examples():
    assert positive_compositions(2, 2) == [(1, 1)]
    assert positive_compositions(4, 2) == [(1, 3), (2, 2), (3, 1)]
    assert positive_compositions(4, 4) == [(1, 1, 1, 1)]
    assert positive_compositions(3, 4) == []


@given(st.integers(min_value=1, max_value=9), st.integers(min_value=1, max_value=9))
def test_positive_composition_counts(total, parts):
    comps = positive_compositions(total, parts)
    expected = math.comb(total - 1, parts - 1) if total >= parts else 0
    assert len(comps) == expected
    assert len(set(comps)) == len(comps)
    for c in comps:
        assert sum(c) == total and min(c) >= 1


def test_empirical_consistency_on_normal_sample():
    x = np.random.default_rng(7).standard_normal(10**6)
    c = empirical_cumulants(x, 4)
    assert abs(c.g(3)) < 0.02
    assert abs(c.g(4)) < 0.05


def test_empirical_constant_sample_raises():
    with pytest.raises(DegenerateDistributionError):
        empirical_cumulants([1.0] * 100, 4)


def test_empirical_symmetric_two_point():
    sample = [-1.0, 1.0] * 500
    c = empirical_cumulants(sample, 4)
    assert c.g(3) == 0.0
    assert c.g(4) == -2.0


def test_analytic_families():
    assert analytic_cumulants("gaussian", 6).gamma == (0, 1, 0, 0, 0, 0)
    e = analytic_cumulants("standardized_exponential", 4)
    assert e.gamma[2:] == (2, 6)
    u = analytic_cumulants("standardized_uniform", 4)
    assert u.gamma[2:] == (0, Fraction(-6, 5))
    b = analytic_cumulants("bernoulli", 4)
    assert b.g(3) == 0 and b.g(4) == -2
    with pytest.raises(KeyError):
        analytic_cumulants("no_such_family", 4)


def test_beta33_cumulants_are_exact_and_symmetric():
    c = analytic_cumulants("beta33", 6)
    assert c.exact
    assert c.g(3) == 0 and c.g(5) == 0
    # excess of beta(3,3): m4_central/var^2 - 3 with var = 1/28
    assert c.g(4) == Fraction(-2, 3)


def test_gaussian_mixture_cumulants_match_empirical_moments():
    c = analytic_cumulants("gaussian_mixture", 6)
    rng = np.random.default_rng(11)
    comp = rng.integers(0, 2, size=2 * 10**6)
    x = np.where(comp == 0, -1.0, 1.0) + 0.5 * rng.standard_normal(2 * 10**6)
    emp = empirical_cumulants((x - x.mean()) / x.std(), 6)
    assert abs(float(c.g(4)) - emp.g(4)) < 0.02
    assert abs(float(c.g(6)) - emp.g(6)) < 0.1
