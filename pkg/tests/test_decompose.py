import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fisherclt.decompose import (StepDensity, UniformMixture, cf_tv_bound_first,
                                 cf_tv_bound_second, decompose_step_density,
                                 fisher_bound_three_iid, three_uniform_fisher_bound,
                                 tv_product_fisher_bound)
from fisherclt.density import cf_diagnostic_grid, convolve, from_function, invert_cf, \
    normalized_sum_cf, family_cf, uniform_density
from fisherclt.families import GAUSSIAN, STANDARDIZED_UNIFORM, standardized_gamma, gaussian_mixture
from fisherclt.functionals import fisher_information, total_variation_norm


def _random_step(rng: random.Random, max_cells: int = 12) -> StepDensity:
    n = rng.randint(1, max_cells)
    points = sorted(rng.sample(range(-60, 61), n + 1))
    bp = tuple(Fraction(v, rng.randint(1, 4)) for v in points)
    bp = tuple(sorted(set(bp)))
    while len(bp) < n + 1:
        n = len(bp) - 1
    heights = []
    for _ in range(n):
        heights.append(Fraction(0) if rng.random() < 0.2 else
                       Fraction(rng.randint(1, 40), rng.randint(1, 12)))
    if all(h == 0 for h in heights):
        heights[0] = Fraction(1)
    mass = sum(h * (b1 - b0) for h, b0, b1 in zip(heights, bp, bp[1:]))
    heights = tuple(h / mass for h in heights)
    return StepDensity(bp[: n + 1], heights)


class TestStepDensity:
    def test_validation(self):
        with pytest.raises(ValueError):
            StepDensity((0, 1), (Fraction(1, 2),))  # mass 1/2
        with pytest.raises(ValueError):
            StepDensity((1, 0), (Fraction(1),))
        with pytest.raises(ValueError):
            StepDensity((0, 1), (Fraction(-1), Fraction(2)))

    def test_tv_formula(self):
        p = StepDensity((0, 1, Fraction(3, 2)), (Fraction(2, 5), Fraction(6, 5)))
        assert p.tv() == Fraction(12, 5)

    def test_json_round_trip(self):
        p = StepDensity((Fraction(-1, 3), 0, 2), (Fraction(3, 7), Fraction(3, 7)))
        q = StepDensity.from_json(p.to_json())
        assert q == p


class TestDecomposition:
    def test_single_uniform_is_itself(self):
        p = StepDensity((0, 2), (Fraction(1, 2),))
        mix = decompose_step_density(p)
        assert mix.components == ((Fraction(0), Fraction(2), Fraction(1)),)

    def test_worked_two_cell_example(self):
        p = StepDensity((0, 1, Fraction(3, 2)), (Fraction(2, 5), Fraction(6, 5)))
        mix = decompose_step_density(p)
        assert mix.components == (
            (Fraction(0), Fraction(3, 2), Fraction(3, 5)),
            (Fraction(1), Fraction(3, 2), Fraction(2, 5)),
        )
        assert mix.tv_integral() == p.tv() == Fraction(12, 5)
        # 0.6 * (2/1.5) + 0.4 * (2/0.5) = 0.8 + 1.6 = 2.4
        assert float(mix.tv_integral()) == pytest.approx(2.4)

    def test_monotone_staircase_layers(self):
        p = StepDensity((0, 1, 2, 3), (Fraction(1, 2), Fraction(1, 3), Fraction(1, 6)))
        mix = decompose_step_density(p)
        assert len(mix.components) == 3
        assert mix.tv_integral() == p.tv() == 1
        assert mix.components[0] == (Fraction(0), Fraction(3), Fraction(1, 2))

    def test_interior_zero_splits(self):
        p = StepDensity((0, 1, 2, 3), (Fraction(1, 2), Fraction(0), Fraction(1, 2)))
        mix = decompose_step_density(p)
        assert set(mix.components) == {
            (Fraction(0), Fraction(1), Fraction(1, 2)),
            (Fraction(2), Fraction(3), Fraction(1, 2)),
        }

    def test_exactness_on_random_step_densities(self, rng):
        for _ in range(200):
            p = _random_step(rng)
            mix = decompose_step_density(p)
            assert mix.total_weight() == 1
            assert mix.tv_integral() == p.tv()
            assert len(mix.components) <= len(p.heights)
            for b0, b1, h in zip(p.breakpoints, p.breakpoints[1:], p.heights):
                mid = (b0 + b1) / 2
                assert mix.value_at(mid) == h
                assert mix.value_at(b0) == h  # right-continuity at cell edges

    def test_mixture_json_round_trip(self):
        p = StepDensity((0, 1, Fraction(3, 2)), (Fraction(2, 5), Fraction(6, 5)))
        mix = decompose_step_density(p)
        again = UniformMixture.from_json(mix.to_json())
        assert again == mix


class TestThreeUniformBound:
    def test_unit_lengths(self):
        assert three_uniform_fisher_bound(1, 1, 1) == 6.0

    def test_scaling_homogeneity(self):
        base = three_uniform_fisher_bound(1.0, 2.0, 3.0)
        for c in (0.5, 2.0, 7.0):
            scaled = three_uniform_fisher_bound(c * 1.0, c * 2.0, c * 3.0)
            assert scaled == pytest.approx(base / c**2, rel=1e-12)

    def test_bound_holds_on_grid(self):
        u = uniform_density(0, 1, cells=2048)
        p3 = convolve(convolve(u, u), u)
        assert fisher_information(p3).value <= 6.0 + 1e-3

    def test_positive_lengths_required(self):
        with pytest.raises(ValueError):
            three_uniform_fisher_bound(1, 0, 1)


class TestTvProductBound:
    def test_matches_three_uniform_at_unit(self):
        u = StepDensity((0, 1), (Fraction(1),))
        assert tv_product_fisher_bound(u, u, u) == 6.0

    def test_symmetry_formula(self):
        p = StepDensity((0, 1, 2), (Fraction(3, 4), Fraction(1, 4)))
        t = float(p.tv())
        assert tv_product_fisher_bound(p, p, p) == pytest.approx(1.5 * t * t)

    def test_mixed_step_densities_bound_grid_value(self, rng):
        for _ in range(3):
            ps = [_random_step(rng, max_cells=5) for _ in range(3)]
            grids = [p.to_grid(cells_per_unit=512) for p in ps]
            conv = convolve(convolve(grids[0], grids[1]), grids[2])
            bound = tv_product_fisher_bound(*ps)
            assert fisher_information(conv).value <= bound + 1e-3 + 0.01 * bound

    def test_accepts_grid_densities(self):
        u = uniform_density(0, 1, cells=512)
        assert tv_product_fisher_bound(u, u, u) == pytest.approx(6.0)


class TestCfBounds:
    def test_gaussian_second_bound_dominates_tv(self):
        f = cf_diagnostic_grid(GAUSSIAN.cf, tmax=60, dt=0.005)
        bound = cf_tv_bound_second(f)
        assert bound.verdict == "ok"
        # closed forms: int t^2 e^{-t^2} = sqrt(pi)/2, int (1-t^2)^2 e^{-t^2} = 3 sqrt(pi)/4
        expected = (math.sqrt(math.pi) / 2 * 3 * math.sqrt(math.pi) / 4) ** 0.25
        assert bound.value == pytest.approx(expected, rel=1e-6)
        assert bound.value >= 2.0 / math.sqrt(2 * math.pi)

    def test_gaussian_first_bound(self):
        f = cf_diagnostic_grid(GAUSSIAN.cf, tmax=60, dt=0.005)
        bound = cf_tv_bound_first(f)
        assert bound.verdict == "ok"
        assert bound.value >= 2.0 / math.sqrt(2 * math.pi)

    def test_uniform_first_bound_inapplicable(self):
        # |t f''(t)| does not decay: the integral diverges and the verdict says so
        f = cf_diagnostic_grid(STANDARDIZED_UNIFORM.cf, tmax=800, dt=0.01)
        assert cf_tv_bound_first(f).verdict == "bound inapplicable"

    def test_three_iid_bound_dominates_grid_value(self):
        g4 = standardized_gamma(4)
        f = cf_diagnostic_grid(g4.cf, tmax=400, dt=0.005)
        bound = fisher_bound_three_iid(f)
        assert bound.verdict == "ok"
        f1 = family_cf(g4, xmax=30.0, n=1 << 16)
        f3 = normalized_sum_cf(f1, 3)
        # sum of three standardized summands = sqrt(3) * normalized sum
        p3 = invert_cf(f3, 0)
        I_sum = fisher_information(p3).value / 3.0
        assert I_sum <= bound.value


class TestMixtureJensen:
    def test_gaussian_mixture_fisher_bound(self):
        fam = gaussian_mixture((Fraction(1, 4), Fraction(3, 4)), (-1, 1), (Fraction(1, 2), Fraction(2, 3)))
        p = from_function(fam.density, -14, 14, n=1 << 16, deriv_fn=fam.density_d1)
        # component variances after standardization shrink by the mixture variance
        m1 = 0.25 * -1 + 0.75 * 1
        var = 0.25 * (1 + 0.25) + 0.75 * (1 + 4.0 / 9.0) - m1**2
        sigma2 = [0.25 / var, (4.0 / 9.0) / var]
        bound = 0.25 / sigma2[0] + 0.75 / sigma2[1]
        assert fisher_information(p).value <= bound + 1e-6
