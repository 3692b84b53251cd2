import math

import numpy as np
import pytest

from fisherclt.density import (CfTailError, CharFunctionGrid, GridDensity, cf_diagnostic_grid,
                               cf_derivative_at, cf_for_grid, cf_from_density, convolve,
                               decay_exponent, density_of_normalized_sum, family_cf,
                               from_function, invert_cf, normalized_sum_cf, standardize,
                               uniform_density, weighted_cf_integral)
from fisherclt.families import (GAUSSIAN, STANDARDIZED_EXPONENTIAL, STANDARDIZED_UNIFORM,
                                two_point_mixture)

SQRT3 = math.sqrt(3.0)


def _phi(x):
    return np.exp(-0.5 * x * x) / math.sqrt(2 * math.pi)


class TestInversion:
    def test_gaussian_density(self):
        p = invert_cf(family_cf(GAUSSIAN), 0)
        assert np.max(np.abs(p.values - _phi(p.x))) < 1e-10
        assert p.mass() == pytest.approx(1.0, abs=1e-12)
        assert p.clipped_mass < 1e-8

    def test_gaussian_second_derivative(self):
        d2 = invert_cf(family_cf(GAUSSIAN), 2)
        expected = (d2.x**2 - 1.0) * _phi(d2.x)
        assert np.max(np.abs(d2.values - expected)) < 1e-8

    def test_round_trip_three_uniform(self):
        u = uniform_density(0, 1, cells=2048)
        p3 = convolve(convolve(u, u), u)
        back = invert_cf(cf_from_density(p3), 0, tail_tol=math.inf)
        assert back.n == p3.n
        assert back.x0 == pytest.approx(p3.x0, abs=1e-12)
        assert np.max(np.abs(back.values - p3.values)) < 1e-9

    def test_heavy_tail_is_refused(self):
        f = cf_for_grid(two_point_mixture(0.5).cf)
        with pytest.raises(CfTailError, match="cf tail too heavy"):
            invert_cf(f, 0)

    def test_uniform_pair_derivative_refused(self):
        # two uniform summands have a first derivative whose transform decays
        # like 1/t; the edge check must reject it
        f2 = normalized_sum_cf(family_cf(STANDARDIZED_UNIFORM), 2)
        with pytest.raises(CfTailError):
            invert_cf(f2, 1)


class TestNormalizedSumCf:
    def test_gaussian_stability(self):
        f = family_cf(GAUSSIAN)
        for n in (1, 4, 100):
            fn = normalized_sum_cf(f, n)
            assert np.max(np.abs(fn.values - f.values)) < 1e-12

    def test_n1_identity(self):
        f = family_cf(STANDARDIZED_EXPONENTIAL)
        fn = normalized_sum_cf(f, 1)
        assert np.max(np.abs(fn.values - f.values)) == 0.0

    def test_value_at_zero_and_hermitian_symmetry(self):
        f = family_cf(STANDARDIZED_UNIFORM)
        for n in (1, 3, 17):
            fn = normalized_sum_cf(f, n)
            mid = fn.n // 2
            assert fn.values[mid] == pytest.approx(1.0, abs=1e-14)
            flipped = np.conj(fn.values[mid + 1:][::-1])
            assert np.max(np.abs(fn.values[mid - len(flipped):mid][::-1] - np.conj(fn.values[mid + 1:]))) < 1e-13

    def test_interpolated_powering_guard(self):
        f = cf_from_density(invert_cf(family_cf(GAUSSIAN), 0))
        assert f.analytic is None
        with pytest.raises(ValueError, match="refused"):
            normalized_sum_cf(f, 64)
        fn = normalized_sum_cf(f, 64, allow_interpolated=True)
        assert abs(fn.values[fn.n // 2] - 1.0) < 1e-9  # interpolation noise only


class TestConvolve:
    def test_triangle_apex(self):
        u = uniform_density(0, 1, cells=1024)
        tri = convolve(u, u)
        apex = tri.values[np.argmin(np.abs(tri.x - 1.0))]
        assert abs(apex - 1.0) <= 2 * tri.dx

    def test_approximate_identity(self):
        p = from_function(GAUSSIAN.density, -12, 12, n=1 << 14)
        sd = p.dx
        narrow = from_function(lambda x: np.exp(-0.5 * (x / sd) ** 2) / (sd * math.sqrt(2 * math.pi)),
                               -12 * sd, 12 * sd, n=512)
        smoothed = convolve(p, narrow)
        vals = np.interp(p.x, smoothed.x, smoothed.values)
        # modulus-of-continuity bound: |p * k - p| <= sup |p'| * width
        assert np.max(np.abs(vals - p.values)) <= 0.25 * 12 * sd

    def test_moments_add(self):
        a = from_function(GAUSSIAN.density, -12, 12, n=1 << 14)
        b = from_function(STANDARDIZED_EXPONENTIAL.density, -9, 27, n=3 << 13)  # same dx
        assert b.dx == pytest.approx(a.dx, rel=1e-12)
        conv = convolve(a, b)
        assert conv.mean() == pytest.approx(a.mean() + b.mean(), abs=1e-8)
        assert conv.var() == pytest.approx(a.var() + b.var(), abs=1e-8)

    def test_moments_add_through_resampling(self):
        a = from_function(GAUSSIAN.density, -12, 12, n=1 << 14)
        b = from_function(lambda x: np.exp(-0.5 * (x - 0.5) ** 2 / 4.0) / math.sqrt(8 * math.pi),
                          -18, 19, n=1 << 15)
        conv = convolve(a, b)  # different dx exercises the resampling path
        assert conv.mean() == pytest.approx(a.mean() + b.mean(), abs=1e-8)
        assert conv.var() == pytest.approx(a.var() + b.var(), abs=1e-8)

    def test_mass_preserved(self):
        u = uniform_density(0, 1, cells=512)
        conv = convolve(u, u)
        assert conv.mass() == pytest.approx(1.0, abs=1e-9)


class TestStandardize:
    def test_already_standard_unchanged(self):
        p = from_function(GAUSSIAN.density, -14, 14, n=1 << 15)
        q = standardize(p)
        assert q.mean() == pytest.approx(0.0, abs=1e-12)
        assert q.var() == pytest.approx(1.0, abs=1e-12)
        assert np.max(np.abs(q.values - p.values)) < 1e-10

    def test_uniform_becomes_symmetric(self):
        q = standardize(uniform_density(0, 1, cells=8192))
        inside = np.abs(q.x) < SQRT3 - 0.01
        assert np.allclose(q.values[inside], 1.0 / (2 * SQRT3), rtol=1e-9)
        assert q.mean() == pytest.approx(0.0, abs=1e-12)

    def test_gaussian_affine(self):
        p = from_function(lambda x: np.exp(-0.5 * (x - 3.0) ** 2 / 4.0) / math.sqrt(8 * math.pi),
                          -15, 21, n=1 << 15)
        q = standardize(p)
        assert np.max(np.abs(q.values - _phi(q.x))) < 1e-8


class TestDiagnostics:
    def test_uniform_decay_exponent(self):
        f = cf_diagnostic_grid(STANDARDIZED_UNIFORM.cf, tmax=1200, dt=0.02)
        eps = decay_exponent(f, (10, 1000))
        assert 0.9 <= eps <= 1.1

    def test_bernoulli_no_decay(self):
        f = cf_diagnostic_grid(two_point_mixture(0.5).cf, tmax=1200, dt=0.02)
        assert abs(decay_exponent(f, (10, 1000))) <= 0.05

    def test_gaussian_fast_decay(self):
        f = cf_diagnostic_grid(GAUSSIAN.cf, tmax=20, dt=0.001)
        assert decay_exponent(f, (1, 10)) > 5

    def test_window_validation(self):
        f = cf_diagnostic_grid(STANDARDIZED_UNIFORM.cf, tmax=100, dt=0.02)
        with pytest.raises(ValueError):
            decay_exponent(f, (10, 1000))

    def test_weighted_integral_verdicts(self):
        f = cf_diagnostic_grid(STANDARDIZED_UNIFORM.cf, tmax=1200, dt=0.02)
        assert weighted_cf_integral(f, 3).verdict == "finite"
        assert weighted_cf_integral(f, 1).verdict == "divergent"
        fb = cf_diagnostic_grid(two_point_mixture(0.5).cf, tmax=1200, dt=0.02)
        for nu in (0.5, 2.0, 5.0):
            assert weighted_cf_integral(fb, nu).verdict == "divergent"


class TestGridInvariants:
    def test_constructed_density_mass(self):
        p = from_function(STANDARDIZED_EXPONENTIAL.density, -6, 34, n=1 << 15)
        assert abs(p.mass() - 1.0) < 1e-8

    def test_tail_rule_forces_widening(self):
        # a range that clips the support must be widened automatically
        p = from_function(GAUSSIAN.density, -1.0, 1.0, n=1 << 12)
        assert p.x0 < -4.0 and p.xmax > 4.0

    def test_normalized_sum_density_is_standard(self):
        p = density_of_normalized_sum(STANDARDIZED_EXPONENTIAL, 32)
        assert p.mean() == pytest.approx(0.0, abs=1e-9)
        assert p.var() == pytest.approx(1.0, abs=1e-7)
        assert p.clipped_mass < 1e-8

    def test_csv_round_trip(self):
        p = density_of_normalized_sum(STANDARDIZED_EXPONENTIAL, 16, grid_n=1 << 12, xmax=20.0)
        q = GridDensity.from_csv(p.to_csv())
        assert np.max(np.abs(q.values - p.values)) == 0.0
        assert q.x0 == p.x0 and q.dx == pytest.approx(p.dx, rel=1e-15)

    def test_cf_csv_round_trip(self):
        f = family_cf(STANDARDIZED_UNIFORM, xmax=20.0, n=1 << 12)
        g = CharFunctionGrid.from_csv(f.to_csv())
        assert np.max(np.abs(g.values - f.values)) == 0.0


class TestSpectralCfValues:
    def test_cf_decay_bound_from_fisher_information(self):
        from fisherclt.functionals import fisher_information

        p = density_of_normalized_sum(STANDARDIZED_EXPONENTIAL, 16)
        I = fisher_information(p).value
        t = np.linspace(0.5, 25.0, 20)
        fvals = np.abs(cf_derivative_at(p, 0, t))
        assert np.all(fvals <= np.sqrt(I) / t + 1e-6)

    def test_cf_derivative_bound(self):
        from fisherclt.functionals import fisher_information

        p = density_of_normalized_sum(STANDARDIZED_EXPONENTIAL, 16)
        I = fisher_information(p).value
        c = 1.0 + math.sqrt(p.abs_moment(2) * I)
        t = np.linspace(0.5, 25.0, 20)
        d1 = np.abs(cf_derivative_at(p, 1, t))
        assert np.all(d1 <= c / t + 1e-6)

    def test_envelope_bound_second_order(self):
        from fisherclt.functionals import fisher_information

        p = density_of_normalized_sum(STANDARDIZED_EXPONENTIAL, 16)
        I = fisher_information(p).value
        C = 2.0 * p.abs_moment(1) + math.sqrt((1.0 + p.abs_moment(4)) * I)
        assert np.max((1.0 + p.x**2) * p.values) <= C + 1e-6
