"""Tests for the closed-form moment fields (wrapped-Gaussian convolution)."""

import math

import numpy as np
import pytest
from scipy import integrate

import mcfv
from mcfv import GaussianKernelParams, GridFunction, OUParams
from mcfv.profiles import get_profile

FIG_PARAMS = OUParams(mu=0.25, theta=4.0, sigma=1.0 / math.sqrt(10.0), a0=-0.25)


class TestGaussianPdf:
    def test_mode_value(self):
        k = GaussianKernelParams(mean=0.3, var=0.02)
        assert mcfv.gaussian_pdf(0.3, k) == pytest.approx(
            1.0 / math.sqrt(2 * math.pi * 0.02), rel=1e-14)

    def test_symmetry(self):
        k = GaussianKernelParams(mean=-0.1, var=0.005)
        for d in (0.01, 0.07, 0.3):
            assert mcfv.gaussian_pdf(-0.1 + d, k) == pytest.approx(
                mcfv.gaussian_pdf(-0.1 - d, k), rel=1e-14)

    def test_unit_mass_by_quadrature(self):
        k = GaussianKernelParams(mean=0.4, var=0.013)
        sd = math.sqrt(k.var)
        val, _ = integrate.quad(lambda y: mcfv.gaussian_pdf(y, k),
                                k.mean - 8 * sd, k.mean + 8 * sd,
                                epsabs=1e-13, limit=200)
        assert abs(val - 1.0) < 1e-10

    def test_zero_variance_rejected(self):
        with pytest.raises(ValueError):
            mcfv.gaussian_pdf(0.0, GaussianKernelParams(0.0, 0.0))


class TestExactExpectation:
    def test_constant_profile_unchanged(self):
        g = GridFunction(np.full(256, 3.7))
        out = mcfv.exact_expectation(g, FIG_PARAMS, 1.0)
        np.testing.assert_allclose(out.values, 3.7, rtol=1e-12)

    def test_deterministic_transport_is_exact_shift(self):
        # sigma = 0 and a0 = mu: pure shift by mu * t
        p = OUParams(0.25, 4.0, 0.0, 0.25)
        ncells = 128
        g = GridFunction(get_profile("sine-jump").cell_averages(ncells))
        out = mcfv.exact_expectation(g, p, 1.0)  # shift 0.25 = 32 cells
        np.testing.assert_allclose(out.values, np.roll(g.values, 32),
                                   rtol=0, atol=1e-14)

    def test_sine_damped_shift_identity(self):
        # convolving a pure mode damps it by exp(-2 pi^2 var) and shifts by
        # the mean displacement
        ncells = 1024
        x = (np.arange(ncells) + 0.5) / ncells
        g = GridFunction(np.sin(2 * np.pi * x), kind="point")
        out = mcfv.exact_expectation(g, FIG_PARAMS, 1.0)
        m = mcfv.integrated_mean(FIG_PARAMS, 1.0)
        v = mcfv.integrated_variance(FIG_PARAMS, 1.0)
        target = math.exp(-2 * math.pi**2 * v) * np.sin(2 * np.pi * (x - m))
        assert np.max(np.abs(out.values - target)) < 1e-8

    def test_sine_identity_against_direct_quadrature(self):
        # the identity itself, checked by quadrature at a few points
        m = mcfv.integrated_mean(FIG_PARAMS, 1.0)
        v = mcfv.integrated_variance(FIG_PARAMS, 1.0)
        k = GaussianKernelParams(m, v)
        sd = math.sqrt(v)
        for x in (0.0, 0.31, 0.77):
            val, _ = integrate.quad(
                lambda y: math.sin(2 * np.pi * (x - y)) * mcfv.gaussian_pdf(y, k),
                m - 10 * sd, m + 10 * sd, epsabs=1e-13, limit=200)
            target = math.exp(-2 * math.pi**2 * v) * math.sin(2 * math.pi * (x - m))
            assert val == pytest.approx(target, abs=1e-11)

    def test_mean_preservation_and_max_principle(self):
        g = GridFunction(get_profile("sine-jump").cell_averages(512))
        out = mcfv.exact_expectation(g, FIG_PARAMS, 1.0)
        assert out.mean() == pytest.approx(g.mean(), abs=1e-10)
        assert out.values.min() >= g.values.min() - 1e-10
        assert out.values.max() <= g.values.max() + 1e-10

    def test_gaussian_semigroup_commutation(self):
        g = GridFunction(get_profile("sine-jump").cell_averages(512))
        m, v = 0.2, 0.004
        whole = mcfv.convolve_gaussian(g, GaussianKernelParams(m, v))
        half1 = mcfv.convolve_gaussian(g, GaussianKernelParams(m, v / 2))
        half2 = mcfv.convolve_gaussian(half1, GaussianKernelParams(0.0, v / 2))
        assert np.max(np.abs(whole.values - half2.values)) < 1e-8

    def test_large_mean_wraps(self):
        # displacement beyond one period lands on the same circle point
        g = GridFunction(get_profile("sine-jump").cell_averages(256))
        a = mcfv.convolve_gaussian(g, GaussianKernelParams(0.3, 0.002))
        b = mcfv.convolve_gaussian(g, GaussianKernelParams(3.3, 0.002))
        np.testing.assert_allclose(a.values, b.values, atol=1e-12)


class TestExactVarianceField:
    def test_constant_profile_zero(self):
        g = GridFunction(np.full(128, 2.0))
        out = mcfv.exact_variance_field(g, FIG_PARAMS, 1.0)
        np.testing.assert_allclose(out.values, 0.0, atol=1e-10)

    def test_deterministic_zero(self):
        p = OUParams(0.25, 4.0, 0.0, -0.25)
        g = GridFunction(get_profile("sine-jump").cell_averages(128))
        out = mcfv.exact_variance_field(g, p, 1.0)
        assert np.all(out.values == 0.0)

    def test_nonnegative_and_bounded(self):
        g = GridFunction(get_profile("sine-jump").cell_averages(512))
        out = mcfv.exact_variance_field(g, FIG_PARAMS, 1.0)
        spread = g.values.max() - g.values.min()
        assert np.all(out.values >= 0.0)
        assert np.all(out.values <= spread**2 / 4 + 1e-10)

    def test_against_exact_sampling_monte_carlo(self):
        # exact per-realisation solutions g(x - A) with A drawn from the
        # closed-form displacement law; convolution and sampling estimate
        # the same functionals of point-sampled data
        ncells, m = 1024, 100_000
        profile = get_profile("sine-jump")
        kern = mcfv.kernel_for(FIG_PARAMS, 1.0)
        g = GridFunction(profile.point_samples(ncells), kind="point")
        conv_mean = mcfv.exact_expectation(g, FIG_PARAMS, 1.0).values
        conv_var = mcfv.exact_variance_field(g, FIG_PARAMS, 1.0).values

        rng = np.random.default_rng(314159)
        shifts = kern.mean + math.sqrt(kern.var) * rng.standard_normal(m)
        s1 = np.zeros(ncells)
        s2 = np.zeros(ncells)
        centers = (np.arange(ncells) + 0.5) / ncells
        for lo in range(0, m, 2000):
            batch = shifts[lo:lo + 2000]
            vals = profile.point_periodic(centers[None, :] - batch[:, None])
            s1 += vals.sum(axis=0)
            s2 += (vals**2).sum(axis=0)
        mc_mean = s1 / m
        mc_var = s2 / m - mc_mean**2

        se_mean = np.sqrt(np.maximum(mc_var, 0.0) / m)
        dm = np.abs(mc_mean - conv_mean)
        tol_m = 3 * se_mean + 1e-5
        assert np.mean(dm <= tol_m) > 0.995
        assert np.all(dm <= 5 * se_mean + 1e-5)

        # standard error of the variance estimator from the fourth moment
        s4 = np.zeros(ncells)
        for lo in range(0, m, 2000):
            batch = shifts[lo:lo + 2000]
            vals = profile.point_periodic(centers[None, :] - batch[:, None])
            s4 += ((vals - mc_mean[None, :]) ** 4).sum(axis=0)
        se_var = np.sqrt(np.maximum(s4 / m - mc_var**2, 0.0) / m)
        dv = np.abs(mc_var - conv_var)
        tol_v = 3 * se_var + 1e-5
        assert np.mean(dv <= tol_v) > 0.995
        assert np.all(dv <= 5 * se_var + 1e-4)

    def test_variance_peaks_near_transported_jump(self):
        ncells = 1024
        g = GridFunction(get_profile("sine-jump").cell_averages(ncells))
        out = mcfv.exact_variance_field(g, FIG_PARAMS, 1.0)
        kern = mcfv.kernel_for(FIG_PARAMS, 1.0)
        # the unit jump sits at x = 0.75 initially
        peak_x = (np.argmax(out.values) + 0.5) / ncells
        target = (0.75 + kern.mean) % 1.0
        dist = min(abs(peak_x - target), 1 - abs(peak_x - target))
        assert dist < 3 * math.sqrt(kern.var)


class TestKernelPlumbing:
    def test_kernel_for_matches_integrated_moments(self):
        k = mcfv.kernel_for(FIG_PARAMS, 0.7)
        assert k.mean == mcfv.integrated_mean(FIG_PARAMS, 0.7)
        assert k.var == mcfv.integrated_variance(FIG_PARAMS, 0.7)

    def test_negative_variance_rejected(self):
        with pytest.raises(ValueError):
            GaussianKernelParams(0.0, -1e-3)

    def test_shift_path_interpolates(self):
        # narrow kernel: fractional-cell shift is linear interpolation
        vals = np.array([0.0, 1.0, 0.0, 0.0])
        g = GridFunction(vals)
        out = mcfv.convolve_gaussian(g, GaussianKernelParams(0.125, 0.0))
        np.testing.assert_allclose(out.values, [0.0, 0.5, 0.5, 0.0], atol=1e-14)
