"""PDF algebra and per-edge jitter sampling.

Expected moments come from closed forms verified against numeric
quadrature oracles computed here on the PDFs' own grids.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gocdr import (EdgeJitterSampler, JitterSpec, ParameterError, Pdf,
                   SupportExceededError, convolve, delta_pdf, dj_pdf, rj_pdf,
                   sample_edge_jitter, sj_differential_amplitude,
                   sj_differential_pdf, tail_prob)


def quad_moments(p):
    """Independent trapezoid-quadrature oracle for mean and variance."""
    trapezoid = getattr(np, "trapezoid", np.trapz)
    xs = p.grid
    m0 = trapezoid(p.density, xs)
    m1 = trapezoid(xs * p.density, xs) / m0
    m2 = trapezoid((xs - m1) ** 2 * p.density, xs) / m0
    return m1, m2


class TestDjPdf:
    def test_zero_is_delta(self):
        p = dj_pdf(0.0)
        assert p.is_point_mass
        assert p.loc == 0.0
        assert p.integral() == 1.0

    def test_uniform_support_and_variance(self):
        # reference deterministic budget: 0.4 UI peak-peak
        p = dj_pdf(0.4)
        lo, hi = p.support
        assert lo == pytest.approx(-0.2, abs=2e-4)
        assert hi == pytest.approx(0.2, abs=2e-4)
        mean, var = quad_moments(p)
        assert mean == pytest.approx(0.0, abs=1e-12)
        assert var == pytest.approx(0.4 ** 2 / 12, abs=1e-6)

    def test_self_convolution_is_triangle(self):
        p = dj_pdf(0.4)
        t = convolve(p, p)
        # symmetric triangle on [-0.4, 0.4]: peak at center, zero-ish ends
        mid = t.density[t.density.size // 2]
        assert t.density[0] < 0.02 * mid
        assert np.argmax(t.density) == pytest.approx(t.density.size / 2, abs=2)
        _, var = quad_moments(t)
        assert var == pytest.approx(2 * 0.4 ** 2 / 12, abs=1e-6)

    def test_rejects_bad_input(self):
        with pytest.raises(ParameterError):
            dj_pdf(-0.1)
        with pytest.raises(ParameterError):
            dj_pdf(float("nan"))
        with pytest.raises(ParameterError):
            dj_pdf(0.4, step=0.0)


class TestRjPdf:
    def test_zero_sigma_is_delta(self):
        assert rj_pdf(0.0).is_point_mass

    def test_variance(self):
        # reference random budget: 0.021 UI RMS
        p = rj_pdf(0.021)
        _, var = quad_moments(p)
        assert var == pytest.approx(0.021 ** 2, abs=1e-6)

    def test_gaussian_convolution_adds_variance(self):
        a, b = rj_pdf(0.021), rj_pdf(0.01)
        c = convolve(a, b)
        _, var = quad_moments(c)
        assert var == pytest.approx(0.021 ** 2 + 0.01 ** 2, abs=1e-6)
        # analytic tag survives gaussian*gaussian
        assert c.gauss_sigma == pytest.approx(math.hypot(0.021, 0.01), rel=1e-12)

    def test_truncation_width_floor(self):
        with pytest.raises(ParameterError):
            rj_pdf(0.02, support_sigmas=4.0)


class TestSjDifferentialPdf:
    def test_integer_cycle_collapses_to_delta(self):
        # f*n integer: the sinusoid repeats, differential is exactly zero
        assert sj_differential_amplitude(0.5, 0.25, 8) == 0.0
        assert sj_differential_pdf(0.5, 0.25, 8).is_point_mass
        assert sj_differential_pdf(0.5, 1.0, 3).is_point_mass

    def test_quarter_rate_amplitude(self):
        # a = amp * |sin(pi f n)|; f=0.1, n=5 puts the sine at its peak
        assert sj_differential_amplitude(0.1, 0.1, 5) == pytest.approx(0.1, rel=1e-12)
        assert sj_differential_amplitude(0.3, 0.5, 1) == pytest.approx(0.3, rel=1e-12)

    def test_arcsine_variance_half_a_squared(self):
        p = sj_differential_pdf(0.1, 0.1, 5)
        _, var = quad_moments(p)
        assert var == pytest.approx(0.1 ** 2 / 2, abs=1e-5)

    def test_n_bits_validation(self):
        with pytest.raises(ParameterError):
            sj_differential_pdf(0.1, 0.1, 0)


class TestConvolve:
    def test_delta_identity(self):
        p = dj_pdf(0.4)
        q = convolve(p, delta_pdf(0.0))
        assert np.array_equal(q.density, p.density)
        assert q.origin == p.origin

    def test_delta_shift(self):
        p = dj_pdf(0.4)
        q = convolve(delta_pdf(0.25), p)
        assert q.origin == pytest.approx(p.origin + 0.25)

    def test_mean_and_variance_additivity(self):
        a = rj_pdf(0.021)
        b = sj_differential_pdf(0.1, 0.1, 5)
        c = convolve(a, b)
        ma, va = quad_moments(a)
        mb, vb = quad_moments(b)
        mc, vc = quad_moments(c)
        assert mc == pytest.approx(ma + mb, abs=1e-6)
        assert vc == pytest.approx(va + vb, abs=1e-5)
        assert vc == pytest.approx(0.021 ** 2 + 0.1 ** 2 / 2, abs=1e-5)

    def test_support_guard(self):
        wide = dj_pdf(10.0, step=1e-3)
        with pytest.raises(SupportExceededError):
            convolve(wide, wide, max_support_ui=8.0)

    def test_mixed_steps_resampled(self):
        a = dj_pdf(0.4, step=2e-4)
        b = dj_pdf(0.4, step=1e-4)
        c = convolve(a, b)
        assert c.step == pytest.approx(1e-4)
        assert c.integral() == pytest.approx(1.0, abs=1e-9)


class TestTailProb:
    def test_half_mass_at_center(self):
        assert tail_prob(rj_pdf(1.0), 0.0, "above") == pytest.approx(0.5, rel=1e-9)

    def test_beyond_uniform_support(self):
        assert tail_prob(dj_pdf(0.4), 0.3, "above") == 0.0
        assert tail_prob(dj_pdf(0.4), -0.3, "below") == 0.0

    def test_uniform_interior(self):
        assert tail_prob(dj_pdf(0.4), 0.1, "above") == pytest.approx(0.25, abs=1e-3)

    def test_deep_gaussian_tail(self):
        # oracle: 0.5*erfc(7/sqrt(2)) = 1.2798651e-12
        p = rj_pdf(1.0, step=1e-3)
        assert tail_prob(p, 7.0, "above") == pytest.approx(1.2798651e-12, rel=0.02)

    def test_infinite_thresholds(self):
        p = dj_pdf(0.4)
        assert tail_prob(p, -math.inf, "above") == 1.0
        assert tail_prob(p, math.inf, "above") == 0.0

    def test_monotone_in_threshold(self):
        p = convolve(dj_pdf(0.4), rj_pdf(0.05))
        ts = np.linspace(-1.0, 1.0, 41)
        vals = [tail_prob(p, t, "above") for t in ts]
        assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))


@settings(max_examples=40, deadline=None)
@given(dj=st.floats(0.0, 1.0), sigma=st.floats(0.0, 0.2))
def test_constructed_pdfs_integrate_to_one(dj, sigma):
    for p in (dj_pdf(dj), rj_pdf(sigma)):
        assert p.integral() == pytest.approx(1.0, abs=1e-9)


@settings(max_examples=25, deadline=None)
@given(amp=st.floats(0.01, 1.0), f=st.floats(0.001, 0.999), n=st.integers(1, 7))
def test_sj_differential_normalized_and_bounded(amp, f, n):
    p = sj_differential_pdf(amp, f, n)
    assert p.integral() == pytest.approx(1.0, abs=1e-9)
    lo, hi = p.support
    a = sj_differential_amplitude(amp, f, n)
    assert lo >= -a - 2 * p.step and hi <= a + 2 * p.step


class TestEdgeSampling:
    def test_all_zero_spec(self):
        rng = np.random.default_rng(0)
        spec = JitterSpec()
        assert sample_edge_jitter(spec, 1e-9, rng, data_rate_hz=2.5e9) == 0.0

    def test_dj_only_bounds_and_mean(self):
        spec = JitterSpec(dj_pp=0.4)
        s = EdgeJitterSampler(spec, 2.5e9, np.random.default_rng(1))
        draws = s.draw_many(np.arange(1_000_000) * 4e-10)
        assert draws.min() >= -0.2 and draws.max() <= 0.2
        sigma = 0.4 / math.sqrt(12)
        assert abs(draws.mean()) < 3 * sigma / math.sqrt(draws.size)

    def test_sj_zero_crossings(self):
        # edges where f_sj * t is integer and theta0 = 0 sit at sine zeros
        spec = JitterSpec(sj_amp_pp=0.5, sj_freq_norm=0.1)
        rng = np.random.default_rng(2)
        f_sj = 0.1 * 2.5e9
        for k in range(5):
            t = k / f_sj
            assert sample_edge_jitter(spec, t, rng, data_rate_hz=2.5e9,
                                      theta0=0.0) == pytest.approx(0.0, abs=1e-9)

    def test_seed_reproducibility(self):
        spec = JitterSpec(dj_pp=0.3, rj_rms=0.02, sj_amp_pp=0.1, sj_freq_norm=0.05)
        a = EdgeJitterSampler(spec, 2.5e9, np.random.default_rng(7))
        b = EdgeJitterSampler(spec, 2.5e9, np.random.default_rng(7))
        ts = np.linspace(0, 1e-6, 1000)
        assert np.array_equal(a.draw_many(ts), b.draw_many(ts))

    def test_negative_amplitude_rejected(self):
        with pytest.raises(ParameterError):
            JitterSpec(dj_pp=-0.1)
