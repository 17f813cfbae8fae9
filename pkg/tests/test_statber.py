"""Semi-analytic BER engine: sampling geometry, error terms, surfaces."""

import math
from dataclasses import replace

import numpy as np
import pytest

from gocdr import (CdrStatConfig, JitterSpec, ParameterError, RunDist,
                   ber_breakdown, ber_estimate, ber_surface, phase_error_pdf,
                   sampling_time, sigma_osc, with_sj)

RUN5 = RunDist.single(5)
REFERENCE_JITTER = JitterSpec(dj_pp=0.4, rj_rms=0.021, ckj_rms_cid5=0.01)


def cfg(**kw):
    base = dict(run_dist=RUN5)
    base.update(kw)
    return CdrStatConfig(**base)


class TestSamplingTime:
    def test_mid_bit(self):
        assert sampling_time(cfg(), 1) == pytest.approx(0.5)

    def test_offset_scaling(self):
        c = cfg(freq_offset_eps=0.01)
        assert sampling_time(c, 5) == pytest.approx(4.545, rel=1e-12)

    def test_late_phase(self):
        c = cfg(sampling_phase_phi=0.625)
        assert sampling_time(c, 5) == pytest.approx(4.625, rel=1e-12)

    def test_bad_index(self):
        with pytest.raises(ParameterError):
            sampling_time(cfg(), 0)


class TestPhaseErrorPdf:
    def test_no_jitter_delta(self):
        assert phase_error_pdf(cfg(), 5, 3).is_point_mass

    def test_cid5_anchor(self):
        c = cfg(jitter=JitterSpec(ckj_rms_cid5=0.01))
        assert sigma_osc(c, 5) == pytest.approx(0.01, rel=1e-12)

    def test_sqrt_time_scaling(self):
        c = cfg(jitter=JitterSpec(ckj_rms_cid5=0.01))
        assert sigma_osc(c, 1) == pytest.approx(0.01 * math.sqrt(0.5 / 4.5), rel=1e-12)
        p = phase_error_pdf(c, 5, 1)
        assert p.gauss_sigma == pytest.approx(0.00333, rel=1e-2)

    def test_index_bounds(self):
        with pytest.raises(ParameterError):
            phase_error_pdf(cfg(), 5, 6)


class TestBerEstimate:
    def test_zero_jitter_zero_offset(self):
        assert ber_estimate(cfg()) == 0.0

    def test_offset_margin_step(self):
        # jitter-free margin closes at eps = 0.5/4.5
        assert ber_estimate(cfg(freq_offset_eps=0.110)) == 0.0
        assert ber_estimate(cfg(freq_offset_eps=0.112)) > 0.0

    def test_step_height_is_one_error_per_run(self):
        assert ber_estimate(cfg(freq_offset_eps=0.2)) == pytest.approx(1 / 5)

    def test_clamped_to_half(self):
        c = cfg(freq_offset_eps=0.4, jitter=JitterSpec(ckj_rms_cid5=0.5))
        assert ber_estimate(c) <= 0.5

    def test_sj_null_identity(self):
        base = cfg(jitter=REFERENCE_JITTER, freq_offset_eps=0.01)
        b0 = ber_estimate(base)
        for amp in np.linspace(0.1, 2.0, 10):
            b = ber_estimate(with_sj(base, 1.0, float(amp)))
            assert abs(b - b0) <= 1e-15 * max(b0, 1e-300)

    @pytest.mark.parametrize("field", ["dj_pp", "rj_rms", "sj_amp_pp", "ckj_rms_cid5"])
    def test_monotone_in_each_jitter_amplitude(self, field):
        vals = []
        for x in (0.0, 0.1, 0.2, 0.4):
            spec = JitterSpec(dj_pp=0.1, rj_rms=0.02, sj_amp_pp=0.2,
                              sj_freq_norm=0.07, ckj_rms_cid5=0.03)
            spec = replace(spec, **{field: x})
            vals.append(ber_estimate(cfg(jitter=spec, freq_offset_eps=0.02,
                                         run_dist=RunDist.truncated_geometric(0.5, 5))))
        assert all(b >= a - 1e-15 for a, b in zip(vals, vals[1:]))

    def test_monotone_in_offset_magnitude(self):
        c0 = cfg(jitter=REFERENCE_JITTER, run_dist=RunDist.truncated_geometric(0.5, 5))
        vals = [ber_estimate(replace(c0, freq_offset_eps=e))
                for e in (0.0, 0.01, 0.02, 0.05)]
        assert all(b >= a - 1e-15 for a, b in zip(vals, vals[1:]))

    def test_breakdown_sums(self):
        c = cfg(jitter=REFERENCE_JITTER, freq_offset_eps=0.02,
                run_dist=RunDist.truncated_geometric(0.5, 5))
        parts = ber_breakdown(c)
        assert parts["total"] == pytest.approx(
            parts["late_last"] + parts["late_interior"] + parts["early"], rel=1e-12)


class TestSamplingPhaseTradeoff:
    """Shifting the sampling point an eighth of a period EARLIER (the
    improved structural tap; phi = 0.375) trades late-side margin for
    early-side margin.  The late-shifted reading (phi = 0.625) moves the
    sample toward the accumulating closing edge and makes the late term
    strictly worse; both directions are pinned here."""

    BASE = dict(jitter=REFERENCE_JITTER, freq_offset_eps=0.01,
                run_dist=RunDist.truncated_geometric(0.5, 5))

    def test_early_shift_reduces_last_bit_late_term(self):
        late_mid = ber_breakdown(cfg(sampling_phase_phi=0.5, **self.BASE))["late_last"]
        late_early = ber_breakdown(cfg(sampling_phase_phi=0.375, **self.BASE))["late_last"]
        assert late_early < late_mid

    def test_late_shift_increases_last_bit_late_term(self):
        late_mid = ber_breakdown(cfg(sampling_phase_phi=0.5, **self.BASE))["late_last"]
        late_late = ber_breakdown(cfg(sampling_phase_phi=0.625, **self.BASE))["late_last"]
        assert late_late > late_mid


class TestBerSurface:
    BASE = dict(jitter=JitterSpec(dj_pp=0.2, rj_rms=0.02, ckj_rms_cid5=0.02),
                freq_offset_eps=0.02,
                run_dist=RunDist.truncated_geometric(0.5, 5))

    def test_zero_amp_column_is_baseline(self):
        c = cfg(**self.BASE)
        surf = ber_surface(c, [0.05, 0.1, 1.0], [0.0, 0.2, 0.5])
        baseline = ber_estimate(c)
        assert np.allclose(surf.ber[:, 0], baseline, rtol=1e-12)

    def test_integer_frequency_row_is_baseline(self):
        c = cfg(**self.BASE)
        surf = ber_surface(c, [0.1, 1.0], [0.1, 0.3, 0.6])
        baseline = ber_estimate(c)
        assert np.allclose(surf.ber[1, :], baseline, rtol=1e-12)

    def test_monotone_along_amplitude(self):
        c = cfg(**self.BASE)
        surf = ber_surface(c, [0.07, 0.21], [0.1, 0.3, 0.6, 1.0])
        assert np.all(np.diff(surf.ber, axis=1) >= -1e-15)

    def test_axis_validation(self):
        c = cfg(**self.BASE)
        with pytest.raises(ParameterError):
            ber_surface(c, [0.2, 0.1], [0.1])
        with pytest.raises(ParameterError):
            ber_surface(c, [], [0.1])

    def test_deterministic(self):
        c = cfg(**self.BASE)
        a = ber_surface(c, [0.05, 0.2], [0.1, 0.4])
        b = ber_surface(c, [0.05, 0.2], [0.1, 0.4])
        assert np.array_equal(a.ber, b.ber)


class TestConfigValidation:
    def test_eps_range(self):
        with pytest.raises(ParameterError):
            cfg(freq_offset_eps=0.6)

    def test_phi_range(self):
        with pytest.raises(ParameterError):
            cfg(sampling_phase_phi=0.0)
        with pytest.raises(ParameterError):
            cfg(sampling_phase_phi=1.0)
