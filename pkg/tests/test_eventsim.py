"""Gate-level and phase-mode simulation of the CDR chain."""

import math

import numpy as np
import pytest

from gocdr import (EdgeDetectorConfig, JitterSpec, OscillatorConfig,
                   ParameterError, PatternConfig, SamplerConfig, SimConfig,
                   SimulationOverflowError, ckj_rms_cid5_from_osc,
                   edge_crossing_offsets, eye_capture, eye_opening,
                   jit_sigma_for_ckj, resync_check, simulate, stage_delay,
                   tap_rising_eighths)

RATE = 2.5e9


def make_cfg(f_eff=RATE, tau_frac=0.75, sampler=None, n_bits=8000,
             jitter=None, jit_sigma=0.0, pattern=None, seed=1):
    osc = OscillatorConfig(f_c_hz=f_eff, jit_sigma=jit_sigma)
    return SimConfig(
        data_rate_hz=RATE, n_bits=n_bits, osc=osc,
        edet=EdgeDetectorConfig.from_clock_fraction(tau_frac, osc),
        sampler=sampler or SamplerConfig.ck_out(),
        pattern=pattern or PatternConfig(),
        jitter=jitter or JitterSpec(), seed=seed)


def sampling_offsets_mod_ui(result):
    """Offsets of sampling instants from the preceding delayed-data edge,
    modulo one UI."""
    edges, _ = result.data_transition_log
    pos = np.searchsorted(edges, result.sampling_instants, side="right") - 1
    ok = pos >= 0
    off = (result.sampling_instants[ok] - edges[pos[ok]]) / result.ui_s
    return np.mod(off, 1.0)


class TestStageDelay:
    def test_nominal_delay(self):
        osc = OscillatorConfig(f_c_hz=2.5e9)
        assert stage_delay(osc, np.random.default_rng(0)) == pytest.approx(50e-12, rel=1e-12)

    def test_offset_oscillator(self):
        osc = OscillatorConfig(f_c_hz=2.375e9)
        assert stage_delay(osc, np.random.default_rng(0)) == pytest.approx(52.63e-12, rel=1e-3)

    def test_cco_gain_path(self):
        osc = OscillatorConfig(f_c_hz=2.4e9, k_cco_hz_per_a=1e12, ctrl_a=150e-6, cc0_a=50e-6)
        assert osc.f_eff_hz == pytest.approx(2.5e9)
        assert 8 * stage_delay(osc, np.random.default_rng(0)) == pytest.approx(osc.period_s, rel=1e-12)

    def test_nonpositive_frequency_rejected(self):
        with pytest.raises(ParameterError):
            OscillatorConfig(f_c_hz=1e9, k_cco_hz_per_a=1e12, ctrl_a=0.0, cc0_a=2e-3)

    def test_jitter_draw_spread(self):
        osc = OscillatorConfig(f_c_hz=2.5e9, jit_sigma=0.01)
        rng = np.random.default_rng(3)
        draws = np.array([stage_delay(osc, rng) for _ in range(4000)])
        assert draws.std() / draws.mean() == pytest.approx(0.01, rel=0.1)


class TestCleanChannel:
    def test_zero_errors_and_mid_bit_sampling(self):
        r = simulate(make_cfg(n_bits=13000))
        assert r.error_count == 0
        assert r.missing_sample_count == 0
        off = sampling_offsets_mod_ui(r)
        assert np.max(np.abs(off - 0.5)) < 1e-9

    def test_tau_independent_sampling_phase(self):
        # the delay line shifts data and release identically, so the
        # sampling phase cannot depend on tau
        for frac in (0.55, 0.65, 0.75, 0.85, 0.95):
            r = simulate(make_cfg(tau_frac=frac, n_bits=3000))
            off = sampling_offsets_mod_ui(r)
            assert np.max(np.abs(off - 0.5)) < 1e-6, f"tau={frac}T"
            assert r.error_count == 0

    def test_phase_mode_matches_structural_when_clean(self):
        rs = simulate(make_cfg(n_bits=3000))
        rp = simulate(make_cfg(sampler=SamplerConfig.phase(0.5), n_bits=3000))
        assert rs.error_count == rp.error_count == 0
        assert np.max(np.abs(sampling_offsets_mod_ui(rp) - 0.5)) < 1e-9


class TestDeterminism:
    @pytest.mark.parametrize("sampler", [SamplerConfig.ck_out(),
                                         SamplerConfig.improved_tap(),
                                         SamplerConfig.phase(0.5)])
    def test_identical_seed_identical_result(self, sampler):
        jit = JitterSpec(dj_pp=0.3, rj_rms=0.02, sj_amp_pp=0.2, sj_freq_norm=0.07)
        cfg = make_cfg(f_eff=RATE / 1.02, sampler=sampler, jitter=jit,
                       jit_sigma=0.02, n_bits=4000, seed=42)
        a, b = simulate(cfg), simulate(cfg)
        assert np.array_equal(a.sampling_instants, b.sampling_instants)
        assert np.array_equal(a.rx_bits, b.rx_bits)
        assert a.error_count == b.error_count

    def test_different_seed_differs(self):
        jit = JitterSpec(rj_rms=0.02)
        a = simulate(make_cfg(jitter=jit, n_bits=4000, seed=1))
        b = simulate(make_cfg(jitter=jit, n_bits=4000, seed=2))
        assert not np.array_equal(a.sampling_instants, b.sampling_instants)


class TestResync:
    def test_safe_window_never_misses(self):
        for frac in (0.55, 0.65, 0.75, 0.85, 0.95):
            r = simulate(make_cfg(tau_frac=frac, n_bits=5000))
            n, miss, _ = resync_check(r, tol_ui=0.02)
            assert n > 0 and miss == 0, f"tau={frac}T"

    def test_short_delay_line_displaces_resyncs(self):
        # tau = 0.45T: the freeze front reaches stage 4 only T/2 after the
        # data edge, so the restart is displaced by T/2 - tau (~0.05 UI
        # here) for long consecutive stretches
        r = simulate(make_cfg(f_eff=RATE / 1.01, tau_frac=0.45, n_bits=20000))
        n, miss, consec = resync_check(r, tol_ui=0.03)
        assert miss > 0
        assert consec >= 10
        _, dev = r.resync_events
        assert np.median(np.abs(dev)) == pytest.approx(0.0505, abs=0.005)

    def test_default_tolerance_matches_contract(self):
        r = simulate(make_cfg(f_eff=RATE / 1.01, tau_frac=0.45, n_bits=5000))
        n, miss, _ = resync_check(r)          # 0.1 UI default
        assert miss == 0                       # displacement is below 0.1 UI


class TestTapGeometry:
    def test_tap_phase_table(self):
        assert tap_rising_eighths(SamplerConfig.ck_out()) == 4
        assert tap_rising_eighths(SamplerConfig.improved_tap()) == 3
        assert tap_rising_eighths(SamplerConfig(tap_stage=1)) == 5
        assert tap_rising_eighths(SamplerConfig(tap_stage=2, inverted=True)) == 6

    def test_improved_tap_samples_one_eighth_early(self):
        r = simulate(make_cfg(sampler=SamplerConfig.improved_tap(), n_bits=3000))
        off = sampling_offsets_mod_ui(r)
        assert np.max(np.abs(off - 0.375)) < 1e-9
        assert r.error_count == 0

    def test_emergent_phase_reported(self):
        r = simulate(make_cfg(sampler=SamplerConfig.improved_tap(), n_bits=2000))
        assert r.tap_offset_nominal_s == pytest.approx(3 / (8 * RATE), rel=1e-12)


class TestEyeCapture:
    def test_clean_eye_single_bin(self):
        r = simulate(make_cfg(sampler=SamplerConfig.phase(0.5), n_bits=4000))
        eh = eye_capture(r, bin_width_ui=0.01)
        nz = np.flatnonzero(eh.counts.sum(axis=0))
        assert nz.size == 1
        assert eh.bin_centers[nz[0]] == pytest.approx(0.5, abs=0.01)

    def test_transition_count_conserved(self):
        jit = JitterSpec(dj_pp=0.2, rj_rms=0.02, sj_amp_pp=0.1, sj_freq_norm=0.1)
        r = simulate(make_cfg(f_eff=2.375e9, tau_frac=0.55, jitter=jit, n_bits=6000))
        eh = eye_capture(r, bin_width_ui=0.005)
        t_tr, _ = r.data_transition_log
        assert eh.total == eh.n_binned
        assert eh.n_binned + eh.n_skipped == t_tr.size

    def test_offset_oscillator_smears_crossings(self):
        jit = JitterSpec(sj_amp_pp=0.10, sj_freq_norm=0.1)
        r = simulate(make_cfg(f_eff=2.375e9, tau_frac=0.55, jitter=jit, n_bits=25000))
        left, right = edge_crossing_offsets(r)
        assert left.std() < 0.05
        assert left.std() < right.std()

    def test_improved_tap_centers_opening(self):
        jit = JitterSpec(dj_pp=0.4, rj_rms=0.021, sj_amp_pp=0.10, sj_freq_norm=0.1)
        r_ck = simulate(make_cfg(f_eff=RATE / 1.01, tau_frac=0.55, jitter=jit,
                                 n_bits=25000, seed=7))
        r_imp = simulate(make_cfg(f_eff=RATE / 1.01, tau_frac=0.55, jitter=jit,
                                  sampler=SamplerConfig.improved_tap(),
                                  n_bits=25000, seed=7))
        op_ck = eye_opening(r_ck)
        op_imp = eye_opening(r_imp)
        # the early tap widens the late-side margin and re-centers the eye
        assert op_imp.right_ui > op_ck.right_ui
        assert abs(op_imp.midpoint_ui) < abs(op_ck.midpoint_ui)

    def test_requires_transition_log(self):
        cfg = make_cfg(sampler=SamplerConfig.phase(0.5), n_bits=4000)
        cfg = SimConfig(**{**cfg.__dict__, "record_waveforms": False})
        r = simulate(cfg)
        with pytest.raises(ParameterError):
            eye_capture(r)


class TestPhaseModeOracle:
    def test_late_errors_match_statistics(self):
        # oscillator-jitter dominated: the phase-mode Monte Carlo and the
        # semi-analytic engine price the same late-crossing event
        from gocdr import CdrStatConfig, RunDist, ber_estimate
        ckj, phi, eps = 0.15, 0.5, 0.01
        f_eff = RATE / (1 + eps)
        cfg = make_cfg(f_eff=f_eff, tau_frac=0.51,
                       sampler=SamplerConfig.phase(phi),
                       pattern=PatternConfig(kind="rll", max_cid=5, p_extend=0.5),
                       jit_sigma=jit_sigma_for_ckj(ckj, phi, RATE, f_eff),
                       n_bits=300_000, seed=11)
        r = simulate(cfg)
        stat = ber_estimate(CdrStatConfig(
            jitter=JitterSpec(ckj_rms_cid5=ckj), freq_offset_eps=eps,
            run_dist=RunDist.truncated_geometric(0.5, 5), sampling_phase_phi=phi))
        assert r.error_count > 10
        assert abs(math.log10(r.ber / stat)) < 0.35

    def test_ckj_calibration_round_trip(self):
        osc = OscillatorConfig(f_c_hz=RATE / 1.01, jit_sigma=0.08)
        ckj = ckj_rms_cid5_from_osc(osc, 0.5, RATE)
        back = jit_sigma_for_ckj(ckj, 0.5, RATE, osc.f_eff_hz)
        assert back == pytest.approx(0.08, rel=1e-12)


class TestGuards:
    def test_gate_engine_length_guard(self):
        osc = OscillatorConfig(f_c_hz=RATE)
        with pytest.raises(SimulationOverflowError):
            SimConfig(data_rate_hz=RATE, n_bits=1_000_000, osc=osc,
                      edet=EdgeDetectorConfig.from_clock_fraction(0.75, osc),
                      sampler=SamplerConfig.ck_out())

    def test_min_bits(self):
        osc = OscillatorConfig(f_c_hz=RATE)
        with pytest.raises(ParameterError):
            SimConfig(data_rate_hz=RATE, n_bits=4, osc=osc,
                      edet=EdgeDetectorConfig.from_clock_fraction(0.75, osc))

    def test_tau_positive(self):
        with pytest.raises(ParameterError):
            EdgeDetectorConfig(tau_s=0.0)
