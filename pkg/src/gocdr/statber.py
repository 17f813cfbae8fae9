"""Semi-analytic BER estimation for the gated-oscillator CDR.

The recovered clock realigns on every data transition, so within a run of
L identical bits the error geometry reduces to the run's two outer
boundaries.  The opening (synchronizing) edge is the time origin: its own
jitter shifts the clock and the window together and cancels.  The closing
boundary sits at L UI displaced by the differential data jitter between
the two edges: DJ differential (triangle, uniform * uniform), RJ
differential (Gaussian, variance 2 rj^2), and the sinusoidal differential
over L bits (arcsine).  The sampling instant of bit k is

    t_s(k) = (k - 1 + phi) * (1 + eps)     [UI of the data stream]

perturbed by Gaussian oscillator jitter accumulated since the resync,
sigma_osc(k) = ckj_rms_cid5 * sqrt(t_s(k) / t_s(5)).

A bit errs when its sample lands outside [0, L + dJ]: past the closing
boundary it latches the next run's (differing) value, before the origin
the previous run's.  Gaussian parts are integrated analytically against
the gridded bounded jitter, so probabilities at the 1e-12 scale and below
stay exact to grid resolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import erfc

from .errors import ParameterError
from .jitter import (DEFAULT_STEP, JitterSpec, Pdf, convolve, delta_pdf,
                     dj_pdf, sj_differential_amplitude, sj_differential_pdf)
from .streams import RunDist


@dataclass(frozen=True)
class CdrStatConfig:
    """Inputs of the statistical BER model.

    freq_offset_eps: oscillator period = (1 + eps) UI; positive eps means
        a slow oscillator whose samples drift late within a run.
    sampling_phase_phi: sampling offset within the bit, UI (0.5 nominal).
    """

    jitter: JitterSpec = field(default_factory=JitterSpec)
    freq_offset_eps: float = 0.0
    run_dist: RunDist = field(default_factory=lambda: RunDist.truncated_geometric(0.5, 5))
    sampling_phase_phi: float = 0.5
    target_ber: float = 1e-12
    grid_step: float = DEFAULT_STEP

    def __post_init__(self):
        if not abs(self.freq_offset_eps) < 0.5:
            raise ParameterError(f"|eps| must be < 0.5, got {self.freq_offset_eps}")
        if not 0.0 < self.sampling_phase_phi < 1.0:
            raise ParameterError(f"phi must be in (0, 1), got {self.sampling_phase_phi}")
        if not 0.0 < self.target_ber <= 0.5:
            raise ParameterError(f"target_ber must be in (0, 0.5], got {self.target_ber}")
        if self.grid_step <= 0:
            raise ParameterError("grid_step must be > 0")


@dataclass(frozen=True)
class BerSurface:
    """BER over a (sj frequency, sj amplitude) grid; ber[i, j] pairs
    sj_freq_norms[i] with sj_amps_pp[j]."""

    sj_freq_norms: np.ndarray
    sj_amps_pp: np.ndarray
    ber: np.ndarray


def sampling_time(cfg: CdrStatConfig, k: int) -> float:
    """Nominal sampling instant of bit k after the synchronizing edge, UI."""
    if k < 1:
        raise ParameterError(f"bit index must be >= 1, got {k}")
    return (k - 1 + cfg.sampling_phase_phi) * (1.0 + cfg.freq_offset_eps)


def sigma_osc(cfg: CdrStatConfig, k: int) -> float:
    """Oscillator jitter accumulated at the bit-k sample, UI RMS.

    Square-root-of-elapsed-time scaling anchored at the CID = 5 sample.
    """
    ckj = cfg.jitter.ckj_rms_cid5
    if ckj == 0.0:
        return 0.0
    return ckj * math.sqrt(sampling_time(cfg, k) / sampling_time(cfg, 5))


def phase_error_pdf(cfg: CdrStatConfig, run_len: int, k: int) -> Pdf:
    """PDF of the bit-k sampling instant about its nominal value.

    Gaussian with sigma_osc(k); the data-boundary jitter terms enter at
    error evaluation, not here.
    """
    if not 1 <= k <= run_len:
        raise ParameterError(f"need 1 <= k <= run_len, got k={k}, run_len={run_len}")
    from .jitter import rj_pdf
    s = sigma_osc(cfg, k)
    if s == 0.0:
        return delta_pdf(0.0, cfg.grid_step)
    return rj_pdf(s, cfg.grid_step)


def _q(z) -> np.ndarray:
    """Standard normal upper-tail probability."""
    return 0.5 * erfc(np.asarray(z, dtype=float) / math.sqrt(2.0))


def _closing_bounded_pdf(cfg: CdrStatConfig, run_len: int) -> Pdf:
    """Bounded part of the closing-boundary displacement: DJ differential
    (triangle) convolved with the SJ differential (arcsine).

    The grid step widens with the total support so that huge sinusoidal
    amplitudes (tolerance searches sweep tens of UI) stay tractable; the
    extra quantization is irrelevant at those saturated error rates.
    """
    a = sj_differential_amplitude(cfg.jitter.sj_amp_pp, cfg.jitter.sj_freq_norm, run_len)
    span = 2.0 * cfg.jitter.dj_pp + 2.0 * a
    step = max(cfg.grid_step, span / 40000.0)
    parts = []
    if cfg.jitter.dj_pp > 0:
        u = dj_pdf(cfg.jitter.dj_pp, step)
        parts.append(convolve(u, u, max_support_ui=math.inf))
    if a > 0:
        parts.append(sj_differential_pdf(cfg.jitter.sj_amp_pp, cfg.jitter.sj_freq_norm,
                                         run_len, step))
    if not parts:
        return delta_pdf(0.0, step)
    out = parts[0]
    for p in parts[1:]:
        out = convolve(out, p, max_support_ui=math.inf)
    return out


def _late_prob(margin: float, bounded: Pdf, sigma_gauss: float) -> float:
    """P(sample - closing boundary > 0) given margin = L - t_s(k).

    Event: Z - B > margin with Z Gaussian(0, sigma_gauss) collecting the
    oscillator and differential-RJ parts and B the bounded displacement.
    """
    if sigma_gauss > 0.0:
        if bounded.is_point_mass:
            return float(_q((margin + bounded.loc) / sigma_gauss))
        masses = bounded.masses()
        return float(np.dot(masses, _q((margin + bounded.grid) / sigma_gauss)))
    # purely bounded: P(B < -margin)
    if bounded.is_point_mass:
        return 1.0 if bounded.loc < -margin else 0.0
    from .jitter import tail_prob
    return tail_prob(bounded, -margin, side="below")


def ber_breakdown(cfg: CdrStatConfig) -> dict:
    """BER with its dominant terms separated.

    Returns a dict with 'total', 'late_last' (the last bit of a run
    sampled past the closing boundary), 'late_interior', and 'early'
    (any bit sampled before the synchronizing edge).
    """
    rd = cfg.run_dist
    rj2 = 2.0 * cfg.jitter.rj_rms ** 2
    late_last = late_interior = early = 0.0
    for length in range(1, rd.l_max + 1):
        p_l = rd.prob(length)
        if p_l == 0.0:
            continue
        bounded = _closing_bounded_pdf(cfg, length)
        for k in range(1, length + 1):
            t_k = sampling_time(cfg, k)
            s_osc = sigma_osc(cfg, k)
            sigma = math.sqrt(s_osc ** 2 + rj2)
            p_late = _late_prob(length - t_k, bounded, sigma)
            if k == length:
                late_last += p_l * p_late
            else:
                late_interior += p_l * p_late
            if s_osc > 0.0:
                early += p_l * float(_q(t_k / s_osc))
    denom = rd.mean_run_length()
    return {
        "total": min(max((late_last + late_interior + early) / denom, 0.0), 0.5),
        "late_last": late_last / denom,
        "late_interior": late_interior / denom,
        "early": early / denom,
    }


def ber_estimate(cfg: CdrStatConfig) -> float:
    """Expected bit error ratio, clamped to [0, 0.5]."""
    return ber_breakdown(cfg)["total"]


def last_bit_late_term(cfg: CdrStatConfig) -> float:
    """The last-bit-late contribution to the BER (per transmitted bit)."""
    return ber_breakdown(cfg)["late_last"]


def with_sj(cfg: CdrStatConfig, sj_freq_norm: float, sj_amp_pp: float) -> CdrStatConfig:
    """Config copy with the sinusoidal-jitter point replaced."""
    return replace(cfg, jitter=replace(cfg.jitter, sj_freq_norm=sj_freq_norm,
                                       sj_amp_pp=sj_amp_pp))


def ber_surface(cfg: CdrStatConfig, sj_freq_norms, sj_amps_pp) -> BerSurface:
    """ber_estimate evaluated over the (frequency, amplitude) grid."""
    freqs = np.asarray(list(sj_freq_norms), dtype=float)
    amps = np.asarray(list(sj_amps_pp), dtype=float)
    if freqs.size == 0 or amps.size == 0:
        raise ParameterError("axes must be non-empty")
    if np.any(np.diff(freqs) <= 0) or np.any(np.diff(amps) <= 0):
        raise ParameterError("axes must be strictly increasing")
    grid = np.empty((freqs.size, amps.size))
    for i, f in enumerate(freqs):
        for j, a in enumerate(amps):
            grid[i, j] = ber_estimate(with_sj(cfg, f, a))
    return BerSurface(freqs, amps, grid)
