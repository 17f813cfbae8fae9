"""Continuous-time simulation of the gated-oscillator CDR chain.

Signal chain: NRZ data source -> edge detector (delay line + XOR, active-low
pulse EDET of width tau) -> gated four-stage ring oscillator -> sampler.
The sampler input DD_IN is the delay-line output, so the line's delay drops
out of the sampling phase.

Polarity convention: stage outputs are modeled as the rail that the edge
detector freezes HIGH.  While EDET is low, stage 1 is held at 1; the frozen
state walks down the ring one stage delay at a time and drives the
recovered clock low half a period after the data edge.  On the EDET rising
edge stage 1 resumes following the ring and the recovered clock (the plain
stage-4 output in this convention) rises exactly T/2 after the release.
Rising edges of the taps land at these eighths of a period after a release:

    stage:      y1=5/8  y2=2/8  y3=7/8  y4=4/8  (y4 is the recovered clock)
    inverted:   y1=1/8  y2=6/8  y3=3/8  y4=8/8

so the inverted stage-3 tap samples one eighth of a period earlier than the
recovered clock.

Two engines share the data/edge-detector front end:

* ``structural`` mode runs a gate-level event queue with per-evaluation
  jittered stage delays and VHDL-style transport scheduling (posting a
  transaction cancels pending ones at or after its fire time).
* ``phase`` mode replaces the tap with an ideal clock re-phased to each
  resync at offset phi*T.  A tick series persists until the next resync's
  first tick takes over, which is what gives the statistical model's
  late-sampling error a direct time-domain counterpart (a gated structural
  tap freezes before the closing edge and converts late samples into
  missing ones instead; those are reported separately).

Scoring compares each latched value against the transmitted bit whose
nominal delayed-domain window contains the sampling instant, starting with
the first full bit after the first resync.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from heapq import heappush, heappop

import numpy as np

from .errors import ParameterError, SimulationOverflowError
from .jitter import EdgeJitterSampler, JitterSpec
from .streams import Prbs7, prbs7_period, rll_stream, PRBS7_PERIOD

_GATE_BIT_LIMIT = 400_000
_PHASE_BIT_LIMIT = 60_000_000
_RESYNC_TOL_UI = 0.1
_TAP_RISING_EIGHTHS = {1: 5, 2: 2, 3: 7, 4: 4}


@dataclass(frozen=True)
class OscillatorConfig:
    """Behavioral gated-ring-oscillator parameters.

    f_c_hz: free-running frequency at the control mid-point.
    k_cco_hz_per_a: current-to-frequency gain.
    ctrl_a / cc0_a: control current and its mid-point.
    jit_sigma: per-stage delay jitter ratio (0.01 means 1 percent).
    """

    f_c_hz: float
    k_cco_hz_per_a: float = 0.0
    ctrl_a: float = 0.0
    cc0_a: float = 0.0
    jit_sigma: float = 0.0

    def __post_init__(self):
        if self.f_eff_hz <= 0 or not math.isfinite(self.f_eff_hz):
            raise ParameterError(f"effective frequency must be > 0, got {self.f_eff_hz!r}")
        if self.jit_sigma < 0:
            raise ParameterError("jit_sigma must be >= 0")

    @property
    def f_eff_hz(self) -> float:
        return self.f_c_hz + self.k_cco_hz_per_a * (self.ctrl_a - self.cc0_a)

    @property
    def period_s(self) -> float:
        return 1.0 / self.f_eff_hz


def _draw_stage_delay(osc: OscillatorConfig, rng: np.random.Generator):
    """One stage delay in seconds plus a flag marking a clamped draw."""
    g = 0.0
    clamped = False
    if osc.jit_sigma > 0.0:
        g = rng.normal(0.0, osc.jit_sigma)
        if abs(g) >= 1.0:
            g = math.copysign(0.5, g)
            clamped = True
    return (1.0 + g) / (8.0 * osc.f_eff_hz), clamped


def stage_delay(osc: OscillatorConfig, rng: np.random.Generator) -> float:
    """Jittered delay of one ring stage, seconds: (1 + g) / (8 f_eff)."""
    return _draw_stage_delay(osc, rng)[0]


@dataclass(frozen=True)
class EdgeDetectorConfig:
    """Delay-line delay of the edge detector; parasitics are zero."""

    tau_s: float

    def __post_init__(self):
        if not (self.tau_s > 0 and math.isfinite(self.tau_s)):
            raise ParameterError(f"tau_s must be > 0, got {self.tau_s!r}")

    @classmethod
    def from_clock_fraction(cls, fraction: float, osc: OscillatorConfig) -> "EdgeDetectorConfig":
        """tau as a fraction of the oscillator period (0.75 is mid-window)."""
        return cls(tau_s=fraction * osc.period_s)


@dataclass(frozen=True)
class SamplerConfig:
    """Sampling-clock selection.

    structural mode taps a ring stage (optionally inverted); phase mode is
    an ideal clock re-phased to each resync at offset phi*T.
    """

    mode: str = "structural"
    tap_stage: int = 4
    inverted: bool = False
    phi: float = 0.5

    def __post_init__(self):
        if self.mode not in ("structural", "phase"):
            raise ParameterError(f"mode must be structural|phase, got {self.mode!r}")
        if self.mode == "structural" and self.tap_stage not in (1, 2, 3, 4):
            raise ParameterError(f"tap_stage must be 1..4, got {self.tap_stage}")
        if self.mode == "phase" and not 0.0 < self.phi < 1.0:
            raise ParameterError(f"phi must be in (0, 1), got {self.phi}")

    @classmethod
    def ck_out(cls) -> "SamplerConfig":
        """The recovered clock: plain stage-4 tap, rising T/2 after release."""
        return cls(mode="structural", tap_stage=4, inverted=False)

    @classmethod
    def improved_tap(cls) -> "SamplerConfig":
        """Inverted stage-3 tap, rising 3T/8 after release (T/8 early)."""
        return cls(mode="structural", tap_stage=3, inverted=True)

    @classmethod
    def phase(cls, phi: float) -> "SamplerConfig":
        return cls(mode="phase", phi=phi)


def tap_rising_eighths(sampler: SamplerConfig) -> int:
    """Rising-edge phase of a structural tap after a release, in T/8 units."""
    base = _TAP_RISING_EIGHTHS[sampler.tap_stage]
    if sampler.inverted:
        base = (base + 4 - 1) % 8 + 1
    return base


def tap_nominal_offset_s(sampler: SamplerConfig, osc: OscillatorConfig) -> float:
    """Nominal delay from a release to the first sampling edge, seconds."""
    if sampler.mode == "phase":
        return sampler.phi * osc.period_s
    return tap_rising_eighths(sampler) / (8.0 * osc.f_eff_hz)


@dataclass(frozen=True)
class PatternConfig:
    kind: str = "prbs7"          # prbs7 | rll
    prbs_seed: int = 0x7F
    max_cid: int = 5
    p_extend: float = 0.5

    def __post_init__(self):
        if self.kind not in ("prbs7", "rll"):
            raise ParameterError(f"pattern kind must be prbs7|rll, got {self.kind!r}")


@dataclass(frozen=True)
class SimConfig:
    data_rate_hz: float
    n_bits: int
    osc: OscillatorConfig
    edet: EdgeDetectorConfig
    sampler: SamplerConfig = field(default_factory=SamplerConfig.ck_out)
    pattern: PatternConfig = field(default_factory=PatternConfig)
    jitter: JitterSpec = field(default_factory=JitterSpec)
    seed: int = 0
    record_waveforms: bool = True

    def __post_init__(self):
        if self.data_rate_hz <= 0:
            raise ParameterError("data_rate_hz must be > 0")
        if self.n_bits < 16:
            raise ParameterError("n_bits must be >= 16")
        limit = _GATE_BIT_LIMIT if self.sampler.mode == "structural" else _PHASE_BIT_LIMIT
        if self.n_bits > limit:
            raise SimulationOverflowError(
                f"{self.sampler.mode} engine supports up to {limit} bits, got {self.n_bits}")

    @property
    def ui_s(self) -> float:
        return 1.0 / self.data_rate_hz


@dataclass
class SimResult:
    """Event-simulation output.

    Times are seconds.  ``error_count`` counts latched values that differ
    from the transmitted bit owning the sample's nominal window;
    ``missing_sample_count`` counts scored bits that received no sample
    (a gated tap freezes before each closing edge, so heavy late drift
    shows up here rather than as wrong values).
    """

    tx_bits: np.ndarray
    rx_bits: np.ndarray
    sampling_instants: np.ndarray
    rx_target_idx: np.ndarray
    data_transition_log: tuple[np.ndarray, np.ndarray]   # (times, new levels)
    releases: np.ndarray
    resync_events: tuple[np.ndarray, np.ndarray]         # (release times, deviation UI)
    error_count: int
    bits_simulated: int
    bits_scored: int
    missing_sample_count: int
    clamped_jitter_draws: int
    glitch_release_count: int
    ui_s: float
    tau_s: float
    clock_period_s: float
    tap_offset_nominal_s: float
    seed: int
    sampler_mode: str

    @property
    def ber(self) -> float:
        if self.bits_scored == 0:
            return 0.0
        return self.error_count / self.bits_scored

    @property
    def ber_with_missing(self) -> float:
        if self.bits_scored == 0:
            return 0.0
        return (self.error_count + self.missing_sample_count) / self.bits_scored


def _pattern_bits(cfg: SimConfig, rng: np.random.Generator) -> np.ndarray:
    if cfg.pattern.kind == "prbs7":
        period = prbs7_period(cfg.pattern.prbs_seed)
        reps = cfg.n_bits // PRBS7_PERIOD + 1
        return np.tile(period, reps)[:cfg.n_bits]
    return rll_stream(cfg.pattern.max_cid, cfg.pattern.p_extend, rng, cfg.n_bits)


def _transitions(cfg: SimConfig, bits: np.ndarray, edge_sampler: EdgeJitterSampler):
    """Actual data transition times (seconds) and post-transition levels."""
    ui = cfg.ui_s
    idx = np.flatnonzero(np.diff(bits.astype(np.int8)) != 0) + 1
    t_nom = idx * ui
    jit_ui = edge_sampler.draw_many(t_nom)
    t_act = t_nom + jit_ui * ui
    # keep the edge order physical even under extreme jitter draws
    t_act = np.maximum.accumulate(t_act)
    return t_act, bits[idx].astype(np.uint8)


def _edet_releases(t_trans: np.ndarray, tau_s: float) -> np.ndarray:
    """EDET rising-edge times for a transition stream and delay-line tau.

    EDET = NOT(D(t) XOR D(t - tau)); every flip of either signal toggles
    the XOR, so EDET rises at every even-numbered flip event.
    """
    if t_trans.size == 0:
        return np.array([])
    times = np.concatenate([t_trans, t_trans + tau_s])
    times.sort(kind="stable")
    return times[1::2]


def _score_samples(bits, target_idx, sample_values, tau_s, ui_s, first_release, n_bits):
    """Score samples against their target bits (ordinal within each resync:
    the j-th sampling edge after a release latches the j-th bit of the run
    that release opened)."""
    idx = target_idx
    lo = int(math.ceil((first_release - tau_s) / ui_s)) + 1
    hi = n_bits - 2
    if hi < lo:
        return 0, 0, 0
    sel = (idx >= lo) & (idx <= hi)
    errors = int(np.count_nonzero(sample_values[sel] != bits[idx[sel]]))
    sampled = np.zeros(n_bits, dtype=bool)
    sampled[idx[sel]] = True
    missing = int((hi - lo + 1) - np.count_nonzero(sampled[lo:hi + 1]))
    return errors, missing, hi - lo + 1


def _resync_deviation_ui(releases, edges, nominal_offset_s, ui_s, period_s):
    """Signed deviation (UI) of the sampling edge nearest to each release's
    nominal resync point; +-inf when no edge lies within (release, release+2T]."""
    if releases.size == 0:
        return np.zeros(0)
    targets = releases + nominal_offset_s
    pos = np.searchsorted(edges, targets)
    dev = np.full(releases.size, np.inf)
    for shift in (-1, 0):
        j = pos + shift
        ok = (j >= 0) & (j < edges.size)
        cand = np.where(ok, edges[np.clip(j, 0, max(edges.size - 1, 0))], np.nan)
        in_window = ok & (cand > releases) & (cand <= releases + 2.0 * period_s)
        d = cand - targets
        better = in_window & (np.abs(d) < np.abs(dev))
        dev = np.where(better, d, dev)
    return dev / ui_s


def simulate(cfg: SimConfig) -> SimResult:
    """Run the configured engine and score the recovered bits."""
    if cfg.sampler.mode == "structural":
        return _simulate_gate(cfg)
    return _simulate_phase(cfg)


# ---------------------------------------------------------------------------
# gate-level engine
# ---------------------------------------------------------------------------

_PRIO_D = 0
_PRIO_DD = 1
_PRIO_STAGE = 2  # + stage index 0..3


def _simulate_gate(cfg: SimConfig) -> SimResult:
    ss = np.random.SeedSequence(cfg.seed)
    rng_bits, rng_edge, rng_stage = [np.random.Generator(np.random.PCG64(s))
                                     for s in ss.spawn(3)]
    bits = _pattern_bits(cfg, rng_bits)
    edge_sampler = EdgeJitterSampler(cfg.jitter, cfg.data_rate_hz, rng_edge)
    t_trans, levels = _transitions(cfg, bits, edge_sampler)

    ui = cfg.ui_s
    tau = cfg.edet.tau_s
    osc = cfg.osc
    t_end = cfg.n_bits * ui + tau + 8.0 * osc.period_s

    tap_stage = cfg.sampler.tap_stage - 1
    tap_inverted = cfg.sampler.inverted
    tap_high = 0 if tap_inverted else 1   # stage value that makes the tap high

    heap: list = []
    serial = 0
    # data / delayed-data events, pushed up front
    for t, lv in zip(t_trans, levels):
        heappush(heap, (t, _PRIO_D, serial, -1, int(lv)))
        serial += 1
        heappush(heap, (t + tau, _PRIO_DD, serial, -2, int(lv)))
        serial += 1

    d_state = dd_state = int(bits[0])
    trig = 1
    y = [1, 0, 1, 0]
    pending: list[list] = [[], [], [], []]   # per-stage [fire_time, serial]
    dead: set[int] = set()
    clamped_draws = 0

    sample_times: list[float] = []
    sample_values: list[int] = []
    sample_targets: list[int] = []
    release_times: list[float] = []
    release_base_bit = -(1 << 30)
    ticks_since_release = 0

    def post_stage(stage: int, value: int, t_now: float):
        nonlocal serial, clamped_draws
        delay, clamped = _draw_stage_delay(osc, rng_stage)
        clamped_draws += int(clamped)
        t_fire = t_now + delay
        keep = []
        for entry in pending[stage]:
            if entry[0] >= t_fire:
                dead.add(entry[1])
            else:
                keep.append(entry)
        pending[stage] = keep
        serial += 1
        pending[stage].append((t_fire, serial))
        heappush(heap, (t_fire, _PRIO_STAGE + stage, serial, stage, value))

    def eval_stage1(t_now: float):
        post_stage(0, 1 if trig == 0 else y[3], t_now)

    # bootstrap the free-running ring
    eval_stage1(0.0)

    while heap:
        t, prio, ser, code, value = heappop(heap)
        if t > t_end:
            break
        if code in (-1, -2):                # D_in / DD_in transition
            if code == -1:
                d_state = value
            else:
                dd_state = value
            new_trig = 1 if d_state == dd_state else 0
            if new_trig != trig:
                trig = new_trig
                if trig == 1:
                    release_times.append(t)
                    release_base_bit = int(math.floor((t - tau) / ui + 0.5))
                    ticks_since_release = 0
                eval_stage1(t)
        else:                               # stage assignment
            if ser in dead:
                dead.discard(ser)
                continue
            stage = code
            pending[stage] = [e for e in pending[stage] if e[1] != ser]
            if y[stage] == value:
                continue
            y[stage] = value
            if stage == 3:
                eval_stage1(t)              # ring closure
            else:
                post_stage(stage + 1, 1 - value, t)
            if stage == tap_stage and value == tap_high:
                sample_times.append(t)
                sample_values.append(dd_state)
                sample_targets.append(release_base_bit + ticks_since_release)
                ticks_since_release += 1

    sample_times_arr = np.asarray(sample_times)
    sample_values_arr = np.asarray(sample_values, dtype=np.uint8)
    targets = np.asarray(sample_targets, dtype=np.int64)
    releases = np.asarray(release_times)

    if releases.size:
        # drop the startup transient: before the first resync the free
        # ring samples at an arbitrary phase
        keep = sample_times_arr >= releases[0]
        sample_times_arr = sample_times_arr[keep]
        sample_values_arr = sample_values_arr[keep]
        targets = targets[keep]

    first_release = releases[0] if releases.size else math.inf
    errors, missing, scored = _score_samples(
        bits, targets, sample_values_arr, tau, ui, first_release, cfg.n_bits)

    offset = tap_nominal_offset_s(cfg.sampler, osc)
    resync_dev = _resync_deviation_ui(releases, sample_times_arr, offset, ui, osc.period_s)

    dd_times = t_trans + tau
    if not cfg.record_waveforms:
        dd_log = (np.array([]), np.array([], dtype=np.uint8))
    else:
        dd_log = (dd_times, levels)

    return SimResult(
        tx_bits=bits,
        rx_bits=sample_values_arr,
        sampling_instants=sample_times_arr,
        rx_target_idx=targets,
        data_transition_log=dd_log,
        releases=releases,
        resync_events=(releases, resync_dev),
        error_count=errors,
        bits_simulated=cfg.n_bits,
        bits_scored=scored,
        missing_sample_count=missing,
        clamped_jitter_draws=clamped_draws,
        glitch_release_count=int(releases.size - t_trans.size) if releases.size > t_trans.size else 0,
        ui_s=ui,
        tau_s=tau,
        clock_period_s=osc.period_s,
        tap_offset_nominal_s=offset,
        seed=cfg.seed,
        sampler_mode="structural",
    )


# ---------------------------------------------------------------------------
# phase-mode engine (vectorized)
# ---------------------------------------------------------------------------

_PHASE_CHUNK = 1 << 18
_MAX_TICKS = 64


def _simulate_phase(cfg: SimConfig) -> SimResult:
    ss = np.random.SeedSequence(cfg.seed)
    rng_bits, rng_edge, rng_stage = [np.random.Generator(np.random.PCG64(s))
                                     for s in ss.spawn(3)]
    bits = _pattern_bits(cfg, rng_bits)
    edge_sampler = EdgeJitterSampler(cfg.jitter, cfg.data_rate_hz, rng_edge)
    t_trans, levels = _transitions(cfg, bits, edge_sampler)

    ui = cfg.ui_s
    tau = cfg.edet.tau_s
    osc = cfg.osc
    period = osc.period_s
    phi = cfg.sampler.phi
    t_end = cfg.n_bits * ui + tau

    releases = _edet_releases(t_trans, tau)
    if releases.size == 0:
        raise ParameterError("data stream contains no transitions")
    dd_times = t_trans + tau
    glitches = int(releases.size - dd_times.size)

    # First tick of every series: release + phi*T plus jitter accumulated
    # over the 8*phi stage delays walked since the release.
    jit = osc.jit_sigma
    sig_first = period * jit * math.sqrt(phi / 8.0)
    sig_inc = period * jit / math.sqrt(8.0)
    n_rel = releases.size
    first_ticks = releases + phi * period
    if jit > 0:
        first_ticks = first_ticks + rng_stage.normal(0.0, sig_first, size=n_rel)

    # Each series samples exactly the bits its release opened: tick j
    # latches bit base+j, wherever jitter and drift actually put the tick
    # (a late last tick can land past the closing transition and read the
    # next run's value, which is the late-sampling error).
    base_bits = np.floor((releases - tau) / ui + 0.5).astype(np.int64)
    n_ticks = np.diff(base_bits, append=cfg.n_bits)
    n_ticks = np.clip(n_ticks, 0, None)

    all_times = []
    all_targets = []
    resync_dev = (first_ticks - (releases + phi * period)) / ui

    for lo in range(0, n_rel, _PHASE_CHUNK):
        hi = min(lo + _PHASE_CHUNK, n_rel)
        counts = n_ticks[lo:hi]
        max_ticks = int(counts.max()) if counts.size else 0
        if max_ticks > _MAX_TICKS:
            raise SimulationOverflowError(
                f"a transition-free stretch needs {max_ticks} ticks per series "
                f"(limit {_MAX_TICKS}); bound the run length of the pattern")
        if max_ticks == 0:
            continue
        n = hi - lo
        ticks = np.empty((n, max_ticks))
        ticks[:, 0] = first_ticks[lo:hi]
        if max_ticks > 1:
            steps = np.full((n, max_ticks - 1), period)
            if jit > 0:
                steps = steps + rng_stage.normal(0.0, sig_inc, size=(n, max_ticks - 1))
            np.cumsum(steps, axis=1, out=ticks[:, 1:])
            ticks[:, 1:] += first_ticks[lo:hi, None]
        keep = np.arange(max_ticks) < counts[:, None]
        targets = base_bits[lo:hi, None] + np.arange(max_ticks, dtype=np.int64)
        all_times.append(ticks[keep])
        all_targets.append(targets[keep])

    sample_times = np.concatenate(all_times) if all_times else np.array([])
    sample_targets = (np.concatenate(all_targets) if all_targets
                      else np.array([], dtype=np.int64))
    order = np.argsort(sample_times, kind="stable")
    sample_times = sample_times[order]
    sample_targets = sample_targets[order]
    # DD_in value at each tick: level after the most recent delayed transition
    pos = np.searchsorted(dd_times, sample_times, side="right") - 1
    sample_values = np.where(pos >= 0, levels[np.clip(pos, 0, None)],
                             int(bits[0])).astype(np.uint8)

    first_release = releases[0]
    errors, missing, scored = _score_samples(
        bits, sample_targets, sample_values, tau, ui, first_release, cfg.n_bits)

    if not cfg.record_waveforms:
        dd_log = (np.array([]), np.array([], dtype=np.uint8))
        keep_result = (np.array([]), np.array([], dtype=np.uint8), np.array([], dtype=np.int64))
    else:
        dd_log = (dd_times, levels)
        keep_result = (sample_times, sample_values, sample_targets)

    return SimResult(
        tx_bits=bits,
        rx_bits=keep_result[1],
        sampling_instants=keep_result[0],
        rx_target_idx=keep_result[2],
        data_transition_log=dd_log,
        releases=releases,
        resync_events=(releases, resync_dev),
        error_count=errors,
        bits_simulated=cfg.n_bits,
        bits_scored=scored,
        missing_sample_count=missing,
        clamped_jitter_draws=0,
        glitch_release_count=max(glitches, 0),
        ui_s=ui,
        tau_s=tau,
        clock_period_s=period,
        tap_offset_nominal_s=phi * period,
        seed=cfg.seed,
        sampler_mode="phase",
    )


# ---------------------------------------------------------------------------
# analysis of simulation results
# ---------------------------------------------------------------------------


@dataclass
class EyeHistogram:
    """2-D transition histogram: time since the most recent sampling edge
    (mod 1 UI) versus the post-transition signal level."""

    bin_width_ui: float
    counts: np.ndarray          # shape (2, n_bins), row = new level
    n_binned: int
    n_skipped: int

    @property
    def n_bins(self) -> int:
        return self.counts.shape[1]

    @property
    def bin_centers(self) -> np.ndarray:
        """Bin k is centered at k * bin_width (wrapping circularly), so a
        transition sitting exactly on a grid point stays in one bin."""
        return np.arange(self.n_bins) * self.bin_width_ui

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def eye_capture(result: SimResult, bin_width_ui: float = 0.005) -> EyeHistogram:
    """Histogram each data transition at (t - most recent sampling edge) mod 1 UI."""
    edges = result.sampling_instants
    if edges.size < 1:
        raise ParameterError("result contains no sampling edges")
    if not 0 < bin_width_ui <= 1:
        raise ParameterError("bin_width_ui must be in (0, 1]")
    t_tr, levels = result.data_transition_log
    if t_tr.size == 0:
        raise ParameterError("result carries no transition log (record_waveforms off?)")
    pos = np.searchsorted(edges, t_tr, side="right") - 1
    valid = pos >= 0
    rel = (t_tr[valid] - edges[pos[valid]]) / result.ui_s
    x = np.mod(rel, 1.0)
    n_bins = max(1, int(round(1.0 / bin_width_ui)))
    bin_idx = np.floor(x * n_bins + 0.5).astype(np.int64) % n_bins
    counts = np.zeros((2, n_bins), dtype=np.int64)
    lv = levels[valid].astype(np.int64)
    np.add.at(counts, (lv, bin_idx), 1)
    return EyeHistogram(bin_width_ui=1.0 / n_bins, counts=counts,
                        n_binned=int(valid.sum()), n_skipped=int((~valid).sum()))


def edge_crossing_offsets(result: SimResult):
    """Crossing offsets around the sampled bit, in UI.

    left: distance from each transition to the NEXT sampling edge (the
    resynced clock is slaved to the transition, so this family is tight).
    right: distance from each transition back to the PREVIOUS sampling
    edge (accumulates oscillator drift and data jitter over the run).
    """
    edges = result.sampling_instants
    t_tr, _ = result.data_transition_log
    if edges.size < 2 or t_tr.size == 0:
        raise ParameterError("need sampling edges and a transition log")
    pos = np.searchsorted(edges, t_tr, side="right")
    has_prev = pos >= 1
    has_next = pos < edges.size
    right = (t_tr[has_prev] - edges[pos[has_prev] - 1]) / result.ui_s
    left = (edges[pos[has_next]] - t_tr[has_next]) / result.ui_s
    return left, right


@dataclass
class EyeOpening:
    left_ui: float       # signed inner boundary of the left crossing cloud
    right_ui: float      # signed inner boundary of the right crossing cloud
    midpoint_ui: float   # opening midpoint relative to the sampling instant
    width_ui: float


def eye_opening(result: SimResult, inner_quantile: float = 0.01) -> EyeOpening:
    """Opening of the eye around the sampling instant.

    Each transition is placed at its signed offset from the NEAREST
    sampling edge; the opening spans from the ``1 - q`` quantile of the
    left (negative) cloud to the ``q`` quantile of the right (positive)
    cloud, so a few stray crossings do not collapse the estimate.
    """
    edges = result.sampling_instants
    t_tr, _ = result.data_transition_log
    if edges.size < 2 or t_tr.size == 0:
        raise ParameterError("need sampling edges and a transition log")
    pos = np.searchsorted(edges, t_tr, side="right")
    inner = (pos >= 1) & (pos < edges.size)
    t = t_tr[inner]
    prev_off = t - edges[pos[inner] - 1]
    next_off = t - edges[pos[inner]]
    signed = np.where(prev_off <= -next_off, prev_off, next_off) / result.ui_s
    left_cloud = signed[signed < 0]
    right_cloud = signed[signed > 0]
    if left_cloud.size == 0 or right_cloud.size == 0:
        raise ParameterError("crossing clouds are one-sided; cannot bound an opening")
    left = float(np.quantile(left_cloud, 1.0 - inner_quantile))
    right = float(np.quantile(right_cloud, inner_quantile))
    return EyeOpening(left_ui=left, right_ui=right,
                      midpoint_ui=0.5 * (left + right), width_ui=right - left)


def resync_check(result: SimResult, tol_ui: float = _RESYNC_TOL_UI):
    """(n_edges, n_missed, max_consecutive_missed) over the resync log.

    A resync is missed when the sampling edge nearest its nominal
    post-resync point deviates by more than ``tol_ui``.  The default
    tolerance is 0.1 UI; a short delay line displaces resyncs by the
    deterministic T/2 - tau, so studies of that mechanism should pass a
    tolerance below the displacement they expect to catch.
    """
    _, dev = result.resync_events
    n = int(dev.size)
    missed = np.abs(dev) > tol_ui
    n_missed = int(missed.sum())
    max_run = 0
    run = 0
    for m in missed:
        run = run + 1 if m else 0
        if run > max_run:
            max_run = run
    return n, n_missed, max_run


def ckj_rms_cid5_from_osc(osc: OscillatorConfig, phi: float, data_rate_hz: float) -> float:
    """Sampling-clock jitter at the 5th sample of a run, UI RMS.

    The k-th sample sits 8(k-1+phi) stage delays after the resync, each
    delay jittered independently, so sigma(k) = d*jit*sqrt(8(k-1+phi)).
    """
    d = osc.period_s / 8.0
    return d * osc.jit_sigma * math.sqrt(8.0 * (4.0 + phi)) * data_rate_hz


def jit_sigma_for_ckj(ckj_rms_cid5: float, phi: float, data_rate_hz: float,
                      f_eff_hz: float) -> float:
    """Per-stage jitter ratio that reproduces a target ckj_rms_cid5."""
    d_ui = data_rate_hz / (8.0 * f_eff_hz)
    return ckj_rms_cid5 / (d_ui * math.sqrt(8.0 * (4.0 + phi)))
