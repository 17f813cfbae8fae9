"""gocdr: simulation and analysis workbench for gated-oscillator CDR circuits.

Capabilities: jitter PDF algebra, PRBS7 / run-length-limited stream
generation, a semi-analytic BER engine reaching 1e-12 targets, a
continuous-time event simulator of the edge-detector / gated-ring /
sampler chain, jitter- and frequency-tolerance searches, and the
oscillator phase-noise versus power trade-off.
"""

__version__ = "0.1.0"

from .errors import (BracketError, ConfigError, GocdrError, InvalidStateError,
                     ParameterError, SimulationOverflowError,
                     SupportExceededError, TargetUnreachableError)
from .jitter import (DEFAULT_STEP, EdgeJitterSampler, JitterSpec, Pdf, UiTime,
                     convolve, delta_pdf, dj_pdf, rj_pdf,
                     sample_edge_jitter, seconds_to_ui,
                     sj_differential_amplitude, sj_differential_pdf,
                     tail_prob, ui_to_seconds)
from .streams import (PRBS7_PERIOD, Prbs7, RunDist, prbs7_next, prbs7_period,
                      rll_stream, run_length_histogram)
from .statber import (BerSurface, CdrStatConfig, ber_breakdown, ber_estimate,
                      ber_surface, last_bit_late_term, phase_error_pdf,
                      sampling_time, sigma_osc, with_sj)
from .phasenoise import (K_BOLTZMANN, OscParams, TradeoffPoint, kappa_min,
                         required_iss, sigma_after, tradeoff_curve)
from .eventsim import (EdgeDetectorConfig, EyeHistogram, EyeOpening,
                       OscillatorConfig, PatternConfig, SamplerConfig,
                       SimConfig, SimResult, ckj_rms_cid5_from_osc,
                       edge_crossing_offsets, eye_capture, eye_opening,
                       jit_sigma_for_ckj, resync_check, simulate, stage_delay,
                       tap_nominal_offset_s, tap_rising_eighths)
from .tolerance import (JtolCurve, JtolPoint, MaskMarginPoint, ToleranceMask,
                        ftol_search, jtol_curve, mask_margin)
