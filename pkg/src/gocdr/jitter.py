"""Timing-jitter models: source definitions, per-edge sampling, and PDF algebra.

All phase quantities are expressed in unit intervals (UI), one UI being one
bit period of the nominal data rate.  Jitter PDFs are numeric densities on
uniform grids of phase error; the algebra (construction, convolution, tail
integration) is the foundation of both the statistical BER engine and the
event-driven simulator.

Conventions:

* A multi-bin density is normalized so that its trapezoidal integral is 1.
* A single-bin ``Pdf`` is a point mass; its integral is 1 by definition and
  its density value is ``1/step``.
* Densities built from discontinuous distributions (uniform, arcsine) are
  bin averages of the exact CDF, so integrable endpoint singularities and
  support edges are captured without aliasing.
* Gaussian-derived PDFs carry an analytic tail tag so probabilities far
  below the grid floor (down to 1e-12 and beyond) stay resolvable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf, erfc

_trapezoid = getattr(np, "trapezoid", None) or np.trapz

from .errors import ParameterError, SupportExceededError

# One bit period of the data stream, as a plain float in UI.
UiTime = float

DEFAULT_STEP = 1e-4          # UI, resolves reference jitter budgets with >=200 bins
DEFAULT_SUPPORT_UI = 2.0     # UI, default half-support for constructed PDFs
MAX_SUPPORT_UI = 32.0        # UI, convolution guard rail


def ui_to_seconds(value_ui: float, data_rate_hz: float) -> float:
    """Convert a UI quantity to seconds at the given data rate."""
    return value_ui / data_rate_hz


def seconds_to_ui(value_s: float, data_rate_hz: float) -> float:
    """Convert seconds to UI at the given data rate."""
    return value_s * data_rate_hz


def _require_finite(name, value, minimum=None, strict=False):
    if not math.isfinite(value):
        raise ParameterError(f"{name} must be finite, got {value!r}")
    if minimum is not None and (value <= minimum if strict else value < minimum):
        op = ">" if strict else ">="
        raise ParameterError(f"{name} must be {op} {minimum}, got {value!r}")
    return float(value)


@dataclass(frozen=True)
class JitterSpec:
    """Amplitudes of the four jitter sources applied in a simulation.

    dj_pp: deterministic jitter, UI peak-peak (uniform per edge).
    rj_rms: random jitter, UI RMS (Gaussian per edge).
    sj_amp_pp: sinusoidal jitter, UI peak-peak.
    sj_freq_norm: sinusoid frequency as a fraction of the data rate.
    ckj_rms_cid5: sampling-clock jitter, UI RMS accumulated over a
        5-bit run (used by the statistical engine; the event simulator
        derives clock jitter from the oscillator config instead).
    """

    dj_pp: float = 0.0
    rj_rms: float = 0.0
    sj_amp_pp: float = 0.0
    sj_freq_norm: float = 0.0
    ckj_rms_cid5: float = 0.0

    def __post_init__(self):
        for name in ("dj_pp", "rj_rms", "sj_amp_pp", "sj_freq_norm", "ckj_rms_cid5"):
            _require_finite(name, getattr(self, name), minimum=0.0)

    def is_zero(self) -> bool:
        return (self.dj_pp == 0 and self.rj_rms == 0 and self.sj_amp_pp == 0
                and self.ckj_rms_cid5 == 0)


class Pdf:
    """Numeric probability density on a uniform grid of phase error (UI).

    Attributes:
        origin: grid position of the first density sample, UI.
        step: grid spacing, UI (> 0).
        density: non-negative density samples, 1/UI.
    """

    __slots__ = ("origin", "step", "density", "gauss_mu", "gauss_sigma")

    def __init__(self, origin, step, density, gauss_mu=None, gauss_sigma=None,
                 _normalize=True):
        if not (step > 0 and math.isfinite(step)):
            raise ParameterError(f"step must be > 0, got {step!r}")
        density = np.asarray(density, dtype=float)
        if density.ndim != 1 or density.size == 0:
            raise ParameterError("density must be a non-empty 1-D array")
        if not np.all(np.isfinite(density)):
            raise ParameterError("density must be finite")
        if np.any(density < 0):
            # tolerate tiny negative round-off from convolution, reject real negatives
            if density.min() < -1e-12 * max(density.max(), 1.0):
                raise ParameterError("density must be non-negative")
            density = np.clip(density, 0.0, None)
        self.origin = float(origin)
        self.step = float(step)
        if density.size == 1:
            density = np.array([1.0 / self.step])
        elif _normalize:
            total = _trapezoid(density, dx=self.step)
            if total <= 0:
                raise ParameterError("density integrates to zero")
            density = density / total
        self.density = density
        self.gauss_mu = gauss_mu
        self.gauss_sigma = gauss_sigma

    # -- basic queries ---------------------------------------------------

    @property
    def is_point_mass(self) -> bool:
        return self.density.size == 1

    @property
    def loc(self) -> float:
        """Location of a point mass (only meaningful when is_point_mass)."""
        return self.origin

    @property
    def grid(self) -> np.ndarray:
        return self.origin + self.step * np.arange(self.density.size)

    @property
    def support(self):
        """(low, high) grid extent in UI."""
        return self.origin, self.origin + self.step * (self.density.size - 1)

    def integral(self) -> float:
        if self.is_point_mass:
            return 1.0
        return float(_trapezoid(self.density, dx=self.step))

    def mean(self) -> float:
        if self.is_point_mass:
            return self.origin
        return float(_trapezoid(self.grid * self.density, dx=self.step))

    def var(self) -> float:
        if self.is_point_mass:
            return 0.0
        m = self.mean()
        return float(_trapezoid((self.grid - m) ** 2 * self.density, dx=self.step))

    def masses(self) -> np.ndarray:
        """Per-grid-point probability masses (sum to 1)."""
        if self.is_point_mass:
            return np.array([1.0])
        m = self.density * self.step
        return m / m.sum()

    def shifted(self, offset: float) -> "Pdf":
        mu = None if self.gauss_mu is None else self.gauss_mu + offset
        return Pdf(self.origin + offset, self.step, self.density,
                   gauss_mu=mu, gauss_sigma=self.gauss_sigma, _normalize=False)

    def __repr__(self):
        lo, hi = self.support
        kind = "point" if self.is_point_mass else f"{self.density.size} bins"
        return f"Pdf([{lo:.6g}, {hi:.6g}] UI, step={self.step:g}, {kind})"


def _bin_averaged(cdf, lo, hi, step, gauss_mu=None, gauss_sigma=None) -> Pdf:
    """Build a Pdf whose bins hold the exact CDF mass over each bin."""
    n = int(math.ceil((hi - lo) / step)) + 3
    xs = (lo - step) + step * np.arange(n)
    density = (cdf(xs + 0.5 * step) - cdf(xs - 0.5 * step)) / step
    return Pdf(xs[0], step, density, gauss_mu=gauss_mu, gauss_sigma=gauss_sigma)


def delta_pdf(loc: float = 0.0, step: float = DEFAULT_STEP) -> Pdf:
    """Point mass at ``loc``."""
    _require_finite("loc", loc)
    return Pdf(loc, step, [1.0])


def dj_pdf(dj_pp: float, step: float = DEFAULT_STEP) -> Pdf:
    """Deterministic jitter: uniform density on [-dj_pp/2, +dj_pp/2]."""
    dj_pp = _require_finite("dj_pp", dj_pp, minimum=0.0)
    _require_finite("step", step, minimum=0.0, strict=True)
    if dj_pp == 0.0:
        return delta_pdf(0.0, step)
    a = dj_pp / 2.0

    def cdf(x):
        return np.clip((x + a) / (2 * a), 0.0, 1.0)

    return _bin_averaged(cdf, -a, a, step)


def rj_pdf(sigma: float, step: float = DEFAULT_STEP, support_sigmas: float = 8.0) -> Pdf:
    """Random jitter: zero-mean Gaussian truncated at +-support_sigmas*sigma.

    The result is tagged with its exact (mu, sigma) so tail probabilities
    beyond the grid are computed analytically.
    """
    sigma = _require_finite("sigma", sigma, minimum=0.0)
    _require_finite("step", step, minimum=0.0, strict=True)
    if support_sigmas < 8.0:
        raise ParameterError(f"support_sigmas must be >= 8, got {support_sigmas}")
    half = support_sigmas * sigma
    if sigma == 0.0 or 2.0 * half < step:
        # the whole bell fits inside one grid bin
        return delta_pdf(0.0, step)

    def cdf(x):
        return 0.5 * (1.0 + erf(np.asarray(x) / (sigma * math.sqrt(2.0))))

    return _bin_averaged(cdf, -half, half, step, gauss_mu=0.0, gauss_sigma=sigma)


def sj_differential_amplitude(sj_amp_pp: float, sj_freq_norm: float, n_bits: int) -> float:
    """Half-range of SJ(t + n UI) - SJ(t): sj_amp_pp * |sin(pi f n)|.

    Exactly zero whenever f*n is an integer (the sinusoid repeats after a
    whole number of bits, so the differential vanishes).
    """
    sj_amp_pp = _require_finite("sj_amp_pp", sj_amp_pp, minimum=0.0)
    sj_freq_norm = _require_finite("sj_freq_norm", sj_freq_norm, minimum=0.0)
    if n_bits < 1:
        raise ParameterError(f"n_bits must be >= 1, got {n_bits}")
    s = math.sin(math.pi * sj_freq_norm * n_bits)
    if abs(s) < 1e-12:
        return 0.0
    return sj_amp_pp * abs(s)


def sj_differential_pdf(sj_amp_pp: float, sj_freq_norm: float, n_bits: int,
                        step: float = DEFAULT_STEP) -> Pdf:
    """PDF of the sinusoidal-jitter differential over ``n_bits`` bit periods.

    With the sinusoid phase uniformly random, sin(theta+phi) - sin(theta) =
    2 sin(phi/2) cos(theta + phi/2) is arcsine-distributed on [-a, +a] with
    a = sj_amp_pp * |sin(pi * sj_freq_norm * n_bits)|.  Endpoint bins are
    filled from exact CDF differences (the density diverges at +-a).
    """
    a = sj_differential_amplitude(sj_amp_pp, sj_freq_norm, n_bits)
    _require_finite("step", step, minimum=0.0, strict=True)
    if a == 0.0 or a < step / 2:
        return delta_pdf(0.0, step)

    def cdf(x):
        u = np.clip(np.asarray(x, dtype=float) / a, -1.0, 1.0)
        return 0.5 + np.arcsin(u) / math.pi

    return _bin_averaged(cdf, -a, a, step)


def _resample(p: Pdf, step: float) -> Pdf:
    """Linear-interpolate a density onto a finer grid step."""
    if p.is_point_mass:
        return Pdf(p.origin, step, [1.0])
    n = int(math.ceil((p.density.size - 1) * p.step / step)) + 1
    xs = p.origin + step * np.arange(n)
    density = np.interp(xs, p.grid, p.density)
    return Pdf(p.origin, step, density)


def convolve(a: Pdf, b: Pdf, max_support_ui: float = MAX_SUPPORT_UI) -> Pdf:
    """Density of the sum of two independent phase errors.

    Point masses shift the other operand exactly.  Gaussian tags survive
    only shifts and Gaussian*Gaussian combinations; any other mix drops
    the analytic-tail tag.
    """
    if a.is_point_mass:
        return b.shifted(a.loc)
    if b.is_point_mass:
        return a.shifted(b.loc)
    step = min(a.step, b.step)
    if abs(a.step - b.step) > 1e-12 * step:
        a = _resample(a, step) if a.step > step else a
        b = _resample(b, step) if b.step > step else b
    span = (a.density.size + b.density.size - 2) * step
    if span > 2 * max_support_ui:
        raise SupportExceededError(
            f"convolution support {span:.3g} UI exceeds +-{max_support_ui} UI")
    density = np.convolve(a.density, b.density) * step
    mu = sig = None
    if a.gauss_sigma is not None and b.gauss_sigma is not None:
        mu = a.gauss_mu + b.gauss_mu
        sig = math.hypot(a.gauss_sigma, b.gauss_sigma)
    return Pdf(a.origin + b.origin, step, density, gauss_mu=mu, gauss_sigma=sig)


def tail_prob(p: Pdf, threshold: float, side: str = "above") -> float:
    """Probability mass on one side of ``threshold``.

    Gaussian-tagged PDFs are integrated analytically (complementary error
    function), so thresholds far beyond the grid truncation still resolve.
    Bounded PDFs integrate their grid with the trapezoid rule, linearly
    interpolated at the threshold.
    """
    if side not in ("above", "below"):
        raise ParameterError(f"side must be 'above' or 'below', got {side!r}")
    if math.isinf(threshold):
        outside = (threshold > 0) == (side == "above")
        return 0.0 if outside else 1.0
    if p.gauss_sigma is not None:
        z = (threshold - p.gauss_mu) / (p.gauss_sigma * math.sqrt(2.0))
        upper = 0.5 * erfc(z)
        return upper if side == "above" else 1.0 - upper
    if p.is_point_mass:
        if side == "above":
            return 1.0 if p.loc > threshold else 0.0
        return 1.0 if p.loc < threshold else 0.0
    lo, hi = p.support
    if threshold <= lo:
        return 1.0 if side == "above" else 0.0
    if threshold >= hi:
        return 0.0 if side == "above" else 1.0
    xs = p.grid
    idx = int(np.searchsorted(xs, threshold, side="right"))
    # trapezoid mass strictly above the threshold
    d_thr = float(np.interp(threshold, xs, p.density))
    above = float(_trapezoid(p.density[idx:], dx=p.step)) if idx < xs.size else 0.0
    above += 0.5 * (d_thr + p.density[idx]) * (xs[idx] - threshold) if idx < xs.size else 0.0
    above = min(max(above, 0.0), 1.0)
    return above if side == "above" else 1.0 - above


# -- per-edge sampling ---------------------------------------------------


def sample_edge_jitter(spec: JitterSpec, t_abs_s: float, rng: np.random.Generator,
                       *, data_rate_hz: float, theta0: float = 0.0) -> float:
    """Draw one edge displacement in UI for an edge at absolute time t_abs_s.

    Sum of a uniform draw on +-dj_pp/2, a Gaussian draw with sigma rj_rms,
    and the sinusoid (sj_amp_pp/2) sin(2 pi f_sj t + theta0) evaluated at
    the edge's nominal time.  The rng state advances; theta0 is fixed per
    simulation (derive it once from the seed).
    """
    d = 0.0
    if spec.dj_pp > 0:
        d += rng.uniform(-spec.dj_pp / 2.0, spec.dj_pp / 2.0)
    if spec.rj_rms > 0:
        d += rng.normal(0.0, spec.rj_rms)
    if spec.sj_amp_pp > 0:
        f_sj = spec.sj_freq_norm * data_rate_hz
        d += (spec.sj_amp_pp / 2.0) * math.sin(2.0 * math.pi * f_sj * t_abs_s + theta0)
    return d


class EdgeJitterSampler:
    """Stateful per-edge jitter source with a simulation-fixed SJ phase.

    One instance per logical stream; the only mutable state is the
    generator it owns.
    """

    def __init__(self, spec: JitterSpec, data_rate_hz: float,
                 rng: np.random.Generator, theta0: float | None = None):
        if data_rate_hz <= 0 or not math.isfinite(data_rate_hz):
            raise ParameterError(f"data_rate_hz must be > 0, got {data_rate_hz!r}")
        self.spec = spec
        self.data_rate_hz = data_rate_hz
        self.rng = rng
        self.theta0 = rng.uniform(0.0, 2.0 * math.pi) if theta0 is None else float(theta0)

    def draw(self, t_abs_s: float) -> float:
        return sample_edge_jitter(self.spec, t_abs_s, self.rng,
                                  data_rate_hz=self.data_rate_hz, theta0=self.theta0)

    def draw_many(self, t_abs_s: np.ndarray) -> np.ndarray:
        """Vectorized draw for a batch of edge times (uniforms first, then
        Gaussians, then the sinusoid; a fixed order keeps runs reproducible)."""
        t = np.asarray(t_abs_s, dtype=float)
        out = np.zeros_like(t)
        spec = self.spec
        if spec.dj_pp > 0:
            out += self.rng.uniform(-spec.dj_pp / 2.0, spec.dj_pp / 2.0, size=t.shape)
        if spec.rj_rms > 0:
            out += self.rng.normal(0.0, spec.rj_rms, size=t.shape)
        if spec.sj_amp_pp > 0:
            f_sj = spec.sj_freq_norm * self.data_rate_hz
            out += (spec.sj_amp_pp / 2.0) * np.sin(2.0 * np.pi * f_sj * t + self.theta0)
        return out
