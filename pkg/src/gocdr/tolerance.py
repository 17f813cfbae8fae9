"""Jitter-tolerance extraction, frequency-tolerance search, mask comparison.

Both searches ride on the statistical BER engine: targets around 1e-12 are
far beyond Monte Carlo reach, and the engine is monotone in sinusoidal
amplitude and in the frequency offset magnitude, so bisection applies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import BracketError, ParameterError
from .statber import CdrStatConfig, ber_estimate, with_sj


@dataclass(frozen=True)
class JtolPoint:
    sj_freq_norm: float
    max_sj_amp_pp: float      # amplitude at target BER, or the bracket top
    unbounded: bool           # BER stayed under target up to the bracket top


@dataclass(frozen=True)
class JtolCurve:
    points: tuple[JtolPoint, ...]

    def __post_init__(self):
        freqs = [p.sj_freq_norm for p in self.points]
        if any(b <= a for a, b in zip(freqs, freqs[1:])):
            raise ParameterError("curve frequencies must be strictly increasing")

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)


def jtol_curve(cfg: CdrStatConfig, sj_freq_norms, target_ber: float | None = None,
               amp_bracket: tuple[float, float] = (0.0, 4.0),
               rel_resolution: float = 0.01) -> JtolCurve:
    """Max tolerable sinusoidal amplitude per frequency at the target BER.

    Per frequency: bisection on the amplitude to ``rel_resolution``; points
    whose BER stays below target even at the bracket top are flagged
    unbounded (at integer frequencies the per-run sinusoid differential
    vanishes identically, so the tolerance genuinely diverges).
    """
    target = cfg.target_ber if target_ber is None else target_ber
    lo0, hi0 = amp_bracket
    if not (0.0 <= lo0 < hi0):
        raise BracketError(f"invalid amplitude bracket {amp_bracket!r}")
    points = []
    for f in sj_freq_norms:
        if ber_estimate(with_sj(cfg, f, hi0)) <= target:
            points.append(JtolPoint(f, hi0, True))
            continue
        if ber_estimate(with_sj(cfg, f, lo0)) > target:
            points.append(JtolPoint(f, lo0, False))
            continue
        lo, hi = lo0, hi0
        while hi - lo > rel_resolution * hi:
            mid = 0.5 * (lo + hi)
            if ber_estimate(with_sj(cfg, f, mid)) > target:
                hi = mid
            else:
                lo = mid
        points.append(JtolPoint(f, 0.5 * (lo + hi), False))
    return JtolCurve(tuple(points))


def ftol_search(cfg: CdrStatConfig, target_ber: float | None = None,
                eps_bracket: tuple[float, float] = (0.0, 0.4),
                abs_resolution: float = 1e-4) -> float:
    """Maximal positive frequency offset keeping BER at or under target."""
    target = cfg.target_ber if target_ber is None else target_ber
    lo, hi = eps_bracket
    if not (0.0 <= lo < hi < 0.5):
        raise BracketError(f"invalid eps bracket {eps_bracket!r}")
    if ber_estimate(replace(cfg, freq_offset_eps=lo)) > target:
        raise BracketError(f"BER already above target at eps={lo}")
    if ber_estimate(replace(cfg, freq_offset_eps=hi)) <= target:
        raise BracketError(f"BER still below target at eps={hi}; widen the bracket")
    while hi - lo > abs_resolution:
        mid = 0.5 * (lo + hi)
        if ber_estimate(replace(cfg, freq_offset_eps=mid)) > target:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class ToleranceMask:
    """Specification floor for jitter tolerance, log-log piecewise linear.

    breakpoints: ((freq_norm, amp_ui), ...) with strictly increasing
    frequencies.  Queries outside the range extrapolate the edge segments.
    """

    breakpoints: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if len(self.breakpoints) < 2:
            raise ParameterError("mask needs at least 2 breakpoints")
        fs = [f for f, _ in self.breakpoints]
        if any(b <= a for a, b in zip(fs, fs[1:])):
            raise ParameterError("mask frequencies must be strictly increasing")
        if any(f <= 0 or a <= 0 for f, a in self.breakpoints):
            raise ParameterError("mask breakpoints must be positive")

    def amp_at(self, freq_norm: float) -> float:
        if freq_norm <= 0:
            raise ParameterError("query frequency must be > 0")
        lf = [math.log(f) for f, _ in self.breakpoints]
        la = [math.log(a) for _, a in self.breakpoints]
        x = math.log(freq_norm)
        if x <= lf[0]:
            i = 0
        elif x >= lf[-1]:
            i = len(lf) - 2
        else:
            i = int(np.searchsorted(lf, x, side="right")) - 1
        slope = (la[i + 1] - la[i]) / (lf[i + 1] - lf[i])
        return math.exp(la[i] + slope * (x - lf[i]))

    def in_range(self, freq_norm: float) -> bool:
        return self.breakpoints[0][0] <= freq_norm <= self.breakpoints[-1][0]


@dataclass(frozen=True)
class MaskMarginPoint:
    freq_norm: float
    jtol_amp_ui: float
    mask_amp_ui: float
    margin_ui: float
    passed: bool
    extrapolated: bool


def mask_margin(curve: JtolCurve, mask: ToleranceMask) -> list[MaskMarginPoint]:
    """Tolerance-minus-mask margin at every curve frequency.

    Unbounded curve points always pass (their margin uses the bracket top
    they were searched to).
    """
    out = []
    for p in curve:
        m = mask.amp_at(p.sj_freq_norm)
        margin = p.max_sj_amp_pp - m
        out.append(MaskMarginPoint(
            freq_norm=p.sj_freq_norm,
            jtol_amp_ui=p.max_sj_amp_pp,
            mask_amp_ui=m,
            margin_ui=margin,
            passed=bool(p.unbounded or margin >= 0.0),
            extrapolated=not mask.in_range(p.sj_freq_norm),
        ))
    return out
