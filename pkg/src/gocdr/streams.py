"""Bit-stream generation and run-length statistics.

Provides the PRBS7 pattern generator (polynomial x^7 + x^6 + 1, the ITU
standard choice) and a run-length-limited random stream that stands in for
8b/10b-coded traffic by bounding consecutive identical digits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidStateError, ParameterError

PRBS7_PERIOD = 127
_PRBS7_MASK = 0x7F


def prbs7_next(state: int) -> tuple[int, int]:
    """Advance the PRBS7 LFSR one step; returns (bit, new_state).

    The emitted bit is the register MSB; feedback is taps 7 and 6.
    """
    if not 0 < state <= _PRBS7_MASK:
        raise InvalidStateError(f"PRBS7 state must be in 1..127, got {state}")
    bit = (state >> 6) & 1
    fb = ((state >> 6) ^ (state >> 5)) & 1
    return bit, ((state << 1) | fb) & _PRBS7_MASK


class Prbs7:
    """Maximal-length 7-bit LFSR sequence generator (period 127)."""

    def __init__(self, seed: int = 0x7F):
        if not 0 < seed <= _PRBS7_MASK:
            raise InvalidStateError(f"PRBS7 seed must be in 1..127, got {seed}")
        self.state = seed

    def next_bit(self) -> int:
        bit, self.state = prbs7_next(self.state)
        return bit

    def bits(self, n: int) -> np.ndarray:
        """Next ``n`` bits as a uint8 array."""
        if n < 0:
            raise ParameterError(f"n must be >= 0, got {n}")
        out = np.empty(n, dtype=np.uint8)
        state = self.state
        for i in range(n):
            bit, state = prbs7_next(state)
            out[i] = bit
        self.state = state
        return out


def prbs7_period(seed: int = 0x7F) -> np.ndarray:
    """One full period (127 bits) starting from ``seed``."""
    return Prbs7(seed).bits(PRBS7_PERIOD)


def rll_stream(max_cid: int, p_extend: float, rng: np.random.Generator,
               n_bits: int) -> np.ndarray:
    """Random stream whose runs never exceed ``max_cid`` bits.

    Each run extends one more bit with probability ``p_extend`` and is
    force-terminated at ``max_cid``; run values alternate, the first value
    is a fair draw from ``rng``.
    """
    if max_cid < 1:
        raise ParameterError(f"max_cid must be >= 1, got {max_cid}")
    if not 0.0 <= p_extend < 1.0:
        raise ParameterError(f"p_extend must be in [0, 1), got {p_extend}")
    if n_bits < 1:
        raise ParameterError(f"n_bits must be >= 1, got {n_bits}")
    value = int(rng.integers(0, 2))
    # Draw run lengths in bulk by inverting the truncated-geometric CDF.
    est = max(16, int(n_bits / max(1.0, 1.0 / (1.0 - p_extend))) + 64)
    lengths: list[np.ndarray] = []
    total = 0
    while total < n_bits:
        u = rng.random(est)
        if p_extend == 0.0:
            runs = np.ones(est, dtype=np.int64)
        else:
            # P(L > l) = p^l for l < max_cid, 0 at max_cid
            runs = np.minimum(
                np.floor(np.log(np.clip(u, 1e-300, None)) / math.log(p_extend)).astype(np.int64) + 1,
                max_cid)
            runs = np.maximum(runs, 1)
        lengths.append(runs)
        total += int(runs.sum())
    runs = np.concatenate(lengths)
    cut = int(np.searchsorted(np.cumsum(runs), n_bits)) + 1
    runs = runs[:cut]
    values = np.empty(runs.size, dtype=np.uint8)
    values[0::2] = value
    values[1::2] = 1 - value
    bits = np.repeat(values, runs)[:n_bits]
    return bits


@dataclass
class RunDist:
    """Distribution of maximal-run lengths, p[L] for L = 1..L_max."""

    probs: np.ndarray = field(default_factory=lambda: np.array([1.0]))

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise ParameterError("probs must be a non-empty 1-D array")
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise ParameterError("probs must be finite and non-negative")
        if abs(p.sum() - 1.0) > 1e-12:
            raise ParameterError(f"probs must sum to 1 within 1e-12, got {p.sum()!r}")
        self.probs = p

    @property
    def l_max(self) -> int:
        return self.probs.size

    def prob(self, length: int) -> float:
        if not 1 <= length <= self.l_max:
            return 0.0
        return float(self.probs[length - 1])

    def mean_run_length(self) -> float:
        return float(np.dot(self.probs, np.arange(1, self.l_max + 1)))

    @classmethod
    def truncated_geometric(cls, p_extend: float, max_cid: int) -> "RunDist":
        """Closed form of the rll_stream process: p_L = p^(L-1)(1-p) for
        L < max_cid and p_max = p^(max_cid-1)."""
        if max_cid < 1:
            raise ParameterError(f"max_cid must be >= 1, got {max_cid}")
        if not 0.0 <= p_extend < 1.0:
            raise ParameterError(f"p_extend must be in [0, 1), got {p_extend}")
        probs = np.array([p_extend ** (l - 1) * (1.0 - p_extend) for l in range(1, max_cid)]
                         + [p_extend ** (max_cid - 1)])
        return cls(probs)

    @classmethod
    def single(cls, length: int) -> "RunDist":
        """All runs exactly ``length`` bits."""
        probs = np.zeros(length)
        probs[-1] = 1.0
        return cls(probs)

    @classmethod
    def prbs7(cls) -> "RunDist":
        """Run-length distribution of one cyclic PRBS7 period."""
        return run_length_histogram(prbs7_period(), cyclic=True)


def _run_lengths(bits: np.ndarray) -> np.ndarray:
    edges = np.flatnonzero(np.diff(bits.astype(np.int8)) != 0)
    if edges.size == 0:
        return np.array([], dtype=np.int64)
    starts = edges + 1
    return np.diff(starts)


def run_length_histogram(bits, cyclic: bool = False) -> RunDist:
    """Normalized histogram of maximal-run lengths.

    Partial runs touching the sequence boundaries are discarded unless
    ``cyclic`` is set, in which case the sequence is rotated to start at a
    transition and every run counts once.
    """
    bits = np.asarray(bits, dtype=np.uint8).ravel()
    if bits.size < 2:
        raise ParameterError("need at least 2 bits")
    if cyclic:
        edges = np.flatnonzero(np.diff(bits.astype(np.int8)) != 0)
        if edges.size == 0:
            raise ParameterError("constant sequence has no runs")
        bits = np.roll(bits, -(edges[0] + 1))
        edges = np.flatnonzero(np.diff(bits.astype(np.int8)) != 0)
        bounds = np.concatenate(([-1], edges, [bits.size - 1]))
        lengths = np.diff(bounds)
    else:
        lengths = _run_lengths(bits)
        if lengths.size == 0:
            raise ParameterError("no interior runs (need >= 2 transitions)")
    counts = np.bincount(lengths)[1:]
    return RunDist(counts / counts.sum())
