"""Ring-oscillator phase-noise budgeting and the power trade-off sweep.

Thermal noise sets a floor on the timing-jitter proportionality constant
kappa of a current-mode-logic ring stage; RMS jitter accumulated over an
elapsed time dt is kappa * sqrt(dt).  Sweeping the stage bias current maps
the power-versus-jitter trade-off and anchors the sampling-clock jitter
fed to the statistical BER model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ParameterError, TargetUnreachableError

K_BOLTZMANN = 1.380649e-23  # J/K


@dataclass(frozen=True)
class OscParams:
    """Stage-level oscillator parameters.

    i_ss: stage bias current, A.
    r_l: stage load resistance, ohm.
    delta_v: signal swing, V.
    gamma: device noise factor.
    eta: rise-time to cell-delay ratio.
    temperature: K.
    n_stages: ring length (4 for this topology).
    v_dd: supply, V (power accounting only).
    """

    i_ss: float
    r_l: float
    delta_v: float
    gamma: float = 1.0
    eta: float = 1.0
    temperature: float = 300.0
    n_stages: int = 4
    v_dd: float = 1.8

    def __post_init__(self):
        for name in ("i_ss", "r_l", "delta_v", "gamma", "eta", "temperature", "v_dd"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ParameterError(f"{name} must be > 0 and finite, got {v!r}")
        if self.n_stages < 1:
            raise ParameterError(f"n_stages must be >= 1, got {self.n_stages}")


@dataclass(frozen=True)
class TradeoffPoint:
    i_ss: float            # A
    power: float           # W
    kappa: float           # sqrt(s)
    sigma_cid5_ui: float   # UI RMS at the configured CID


def kappa_min(p: OscParams) -> float:
    """Thermal-noise floor of the jitter constant, sqrt(seconds).

    kappa = sqrt( 8 k T / (3 eta I_SS) * (gamma/deltaV + 1/(R_L I_SS)) )
    """
    if p.i_ss != p.i_ss or p.i_ss <= 0:
        raise ParameterError("i_ss must be positive")
    term = p.gamma / p.delta_v + 1.0 / (p.r_l * p.i_ss)
    return math.sqrt((8.0 * K_BOLTZMANN * p.temperature) / (3.0 * p.eta * p.i_ss) * term)


def sigma_after(kappa: float, delta_t: float) -> float:
    """RMS timing jitter in seconds after ``delta_t`` seconds: kappa*sqrt(dt)."""
    if delta_t < 0:
        raise ParameterError(f"delta_t must be >= 0, got {delta_t}")
    if kappa < 0:
        raise ParameterError(f"kappa must be >= 0, got {kappa}")
    return kappa * math.sqrt(delta_t)


def _sigma_ui(p: OscParams, i_ss: float, data_rate: float, cid: int, phi: float) -> float:
    from dataclasses import replace
    kap = kappa_min(replace(p, i_ss=i_ss))
    ui = 1.0 / data_rate
    return sigma_after(kap, (cid - 1 + phi) * ui) / ui


def tradeoff_curve(p: OscParams, i_ss_values, data_rate: float, cid: int = 5,
                   phi: float = 0.5) -> list[TradeoffPoint]:
    """Power and accumulated sampling-clock jitter per candidate bias current.

    Power is n_stages * I_SS * V_DD (constant-bias current-mode stages);
    jitter is evaluated at the sampling instant of the last bit of a
    ``cid``-long run, (cid - 1 + phi) unit intervals after a resync.
    """
    vals = [float(v) for v in i_ss_values]
    if not vals:
        raise ParameterError("i_ss_values must be non-empty")
    if any(b <= a for a, b in zip(vals, vals[1:])):
        raise ParameterError("i_ss_values must be strictly ascending")
    if vals[0] <= 0:
        raise ParameterError("i_ss_values must be positive")
    if cid < 1:
        raise ParameterError(f"cid must be >= 1, got {cid}")
    if data_rate <= 0:
        raise ParameterError("data_rate must be > 0")
    from dataclasses import replace
    points = []
    for i_ss in vals:
        kap = kappa_min(replace(p, i_ss=i_ss))
        points.append(TradeoffPoint(
            i_ss=i_ss,
            power=p.n_stages * i_ss * p.v_dd,
            kappa=kap,
            sigma_cid5_ui=_sigma_ui(p, i_ss, data_rate, cid, phi),
        ))
    return points


def required_iss(p: OscParams, target_sigma_ui: float, data_rate: float,
                 cid: int = 5, phi: float = 0.5,
                 bracket: tuple[float, float] = (1e-6, 0.1),
                 rel_tol: float = 1e-3) -> float:
    """Minimal stage bias meeting a sampling-clock jitter target.

    Bisection on the strictly decreasing sigma(I_SS); raises
    TargetUnreachableError when the bracket does not straddle the target.
    """
    if target_sigma_ui <= 0:
        raise TargetUnreachableError("target sigma must be > 0")
    lo, hi = bracket
    if not 0 < lo < hi:
        raise ParameterError(f"invalid bracket {bracket!r}")
    s_lo = _sigma_ui(p, lo, data_rate, cid, phi)
    s_hi = _sigma_ui(p, hi, data_rate, cid, phi)
    if s_lo < target_sigma_ui:
        return lo  # even the smallest bias beats the target
    if s_hi > target_sigma_ui:
        raise TargetUnreachableError(
            f"sigma at bracket top {s_hi:.3e} UI still above target {target_sigma_ui:.3e} UI")
    while hi / lo - 1.0 > rel_tol:
        mid = math.sqrt(lo * hi)
        if _sigma_ui(p, mid, data_rate, cid, phi) > target_sigma_ui:
            lo = mid
        else:
            hi = mid
    return hi
