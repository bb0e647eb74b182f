"""Closed-form cavity mode geometry and frequency bookkeeping."""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy.constants import c

from .geometry import CavityConfig, DomainError, stability_parameter


class ZigzagSolution(NamedTuple):
    tan_delta: float
    l: float
    delta: float


class ModeFrequencies(NamedTuple):
    fsr_on: float
    fsr_zig: float
    linewidth_on: float
    linewidth_zig: float


@dataclass(frozen=True)
class ModeGeometry:
    beam_sep_l: float
    zig_length: float
    waist_w0: float
    delta_angle: float
    operating_yaw: float


def no_pendulum_zigzag(g: float, R: float) -> ZigzagSolution:
    """Self-replicating zigzag path of the bare cavity.

    Returns the tilt of the parallel end beams (tan delta) and their
    separation ``l``. The path only exists for g > 1/2.
    """
    if not 0.5 < g <= 1.0:
        raise DomainError(f"configuration only exists if g>1/2 (got g={g})")
    tan_delta = np.sqrt((2 * g + 5) * (2 * g - 1)) / (2 * g**2 + 4 * g - 1)
    delta = float(np.arctan(tan_delta))
    l = R * np.sin(delta) * (1 + g)
    return ZigzagSolution(float(tan_delta), float(l), delta)


def beam_separation(g: float, R: float) -> float:
    """Zigzag beam separation from the direct closed form in g."""
    if not 0.5 < g <= 1.0:
        raise DomainError(f"configuration only exists if g>1/2 (got g={g})")
    return float(R * np.sqrt(1 - 0.25 / (g**2 + 2 * g - 1)))


def required_cavity_length(l_target: float, R: float) -> float:
    """Mirror separation whose bare zigzag has beam separation ``l_target``."""
    l_max = R * np.sqrt(7 / 8)
    if not 0 < l_target < l_max:
        raise DomainError(f"l_target must lie in (0, {l_max:.6g}) m for R={R} m")
    q2 = (l_target / R) ** 2
    g = -1 + np.sqrt(2 + 0.25 / (1 - q2))
    return float(R * (1 - g))


def beam_waist(cfg: CavityConfig) -> float:
    g = stability_parameter(cfg)
    if not 0 <= g < 1:
        raise DomainError(f"waist defined only for 0 <= g < 1 (got g={g})")
    return float(np.sqrt(cfg.lam * cfg.L / (2 * np.pi)) * ((1 + g) / (1 - g)) ** 0.25)


def zigzag_mode_length(L: float, l: float, g: float) -> float:
    return 2 * L - l**2 / (2 * L) * g / (1 + g)


def mode_frequencies(cfg: CavityConfig, l: Optional[float] = None) -> ModeFrequencies:
    """Free spectral ranges and full linewidths of the on-axis and zigzag modes.

    ``l`` defaults to the bare-cavity zigzag separation.
    """
    g = stability_parameter(cfg)
    if l is None:
        l = no_pendulum_zigzag(g, cfg.R).l
    fsr_on = c / (2 * cfg.L)
    fsr_zig = c / (2 * zigzag_mode_length(cfg.L, l, g))
    return ModeFrequencies(fsr_on, fsr_zig, fsr_on / cfg.finesse_on, fsr_zig / cfg.finesse_zig)


def transverse_mode_spacing(cfg: CavityConfig, order_a: int, order_b: int) -> float:
    """Distance from transverse order ``order_a`` to the nearest resonance of ``order_b``.

    The Gouy offset is folded modulo one FSR so the nearer neighbouring
    longitudinal resonance is reported.
    """
    g = stability_parameter(cfg)
    if not 0 <= g <= 1:
        raise DomainError(f"transverse spacing needs 0 <= g <= 1 (got g={g})")
    fsr = c / (2 * cfg.L)
    offset = abs(order_b - order_a) * fsr * np.arccos(g) / np.pi
    folded = np.fmod(offset, fsr)
    return float(min(folded, fsr - folded))


def mode_geometry(cfg: CavityConfig, l: Optional[float] = None, operating_yaw: Optional[float] = None) -> ModeGeometry:
    """Collect the bare-cavity zigzag quantities into a ModeGeometry.

    When ``l`` is given (e.g. from a ray trace) it replaces the bare-cavity
    separation; ``operating_yaw`` defaults to the end-beam tilt delta.
    """
    g = stability_parameter(cfg)
    delta = float("nan")
    if 0.5 < g <= 1:
        sol = no_pendulum_zigzag(g, cfg.R)
        delta = sol.delta
        if l is None:
            l = sol.l
    if l is None:
        raise DomainError("no bare zigzag for g <= 1/2; pass l explicitly")
    if l >= cfg.R:
        raise DomainError("beam separation must be smaller than R")
    return ModeGeometry(
        beam_sep_l=float(l),
        zig_length=zigzag_mode_length(cfg.L, l, g),
        waist_w0=beam_waist(cfg),
        delta_angle=delta,
        operating_yaw=delta if operating_yaw is None else float(operating_yaw),
    )
