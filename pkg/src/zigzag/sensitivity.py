"""Closed-form zigzag sensitivities and their finite-difference counterparts.

Closed forms return magnitudes. The finite-difference report keeps the sign
of the traced resonance shift, -(c/lam) ds/s to first order: a yaw toward
larger angle shortens the path, so its traced slope is positive, and pitch
raises the frequency on both sides of beta = 0.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np
from scipy.constants import c

from .geometry import CavityConfig, DomainError, PendulumPose, PendulumSpec, basis, stability_parameter
from .modes import ModeGeometry
from .raytrace import offset_pose, shift_between, solve_zigzag_path

ANGLE_STEP = 1e-8  # rad
LENGTH_STEP = 1e-9  # m
CURVATURE_STEP = 1e-4  # rad; a 1e-8 step would leave the quadratic term below round-off
CROSS_STEPS = {"yaw": 1e-6, "pitch": 1e-6, "roll": 1e-6, "transverse": 1e-6, "longitudinal": 1e-6, "z": 1e-6}


@dataclass
class SensitivityReport:
    yaw_hz_per_rad: float
    yaw_S: float
    pitch2_hz_per_rad2: float
    pitch2_S2: float
    transverse_hz_per_m: float
    transverse_S: float
    roll_hz_per_rad: float
    method: str
    steps: Dict[str, float] = field(default_factory=dict)
    errors: Dict[str, float] = field(default_factory=dict)
    cross_terms: Dict[Tuple[str, str], float] = field(default_factory=dict)
    notes: str = "end-point yaw sensitivity = yaw slope * 2/l"

    def endpoint_ratio(self, l: float) -> float:
        """Yaw response per pendulum end-point displacement over the transverse response."""
        return abs(self.yaw_hz_per_rad * 2 / l / self.transverse_hz_per_m)


def yaw_sensitivity(cfg: CavityConfig, mode: ModeGeometry):
    """Yaw slope (Hz/rad) and linewidth-normalized sensitivity S (1/rad)."""
    slope = c / cfg.lam * mode.beam_sep_l / mode.zig_length
    S = 2 * mode.beam_sep_l / cfg.lam * cfg.finesse_zig
    return slope, S


def pitch_sensitivity(cfg: CavityConfig):
    """Shift per squared pitch angle (Hz/rad^2) and second-order S (1/rad^2).

    Small-yaw limit: at the 8-9 degree operating yaw the traced curvature is
    about 2 % larger.
    """
    g = stability_parameter(cfg)
    if g <= 0:
        raise DomainError(f"pitch sensitivity diverges for g <= 0 (got g={g})")
    hz = c / cfg.lam * (1 + g) / (4 * g)
    S2 = cfg.L / cfg.lam * (1 + g) / g * cfg.finesse_zig
    return hz, S2


def transverse_sensitivity(cfg: CavityConfig, delta_alpha: float):
    """Shift per transverse translation (Hz/m) and S (1/m) caused by a yaw bend."""
    hz = c / cfg.lam * delta_alpha / (2 * cfg.L)
    S = 2 * delta_alpha / cfg.lam * cfg.finesse_zig
    return hz, S


def translation_path_change(v, phi, alpha, beta, delta_alpha, delta_beta):
    """Path change from an in-plane translation of magnitude ``v`` at azimuth ``phi``."""
    return v * np.sin(phi - alpha) * delta_alpha - v * beta * np.cos(phi - alpha) * delta_beta


def translation_path_change_3d(v, alpha, beta, delta_alpha, delta_beta):
    """First-order path change for an arbitrary translation vector ``v``."""
    _, n_da, n_db = basis(alpha, beta)
    v = np.asarray(v, dtype=float)
    return (v @ n_da) * delta_alpha + (v @ n_db) * delta_beta


def roll_path_change(gamma, width_l, beta):
    return gamma * width_l * beta


def z_translation_path_change(v, delta_beta):
    return v * delta_beta


def roll_mode_translation(gamma, I_roll, xi, m):
    """Transverse translation accompanying a roll angle in the roll normal mode.

    Sign convention: translation and roll share sign in the swing normal mode.
    """
    if xi <= 0:
        raise DomainError("fiber length xi must be positive")
    return -(I_roll / (xi * m)) * gamma


def closed_form_report(cfg: CavityConfig, mode: ModeGeometry, delta_alpha: float, beta: float = 0.0) -> SensitivityReport:
    yaw_hz, yaw_S = yaw_sensitivity(cfg, mode)
    p_hz, p_S = pitch_sensitivity(cfg)
    t_hz, t_S = transverse_sensitivity(cfg, delta_alpha)
    roll_hz = c / cfg.lam * roll_path_change(1.0, mode.beam_sep_l, beta) / mode.zig_length
    return SensitivityReport(yaw_hz, yaw_S, p_hz, p_S, t_hz, t_S, roll_hz, "closed-form")


def _richardson(f, h):
    """Central difference at h and h/2 combined to cancel the h^2 term."""
    d1 = (f(h) - f(-h)) / (2 * h)
    d2 = (f(h / 2) - f(-h / 2)) / h
    best = (4 * d2 - d1) / 3
    return best, abs(best - d2)


def finite_difference_sensitivities(
    cfg: CavityConfig,
    spec: PendulumSpec,
    pose: PendulumPose,
    angle_step: float = ANGLE_STEP,
    length_step: float = LENGTH_STEP,
    curvature_step: float = CURVATURE_STEP,
    cross_terms: bool = True,
) -> SensitivityReport:
    """Sensitivities extracted from the ray tracer around ``pose``.

    First derivatives use Richardson-extrapolated central differences; the
    pitch curvature uses a larger step. ``errors`` holds the difference
    between the extrapolated and the finer plain estimate.
    """
    ref = solve_zigzag_path(cfg, spec, pose)

    def shift(dof):
        def f(x):
            if x == 0:
                return 0.0
            path = solve_zigzag_path(cfg, spec, offset_pose(pose, dof, x), guess=ref)
            return shift_between(cfg, ref, path)
        return f

    yaw, yaw_err = _richardson(shift("yaw"), angle_step)
    trans, trans_err = _richardson(shift("transverse"), length_step)
    roll, roll_err = _richardson(shift("roll"), angle_step)

    fp = shift("pitch")
    h = curvature_step
    c1 = (fp(h) + fp(-h)) / (2 * h**2)
    c2 = (fp(h / 2) + fp(-h / 2)) / (2 * (h / 2) ** 2)
    curv = (4 * c2 - c1) / 3

    l = ref.beam_separation
    # S = shift / full linewidth, linewidth = c / (2 s F)
    to_S = 2 * cfg.finesse_zig * ref.roundtrip_s / c
    report = SensitivityReport(
        yaw_hz_per_rad=yaw,
        yaw_S=to_S * abs(yaw),
        pitch2_hz_per_rad2=curv,
        pitch2_S2=to_S * abs(curv),
        transverse_hz_per_m=trans,
        transverse_S=to_S * abs(trans),
        roll_hz_per_rad=roll,
        method="finite-difference",
        steps={"angle": angle_step, "length": length_step, "pitch_curvature": curvature_step},
        errors={"yaw": yaw_err, "transverse": trans_err, "roll": roll_err, "pitch_curvature": abs(curv - c2)},
    )
    report.notes += f"; traced beam separation l={l:.9e} m, s={ref.roundtrip_s:.9e} m"
    if cross_terms:
        report.cross_terms = mixed_derivatives(cfg, spec, pose, ref)
    return report


def mixed_derivatives(cfg, spec, pose, ref=None, steps: Optional[Dict[str, float]] = None):
    """Mixed second derivatives of the shift (Hz per unit^2) for every DOF pair."""
    steps = steps or CROSS_STEPS
    ref = ref or solve_zigzag_path(cfg, spec, pose)
    dofs = list(steps)

    def shift(p):
        return shift_between(cfg, ref, solve_zigzag_path(cfg, spec, p, guess=ref))

    out = {}
    for i, a in enumerate(dofs):
        for b in dofs[i + 1:]:
            ha, hb = steps[a], steps[b]
            vals = []
            for sa, sb in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
                p = offset_pose(offset_pose(pose, a, sa * ha), b, sb * hb)
                vals.append(sa * sb * shift(p))
            out[(a, b)] = sum(vals) / (4 * ha * hb)
    return out
