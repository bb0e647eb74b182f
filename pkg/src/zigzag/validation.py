"""Cross-checks between the closed-form models and the numerical engines.

Each check returns a CheckResult; ``run_suite`` collects them. The
randomized checks draw poses from a seeded generator so a run is
reproducible.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from scipy.constants import c

from . import noise, sensing_range
from .geometry import CavityConfig, PendulumPose, PendulumSpec, basis
from .modes import beam_separation, no_pendulum_zigzag
from .presets import DESIGN_YAW, experimental_cavity, experimental_pendulum
from .raytrace import solve_zigzag_path
from .sensitivity import finite_difference_sensitivities, pitch_sensitivity

TRANSLATION_RTOL = 1e-3
TRANSLATION_ATOL = 1e-12  # m, solver floor on path differences
FORMS_RTOL = 1e-10
OVERLAP_ATOL = 1e-10
PSD_RTOL = 1e-12


@dataclass
class CheckResult:
    name: str
    passed: bool
    worst: float
    tolerance: float
    detail: str = ""

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag} {self.name}: worst={self.worst:.3e} tol={self.tolerance:.1e} {self.detail}".rstrip()


def _spec_with_bends(base: PendulumSpec, da: float, db: float) -> PendulumSpec:
    return PendulumSpec(base.width_l, base.height_h, base.thickness_t, base.mass_m, base.density,
                        da, db, base.aperture_radius, base.hole_radius, base.face_offset)


def check_translation_oracle(cfg: CavityConfig, spec: PendulumSpec, rng: np.random.Generator,
                             n: int = 1000, model_delta_alpha: Optional[float] = None,
                             yaw0: float = DESIGN_YAW) -> CheckResult:
    """Random bends, poses and translations: traced path change vs the linear model.

    The model error is measured relative to |v.n_da da| + |v.n_db db| with a
    1e-12 m floor. ``model_delta_alpha`` overrides the bend fed to the model
    (negative control).
    """
    worst = 0.0
    for _ in range(n):
        da, db = rng.uniform(-3e-3, 3e-3, 2)
        a = yaw0 + rng.uniform(-1e-2, 1e-2)
        b = rng.uniform(-5e-3, 5e-3)
        v = rng.uniform(-10e-6, 10e-6, 3)
        s = _spec_with_bends(spec, da, db)
        pose = PendulumPose(a, b)
        ref = solve_zigzag_path(cfg, s, pose)
        moved = solve_zigzag_path(cfg, s, pose.shifted(v=v), guess=ref)
        ds = moved.roundtrip_s - ref.roundtrip_s
        _, n_da, n_db = basis(a, b)
        da_model = da if model_delta_alpha is None else model_delta_alpha
        t1, t2 = (v @ n_da) * da_model, (v @ n_db) * db
        err = abs(ds - (t1 + t2)) / (abs(t1) + abs(t2) + TRANSLATION_ATOL / TRANSLATION_RTOL)
        worst = max(worst, err)
    return CheckResult("translation_path_change", worst <= TRANSLATION_RTOL, worst, TRANSLATION_RTOL,
                       f"n={n}")


def check_roll_oracle(cfg: CavityConfig, spec: PendulumSpec, rng: np.random.Generator,
                      n: int = 200, yaw0: float = DESIGN_YAW) -> CheckResult:
    """Bend-free roll at small pitch: traced path change vs gamma * l * beta."""
    s = _spec_with_bends(spec, 0.0, 0.0)
    worst = 0.0
    for _ in range(n):
        a = yaw0 + rng.uniform(-1e-2, 1e-2)
        b = rng.uniform(-1e-3, 1e-3)
        g = rng.uniform(-1e-4, 1e-4)
        pose = PendulumPose(a, b)
        ref = solve_zigzag_path(cfg, s, pose)
        moved = solve_zigzag_path(cfg, s, pose.shifted(roll=g), guess=ref)
        model = g * ref.beam_separation * b
        err = abs(moved.roundtrip_s - ref.roundtrip_s - model) / (abs(model) + TRANSLATION_ATOL / TRANSLATION_RTOL)
        worst = max(worst, err)
    return CheckResult("roll_path_change", worst <= TRANSLATION_RTOL, worst, TRANSLATION_RTOL, f"n={n}")


def check_yaw_slope(cfg: CavityConfig, spec: PendulumSpec, pose: PendulumPose) -> CheckResult:
    """Traced yaw slope vs the stationary-path lever arm.

    Rotating the faces about the vertical through the centroid changes the
    path by z.sum((P_i - C) x n_i) per radian; with parallel faces that is
    minus the beam separation.
    """
    rep = finite_difference_sensitivities(cfg, spec, pose, cross_terms=False)
    ref = solve_zigzag_path(cfg, spec, pose)
    C = pose.v
    arm = np.cross(ref.P1 - C, ref.n1)[2] + np.cross(ref.P2 - C, ref.n2)[2]
    model = -c / cfg.lam * arm / ref.roundtrip_s
    err = abs(rep.yaw_hz_per_rad / model - 1)
    return CheckResult("yaw_slope_vs_lever_arm", err <= 1e-6, err, 1e-6)


def check_pitch_small_yaw(cfg: CavityConfig, spec: PendulumSpec, yaw: float = np.radians(0.25)) -> CheckResult:
    """Traced pitch curvature vs the closed form, which is exact only as yaw -> 0."""
    # near-normal incidence puts the beams on the center, so use an unbored face
    flat = PendulumSpec(spec.width_l, spec.height_h, spec.thickness_t, spec.mass_m, spec.density,
                        face_offset=spec.face_offset, aperture_radius=spec.width_l)
    rep = finite_difference_sensitivities(cfg, flat, PendulumPose(yaw), cross_terms=False)
    model, _ = pitch_sensitivity(cfg)
    err = abs(abs(rep.pitch2_hz_per_rad2) / model - 1)
    return CheckResult("pitch_curvature_small_yaw", err <= 1e-3, err, 1e-3, f"yaw={np.degrees(yaw):.2f} deg")


def check_gauge(cfg: CavityConfig, spec: PendulumSpec, rng: np.random.Generator, n: int = 20) -> CheckResult:
    """Moving cavity and pendulum together leaves the round trip unchanged.

    Bends are switched on so that a pendulum-only translation would not
    pass the check.
    """
    worst = 0.0
    for _ in range(n):
        off = rng.uniform(-1e-4, 1e-4, 3)
        s = _spec_with_bends(spec, *rng.uniform(-3e-3, 3e-3, 2))
        pose = PendulumPose(DESIGN_YAW + rng.uniform(-1e-2, 1e-2), rng.uniform(-5e-3, 5e-3))
        a = solve_zigzag_path(cfg, s, pose)
        b = solve_zigzag_path(cfg, s, pose, cavity_offset=off)
        worst = max(worst, abs(b.roundtrip_s - a.roundtrip_s))
    return CheckResult("gauge_invariance", worst <= TRANSLATION_ATOL, worst, TRANSLATION_ATOL, "m")


def check_beam_separation_forms(R: float = 50e-3, n: int = 500) -> CheckResult:
    """Bare-cavity beam separation from the tilt solution vs the direct g-form."""
    gs = np.linspace(0.5, 1.0, n + 2)[1:]
    worst = max(abs(no_pendulum_zigzag(g, R).l / beam_separation(g, R) - 1) for g in gs)
    return CheckResult("beam_separation_forms", worst <= FORMS_RTOL, worst, FORMS_RTOL, f"g in (0.5, 1], n={n}")


def check_overlap(g: float = 0.504, w0: float = 73e-6, lam: float = 780e-9, n: int = 101) -> CheckResult:
    d_alpha = np.linspace(0, 5 * lam / (np.pi * w0), n)
    worst = 0.0
    for da in d_alpha:
        r = sensing_range.coupling_efficiency(da * g, g, w0, lam)
        worst = max(worst, abs(r.coupling_efficiency - r.closed_form))
    return CheckResult("overlap_quadrature", worst <= OVERLAP_ATOL, worst, OVERLAP_ATOL, f"n={n}")


def check_psd_representations(p: noise.NoiseParams = noise.NoiseParams()) -> CheckResult:
    b = noise.total_budget(p)
    chi2 = noise.susceptibility(2 * np.pi * b.freq, p)
    worst = 0.0
    for src in (*noise.SOURCES, "total"):
        worst = max(worst, np.max(np.abs(b.angle[src] / (chi2 * b.torque[src]) - 1)))
        worst = max(worst, np.max(np.abs(b.freq_noise[src] / (b.yaw_slope_hz_per_rad**2 * b.angle[src]) - 1)))
    return CheckResult("psd_representations", worst <= PSD_RTOL, worst, PSD_RTOL)


def run_suite(seed: int = 0, n_random: int = 1000, model_delta_alpha: Optional[float] = None,
              cfg: Optional[CavityConfig] = None, spec: Optional[PendulumSpec] = None,
              params: Optional[noise.NoiseParams] = None) -> List[CheckResult]:
    cfg = cfg or experimental_cavity()
    spec = spec or experimental_pendulum()
    rng = np.random.default_rng(seed)
    t0 = time.perf_counter()
    results = [
        check_translation_oracle(cfg, spec, rng, n_random, model_delta_alpha),
        check_roll_oracle(cfg, spec, rng, max(1, n_random // 5)),
        check_yaw_slope(cfg, spec, PendulumPose(DESIGN_YAW)),
        check_pitch_small_yaw(cfg, spec),
        check_gauge(cfg, spec, rng),
        check_beam_separation_forms(cfg.R),
        check_overlap(),
        check_psd_representations(params or noise.NoiseParams()),
    ]
    elapsed = time.perf_counter() - t0
    results.append(CheckResult("runtime", elapsed < 60.0, elapsed, 60.0, "s"))
    return results
