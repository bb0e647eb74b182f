"""Reference configurations used by the CLI defaults and the test suite."""
from __future__ import annotations

import numpy as np

from .geometry import CavityConfig, PendulumPose, PendulumSpec

# Experimental cavity: 50 mm mirrors at the length that gives an ~11 mm zigzag
EXPERIMENTAL_L = 24.8e-3
EXPERIMENTAL_R = 50e-3
DESIGN_YAW = np.radians(8.5)
DESIGN_BEND = np.radians(0.2)

# Projected mg-scale setup used for the noise budget
NOISE_CAVITY_L = 0.05
NOISE_CAVITY_R = 0.10


def experimental_cavity() -> CavityConfig:
    return CavityConfig(L=EXPERIMENTAL_L, R=EXPERIMENTAL_R, lam=780e-9, finesse_on=880.0, finesse_zig=230.0)


def experimental_pendulum(delta_alpha: float = 0.0, delta_beta: float = 0.0) -> PendulumSpec:
    """11 mm wide test pendulum.

    Faces are placed through the centroid (zero face offset) so the traced
    round trip equals the zigzag mode length; the mass only matters for
    inertia bookkeeping.
    """
    return PendulumSpec(
        width_l=11e-3,
        height_h=7e-3,
        thickness_t=2e-3,
        mass_m=1e-3,
        delta_alpha=delta_alpha,
        delta_beta=delta_beta,
        aperture_radius=3.5e-3,
        hole_radius=1e-3,
        face_offset=0.0,
    )


def design_pose() -> PendulumPose:
    return PendulumPose(yaw_alpha=DESIGN_YAW)
