"""Coordinate conventions and configuration types.

Frame: origin at the cavity center, x along the line joining the two
spherical-mirror centers, z vertical. Mirror 1 sits on the +x side with its
center of curvature at x = L/2 - R; mirror 2 mirrors it on the -x side.
All angles are radians.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

SMALL_ANGLE_LIMIT = 0.1


class DomainError(ValueError):
    """Raised when a configuration lies outside the domain of a formula."""


@dataclass(frozen=True)
class CavityConfig:
    """Symmetric two-mirror cavity.

    Parameters
    ----------
    L : float
        Mirror separation [m].
    R : float
        Radius of curvature of both mirrors [m].
    lam : float
        Optical wavelength [m].
    finesse_on, finesse_zig : float
        Finesse of the on-axis and zigzag modes.
    """

    L: float
    R: float
    lam: float = 780e-9
    finesse_on: float = 880.0
    finesse_zig: float = 230.0

    def __post_init__(self):
        if not (self.L > 0 and self.R > 0 and self.lam > 0):
            raise DomainError("L, R and lam must be positive")
        if not (self.finesse_on > 1 and self.finesse_zig > 1):
            raise DomainError("finesse values must exceed 1")

    @property
    def g(self) -> float:
        return stability_parameter(self)

    @property
    def center_1(self) -> np.ndarray:
        """Center of curvature of mirror 1 (the +x mirror)."""
        return np.array([self.L / 2 - self.R, 0.0, 0.0])

    @property
    def center_2(self) -> np.ndarray:
        return np.array([self.R - self.L / 2, 0.0, 0.0])


@dataclass(frozen=True)
class PendulumSpec:
    """Rigid pendulum body carrying a reflective face on each side.

    ``width_l`` is the center-to-center separation of the two end mirrors,
    ``delta_alpha``/``delta_beta`` the relative yaw/pitch bend between the two
    faces. Either ``mass_m`` or ``density`` must be given.
    ``aperture_radius`` bounds where a ray may land on a face around each
    mirror center (defaults to half the width); ``hole_radius`` is the
    central through-hole. ``face_offset`` is the normal distance from the
    centroid to each reflecting face; it defaults to half the thickness.
    """

    width_l: float
    height_h: float
    thickness_t: float
    mass_m: Optional[float] = None
    density: Optional[float] = None
    delta_alpha: float = 0.0
    delta_beta: float = 0.0
    aperture_radius: Optional[float] = None
    hole_radius: float = 0.0
    face_offset: Optional[float] = None

    def __post_init__(self):
        if min(self.width_l, self.height_h, self.thickness_t) <= 0:
            raise DomainError("pendulum dimensions must be positive")
        if self.mass_m is None and self.density is None:
            raise DomainError("give either mass_m or density")
        if self.mass_m is not None and self.mass_m <= 0:
            raise DomainError("mass must be positive")
        if self.density is not None and self.density <= 0:
            raise DomainError("density must be positive")
        if abs(self.delta_alpha) >= SMALL_ANGLE_LIMIT or abs(self.delta_beta) >= SMALL_ANGLE_LIMIT:
            raise DomainError("face bends must stay below 0.1 rad")
        if self.face_offset is not None and self.face_offset < 0:
            raise DomainError("face_offset must be non-negative")

    @property
    def mass(self) -> float:
        if self.mass_m is not None:
            return self.mass_m
        return self.density * self.width_l * self.height_h * self.thickness_t

    @property
    def face_distance(self) -> float:
        return self.thickness_t / 2 if self.face_offset is None else self.face_offset

    @property
    def aperture(self) -> float:
        return self.width_l / 2 if self.aperture_radius is None else self.aperture_radius

    def inertia_yaw(self) -> float:
        """Moment of inertia about the vertical axis (bar of width l, thickness t)."""
        return self.mass * (self.width_l**2 + self.thickness_t**2) / 12

    def inertia_roll(self) -> float:
        """Moment of inertia for rotation within the face plane (about the face normal)."""
        return self.mass * (self.width_l**2 + self.height_h**2) / 12

    def inertia_pitch(self) -> float:
        """Moment of inertia about the long horizontal axis."""
        return self.mass * (self.height_h**2 + self.thickness_t**2) / 12


@dataclass(frozen=True)
class PendulumPose:
    """Kinematic pose of the pendulum centroid: yaw, pitch, roll and translation."""

    yaw_alpha: float = 0.0
    pitch_beta: float = 0.0
    roll_gamma: float = 0.0
    translation_v: tuple = field(default=(0.0, 0.0, 0.0))

    def __post_init__(self):
        v = tuple(float(x) for x in self.translation_v)
        if len(v) != 3:
            raise DomainError("translation_v must be a 3-vector")
        object.__setattr__(self, "translation_v", v)

    @property
    def v(self) -> np.ndarray:
        return np.asarray(self.translation_v, dtype=float)

    def shifted(self, yaw=0.0, pitch=0.0, roll=0.0, v=(0.0, 0.0, 0.0)) -> "PendulumPose":
        """Return a new pose offset by the given increments."""
        return PendulumPose(
            self.yaw_alpha + yaw,
            self.pitch_beta + pitch,
            self.roll_gamma + roll,
            tuple(self.v + np.asarray(v, dtype=float)),
        )


def stability_parameter(cfg: CavityConfig) -> float:
    return 1.0 - cfg.L / cfg.R


def direction(alpha: float, beta: float) -> np.ndarray:
    """Unit vector at yaw ``alpha`` and pitch ``beta``: Rz(alpha) Ry(-beta) x."""
    cb = np.cos(beta)
    return np.array([np.cos(alpha) * cb, np.sin(alpha) * cb, np.sin(beta)])


def basis(alpha: float, beta: float):
    """Orthonormal triad (n0, n_dalpha, n_dbeta) attached to a pose.

    n_dalpha is the horizontal in-face direction (the long axis of the bar)
    and n_dbeta the in-face direction that is vertical at zero pitch.
    """
    sa, ca = np.sin(alpha), np.cos(alpha)
    sb, cb = np.sin(beta), np.cos(beta)
    n0 = np.array([ca * cb, sa * cb, sb])
    n_da = np.array([-sa, ca, 0.0])
    n_db = np.array([-ca * sb, -sa * sb, cb])
    return n0, n_da, n_db


def rotation_about(axis: np.ndarray, angle: float) -> np.ndarray:
    """Rodrigues rotation matrix for a right-handed rotation about ``axis``."""
    k = np.asarray(axis, dtype=float)
    k = k / np.linalg.norm(k)
    K = np.array([[0.0, -k[2], k[1]], [k[2], 0.0, -k[0]], [-k[1], k[0], 0.0]])
    return np.eye(3) + np.sin(angle) * K + (1 - np.cos(angle)) * (K @ K)


def roll_axis(pose: PendulumPose) -> np.ndarray:
    """Horizontal axis at the pose's yaw; roll turns the bar within its face plane."""
    return np.array([np.cos(pose.yaw_alpha), np.sin(pose.yaw_alpha), 0.0])


def pose_rotation(pose: PendulumPose) -> np.ndarray:
    """Rotation applied on top of the yaw/pitch parametrization (roll only)."""
    return rotation_about(roll_axis(pose), pose.roll_gamma)


def pendulum_normals(spec: PendulumSpec, pose: PendulumPose):
    """Face normals (n1, n2) of the pendulum.

    n1 is the direction of the ray leaving mirror 1 toward the pendulum, so
    it points along -x near the identity pose; n2 points along +x. Each is
    built exactly as a rotation of x by yaw alpha -/+ dalpha/2 and pitch
    beta -/+ dbeta/2, then rolled about the horizontal axis.
    """
    a, b = pose.yaw_alpha, pose.pitch_beta
    da, db = spec.delta_alpha, spec.delta_beta
    rot = pose_rotation(pose)
    n1 = -(rot @ direction(a - da / 2, b - db / 2))
    n2 = rot @ direction(a + da / 2, b + db / 2)
    return n1, n2


def first_order_normals(spec: PendulumSpec, pose: PendulumPose):
    """Linearized face normals, first order in the bends (no roll)."""
    n0, n_da, n_db = basis(pose.yaw_alpha, pose.pitch_beta)
    corr = np.cos(pose.pitch_beta) * spec.delta_alpha / 2 * n_da + spec.delta_beta / 2 * n_db
    return -n0 + corr, n0 + corr


def long_axis(pose: PendulumPose) -> np.ndarray:
    """Bar long axis (through both end mirrors) in the lab frame."""
    _, n_da, _ = basis(pose.yaw_alpha, pose.pitch_beta)
    return pose_rotation(pose) @ n_da
