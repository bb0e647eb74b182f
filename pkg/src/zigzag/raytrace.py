"""Self-replicating zigzag ray path for an arbitrary pendulum pose.

The reflection points M1, M2 on the spherical mirrors are found by requiring
each mirror normal to bisect the ray toward the other mirror and the ray
toward the pendulum face. Each M_i is parametrized by two spherical angles
about its center of curvature, so the sphere constraints hold identically
and the remaining system is 6x6 (two bisection vector equations). The face
points P1, P2 then follow from ray-plane intersection.

Gouy-phase contributions to the resonance shift are not modelled; only the
geometric path length enters.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, List, NamedTuple, Optional, Sequence

import numpy as np
from scipy.constants import c
from scipy.optimize import brentq

from .geometry import (
    CavityConfig,
    PendulumPose,
    PendulumSpec,
    long_axis,
    pendulum_normals,
)

log = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-12  # m
MAX_ITER = 50
GOUY_NOTE = "Gouy-phase contribution excluded; geometric path length only"
DOFS = ("yaw", "pitch", "roll", "transverse", "longitudinal", "x-axis", "z")


class NoConvergence(RuntimeError):
    """Damped Newton iteration did not reach the residual tolerance."""


class NoSolution(RuntimeError):
    """The pose admits no closed zigzag path on the pendulum faces."""


@dataclass(frozen=True)
class RayPath:
    M1: np.ndarray
    M2: np.ndarray
    P1: np.ndarray
    P2: np.ndarray
    roundtrip_s: float
    residual: float
    lambdas: tuple = (float("nan"), float("nan"))
    iterations: int = 0
    n1: np.ndarray = field(default=None, repr=False)
    n2: np.ndarray = field(default=None, repr=False)

    @property
    def beam_separation(self) -> float:
        """Distance between the two parallel arms M1P1 and M2P2."""
        d = self.P2 - self.P1
        u = self.n2 - self.n1
        u = u / np.linalg.norm(u)
        return float(np.linalg.norm(d - (d @ u) * u))


def _dir(a, b):
    cb = np.cos(b)
    return np.array([cb * np.cos(a), cb * np.sin(a), np.sin(b)])


def _dir_derivs(a, b):
    sa, ca, sb, cb = np.sin(a), np.cos(a), np.sin(b), np.cos(b)
    return np.array([-cb * sa, cb * ca, 0.0]), np.array([-sb * ca, -sb * sa, cb])


def _mirror_points(x, O1, O2, R):
    d1 = _dir(x[0], x[1])
    d2 = _dir(x[2], x[3])
    return O1 + R * d1, O2 - R * d2, d1, d2


def _residual(x, n1, n2, O1, O2, R):
    M1, M2, d1, d2 = _mirror_points(x, O1, O2, R)
    D = M2 - M1
    u = D / np.linalg.norm(D)
    # mu_i = lambda_i * R keeps the multipliers O(1)
    F1 = u + n1 + x[4] * d1
    F2 = -u + n2 - x[5] * d2
    return np.concatenate([F1, F2])


def _jacobian(x, O1, O2, R):
    M1, M2, d1, d2 = _mirror_points(x, O1, O2, R)
    D = M2 - M1
    dist = np.linalg.norm(D)
    u = D / dist
    P = (np.eye(3) - np.outer(u, u)) / dist
    d1a, d1b = _dir_derivs(x[0], x[1])
    d2a, d2b = _dir_derivs(x[2], x[3])
    J = np.zeros((6, 6))
    for col, dd in ((0, d1a), (1, d1b)):
        du = -P @ (R * dd)
        J[:3, col] = du + x[4] * dd
        J[3:, col] = -du
    for col, dd in ((2, d2a), (3, d2b)):
        du = P @ (-R * dd)
        J[:3, col] = du
        J[3:, col] = -du - x[5] * dd
    J[:3, 4] = d1
    J[3:, 5] = -d2
    return J


def _planar_seed(cfg: CavityConfig, alpha: float, n_grid: int = 4000) -> float:
    """Angle of M1 on its sphere for the symmetric in-plane path at yaw ``alpha``.

    Scans outward from the axis and returns the first root, which is the
    branch continuously connected to the on-axis path. Works for any g >= 0,
    including g <= 1/2 where the bare cavity has no zigzag of its own.
    """
    if alpha == 0:
        return 0.0
    x0 = cfg.L / 2 - cfg.R
    ta, tb = -np.cos(alpha), -np.sin(alpha)

    def f(th):
        nx, ny = np.cos(th), np.sin(th)
        mx, my = x0 + cfg.R * nx, cfg.R * ny
        norm = np.hypot(mx, my)
        dx, dy = mx / norm, my / norm
        dot = dx * nx + dy * ny
        rx, ry = dx - 2 * dot * nx, dy - 2 * dot * ny
        return rx * tb - ry * ta

    grid = -np.sign(alpha) * np.linspace(0.0, np.pi / 2 * 0.999, n_grid)
    vals = f(grid)
    idx = np.nonzero(np.sign(vals[1:]) != np.sign(vals[:-1]))[0]
    if idx.size == 0:
        raise NoSolution(f"no in-plane zigzag at yaw {alpha:.6g} rad")
    i = idx[0]
    return float(brentq(f, grid[i], grid[i + 1], xtol=1e-15))


def _state_from_path(path: RayPath, O1, O2, R) -> np.ndarray:
    d1 = (path.M1 - O1) / R
    d2 = -(path.M2 - O2) / R
    lam1, lam2 = path.lambdas
    return np.array([
        np.arctan2(d1[1], d1[0]), np.arcsin(np.clip(d1[2], -1, 1)),
        np.arctan2(d2[1], d2[0]), np.arcsin(np.clip(d2[2], -1, 1)),
        lam1 * R, lam2 * R,
    ])


def _seed_state(cfg, pose, n1, n2, O1, O2):
    th = _planar_seed(cfg, pose.yaw_alpha)
    x = np.array([th, 0.0, th, 0.0, 0.0, 0.0])
    M1, M2, d1, d2 = _mirror_points(x, O1, O2, cfg.R)
    u = (M2 - M1) / np.linalg.norm(M2 - M1)
    x[4] = -(u + n1) @ d1
    x[5] = (-u + n2) @ d2
    return x


def _newton(x, n1, n2, O1, O2, R, tol, max_iter):
    F = _residual(x, n1, n2, O1, O2, R)
    norm = np.linalg.norm(F)
    it = 0
    while R * norm >= tol:
        if it >= max_iter:
            raise NoConvergence(f"residual {R * norm:.3e} m after {it} iterations")
        J = _jacobian(x, O1, O2, R)
        try:
            step = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError as exc:
            raise NoConvergence("singular Jacobian") from exc
        t = 1.0
        while True:
            x_new = x + t * step
            F_new = _residual(x_new, n1, n2, O1, O2, R)
            norm_new = np.linalg.norm(F_new)
            if norm_new < norm or t < 1e-6:
                break
            t *= 0.5
        if norm_new >= norm:
            raise NoConvergence(f"line search stalled at residual {R * norm:.3e} m")
        x, F, norm = x_new, F_new, norm_new
        it += 1
    return x, R * norm, it


def solve_zigzag_path(
    cfg: CavityConfig,
    spec: PendulumSpec,
    pose: PendulumPose,
    guess: Optional[RayPath] = None,
    cavity_offset: Sequence[float] = (0.0, 0.0, 0.0),
    tol: float = RESIDUAL_TOL,
    max_iter: int = MAX_ITER,
    check_aperture: bool = True,
) -> RayPath:
    """Solve the closed zigzag path P1-M1-M2-P2 for a pendulum pose.

    Parameters
    ----------
    guess : RayPath, optional
        Previous solution used as the Newton seed (continuation). Without it
        the seed is the symmetric in-plane path at the pose's yaw.
    cavity_offset : 3-vector
        Rigid translation applied to cavity and pendulum together.

    Raises
    ------
    NoConvergence
        If damped Newton fails within ``max_iter`` iterations.
    NoSolution
        If a ray would have to travel backwards to its face or misses the
        reflective area of the face.
    """
    off = np.asarray(cavity_offset, dtype=float)
    O1 = cfg.center_1 + off
    O2 = cfg.center_2 + off
    n1, n2 = pendulum_normals(spec, pose)

    if guess is not None:
        x0 = _state_from_path(guess, O1, O2, cfg.R)
    else:
        x0 = _seed_state(cfg, pose, n1, n2, O1, O2)
    try:
        x, res, it = _newton(x0, n1, n2, O1, O2, cfg.R, tol, max_iter)
    except NoConvergence:
        if guess is None:
            raise
        log.debug("continuation seed failed, retrying from planar seed")
        x0 = _seed_state(cfg, pose, n1, n2, O1, O2)
        x, res, it = _newton(x0, n1, n2, O1, O2, cfg.R, tol, max_iter)

    M1, M2, _, _ = _mirror_points(x, O1, O2, cfg.R)
    centroid = off + pose.v
    h = spec.face_distance
    Q1 = centroid - h * n1
    Q2 = centroid - h * n2
    arm1 = (Q1 - M1) @ n1
    arm2 = (Q2 - M2) @ n2
    if arm1 <= 0 or arm2 <= 0:
        raise NoSolution("pendulum face lies behind a spherical-mirror reflection point")
    P1 = M1 + arm1 * n1
    P2 = M2 + arm2 * n2
    if check_aperture:
        _check_faces(spec, pose, P1, Q1, P2, Q2)
    s = float(arm1 + np.linalg.norm(M2 - M1) + arm2)
    return RayPath(M1, M2, P1, P2, s, float(res), (x[4] / cfg.R, x[5] / cfg.R), it, n1, n2)


def _check_faces(spec, pose, P1, Q1, P2, Q2):
    e = long_axis(pose)
    half = spec.width_l / 2
    for name, P, Q in (("P1", P1, Q1), ("P2", P2, Q2)):
        r_center = np.linalg.norm(P - Q)
        if r_center < spec.hole_radius:
            raise NoSolution(f"{name} falls into the central hole")
        miss = min(np.linalg.norm(P - (Q + half * e)), np.linalg.norm(P - (Q - half * e)))
        if miss > spec.aperture:
            raise NoSolution(f"{name} misses the end mirrors by {miss - spec.aperture:.3e} m")


def frequency_shift(
    cfg: CavityConfig,
    spec: PendulumSpec,
    pose_ref: PendulumPose,
    pose: PendulumPose,
    ref_path: Optional[RayPath] = None,
    guess: Optional[RayPath] = None,
) -> float:
    """Zigzag resonance shift (Hz) of ``pose`` relative to ``pose_ref``."""
    if ref_path is None:
        ref_path = solve_zigzag_path(cfg, spec, pose_ref)
    if pose == pose_ref:
        return 0.0
    path = solve_zigzag_path(cfg, spec, pose, guess=guess or ref_path)
    return shift_between(cfg, ref_path, path)


def shift_between(cfg: CavityConfig, ref_path: RayPath, path: RayPath) -> float:
    """Resonance shift (Hz) of the mode at c/lam when the path changes from ``ref_path`` to ``path``.

    A longer path lowers the frequency: nu = (c/lam) * s_ref / s.
    """
    return c / cfg.lam * (ref_path.roundtrip_s / path.roundtrip_s - 1.0)


def offset_pose(pose_ref: PendulumPose, dof: str, offset: float) -> PendulumPose:
    """Displace ``pose_ref`` by ``offset`` along one degree of freedom.

    Translations are taken relative to the reference yaw: ``transverse`` is
    along the bar's long axis, ``longitudinal`` along the face normal.
    """
    a = pose_ref.yaw_alpha
    if dof == "yaw":
        return pose_ref.shifted(yaw=offset)
    if dof == "pitch":
        return pose_ref.shifted(pitch=offset)
    if dof == "roll":
        return pose_ref.shifted(roll=offset)
    vectors = {
        "transverse": (-np.sin(a), np.cos(a), 0.0),
        "longitudinal": (np.cos(a), np.sin(a), 0.0),
        "x-axis": (1.0, 0.0, 0.0),
        "z": (0.0, 0.0, 1.0),
    }
    if dof not in vectors:
        raise ValueError(f"unknown degree of freedom {dof!r}; choose from {DOFS}")
    return pose_ref.shifted(v=offset * np.asarray(vectors[dof]))


class SweepResult(NamedTuple):
    offsets: np.ndarray
    shifts_hz: np.ndarray
    range_exceeded: bool
    failed_offset: Optional[float]
    message: str = ""


def sweep(
    cfg: CavityConfig,
    spec: PendulumSpec,
    pose_ref: PendulumPose,
    dof: str,
    grid: Iterable[float],
) -> SweepResult:
    """Continuation sweep of the resonance shift along one degree of freedom.

    Each solve is seeded with the previous one. The sweep stops at the first
    offset that has no closed path and flags ``range_exceeded``.
    """
    if dof not in DOFS:
        raise ValueError(f"unknown degree of freedom {dof!r}; choose from {DOFS}")
    ref = solve_zigzag_path(cfg, spec, pose_ref)
    prev = ref
    offsets: List[float] = []
    shifts: List[float] = []
    for off in grid:
        try:
            path = solve_zigzag_path(cfg, spec, offset_pose(pose_ref, dof, off), guess=prev)
        except (NoSolution, NoConvergence) as exc:
            return SweepResult(np.array(offsets), np.array(shifts), True, float(off), str(exc))
        offsets.append(float(off))
        shifts.append(shift_between(cfg, ref, path))
        prev = path
    return SweepResult(np.array(offsets), np.array(shifts), False, None)
