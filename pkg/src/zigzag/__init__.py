"""Zigzag-cavity readout of a torsion pendulum: geometry, ray tracing, noise budget."""
from .geometry import CavityConfig, DomainError, PendulumPose, PendulumSpec
from .raytrace import NoConvergence, NoSolution, RayPath, solve_zigzag_path

__all__ = [
    "CavityConfig", "DomainError", "PendulumPose", "PendulumSpec",
    "NoConvergence", "NoSolution", "RayPath", "solve_zigzag_path",
]
__version__ = "0.1.0"
