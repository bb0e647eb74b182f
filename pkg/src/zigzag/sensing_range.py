"""Coupling of a fixed input beam to a zigzag mode whose end beams tilt under yaw."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .geometry import DomainError

QUAD_SPAN = 6.0  # integration half-width in units of w0
QUAD_EPSABS = 1e-12


@dataclass(frozen=True)
class OverlapResult:
    delta_theta_yaw: float
    delta_alpha_tilt: float
    coupling_efficiency: float
    closed_form: float
    quad_error: float


def _overlap_amplitude(q: float, w0: float):
    # <psi(0)|psi(tilt)> for normalized 1D Gaussians, x = u w0; the tilt
    # contributes a phase exp(i q x), only the cosine survives.
    def integrand(u):
        return np.sqrt(2 / np.pi) * np.exp(-2 * u * u) * np.cos(q * w0 * u)

    return quad(integrand, -QUAD_SPAN, QUAD_SPAN, epsabs=QUAD_EPSABS, epsrel=1e-13, limit=200)


def coupling_efficiency(delta_theta: float, g: float, w0: float, lam: float) -> OverlapResult:
    """Intensity overlap after a pendulum yaw of ``delta_theta`` (rad).

    The end beams tilt by delta_alpha = delta_theta / g. The overlap is
    integrated numerically and returned together with the closed form
    exp(-(pi w0 delta_alpha / lam)^2).
    """
    if g <= 0:
        raise DomainError(f"coupling needs g > 0 (got g={g})")
    if w0 <= 0 or lam <= 0:
        raise DomainError("w0 and lam must be positive")
    d_alpha = delta_theta / g
    q = 2 * np.pi * d_alpha / lam
    amp, err = _overlap_amplitude(q, w0)
    closed = float(np.exp(-((np.pi * w0 * d_alpha / lam) ** 2)))
    return OverlapResult(float(delta_theta), float(d_alpha), float(min(max(amp * amp, 0.0), 1.0)), closed, float(2 * abs(amp) * err))


def sensing_range(g: float, w0: float, lam: float) -> float:
    """Full yaw span (rad) over which coupling stays above 1/e."""
    if w0 <= 0:
        raise DomainError("w0 must be positive")
    if g < 0:
        raise DomainError("g must be non-negative")
    return float(2 * g * lam / (np.pi * w0))


def range_by_root(g: float, w0: float, lam: float) -> float:
    """Twice the yaw at which the numerically integrated coupling reaches 1/e."""
    target = np.exp(-1.0)
    hi = 4 * g * lam / (np.pi * w0)
    theta = brentq(lambda t: coupling_efficiency(t, g, w0, lam).coupling_efficiency - target,
                   0.0, hi, xtol=1e-16, rtol=1e-13)
    return 2 * theta
