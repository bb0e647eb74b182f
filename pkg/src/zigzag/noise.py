"""Noise budget of a milligram-scale torsion pendulum read out by a zigzag cavity.

Four fundamental sources (suspension thermal, radiation-pressure back-action,
shot noise, mirror Brownian) plus thermal leakage from the transverse-swing
and roll modes. Every source is carried in torque (N^2 m^2/Hz), angle
(rad^2/Hz) and cavity-frequency (Hz^2/Hz) units.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Dict, Optional

import numpy as np
from scipy.constants import Boltzmann as kB
from scipy.constants import c, hbar

from .geometry import CavityConfig, DomainError
from .modes import no_pendulum_zigzag, zigzag_mode_length

SOURCES = ("suspension_thermal", "qrpn", "shot", "mirror_brownian", "swing_leakage", "roll_leakage")
REPRESENTATIONS = {
    "torque": "Nm2_per_Hz",
    "angle": "rad2_per_Hz",
    "freq": "Hz2_per_Hz",
}
SHOT_CONVENTIONS = ("sql", "printed")


@dataclass(frozen=True)
class NoiseParams:
    """Pendulum, suspension, mirror and laser parameters of the budget.

    Defaults reproduce the anticipated mg-scale setup: 5 mm wide pendulum,
    10 mHz torsion mode, a 5 cm long cavity with 10 cm mirrors. ``I`` and
    ``omega_L`` are derived when left as None.
    """

    T: float = 300.0
    l: float = 5e-3
    h: float = 1e-3
    t: float = 0.5e-3
    m: float = 6e-6
    I: Optional[float] = None
    D: float = 1e-6
    omega_m: float = 2 * np.pi * 10e-3
    Q_m: float = 2e4
    sigma: float = 0.15
    E: float = 70e9
    w0: float = 100e-6
    phi_sub: float = 1e-7
    phi_coat: float = 1e-4
    d: float = 10e-6
    finesse: float = 2e4
    lambda_L: float = 780e-9
    omega_L: Optional[float] = None
    P_in: float = 0.4e-6
    leak_delta_alpha: float = np.radians(60e-3)
    xi: float = 0.05
    f_swing: float = 2.0
    f_roll: float = 2.0
    Q_swing: float = 1e6
    Q_roll: float = 1e6
    cavity_L: float = 0.05
    cavity_R: float = 0.10

    def __post_init__(self):
        for name in ("l", "h", "t", "m", "D", "omega_m", "Q_m", "E", "w0", "d", "finesse",
                     "lambda_L", "xi", "f_swing", "f_roll", "Q_swing", "Q_roll", "cavity_L", "cavity_R"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        for name in ("T", "phi_sub", "phi_coat", "P_in", "leak_delta_alpha"):
            if getattr(self, name) < 0:
                raise DomainError(f"{name} must be non-negative")
        if not 0 <= self.sigma < 0.5:
            raise DomainError("Poisson ratio must lie in [0, 0.5)")
        if self.I is None:
            object.__setattr__(self, "I", self.m * self.l**2 / 12)
        if self.omega_L is None:
            object.__setattr__(self, "omega_L", 2 * np.pi * c / self.lambda_L)

    @property
    def I_roll(self) -> float:
        return self.m * (self.l**2 + self.h**2) / 12

    def cavity(self) -> CavityConfig:
        return CavityConfig(L=self.cavity_L, R=self.cavity_R, lam=self.lambda_L,
                            finesse_on=self.finesse, finesse_zig=self.finesse)

    def yaw_slope(self) -> float:
        """Cavity shift per yaw angle (Hz/rad) with the pendulum width as beam separation."""
        g = 1 - self.cavity_L / self.cavity_R
        return c / self.lambda_L * self.l / zigzag_mode_length(self.cavity_L, self.l, g)

    def transverse_slope(self) -> float:
        """Cavity shift per transverse translation (Hz/m) from the residual yaw bend."""
        return c / self.lambda_L * self.leak_delta_alpha / (2 * self.cavity_L)


def damping_rate(omega, omega_0, Q):
    """Structural damping: gamma(omega) = (omega_0/Q)(omega_0/omega)."""
    return omega_0 / Q * omega_0 / np.asarray(omega, dtype=float)


def _oscillator_gain(omega, inertia, omega_0, Q):
    omega = np.asarray(omega, dtype=float)
    return 1.0 / (inertia**2 * ((omega_0**2 - omega**2) ** 2 + (omega * damping_rate(omega, omega_0, Q)) ** 2))


def susceptibility(omega, p: NoiseParams):
    """|chi(omega)|^2 of the torsion mode, (rad/(N m))^2."""
    return _oscillator_gain(omega, p.I, p.omega_m, p.Q_m)


def psd_suspension_thermal(omega, p: NoiseParams):
    return 4 * kB * p.T * p.I * damping_rate(omega, p.omega_m, p.Q_m)


def psd_qrpn(p: NoiseParams) -> float:
    return 8 * p.l**2 * p.finesse**2 * hbar * p.omega_L * p.P_in / (np.pi**2 * c**2)


def psd_shot(p: NoiseParams, convention: str = "sql") -> float:
    """Shot-noise angle PSD.

    ``sql`` returns hbar^2 / S_qrpn so that shot x back-action = hbar^2.
    ``printed`` returns hbar / S_qrpn, the form usually quoted, which is
    not dimensionally an angle PSD.
    """
    if convention not in SHOT_CONVENTIONS:
        raise ValueError(f"convention must be one of {SHOT_CONVENTIONS}")
    if p.P_in <= 0:
        raise DomainError("shot noise diverges at zero input power")
    s_qrpn = psd_qrpn(p)
    return (hbar if convention == "printed" else hbar**2) / s_qrpn


def psd_mirror_brownian(omega, p: NoiseParams):
    coat = 2 / np.sqrt(np.pi) * (1 - 2 * p.sigma) / (1 - p.sigma) * p.d / p.w0 * p.phi_coat
    pref = 16 * kB * p.T / (np.asarray(omega, dtype=float) * p.l**2)
    return pref * (1 - p.sigma**2) / (np.sqrt(np.pi) * p.E * p.w0) * (p.phi_sub + coat)


def swing_displacement_psd(omega, p: NoiseParams):
    """Thermal transverse displacement PSD of the swing mode (m^2/Hz)."""
    w_s = 2 * np.pi * p.f_swing
    force = 4 * kB * p.T * p.m * damping_rate(omega, w_s, p.Q_swing)
    return _oscillator_gain(omega, p.m, w_s, p.Q_swing) * force


def roll_angle_psd(omega, p: NoiseParams):
    w_r = 2 * np.pi * p.f_roll
    torque = 4 * kB * p.T * p.I_roll * damping_rate(omega, w_r, p.Q_roll)
    return _oscillator_gain(omega, p.I_roll, w_r, p.Q_roll) * torque


def leakage_psd(mode: str, omega, p: NoiseParams, yaw_slope: Optional[float] = None,
                transverse_slope: Optional[float] = None):
    """Yaw-equivalent angle PSD (rad^2/Hz) leaking in from the swing or roll mode.

    The thermal motion of the mode is converted to a transverse translation
    (directly for swing, via the roll-translation coupling for roll), then to
    a cavity shift through the bend-induced transverse slope, and finally
    divided by the yaw slope squared.
    """
    yaw_slope = p.yaw_slope() if yaw_slope is None else yaw_slope
    transverse_slope = p.transverse_slope() if transverse_slope is None else transverse_slope
    if mode == "swing":
        s_x = swing_displacement_psd(omega, p)
    elif mode == "roll":
        s_x = (p.I_roll / (p.xi * p.m)) ** 2 * roll_angle_psd(omega, p)
    else:
        raise ValueError("mode must be 'swing' or 'roll'")
    return s_x * (transverse_slope / yaw_slope) ** 2


def log_grid(f_min: float = 0.1, f_max: float = 1000.0, n: int = 400) -> np.ndarray:
    return np.logspace(np.log10(f_min), np.log10(f_max), n)


@dataclass
class NoiseBudget:
    freq: np.ndarray
    torque: Dict[str, np.ndarray]
    angle: Dict[str, np.ndarray]
    freq_noise: Dict[str, np.ndarray]
    params: NoiseParams
    yaw_slope_hz_per_rad: float
    shot_convention: str = "sql"
    metadata: Dict[str, str] = field(default_factory=dict)

    def columns(self):
        """Ordered (name, array) pairs for tabular output."""
        cols = [("f_hz", self.freq)]
        for key, table in (("torque", self.torque), ("angle", self.angle), ("freq", self.freq_noise)):
            unit = REPRESENTATIONS[key]
            for src in (*SOURCES, "total"):
                cols.append((f"{src}_{key}_{unit}", table[src]))
        return cols

    def to_csv(self) -> str:
        cols = self.columns()
        lines = [",".join(name for name, _ in cols)]
        for i in range(len(self.freq)):
            lines.append(",".join(f"{arr[i]:.8e}" for _, arr in cols))
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {
            "schema": "zigzag.noise_budget/1",
            "shot_convention": self.shot_convention,
            "yaw_slope_hz_per_rad": self.yaw_slope_hz_per_rad,
            "params": {k: float(v) for k, v in asdict(self.params).items()},
            "f_hz": [float(x) for x in self.freq],
            "torque_Nm2_per_Hz": {k: [float(x) for x in v] for k, v in self.torque.items()},
            "angle_rad2_per_Hz": {k: [float(x) for x in v] for k, v in self.angle.items()},
            "freq_Hz2_per_Hz": {k: [float(x) for x in v] for k, v in self.freq_noise.items()},
            "metadata": dict(self.metadata),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def total_budget(p: NoiseParams, freq=None, shot_convention: str = "sql") -> NoiseBudget:
    """Assemble every source on ``freq`` (Hz) in all three representations."""
    freq = log_grid() if freq is None else np.asarray(freq, dtype=float)
    if freq.size and (np.any(freq <= 0) or np.any(np.diff(freq) <= 0)):
        raise DomainError("frequency grid must be positive and strictly ascending")
    omega = 2 * np.pi * freq
    chi2 = susceptibility(omega, p)
    slope = p.yaw_slope()
    ones = np.ones_like(freq)

    torque_native = {
        "suspension_thermal": psd_suspension_thermal(omega, p),
        "qrpn": psd_qrpn(p) * ones,
    }
    angle_native = {
        "shot": (psd_shot(p, shot_convention) if p.P_in > 0 else np.inf) * ones,
        "mirror_brownian": psd_mirror_brownian(omega, p),
        "swing_leakage": leakage_psd("swing", omega, p, slope),
        "roll_leakage": leakage_psd("roll", omega, p, slope),
    }
    torque, angle = {}, {}
    for src in SOURCES:
        if src in torque_native:
            torque[src] = torque_native[src]
            angle[src] = chi2 * torque[src]
        else:
            angle[src] = angle_native[src]
            torque[src] = angle[src] / chi2
    torque["total"] = sum(torque[s] for s in SOURCES) if freq.size else np.zeros(0)
    angle["total"] = sum(angle[s] for s in SOURCES) if freq.size else np.zeros(0)
    freq_noise = {k: slope**2 * v for k, v in angle.items()}
    return NoiseBudget(freq, torque, angle, freq_noise, p, slope, shot_convention,
                       {"damping": "structural", "cavity": f"L={p.cavity_L} m, R={p.cavity_R} m"})


def optimal_power_torque_noise(omega, p: NoiseParams):
    """Torque noise with back-action and shot noise balanced at each frequency.

    Adding the minimum over P_in of (qrpn + shot/|chi|^2) to the thermal
    sources gives the thermally limited torque sensitivity reached when the
    input power is tuned to lower the back-action.
    """
    chi2 = susceptibility(omega, p)
    quantum = 2 * hbar / np.sqrt(chi2)
    return psd_suspension_thermal(omega, p) + psd_mirror_brownian(omega, p) / chi2 + quantum


# Equipartition comparison of the pendulum's normal modes


@dataclass(frozen=True)
class RmsParams:
    """Thermally driven pendulum used for the rms-shift comparison.

    Defaults: 12 x 0.5 x 0.5 mm^3 fused-silica bar (density assumed) on a
    5 cm fiber, 2 Hz swing and roll, 5 mHz yaw, read out in the 24.8 mm /
    50 mm cavity with a 0.2 degree residual bend.
    """

    T: float = 300.0
    width: float = 12e-3
    height: float = 0.5e-3
    thickness: float = 0.5e-3
    density: float = 2200.0
    xi: float = 0.05
    f_swing: float = 2.0
    f_roll: float = 2.0
    f_yaw: float = 5e-3
    cavity_L: float = 24.8e-3
    cavity_R: float = 50e-3
    lam: float = 780e-9
    delta_alpha: float = np.radians(0.2)

    @property
    def mass(self) -> float:
        return self.density * self.width * self.height * self.thickness

    def yaw_slope(self) -> float:
        g = 1 - self.cavity_L / self.cavity_R
        l = no_pendulum_zigzag(g, self.cavity_R).l
        return c / self.lam * l / zigzag_mode_length(self.cavity_L, l, g)

    def transverse_slope(self) -> float:
        return c / self.lam * self.delta_alpha / (2 * self.cavity_L)


def rms_mode_shift(mode: str, p: RmsParams = RmsParams()) -> float:
    """Rms cavity shift (Hz) from k_B T / 2 of energy in one pendulum mode."""
    kT = kB * p.T
    m = p.mass
    if mode == "yaw":
        inertia = m * (p.width**2 + p.thickness**2) / 12
        theta = np.sqrt(kT / (inertia * (2 * np.pi * p.f_yaw) ** 2))
        return float(theta * p.yaw_slope())
    if mode == "swing":
        x = np.sqrt(kT / (m * (2 * np.pi * p.f_swing) ** 2))
        return float(x * p.transverse_slope())
    if mode == "roll":
        inertia = m * (p.width**2 + p.height**2) / 12
        gamma = np.sqrt(kT / (inertia * (2 * np.pi * p.f_roll) ** 2))
        x = inertia / (p.xi * m) * gamma
        return float(x * p.transverse_slope())
    raise ValueError("mode must be 'yaw', 'swing' or 'roll'")


def with_params(p: NoiseParams, **changes) -> NoiseParams:
    """Copy of ``p`` with fields replaced; derived I/omega_L are recomputed unless given."""
    base = asdict(p)
    if "I" not in changes and any(k in changes for k in ("m", "l")):
        base["I"] = None
    if "omega_L" not in changes and "lambda_L" in changes:
        base["omega_L"] = None
    base.update(changes)
    return NoiseParams(**base)
