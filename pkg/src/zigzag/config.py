"""INI-style run configuration with unit-suffixed keys.

Every key carries its unit in the name (``L_mm``, ``P_in_uW``); values are
converted to SI on load. Unknown sections or keys are rejected. Any key can
be overridden from the environment as ``ZIGZAG_<SECTION>_<KEY>`` (upper
case), e.g. ``ZIGZAG_CAVITY_L_MM=24.8``.
"""
from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional

import numpy as np

from . import noise
from .geometry import CavityConfig, DomainError, PendulumPose, PendulumSpec
from .modes import required_cavity_length
from .presets import DESIGN_YAW, EXPERIMENTAL_L, experimental_pendulum
from .raytrace import DOFS

ENV_PREFIX = "ZIGZAG_"

DEG = np.pi / 180
UNIT_SCALE = {
    "mm": 1e-3, "um": 1e-6, "nm": 1e-9, "cm": 1e-2, "m": 1.0,
    "deg": DEG, "mdeg": 1e-3 * DEG, "rad": 1.0, "mrad": 1e-3, "urad": 1e-6,
    "mg": 1e-6, "g": 1e-3, "kg": 1.0, "kg_m3": 1.0, "kg_m2": 1.0,
    "Hz": 1.0, "mHz": 1e-3, "uW": 1e-6, "GPa": 1e9, "K": 1.0, "": 1.0,
}


class ConfigError(ValueError):
    """Malformed or inconsistent configuration."""


def _key(name: str, unit: str, default=None, kind=float):
    return name, (unit, default, kind)


SCHEMA: Dict[str, Dict[str, tuple]] = {
    "cavity": dict([
        _key("L_mm", "mm"), _key("l_target_mm", "mm"), _key("R_mm", "mm", 50.0),
        _key("lambda_nm", "nm", 780.0), _key("finesse_on", "", 880.0), _key("finesse_zig", "", 230.0),
    ]),
    "pendulum": dict([
        _key("width_mm", "mm", 11.0), _key("height_mm", "mm", 7.0), _key("thickness_mm", "mm", 2.0),
        _key("mass_mg", "mg"), _key("density_kg_m3", "kg_m3"),
        _key("delta_alpha_deg", "deg", 0.2), _key("delta_beta_deg", "deg", 0.0),
        _key("aperture_mm", "mm", 3.5), _key("hole_mm", "mm", 1.0), _key("face_offset_mm", "mm", 0.0),
    ]),
    "pose": dict([
        _key("yaw_deg", "deg", np.degrees(DESIGN_YAW)), _key("pitch_deg", "deg", 0.0), _key("roll_deg", "deg", 0.0),
        _key("vx_um", "um", 0.0), _key("vy_um", "um", 0.0), _key("vz_um", "um", 0.0),
    ]),
    "noise": dict([
        _key("T_K", "K", 300.0), _key("l_mm", "mm", 5.0), _key("h_mm", "mm", 1.0), _key("t_mm", "mm", 0.5),
        _key("m_mg", "mg", 6.0), _key("I_kg_m2", "kg_m2"), _key("D_um", "um", 1.0),
        _key("f_m_mHz", "mHz", 10.0), _key("Q_m", "", 2e4), _key("sigma", "", 0.15), _key("E_GPa", "GPa", 70.0),
        _key("w0_um", "um", 100.0), _key("phi_sub", "", 1e-7), _key("phi_coat", "", 1e-4), _key("d_um", "um", 10.0),
        _key("finesse", "", 2e4), _key("lambda_L_nm", "nm", 780.0), _key("P_in_uW", "uW", 0.4),
        _key("leak_delta_alpha_mdeg", "mdeg", 60.0), _key("xi_cm", "cm", 5.0),
        _key("f_swing_Hz", "Hz", 2.0), _key("f_roll_Hz", "Hz", 2.0), _key("Q_swing", "", 1e6), _key("Q_roll", "", 1e6),
        _key("cavity_L_cm", "cm", 5.0), _key("cavity_R_cm", "cm", 10.0),
        _key("f_min_Hz", "Hz", 0.1), _key("f_max_Hz", "Hz", 1000.0), _key("n_points", "", 400, int),
        _key("shot_convention", "", "sql", str),
    ]),
    "sweep": dict([
        _key("dof", "", "yaw", str), _key("min_urad", "urad"), _key("max_urad", "urad"),
        _key("min_um", "um"), _key("max_um", "um"), _key("count", "", 31, int),
    ]),
    "range": dict([
        _key("w0_um", "um"), _key("delta_theta_mrad", "mrad", 1.0),
    ]),
    "validate": dict([
        _key("n_random", "", 1000, int), _key("model_delta_alpha_deg", "deg"),
    ]),
    "output": dict([
        _key("format", "", "csv", str), _key("path", "", None, str),
    ]),
}

_LOWER = {sec: {k.lower(): k for k in keys} for sec, keys in SCHEMA.items()}


@dataclass
class RunConfig:
    """Parsed configuration; ``values`` holds SI values keyed by section and schema key."""

    values: Dict[str, Dict[str, object]] = field(default_factory=dict)

    def get(self, section: str, key: str):
        return self.values[section][key]

    def cavity(self) -> CavityConfig:
        v = self.values["cavity"]
        if v["L_mm"] is not None and v["l_target_mm"] is not None:
            raise ConfigError("give exactly one of cavity.L_mm and cavity.l_target_mm")
        R = v["R_mm"]
        if v["l_target_mm"] is not None:
            L = required_cavity_length(v["l_target_mm"], R)
        else:
            L = EXPERIMENTAL_L if v["L_mm"] is None else v["L_mm"]
        return CavityConfig(L=L, R=R, lam=v["lambda_nm"], finesse_on=v["finesse_on"], finesse_zig=v["finesse_zig"])

    def pendulum(self) -> PendulumSpec:
        v = self.values["pendulum"]
        mass, density = v["mass_mg"], v["density_kg_m3"]
        if mass is None and density is None:
            mass = experimental_pendulum().mass
        return PendulumSpec(
            width_l=v["width_mm"], height_h=v["height_mm"], thickness_t=v["thickness_mm"],
            mass_m=mass, density=density if mass is None else None,
            delta_alpha=v["delta_alpha_deg"], delta_beta=v["delta_beta_deg"],
            aperture_radius=v["aperture_mm"], hole_radius=v["hole_mm"], face_offset=v["face_offset_mm"],
        )

    def pose(self) -> PendulumPose:
        v = self.values["pose"]
        return PendulumPose(v["yaw_deg"], v["pitch_deg"], v["roll_deg"], (v["vx_um"], v["vy_um"], v["vz_um"]))

    def noise_params(self) -> noise.NoiseParams:
        v = self.values["noise"]
        return noise.NoiseParams(
            T=v["T_K"], l=v["l_mm"], h=v["h_mm"], t=v["t_mm"], m=v["m_mg"], I=v["I_kg_m2"], D=v["D_um"],
            omega_m=2 * np.pi * v["f_m_mHz"], Q_m=v["Q_m"], sigma=v["sigma"], E=v["E_GPa"], w0=v["w0_um"],
            phi_sub=v["phi_sub"], phi_coat=v["phi_coat"], d=v["d_um"], finesse=v["finesse"],
            lambda_L=v["lambda_L_nm"], P_in=v["P_in_uW"], leak_delta_alpha=v["leak_delta_alpha_mdeg"],
            xi=v["xi_cm"], f_swing=v["f_swing_Hz"], f_roll=v["f_roll_Hz"], Q_swing=v["Q_swing"],
            Q_roll=v["Q_roll"], cavity_L=v["cavity_L_cm"], cavity_R=v["cavity_R_cm"],
        )

    def noise_grid(self) -> np.ndarray:
        v = self.values["noise"]
        if not 0 < v["f_min_Hz"] < v["f_max_Hz"]:
            raise ConfigError("noise grid needs 0 < f_min_Hz < f_max_Hz")
        if v["n_points"] < 0:
            raise ConfigError("n_points must be non-negative")
        return noise.log_grid(v["f_min_Hz"], v["f_max_Hz"], v["n_points"])

    def sweep_grid(self):
        v = self.values["sweep"]
        dof = v["dof"]
        if dof not in DOFS:
            raise ConfigError(f"sweep.dof must be one of {DOFS}")
        angular = dof in ("yaw", "pitch", "roll")
        lo, hi = (v["min_urad"], v["max_urad"]) if angular else (v["min_um"], v["max_um"])
        other = (v["min_um"], v["max_um"]) if angular else (v["min_urad"], v["max_urad"])
        if any(x is not None for x in other):
            raise ConfigError(f"sweep of {dof} takes {'min_urad/max_urad' if angular else 'min_um/max_um'}")
        if lo is None:
            lo = -1.5e-6  # +-1.5 urad or +-1.5 um
        if hi is None:
            hi = -lo
        if v["count"] < 2 or not hi > lo:
            raise ConfigError("sweep needs count >= 2 and max > min")
        return dof, np.linspace(lo, hi, v["count"])


def _convert(section: str, key: str, raw: str):
    unit, _, kind = SCHEMA[section][key]
    raw = raw.strip()
    if kind is str:
        return raw
    try:
        value = kind(float(raw)) if kind is int else float(raw)
    except ValueError as exc:
        raise ConfigError(f"{section}.{key}: cannot parse {raw!r}") from exc
    return value * UNIT_SCALE[unit] if kind is float else value


def load_config(path: Optional[str] = None, environ: Optional[Mapping[str, str]] = None) -> RunConfig:
    """Read ``path`` (optional), apply environment overrides and fill defaults."""
    environ = os.environ if environ is None else environ
    raw: Dict[str, Dict[str, str]] = {sec: {} for sec in SCHEMA}
    if path is not None:
        parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
        try:
            with open(path, encoding="utf-8") as fh:
                parser.read_file(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except configparser.Error as exc:
            raise ConfigError(f"malformed config: {exc}") from exc
        for sec in parser.sections():
            if sec not in SCHEMA:
                raise ConfigError(f"unknown section [{sec}]")
            for k, val in parser.items(sec):
                if k not in _LOWER[sec]:
                    raise ConfigError(f"unknown key {sec}.{k}")
                raw[sec][_LOWER[sec][k]] = val
    for name, val in environ.items():
        if not name.startswith(ENV_PREFIX):
            continue
        rest = name[len(ENV_PREFIX):].lower()
        sec = next((s for s in SCHEMA if rest.startswith(s + "_")), None)
        key = rest[len(sec) + 1:] if sec else None
        if sec is None or key not in _LOWER[sec]:
            raise ConfigError(f"environment override {name} does not name a config key")
        raw[sec][_LOWER[sec][key]] = val

    values: Dict[str, Dict[str, object]] = {}
    for sec, keys in SCHEMA.items():
        values[sec] = {}
        for key, (unit, default, kind) in keys.items():
            if key in raw[sec]:
                values[sec][key] = _convert(sec, key, raw[sec][key])
            elif default is None or kind is not float:
                values[sec][key] = default
            else:
                values[sec][key] = default * UNIT_SCALE[unit]
    cfg = RunConfig(values)
    fmt = values["output"]["format"]
    if fmt not in ("csv", "json"):
        raise ConfigError("output.format must be csv or json")
    if values["noise"]["shot_convention"] not in noise.SHOT_CONVENTIONS:
        raise ConfigError(f"noise.shot_convention must be one of {noise.SHOT_CONVENTIONS}")
    if values["cavity"]["L_mm"] is not None and values["cavity"]["l_target_mm"] is not None:
        raise ConfigError("give exactly one of cavity.L_mm and cavity.l_target_mm")
    return cfg


__all__ = ["ConfigError", "DomainError", "RunConfig", "SCHEMA", "load_config"]
