"""Command-line front end: ``zigzag {modes,sweep,noise,range,validate}``.

Exit codes: 0 success, 1 validation failure, 2 configuration error,
3 domain error (configuration outside a formula's range of validity).
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional, Tuple

import numpy as np

from . import noise, validation
from .config import ConfigError, RunConfig, load_config
from .geometry import DomainError
from .modes import beam_waist, mode_frequencies, mode_geometry, transverse_mode_spacing
from .raytrace import NoConvergence, NoSolution, sweep
from .sensing_range import coupling_efficiency, sensing_range

EXIT_OK, EXIT_VALIDATION, EXIT_CONFIG, EXIT_DOMAIN = 0, 1, 2, 3
ANGULAR = ("yaw", "pitch", "roll")


def _fmt(x) -> str:
    return f"{x:.8e}"


def _rows_csv(header: List[str], rows: List[Tuple]) -> str:
    out = [",".join(header)]
    for row in rows:
        out.append(",".join(_fmt(v) if isinstance(v, (float, np.floating)) else str(v) for v in row))
    return "\n".join(out) + "\n"


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def modes_report(rc: RunConfig) -> dict:
    cfg = rc.cavity()
    geo = mode_geometry(cfg)
    fr = mode_frequencies(cfg, geo.beam_sep_l)
    return {
        "schema": "zigzag.modes/1",
        "L_m": cfg.L,
        "R_m": cfg.R,
        "g": cfg.g,
        "beam_separation_m": geo.beam_sep_l,
        "zigzag_length_m": geo.zig_length,
        "delta_rad": geo.delta_angle,
        "waist_m": geo.waist_w0,
        "fsr_on_hz": fr.fsr_on,
        "fsr_zig_hz": fr.fsr_zig,
        "linewidth_on_hz": fr.linewidth_on,
        "linewidth_zig_hz": fr.linewidth_zig,
        "transverse_spacing_0_3_hz": transverse_mode_spacing(cfg, 0, 3),
    }


def cmd_modes(rc: RunConfig, fmt: str) -> Tuple[str, int]:
    rep = modes_report(rc)
    if fmt == "json":
        return _dump_json(rep), EXIT_OK
    rows = [(k, v) for k, v in rep.items() if k != "schema"]
    return _rows_csv(["quantity", "value"], rows), EXIT_OK


def fit_sweep(dof: str, offsets: np.ndarray, shifts: np.ndarray) -> dict:
    """Linear fit, or quadratic for pitch, with 1-sigma coefficient errors."""
    deg = 2 if dof == "pitch" else 1
    if len(offsets) <= deg + 1:
        return {"degree": deg, "coefficients": [], "errors": []}
    coef, cov = np.polyfit(offsets, shifts, deg, cov=True)
    err = np.sqrt(np.clip(np.diag(cov), 0, None))
    # highest power first, as polyfit returns it
    return {"degree": deg, "coefficients": [float(x) for x in coef], "errors": [float(x) for x in err]}


def _fit_line(dof: str, fit: dict) -> str:
    if not fit["coefficients"]:
        return "# fit: not enough points"
    unit = "rad" if dof in ANGULAR else "m"
    if fit["degree"] == 1:
        return f"# fit: slope={_fmt(fit['coefficients'][0])} Hz/{unit} +- {_fmt(fit['errors'][0])}"
    c2, c1, _ = fit["coefficients"]
    e2, e1, _ = fit["errors"]
    return (f"# fit: curvature={_fmt(c2)} Hz/{unit}^2 +- {_fmt(e2)}; "
            f"linear={_fmt(c1)} Hz/{unit} +- {_fmt(e1)}")


def cmd_sweep(rc: RunConfig, fmt: str) -> Tuple[str, int]:
    cfg, spec, pose = rc.cavity(), rc.pendulum(), rc.pose()
    dof, grid = rc.sweep_grid()
    res = sweep(cfg, spec, pose, dof, grid)
    fit = fit_sweep(dof, res.offsets, res.shifts_hz)
    unit = "rad" if dof in ANGULAR else "m"
    if res.range_exceeded:
        print(f"warning: sweep stopped at offset {res.failed_offset:.6e} {unit}: {res.message}", file=sys.stderr)
    if fmt == "json":
        return _dump_json({
            "schema": "zigzag.sweep/1",
            "dof": dof,
            "offset_unit": unit,
            "offsets": [float(x) for x in res.offsets],
            "shifts_hz": [float(x) for x in res.shifts_hz],
            "range_exceeded": bool(res.range_exceeded),
            "failed_offset": res.failed_offset,
            "fit": fit,
        }), EXIT_OK
    text = _rows_csv([f"offset_{unit}", "shift_hz"], list(zip(res.offsets, res.shifts_hz)))
    if res.range_exceeded:
        text += f"# range_exceeded at offset_{unit}={_fmt(res.failed_offset)}\n"
    return text + _fit_line(dof, fit) + "\n", EXIT_OK


def cmd_noise(rc: RunConfig, fmt: str) -> Tuple[str, int]:
    p = rc.noise_params()
    budget = noise.total_budget(p, rc.noise_grid(), rc.get("noise", "shot_convention"))
    return (budget.to_json() + "\n" if fmt == "json" else budget.to_csv()), EXIT_OK


def cmd_range(rc: RunConfig, fmt: str) -> Tuple[str, int]:
    cfg = rc.cavity()
    w0 = rc.get("range", "w0_um") or beam_waist(cfg)
    theta = rc.get("range", "delta_theta_mrad")
    rng = sensing_range(cfg.g, w0, cfg.lam)
    ov = coupling_efficiency(theta, cfg.g, w0, cfg.lam)
    rep = {
        "schema": "zigzag.range/1",
        "g": cfg.g,
        "waist_m": w0,
        "lambda_m": cfg.lam,
        "sensing_range_rad": rng,
        "sensing_range_deg": float(np.degrees(rng)),
        "delta_theta_rad": ov.delta_theta_yaw,
        "delta_alpha_rad": ov.delta_alpha_tilt,
        "efficiency_quadrature": ov.coupling_efficiency,
        "efficiency_closed_form": ov.closed_form,
    }
    if fmt == "json":
        return _dump_json(rep), EXIT_OK
    return _rows_csv(["quantity", "value"], [(k, v) for k, v in rep.items() if k != "schema"]), EXIT_OK


def cmd_validate(rc: RunConfig, fmt: str, seed: int) -> Tuple[str, int]:
    results = validation.run_suite(
        seed=seed,
        n_random=rc.get("validate", "n_random"),
        model_delta_alpha=rc.get("validate", "model_delta_alpha_deg"),
        cfg=rc.cavity(),
        spec=rc.pendulum(),
        params=rc.noise_params(),
    )
    for r in results:
        print(r.line(), file=sys.stderr)
    ok = all(r.passed for r in results)
    if fmt == "json":
        text = _dump_json({
            "schema": "zigzag.validate/1",
            "seed": seed,
            "passed": bool(ok),
            "checks": [{"name": r.name, "passed": bool(r.passed), "worst": float(r.worst),
                        "tolerance": float(r.tolerance), "detail": r.detail} for r in results],
        })
    else:
        # runtime varies run to run, keep it out of the data file
        rows = [(r.name, "pass" if r.passed else "fail", float(r.worst), r.tolerance, r.detail)
                for r in results if r.name != "runtime"]
        text = _rows_csv(["check", "status", "worst", "tolerance", "detail"], rows)
    return text, EXIT_OK if ok else EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zigzag", description="Zigzag-cavity torsion pendulum readout model.")
    parser.add_argument("--config", help="INI file with unit-suffixed keys")
    parser.add_argument("--out", help="output file (default: stdout or output.path)")
    parser.add_argument("--format", choices=("csv", "json"), help="output format (default: output.format or csv)")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized validation poses")
    parser.add_argument("command", choices=("modes", "sweep", "noise", "range", "validate"))
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        rc = load_config(args.config)
        fmt = args.format or rc.get("output", "format")
        out = args.out or rc.get("output", "path")
        if args.command == "modes":
            text, code = cmd_modes(rc, fmt)
        elif args.command == "sweep":
            text, code = cmd_sweep(rc, fmt)
        elif args.command == "noise":
            text, code = cmd_noise(rc, fmt)
        elif args.command == "range":
            text, code = cmd_range(rc, fmt)
        else:
            text, code = cmd_validate(rc, fmt, args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (NoSolution, NoConvergence) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
