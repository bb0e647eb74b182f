"""Acceptance criteria, one test each, at the stated tolerances.

Each test records a PASS/FAIL line that is printed in the terminal summary
(and directly when the module is run as a script).
"""
import time

import numpy as np
import pytest

from zigzag import noise, validation
from zigzag.modes import beam_waist, mode_frequencies, mode_geometry, required_cavity_length, transverse_mode_spacing
from zigzag.presets import DESIGN_BEND, design_pose, experimental_cavity, experimental_pendulum
from zigzag.raytrace import solve_zigzag_path, sweep
from zigzag.sensing_range import coupling_efficiency, sensing_range
from zigzag.sensitivity import finite_difference_sensitivities, yaw_sensitivity

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # run as a script from elsewhere
    ACCEPTANCE_LINES = {}


def _within(value, target, rel):
    return abs(value / target - 1) <= rel


def record(n, ok, text):
    line = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {text}"
    ACCEPTANCE_LINES[n] = line
    print(line)
    assert ok, line


def test_criterion_01_design_length():
    t0 = time.perf_counter()
    L = required_cavity_length(11e-3, 50e-3)
    dt = time.perf_counter() - t0
    ok = abs(L - 24.8e-3) <= 0.05e-3 and dt < 0.1
    record(1, ok, f"L = {L * 1e3:.4f} mm (24.8 +- 0.05 mm), {dt * 1e3:.2f} ms")


def test_criterion_02_yaw_sensitivity():
    cfg, spec, pose = experimental_cavity(), experimental_pendulum(), design_pose()
    t0 = time.perf_counter()
    rep = finite_difference_sensitivities(cfg, spec, pose, cross_terms=False)
    dt = time.perf_counter() - t0
    slope = rep.yaw_hz_per_rad * 1e-6 / 1e6  # MHz/urad
    S = yaw_sensitivity(cfg, mode_geometry(cfg, l=11e-3))[1]
    ok_slope = _within(slope, 85.0, 0.02)
    ok_S = _within(S, 6.5e6, 0.02)
    ok = ok_slope and ok_S and dt < 1.0
    record(2, ok, f"traced slope {slope:.2f} MHz/urad (85 +- 2%: {'ok' if ok_slope else 'out'}); "
                  f"S = {S:.4g} /rad (6.5e6 +- 2%: {'ok' if ok_S else 'out'}); traced S = {rep.yaw_S:.4g}; "
                  f"{dt:.3f} s")


def test_criterion_03_transverse_coupling():
    cfg, pose = experimental_cavity(), design_pose()
    spec = experimental_pendulum(delta_alpha=DESIGN_BEND)
    rep = finite_difference_sensitivities(cfg, spec, pose, cross_terms=False)
    l = solve_zigzag_path(cfg, spec, pose).beam_separation
    slope = abs(rep.transverse_hz_per_m) * 1e-6 / 1e6  # MHz/um
    ratio = rep.endpoint_ratio(l)
    ok = _within(slope, 30.0, 0.15) and _within(ratio, 570.0, 0.05)
    record(3, ok, f"transverse {slope:.2f} MHz/um (30 +- 15%); end-point ratio {ratio:.1f} (570 +- 5%)")


def _slope(cfg, spec, pose, dof):
    res = sweep(cfg, spec, pose, dof, np.linspace(-1.5e-6, 1.5e-6, 31))
    assert not res.range_exceeded
    coef, cov = np.polyfit(res.offsets, res.shifts_hz, 1, cov=True)
    return coef[0], np.sqrt(cov[0, 0])


def test_criterion_04_directional_ratios():
    cfg, pose = experimental_cavity(), design_pose()
    spec = experimental_pendulum(delta_alpha=DESIGN_BEND)
    tr, _ = _slope(cfg, spec, pose, "transverse")
    xa, _ = _slope(cfg, spec, pose, "x-axis")
    lo, lo_err = _slope(cfg, spec, pose, "longitudinal")
    ratio = abs(xa / tr)
    target = np.sin(np.radians(8.5))
    # consistent with zero: within 3 fit sigmas, and below 1e-6 of the transverse slope
    zero_ok = abs(lo) <= 3 * lo_err + 1e-6 * abs(tr) and abs(lo) < 1e-6 * abs(tr)
    ok = _within(ratio, target, 0.01) and zero_ok
    record(4, ok, f"x-axis/transverse {ratio:.5f} (sin 8.5 deg = {target:.5f} +- 1%); "
                  f"longitudinal {lo:.3g} +- {lo_err:.2g} Hz/m vs transverse {tr:.3g} Hz/m")


def test_criterion_05_cavity_numbers():
    cfg = experimental_cavity()
    fr = mode_frequencies(cfg)
    spacing = transverse_mode_spacing(cfg, 0, 3)
    checks = {
        "spacing(0-3)": (spacing, 28.3e6),
        "FSR on": (fr.fsr_on, 6.2e9),
        "FSR zig": (fr.fsr_zig, 3.2e9),
        "linewidth on": (fr.linewidth_on, 7e6),
        "linewidth zig": (fr.linewidth_zig, 14e6),
    }
    ok = all(_within(v, t, 0.10) for v, t in checks.values())
    text = "; ".join(f"{k} {v:.4g} Hz ({(v / t - 1) * 100:+.1f}%)" for k, (v, t) in checks.items())
    record(5, ok, text + " (tol 10%)")


def test_criterion_06_sensing_range():
    cfg = experimental_cavity()
    w0 = beam_waist(cfg)
    rng = np.degrees(sensing_range(cfg.g, w0, cfg.lam))
    span = np.linspace(0, 5 * cfg.lam / (np.pi * w0), 201)
    worst = max(abs(r.coupling_efficiency - r.closed_form)
                for r in (coupling_efficiency(d * cfg.g, cfg.g, w0, cfg.lam) for d in span))
    ok = _within(rng, 0.2, 0.10) and worst <= 1e-10
    record(6, ok, f"theta_rng {rng:.4f} deg at w0 = {w0 * 1e6:.1f} um (0.2 +- 10%); "
                  f"quadrature vs closed form {worst:.1e} (<= 1e-10)")


def test_criterion_07_noise_bands():
    p = noise.NoiseParams()
    t0 = time.perf_counter()
    b = noise.total_budget(p)
    dt = time.perf_counter() - t0
    band = (b.freq >= 2) & (b.freq <= 200)
    th = np.sqrt(b.torque["suspension_thermal"][band])
    qr = b.torque["qrpn"][band]
    in_band = bool(np.all((th >= 1e-20) & (th <= 1e-19)))
    qrpn_dom = bool(np.all(qr > b.torque["suspension_thermal"][band]))
    ok = in_band and qrpn_dom and dt < 5.0
    record(7, ok, f"sqrt(S_th) spans [{th.min():.2e}, {th.max():.2e}] N m/rtHz over 2-200 Hz "
                  f"(band [1e-20, 1e-19]: {'ok' if in_band else 'out'}); "
                  f"QRPN > thermal: {'ok' if qrpn_dom else 'no'}; {dt * 1e3:.1f} ms")


def test_criterion_08_rms_shifts():
    yaw, swing, roll = (noise.rms_mode_shift(m) for m in ("yaw", "swing", "roll"))

    def f2(v, t):
        return 0.5 <= v / t <= 2.0

    ok = f2(yaw, 25e9) and f2(swing, 75e3) and f2(roll, 4e3) and yaw / swing >= 1e5
    record(8, ok, f"yaw {yaw:.3g} Hz (25 GHz), swing {swing:.3g} Hz (75 kHz), roll {roll:.3g} Hz (4 kHz), "
                  f"factor 2; dominance {yaw / swing:.2e} (>= 1e5)")


def test_criterion_09_oracle_suite():
    t0 = time.perf_counter()
    results = validation.run_suite(seed=0, n_random=1000)
    dt = time.perf_counter() - t0
    ok = all(r.passed for r in results) and dt < 60
    failed = [r.name for r in results if not r.passed]
    summary = ", ".join(f"{r.name} {r.worst:.1e}" for r in results if r.name != "runtime")
    record(9, ok, f"{summary}; {dt:.1f} s" + (f"; failed: {failed}" if failed else ""))


def test_criterion_10_properties():
    cfg = experimental_cavity()
    rng = np.random.default_rng(10)
    notes = []

    # pitch symmetry and extremum at beta = 0 under bends
    worst_vertex = 0.0
    for _ in range(10):
        da, db = rng.uniform(-3e-3, 3e-3, 2)
        spec = experimental_pendulum(da, db)
        res = sweep(cfg, spec, design_pose(), "pitch", np.linspace(-2e-4, 2e-4, 9))
        a2, a1, _ = np.polyfit(res.offsets, res.shifts_hz, 2)
        worst_vertex = max(worst_vertex, abs(a1 / (2 * a2)))
        assert a2 > 0
    pitch_ok = worst_vertex < 1e-5
    notes.append(f"pitch vertex <= {worst_vertex:.1e} rad")

    # S independent of L
    Ls = [5e-3, 15e-3, 24.8e-3]
    Ss = [yaw_sensitivity(type(cfg)(L, cfg.R), mode_geometry(type(cfg)(L, cfg.R), l=11e-3))[1] for L in Ls]
    s_ok = np.ptp(Ss) <= 1e-12 * Ss[0]
    notes.append("S(L) constant" if s_ok else "S varies with L")

    # noise scaling laws by ratio tests
    p = noise.NoiseParams()
    q = noise.with_params(p, P_in=2 * p.P_in, finesse=3 * p.finesse, T=2 * p.T, Q_m=5 * p.Q_m)
    w = 2 * np.pi * 10
    laws = [
        noise.psd_qrpn(q) / noise.psd_qrpn(p) / 18,
        noise.psd_shot(q) / noise.psd_shot(p) * 18,
        noise.psd_suspension_thermal(w, q) / noise.psd_suspension_thermal(w, p) / 0.4,
        noise.psd_mirror_brownian(w, q) / noise.psd_mirror_brownian(w, p) / 2,
        noise.psd_mirror_brownian(2 * w, p) / noise.psd_mirror_brownian(w, p) / 0.5,
    ]
    laws_ok = max(abs(x - 1) for x in laws) < 1e-12
    notes.append("noise scaling ok" if laws_ok else "noise scaling off")

    # gauge invariance
    spec = experimental_pendulum(DESIGN_BEND, 1e-3)
    a = solve_zigzag_path(cfg, spec, design_pose())
    gauge = max(abs(solve_zigzag_path(cfg, spec, design_pose(), cavity_offset=rng.uniform(-1e-3, 1e-3, 3)).roundtrip_s
                    - a.roundtrip_s) for _ in range(10))
    gauge_ok = gauge < 1e-12
    notes.append(f"gauge {gauge:.1e} m")

    record(10, pitch_ok and s_ok and laws_ok and gauge_ok, "; ".join(notes))


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q", "-s"]))
