import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zigzag import noise
from zigzag.geometry import CavityConfig, PendulumPose, PendulumSpec, basis
from zigzag.modes import beam_separation, mode_geometry, no_pendulum_zigzag, required_cavity_length
from zigzag.presets import DESIGN_YAW, experimental_cavity
from zigzag.raytrace import solve_zigzag_path
from zigzag.sensing_range import coupling_efficiency
from zigzag.sensitivity import yaw_sensitivity

CFG = experimental_cavity()
small = st.floats(-3e-3, 3e-3)
FAST = settings(max_examples=60, deadline=None)


def _spec(da=0.0, db=0.0):
    return PendulumSpec(11e-3, 7e-3, 2e-3, mass_m=1e-3, delta_alpha=da, delta_beta=db,
                        aperture_radius=3.5e-3, hole_radius=1e-3, face_offset=0.0)


def _s(spec, pose, guess=None):
    return solve_zigzag_path(CFG, spec, pose, guess=guess).roundtrip_s


@FAST
@given(da=small, db=small, yaw=st.floats(-0.01, 0.01), beta=st.floats(2e-5, 5e-4))
def test_pitch_response_symmetric_with_bends(da, db, yaw, beta):
    spec = _spec(da, db)
    base = PendulumPose(DESIGN_YAW + yaw)
    ref = solve_zigzag_path(CFG, spec, base)
    up = _s(spec, base.shifted(pitch=beta), ref) - ref.roundtrip_s
    down = _s(spec, base.shifted(pitch=-beta), ref) - ref.roundtrip_s
    even, odd = (up + down) / 2, (up - down) / 2
    assert even < 0
    # odd/even = 2 * vertex / beta; the bends move the vertex by well under 10 urad
    assert abs(odd) <= 2 * abs(even) * 1e-5 / beta + 1e-15


@FAST
@given(da=small, db=small)
def test_pitch_extremum_stays_at_zero(da, db):
    spec = _spec(da, db)
    pose = PendulumPose(DESIGN_YAW)
    ref = solve_zigzag_path(CFG, spec, pose)
    betas = np.linspace(-2e-4, 2e-4, 9)
    ds = [_s(spec, pose.shifted(pitch=b), ref) - ref.roundtrip_s for b in betas]
    a2, a1, _ = np.polyfit(betas, ds, 2)
    vertex = -a1 / (2 * a2)
    assert abs(vertex) < 1e-5


@FAST
@given(L=st.floats(2e-3, 24.9e-3), l=st.floats(1e-3, 20e-3))
def test_yaw_S_independent_of_length(L, l):
    a = CavityConfig(L, 50e-3)
    b = CavityConfig(L / 2, 50e-3)
    Sa = yaw_sensitivity(a, mode_geometry(a, l=l))[1]
    Sb = yaw_sensitivity(b, mode_geometry(b, l=l))[1]
    assert Sa == pytest.approx(Sb, rel=1e-14)


@FAST
@given(off=st.lists(st.floats(-1e-3, 1e-3), min_size=3, max_size=3), da=small, db=small)
def test_gauge_invariance(off, da, db):
    spec = _spec(da, db)
    pose = PendulumPose(DESIGN_YAW)
    a = solve_zigzag_path(CFG, spec, pose)
    b = solve_zigzag_path(CFG, spec, pose, cavity_offset=off)
    assert b.roundtrip_s == pytest.approx(a.roundtrip_s, abs=1e-15)


@FAST
@given(v=st.lists(st.floats(-1e-5, 1e-5), min_size=3, max_size=3), da=small, db=small,
       yaw=st.floats(-0.01, 0.01), beta=st.floats(-5e-3, 5e-3))
def test_translation_oracle(v, da, db, yaw, beta):
    spec = _spec(da, db)
    pose = PendulumPose(DESIGN_YAW + yaw, beta)
    ref = solve_zigzag_path(CFG, spec, pose)
    ds = _s(spec, pose.shifted(v=v), ref) - ref.roundtrip_s
    _, na, nb = basis(pose.yaw_alpha, beta)
    t1, t2 = (np.asarray(v) @ na) * da, (np.asarray(v) @ nb) * db
    assert abs(ds - t1 - t2) <= 1e-3 * (abs(t1) + abs(t2)) + 1e-12


@FAST
@given(g=st.floats(0.5001, 1.0))
def test_beam_separation_forms(g):
    assert no_pendulum_zigzag(g, 1.0).l == pytest.approx(beam_separation(g, 1.0), rel=1e-10)


@FAST
@given(frac=st.floats(0.01, 0.93))
def test_length_inversion_roundtrip(frac):
    R = 50e-3
    l = frac * R
    L = required_cavity_length(l, R)
    assert beam_separation(1 - L / R, R) == pytest.approx(l, rel=1e-9)


@FAST
@given(t1=st.floats(0, 5e-3), t2=st.floats(0, 5e-3))
def test_coupling_monotone(t1, t2):
    lo, hi = sorted((t1, t2))
    e_lo = coupling_efficiency(lo, 0.504, 73e-6, 780e-9).coupling_efficiency
    e_hi = coupling_efficiency(hi, 0.504, 73e-6, 780e-9).coupling_efficiency
    assert 0 <= e_hi <= e_lo + 1e-12 <= 1 + 1e-12


positive = st.floats(0.1, 10.0)


@FAST
@given(kT=positive, kP=positive, kF=positive, kl=positive, f=st.floats(0.1, 1000.0))
def test_noise_scaling_laws(kT, kP, kF, kl, f):
    p = noise.NoiseParams()
    q = noise.with_params(p, T=p.T * kT, P_in=p.P_in * kP, finesse=p.finesse * kF, l=p.l * kl)
    w = 2 * np.pi * f
    assert noise.psd_qrpn(q) / noise.psd_qrpn(p) == pytest.approx(kP * kF**2 * kl**2, rel=1e-12)
    assert noise.psd_shot(q) / noise.psd_shot(p) == pytest.approx(1 / (kP * kF**2 * kl**2), rel=1e-12)
    # I follows m l^2 / 12
    th = noise.psd_suspension_thermal(w, q) / noise.psd_suspension_thermal(w, p)
    assert th == pytest.approx(kT * kl**2, rel=1e-12)
    br = noise.psd_mirror_brownian(w, q) / noise.psd_mirror_brownian(w, p)
    assert br == pytest.approx(kT / kl**2, rel=1e-12)


@FAST
@given(kI=positive, kw=positive, kQ=positive, kw_eval=positive)
def test_thermal_scaling_in_I_omega_Q(kI, kw, kQ, kw_eval):
    p = noise.NoiseParams()
    q = noise.with_params(p, I=p.I * kI, omega_m=p.omega_m * kw, Q_m=p.Q_m * kQ)
    w = 2 * np.pi * 10.0
    ratio = noise.psd_suspension_thermal(w * kw_eval, q) / noise.psd_suspension_thermal(w, p)
    assert ratio == pytest.approx(kI * kw**2 / (kQ * kw_eval), rel=1e-12)


@FAST
@given(T=st.floats(1.0, 1000.0), P_in=st.floats(1e-9, 1e-3), f=st.floats(0.1, 1000.0))
def test_psds_nonnegative_and_consistent(T, P_in, f):
    p = noise.with_params(noise.NoiseParams(), T=T, P_in=P_in)
    b = noise.total_budget(p, [f])
    for table in (b.torque, b.angle, b.freq_noise):
        assert all(np.all(v >= 0) for v in table.values())
    chi2 = noise.susceptibility(2 * np.pi * f, p)
    assert b.angle["total"][0] == pytest.approx(chi2 * b.torque["total"][0], rel=1e-12)
