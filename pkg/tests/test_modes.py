import numpy as np
import pytest
from scipy.constants import c

from zigzag.geometry import CavityConfig, DomainError
from zigzag.modes import (
    beam_separation, beam_waist, mode_frequencies, mode_geometry, no_pendulum_zigzag,
    required_cavity_length, transverse_mode_spacing, zigzag_mode_length,
)


def test_design_length_inversion():
    assert required_cavity_length(11e-3, 50e-3) == pytest.approx(24.788e-3, abs=2e-6)


def test_inversion_roundtrip():
    for L in np.linspace(1e-3, 24.9e-3, 20):
        g = 1 - L / 50e-3
        assert required_cavity_length(beam_separation(g, 50e-3), 50e-3) == pytest.approx(L, rel=1e-10)


def test_inversion_domain():
    with pytest.raises(DomainError):
        required_cavity_length(50e-3, 50e-3)
    with pytest.raises(DomainError):
        required_cavity_length(0.0, 50e-3)


def test_no_pendulum_zigzag_experimental():
    sol = no_pendulum_zigzag(0.504, 50e-3)
    assert np.degrees(sol.delta) == pytest.approx(8.186, abs=1e-3)
    assert sol.l == pytest.approx(10.7074501e-3, rel=1e-8)


def test_two_forms_agree():
    for g in np.linspace(0.501, 1.0, 50):
        assert no_pendulum_zigzag(g, 1.0).l == pytest.approx(beam_separation(g, 1.0), rel=1e-12)


@pytest.mark.parametrize("g", [0.5, 0.4, 0.0, -0.3])
def test_zigzag_needs_g_above_half(g):
    with pytest.raises(DomainError, match="g>1/2"):
        no_pendulum_zigzag(g, 1.0)


def test_planar_limit_g_one():
    sol = no_pendulum_zigzag(1.0, 1.0)
    # tan delta = sqrt(7)/5 at g = 1
    assert sol.tan_delta == pytest.approx(np.sqrt(7) / 5)


def test_waist():
    cfg = CavityConfig(24.8e-3, 50e-3)
    w0 = np.sqrt(780e-9 * 24.8e-3 / (2 * np.pi)) * (1.504 / 0.496) ** 0.25
    assert beam_waist(cfg) == pytest.approx(w0)
    assert beam_waist(cfg) == pytest.approx(73.2e-6, rel=1e-3)
    with pytest.raises(DomainError):
        beam_waist(CavityConfig(0.12, 0.05))


def test_mode_frequencies():
    cfg = CavityConfig(24.8e-3, 50e-3)
    fr = mode_frequencies(cfg)
    assert fr.fsr_on == pytest.approx(c / 49.6e-3)
    assert fr.fsr_zig == pytest.approx(c / (2 * zigzag_mode_length(24.8e-3, 10.7074501e-3, 0.504)), rel=1e-8)
    assert fr.linewidth_on == pytest.approx(fr.fsr_on / 880)
    assert fr.linewidth_zig == pytest.approx(fr.fsr_zig / 230)


def test_transverse_spacing_folded():
    cfg = CavityConfig(24.8e-3, 50e-3)
    fsr = c / (2 * cfg.L)
    raw = 3 * fsr * np.arccos(0.504) / np.pi
    assert transverse_mode_spacing(cfg, 0, 3) == pytest.approx(fsr - raw)
    assert transverse_mode_spacing(cfg, 0, 0) == 0
    assert transverse_mode_spacing(cfg, 3, 0) == transverse_mode_spacing(cfg, 0, 3)


def test_transverse_spacing_at_design_separation():
    cfg = CavityConfig(required_cavity_length(11e-3, 50e-3), 50e-3)
    assert transverse_mode_spacing(cfg, 0, 3) == pytest.approx(28.28e6, rel=2e-3)


def test_mode_geometry_override():
    cfg = CavityConfig(24.8e-3, 50e-3)
    geo = mode_geometry(cfg, l=11e-3, operating_yaw=0.15)
    assert geo.beam_sep_l == 11e-3
    assert geo.operating_yaw == 0.15
    with pytest.raises(DomainError):
        mode_geometry(CavityConfig(0.03, 0.05))
