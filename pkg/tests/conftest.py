import numpy as np
import pytest

from zigzag.presets import DESIGN_BEND, design_pose, experimental_cavity, experimental_pendulum


@pytest.fixture
def cavity():
    return experimental_cavity()


@pytest.fixture
def pendulum():
    return experimental_pendulum()


@pytest.fixture
def bent_pendulum():
    return experimental_pendulum(delta_alpha=DESIGN_BEND)


@pytest.fixture
def pose():
    return design_pose()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
