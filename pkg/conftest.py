"""
Shared fixtures: the benchmark states and a CLI runner.
"""
import logging
import math

import pytest
from click.testing import CliRunner

from modules.state_preparation import PlateStack, PolarizerChannel, make_singlet, prepare_after_polarizer


@pytest.fixture(autouse=True)
def restore_root_logging():
    """The CLI reconfigures the root logger against the runner's streams; undo that per test."""
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


@pytest.fixture
def singlet():
    return make_singlet()


@pytest.fixture
def case_a_channel():
    return PolarizerChannel.from_degrees(43.0, 0.200)


@pytest.fixture
def case_a(case_a_channel):
    state, _ = prepare_after_polarizer(case_a_channel)
    return state


@pytest.fixture
def case_b_channel():
    return PlateStack(7).channel(math.radians(21.0))


@pytest.fixture
def case_b(case_b_channel):
    state, _ = prepare_after_polarizer(case_b_channel)
    return state


@pytest.fixture
def runner():
    return CliRunner()
