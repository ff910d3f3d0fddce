import numpy as np
import pytest

from squeezelab.drive import CrystalParams


@pytest.fixture
def unit_params():
    """Crystal with coupling C = 1 so spectra are in units of E0 and gamma."""
    return CrystalParams.with_coupling(1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20241015)


_ACCEPTANCE_LINES = []


@pytest.fixture
def report_line():
    """Collect one PASS/FAIL line per acceptance check for the terminal summary."""
    def add(line):
        print(line)
        _ACCEPTANCE_LINES.append(line)
    return add


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
