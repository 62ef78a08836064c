"""Shared fixtures and the acceptance-criteria summary hook."""

import numpy as np
import pytest

from spinscan import apply_pattern, build_lattice

ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo one verdict line per acceptance criterion after the run."""
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def fm_5x5():
    """5x5 square lattice, a = 3 A, ferromagnetic +z, spin 1/2, g = 2."""
    lat = build_lattice("square", 3.0, 5, 5)
    return apply_pattern(lat, "FM", direction=(0.0, 0.0, 1.0), spin_mag=0.5, g=2.0)


@pytest.fixture(scope="session")
def neel_5x5():
    """5x5 square lattice, a = 3 A, checkerboard +/-z, spin 1/2, g = 2."""
    lat = build_lattice("square", 3.0, 5, 5)
    return apply_pattern(lat, "AFM-Neel", direction=(0.0, 0.0, 1.0), spin_mag=0.5, g=2.0)


@pytest.fixture(scope="session")
def single_site():
    """One spin-1/2 site at the origin pointing +z."""
    lat = build_lattice("square", 3.0, 1, 1)
    return apply_pattern(lat, "FM", direction=(0.0, 0.0, 1.0), spin_mag=0.5, g=2.0)


@pytest.fixture()
def rng():
    return np.random.default_rng(20260815)
