from __future__ import annotations

import functools
import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from swirlab.geometry import CylGrid
from swirlab.scenarios import lamb_oseen, rigid_rotation
from swirlab.snapshots import SnapshotSeries

settings.register_profile("swirlab", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("swirlab")

KINDS = ("v_rho", "v_phi", "v_3", "pressure", "swirl")


def unit_grid(n_rho=32, n_z=64, rho_max=1.0, half=1.0) -> CylGrid:
    return CylGrid(rho_max, -half, half, n_rho, n_z)


def sampled(scenario, grid, times) -> SnapshotSeries:
    return SnapshotSeries.from_function(grid, times, scenario.exact, KINDS)


def constant_speed(grid, times, U=1.0) -> SnapshotSeries:
    """Purely axial constant velocity ``v_3 = U``."""
    zero = np.zeros((len(times),) + grid.shape)
    return SnapshotSeries(grid, times, {"v_rho": zero, "v_phi": zero.copy(),
                                        "v_3": zero + U, "pressure": zero.copy()})


@functools.lru_cache(maxsize=None)
def exact_lamb_oseen(n=64):
    g = unit_grid(n, 2 * n)
    return sampled(lamb_oseen(), g, np.linspace(0.0, 0.3, 31))


@functools.lru_cache(maxsize=None)
def exact_rigid(n=64):
    g = unit_grid(n, 2 * n)
    return sampled(rigid_rotation(), g, np.linspace(0.0, 0.3, 31))


@functools.lru_cache(maxsize=None)
def exact_lamb_oseen_fine(n=64):
    """Time step 1/1024, so every quarter-window ``R^2/4`` with ``R = 1/8`` holds samples."""
    g = unit_grid(n, 2 * n)
    return sampled(lamb_oseen(), g, np.linspace(0.0, 0.25, 257))


@pytest.fixture(scope="session")
def lo_fine():
    return exact_lamb_oseen_fine()


@pytest.fixture(scope="session")
def lo_series():
    return exact_lamb_oseen()


@pytest.fixture(scope="session")
def rr_series():
    return exact_rigid()


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


__all__ = ["unit_grid", "sampled", "constant_speed", "rel", "math"]


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
