import dataclasses

import numpy as np
import pytest

from prs3 import load_config, solve_closure


@pytest.fixture(scope="session")
def cfg():
    return load_config()


# one line per acceptance criterion, echoed after the run so the verdicts
# are visible even when capture hides passing tests' stdout
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def vee(W):
    """Axial vector of a (nearly) skew-symmetric 3x3 matrix."""
    return np.array([W[2, 1], W[0, 2], W[1, 0]])


def fd_twist_and_rates(cfg, tx, ty, z, direction, h=1e-7):
    """Central-difference twist and carriage rates along one commanded direction.

    ``direction`` scales (theta_x, theta_y, z). The parasitic coordinates are
    re-solved at each perturbed pose, so the resulting twist is automatically
    constraint-consistent. Returns (pose, twist[v;w], d_rates).
    """
    dtx, dty, dz = direction
    # widen the tilt guard so perturbations at the workspace boundary close
    wide = dataclasses.replace(cfg, tilt_limit=1.4)
    pp = solve_closure(tx + h * dtx, ty + h * dty, z + h * dz, wide)
    pm = solve_closure(tx - h * dtx, ty - h * dty, z - h * dz, wide)
    p0 = solve_closure(tx, ty, z, cfg)
    v = (pp.p - pm.p) / (2.0 * h)
    w = vee((pp.R - pm.R) / (2.0 * h) @ p0.R.T)
    qd = (pp.d - pm.d) / (2.0 * h)
    return p0, np.concatenate([v, w]), qd
