import math

import numpy as np
import pytest

from prs3 import (integrate_trajectory, make_grid, parasitic_map, solve_closure,
                  stiffness_surfaces)
from prs3.config import DEG
from prs3.errors import ConfigError
from prs3.kinematics import rot_z

Z = 0.39


def test_grid_resolution_contract(cfg):
    grid = make_grid(5, cfg, Z)
    assert len(grid.theta_x_samples) == 5
    assert grid.theta_x_samples[2] == 0.0
    assert grid.theta_x_samples[0] == pytest.approx(-cfg.tilt_limit)
    with pytest.raises(ConfigError):
        make_grid(4, cfg, Z)
    with pytest.raises(ConfigError):
        make_grid(1, cfg, Z)


def test_parasitic_map_center_node(cfg):
    samples = parasitic_map(make_grid(5, cfg, Z), cfg)
    assert len(samples) == 25
    center = samples[12]
    assert center.theta_x == 0.0 and center.theta_y == 0.0
    assert center.converged
    assert abs(center.x_par) < 1e-12
    assert abs(center.y_par) < 1e-12
    assert abs(center.torsion) < 1e-12
    assert center.kpx is None


def test_parasitic_map_mirror_symmetry(cfg):
    n = 9
    samples = parasitic_map(make_grid(n, cfg, Z), cfg)
    field = {(round(s.theta_x / DEG, 6), round(s.theta_y / DEG, 6)): s for s in samples}
    for s in samples:
        mirror = field[(round(-s.theta_x / DEG, 6), round(s.theta_y / DEG, 6))]
        assert mirror.x_par == pytest.approx(s.x_par, abs=1e-9)
        assert mirror.y_par == pytest.approx(-s.y_par, abs=1e-9)
        assert mirror.torsion == pytest.approx(-s.torsion, abs=1e-9)


def test_parasitic_threefold_symmetry(cfg):
    # rotating the commanded tilt axis by 120 deg rotates the parasitic vector
    Rg = rot_z(2.0 * math.pi / 3.0)
    for tx, ty in [(10, 5), (-15, 25), (30, -20)]:
        pose = solve_closure(tx * DEG, ty * DEG, Z, cfg)
        R_rot = Rg @ pose.R @ Rg.T
        b_ang = math.asin(max(-1.0, min(1.0, R_rot[0, 2])))
        a_ang = math.atan2(-R_rot[1, 2], R_rot[2, 2])
        rotated = solve_closure(a_ang, b_ang, Z, cfg)
        np.testing.assert_allclose(rotated.p[:2], Rg[:2, :2] @ pose.p[:2], atol=1e-9)


def test_sweep_determinism_and_threads(cfg):
    grid = make_grid(7, cfg, Z)
    serial = stiffness_surfaces(grid, cfg)
    threaded = stiffness_surfaces(grid, cfg, threads=4)
    assert serial == threaded


def test_stiffness_surfaces_fields(cfg):
    samples = stiffness_surfaces(make_grid(5, cfg, Z), cfg)
    assert all(s.converged for s in samples)
    center = samples[12]
    assert center.kpx == pytest.approx(center.kpy, rel=1e-9)
    for s in samples:
        for field in ("kpx", "kpy", "kpz", "kax", "kay", "kaz"):
            assert getattr(s, field) > 0.0


def test_grid_closure_residuals(cfg):
    from prs3.kinematics import closure_residuals
    samples = parasitic_map(make_grid(9, cfg, Z), cfg)
    for s in samples:
        pose = solve_closure(s.theta_x, s.theta_y, Z, cfg,
                             initial=(s.x_par, s.y_par, s.torsion))
        assert np.abs(closure_residuals(pose, cfg)).max() < 1e-10


def smoothstep_ramp(amplitude, duration):
    def path(t):
        s = min(max(t / duration, 0.0), 1.0)
        s = s * s * (3.0 - 2.0 * s)
        return amplitude * s, 0.0
    return path


def test_trajectory_zero_path_stationary(cfg):
    res = integrate_trajectory(lambda t: (0.0, 0.0), Z, 1e-3, 0.2, cfg)
    np.testing.assert_allclose(res.states, 0.0, atol=1e-15)
    np.testing.assert_allclose(res.residuals, 0.0, atol=1e-12)


def test_trajectory_ramp_matches_closure(cfg):
    res = integrate_trajectory(smoothstep_ramp(30 * DEG, 1.0), Z, 1e-3, 1.0, cfg)
    pose = solve_closure(30 * DEG, 0.0, Z, cfg)
    assert abs(res.states[-1][0] - pose.x_par) < 1e-6
    assert abs(res.states[-1][1] - pose.y_par) < 1e-6
    assert abs(res.states[-1][2] - pose.torsion) < 1e-6
    assert res.residuals.max() < 1e-7
    assert res.method == "rk4"


def test_trajectory_consistency_along_path(cfg):
    res = integrate_trajectory(smoothstep_ramp(35 * DEG, 1.0), Z, 1e-3, 1.0, cfg)
    worst = 0.0
    for i in range(0, len(res.times), 100):
        pose = solve_closure(res.tilt[i][0], res.tilt[i][1], Z, cfg)
        worst = max(worst, np.abs(res.states[i] -
                                  [pose.x_par, pose.y_par, pose.torsion]).max())
    assert worst < 1e-6


def test_trajectory_holonomy(cfg):
    def loop(t):
        a = 2.0 * math.pi * t
        s = math.sin(a)
        return 20 * DEG * s * s, 10 * DEG * s
    res = integrate_trajectory(loop, Z, 1e-3, 1.0, cfg)
    assert np.abs(res.states[-1]).max() < 1e-8


def test_trajectory_bad_step(cfg):
    with pytest.raises(ConfigError):
        integrate_trajectory(lambda t: (0.0, 0.0), Z, 0.0, 1.0, cfg)
