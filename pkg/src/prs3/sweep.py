"""Grid sweeps over the orientation workspace and trajectory integration.

Sweeps record both the commanded tilts and the induced parasitic coordinates
for every node, so one dataset serves surface plots over either space.
Trajectories integrate the velocity-level parasitic coupling with classical
RK4 and are used to cross-validate the position-level closure.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .config import limb_frames
from .errors import ConfigError, IntegrationError, Prs3Error
from .jacobian import parasitic_coupling
from .kinematics import (Pose, closure_residuals, rot_x, rot_y, rot_z,
                         rotation_from_tilt, solve_closure)
from .stiffness import assemble_cartesian_stiffness, diagonal_stiffness

RESIDUAL_LIMIT = 1e-7  # meters, mid-trajectory constraint drift bound


@dataclass(frozen=True)
class OrientationGrid:
    theta_x_samples: np.ndarray
    theta_y_samples: np.ndarray
    z: float
    resolution: int


@dataclass(frozen=True)
class SurfaceSample:
    theta_x: float
    theta_y: float
    x_par: float
    y_par: float
    torsion: float
    converged: bool
    kpx: float = None
    kpy: float = None
    kpz: float = None
    kax: float = None
    kay: float = None
    kaz: float = None


@dataclass(frozen=True)
class TrajectoryResult:
    times: np.ndarray
    tilt: np.ndarray        # (n, 2) commanded tilts along the path
    states: np.ndarray      # (n, 3) parasitic (x, y, torsion)
    residuals: np.ndarray   # (n,) max closure residual, meters
    method: str
    step: float


def make_grid(resolution, config, z, tilt_limit=None):
    """Uniform odd-resolution grid over the +/- tilt-limit square."""
    if resolution < 3 or resolution % 2 == 0:
        raise ConfigError("grid resolution must be odd and >= 3, got %d" % resolution)
    limit = config.tilt_limit if tilt_limit is None else tilt_limit
    samples = np.linspace(-limit, limit, resolution)
    return OrientationGrid(theta_x_samples=samples, theta_y_samples=samples.copy(),
                           z=float(z), resolution=int(resolution))


def _sweep_row(grid, config, iy, with_stiffness):
    """Evaluate one grid row, warm-starting closure from the previous node."""
    ty = grid.theta_y_samples[iy]
    row = []
    warm = None
    for tx in grid.theta_x_samples:
        try:
            pose = solve_closure(tx, ty, grid.z, config, initial=warm)
        except Prs3Error:
            warm = None
            row.append(SurfaceSample(theta_x=tx, theta_y=ty, x_par=math.nan,
                                     y_par=math.nan, torsion=math.nan,
                                     converged=False))
            continue
        warm = (pose.x_par, pose.y_par, pose.torsion)
        sample = SurfaceSample(theta_x=tx, theta_y=ty, x_par=pose.x_par,
                               y_par=pose.y_par, torsion=pose.torsion,
                               converged=True)
        if with_stiffness:
            try:
                diag = diagonal_stiffness(assemble_cartesian_stiffness(pose, config).K)
            except Prs3Error:
                sample = replace(sample, converged=False)
            else:
                sample = replace(sample, kpx=diag[0], kpy=diag[1], kpz=diag[2],
                                 kax=diag[3], kay=diag[4], kaz=diag[5])
        row.append(sample)
    return row


def _run_sweep(grid, config, with_stiffness, threads=1):
    rows = range(grid.resolution)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(
                lambda iy: _sweep_row(grid, config, iy, with_stiffness), rows))
    else:
        results = [_sweep_row(grid, config, iy, with_stiffness) for iy in rows]
    # deterministic ordering: row-major by (iy, ix) regardless of scheduling
    return [sample for row in results for sample in row]


def parasitic_map(grid, config, threads=1):
    """Closure-only sweep recording the parasitic coordinates per node."""
    return _run_sweep(grid, config, with_stiffness=False, threads=threads)


def stiffness_surfaces(grid, config, threads=1):
    """Full sweep: closure, Jacobian and the six diagonal stiffness values."""
    return _run_sweep(grid, config, with_stiffness=True, threads=threads)


def _tilt_rates(tilt_path, t, h=1e-6):
    txp, typ = tilt_path(t + h)
    txm, tym = tilt_path(t - h)
    return (txp - txm) / (2.0 * h), (typ - tym) / (2.0 * h)


def _parasitic_rates(t, state, tilt_path, z, config):
    """Right-hand side (x_dot, y_dot, torsion_dot) of the coupling ODE.

    The commanded tilt rates fix two angular-velocity components only up to
    the unknown torsion rate; substituting the chart's angular-velocity
    kinematics into the coupling row for w_z yields a scalar linear equation
    for torsion_dot, after which the translational parasitic rates follow.
    """
    tx, ty = tilt_path(t)
    dtx, dty = _tilt_rates(tilt_path, t)
    x, y, phi = state
    R = rotation_from_tilt(tx, ty, phi)
    frames = limb_frames(config)
    a = np.array([R @ fr.a_home for fr in frames])
    pose = _VelocityPose(a=a)
    _, _, M = parasitic_coupling(pose, config)
    m = M[:, :2]  # maps (w_x, w_y) to (v_x, v_y, w_z)

    # spatial angular velocity of the x-y-z tilt chart:
    # w = dtx*ex + dty*Rx(tx)ey + dphi*Rx(tx)Ry(ty)ez
    u = rot_x(tx) @ rot_y(ty) @ np.array([0.0, 0.0, 1.0])
    cx, sx = math.cos(tx), math.sin(tx)
    w0 = np.array([dtx, dty * cx, dty * sx])  # dphi-independent part
    denom = u[2] - m[2, 0] * u[0] - m[2, 1] * u[1]
    dphi = (m[2, 0] * w0[0] + m[2, 1] * w0[1] - w0[2]) / denom
    w = w0 + dphi * u
    vxy = m[:2] @ w[:2]
    return np.array([vxy[0], vxy[1], dphi])


@dataclass(frozen=True)
class _VelocityPose:
    """Minimal stand-in carrying only the rotated attachments a_i."""

    a: np.ndarray


def integrate_trajectory(tilt_path, z, step, duration, config):
    """RK4-integrate the parasitic state along a commanded tilt path.

    ``tilt_path(t)`` returns the commanded (theta_x, theta_y). The rotation
    never leaves the rotation group: torsion is part of the state and the
    full matrix is reconstructed from the tilt chart at every evaluation.
    """
    if step <= 0:
        raise ConfigError("step must be positive, got %r" % (step,))
    n_steps = int(round(duration / step))
    times = [0.0]
    states = [np.zeros(3)]
    tilts = [np.array(tilt_path(0.0))]
    residuals = [_path_residual(0.0, states[0], tilt_path, z, config)]

    state = states[0]
    t = 0.0
    for _ in range(n_steps):
        k1 = _parasitic_rates(t, state, tilt_path, z, config)
        k2 = _parasitic_rates(t + step / 2.0, state + step / 2.0 * k1, tilt_path, z, config)
        k3 = _parasitic_rates(t + step / 2.0, state + step / 2.0 * k2, tilt_path, z, config)
        k4 = _parasitic_rates(t + step, state + step * k3, tilt_path, z, config)
        state = state + step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t += step
        residual = _path_residual(t, state, tilt_path, z, config)
        if residual > RESIDUAL_LIMIT:
            raise IntegrationError(
                "constraint drift %.3e m at t = %.6f s exceeds %.1e m"
                % (residual, t, RESIDUAL_LIMIT), time=t, residual=residual)
        times.append(t)
        states.append(state)
        tilts.append(np.array(tilt_path(t)))
        residuals.append(residual)

    return TrajectoryResult(times=np.array(times), tilt=np.array(tilts),
                            states=np.array(states), residuals=np.array(residuals),
                            method="rk4", step=float(step))


def _path_residual(t, state, tilt_path, z, config):
    tx, ty = tilt_path(t)
    R = rotation_from_tilt(tx, ty, state[2])
    p = np.array([state[0], state[1], z])
    frames = limb_frames(config)
    return float(max(abs(fr.s2 @ (p + R @ fr.a_home)) for fr in frames))
