"""Position-level loop closure and spherical-joint frames.

The platform has two independent tilts (about base x and y) plus heave; the
in-plane translations and the torsion about z are parasitic and are solved
here by Newton iteration on the three tangential constraint residuals
``s2_i . (p + R a_home_i) = 0``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .config import limb_frames
from .errors import (ClosureError, DegenerateRotationError, GeometryError,
                     SingularityError, UnreachableError)

NEWTON_TOL = 1e-12       # residual tolerance, meters
NEWTON_MAX_ITER = 50
COND_LIMIT = 1e12


def rot_x(a):
    c, s = math.cos(a), math.sin(a)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rot_y(a):
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rot_z(a):
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rotation_from_tilt(theta_x, theta_y, torsion=0.0):
    """Platform rotation for the x-tilt / y-tilt / z-torsion chart."""
    return rot_x(theta_x) @ rot_y(theta_y) @ rot_z(torsion)


@dataclass(frozen=True)
class Pose:
    """A closed (constraint-satisfying) platform configuration."""

    p: np.ndarray          # platform origin in the base frame
    R: np.ndarray          # platform rotation
    tilt: tuple            # (theta_x, theta_y), the commanded coordinates
    torsion: float         # parasitic rotation about z
    d: np.ndarray          # (3,) actuated carriage heights
    l: np.ndarray          # (3,3) limb vectors, revolute -> spherical center
    a: np.ndarray          # (3,3) rotated platform attachments R @ a_home_i

    @property
    def x_par(self):
        return float(self.p[0])

    @property
    def y_par(self):
        return float(self.p[1])


@dataclass(frozen=True)
class SphericalJointAngles:
    """Y-X-Z Euler angles of one spherical joint plus its carrier frame."""

    theta3: float
    theta4: float
    theta5: float
    R_F: np.ndarray        # rotation of the joint frame w.r.t. the base


def _closure_residuals(unknowns, theta_x, theta_y, z, frames):
    x, y, phi = unknowns
    R = rotation_from_tilt(theta_x, theta_y, phi)
    # d/dphi of R: the torsion factor differentiates in place
    Rxy = rot_x(theta_x) @ rot_y(theta_y)
    dRz = rot_z(phi) @ np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
    dR = Rxy @ dRz
    p = np.array([x, y, z])
    res = np.empty(3)
    jac = np.empty((3, 3))
    for k, fr in enumerate(frames):
        c = p + R @ fr.a_home
        res[k] = fr.s2 @ c
        jac[k, 0] = fr.s2[0]
        jac[k, 1] = fr.s2[1]
        jac[k, 2] = fr.s2 @ (dR @ fr.a_home)
    return res, jac, R, p


def solve_closure(theta_x, theta_y, z, config, initial=None):
    """Solve the parasitic coordinates and limb geometry for a commanded pose.

    ``initial`` optionally warm-starts Newton with an (x, y, torsion) triple.
    """
    tol = 1e-12
    if abs(theta_x) > config.tilt_limit + tol or abs(theta_y) > config.tilt_limit + tol:
        raise GeometryError(
            "commanded tilt (%.4f, %.4f) rad exceeds tilt_limit %.4f rad"
            % (theta_x, theta_y, config.tilt_limit))

    frames = limb_frames(config)
    u = np.zeros(3)
    if initial is not None:
        # take the warm start only if it actually beats the cold start, so a
        # node with an exact trivial solution (the home pose) stays exact
        guess = np.asarray(initial, dtype=float)
        r_guess, _, _, _ = _closure_residuals(guess, theta_x, theta_y, z, frames)
        r_zero, _, _, _ = _closure_residuals(u, theta_x, theta_y, z, frames)
        if np.max(np.abs(r_guess)) < np.max(np.abs(r_zero)):
            u = guess.copy()
    res = None
    for _ in range(NEWTON_MAX_ITER):
        res, jac, R, p = _closure_residuals(u, theta_x, theta_y, z, frames)
        if np.max(np.abs(res)) < NEWTON_TOL:
            break
        if np.linalg.cond(jac) > COND_LIMIT:
            raise SingularityError("closure Jacobian singular at tilt (%.4f, %.4f)"
                                   % (theta_x, theta_y))
        u = u - np.linalg.solve(jac, res)
    else:
        raise ClosureError(
            "closure Newton did not converge in %d iterations (residual %.3e m)"
            % (NEWTON_MAX_ITER, float(np.max(np.abs(res)))),
            residual=float(np.max(np.abs(res))))

    res, _, R, p = _closure_residuals(u, theta_x, theta_y, z, frames)

    L = config.link_length
    sign = -1.0 if config.assembly_mode == "elbow_down" else 1.0
    d = np.empty(3)
    l = np.empty((3, 3))
    a = np.empty((3, 3))
    for k, fr in enumerate(frames):
        a[k] = R @ fr.a_home
        c = p + a[k]
        radial = np.array([math.cos(fr.xi), math.sin(fr.xi), 0.0])
        e = (c - fr.b) @ radial
        if abs(e) >= L:
            raise UnreachableError(
                "limb %d cannot reach: in-plane offset %.6f m >= link length %.6f m"
                % (fr.index, abs(e), L))
        d[k] = c[2] + sign * math.sqrt(L * L - e * e)
        l[k] = c - (fr.b + d[k] * fr.s1)

    return Pose(p=p, R=R, tilt=(theta_x, theta_y), torsion=float(u[2]),
                d=d, l=l, a=a)


def closure_residuals(pose, config):
    """Tangential constraint residuals of a pose, one per limb (meters)."""
    frames = limb_frames(config)
    return np.array([fr.s2 @ (pose.p + pose.R @ fr.a_home) for fr in frames])


def limb_elevation(pose, limb_index, config):
    """Elevation angle of the fixed-length link about the revolute axis.

    Measured in the limb's own frame; zero when the link is vertical.
    """
    fr = limb_frames(config)[limb_index - 1]
    l_local = rot_z(-fr.xi) @ pose.l[limb_index - 1]
    return math.atan2(l_local[0], l_local[2])


def spherical_joint_angles(pose, limb_index, config):
    """Extract the Y-X-Z rotations of one spherical joint from the limb chain.

    The prismatic+revolute part of the chain carries a frame R_z(xi) R_y(t2);
    the platform-side half of the joint is the frame R R_z(xi), i.e. the limb
    azimuth frozen into the platform. Whatever rotation remains between the
    two halves is the spherical joint's Y-X-Z decomposition, so all three
    angles vanish at an untilted pose with a vertical link.
    """
    fr = limb_frames(config)[limb_index - 1]
    t2 = limb_elevation(pose, limb_index, config)
    R_F = rot_z(fr.xi) @ rot_y(t2)
    R_s = R_F.T @ pose.R @ rot_z(fr.xi)

    s4 = -R_s[1, 2]
    s4 = min(1.0, max(-1.0, s4))
    theta4 = math.asin(s4)
    if abs(math.cos(theta4)) < 1e-9:
        raise DegenerateRotationError(
            "spherical joint %d at gimbal degeneracy (|cos theta4| < 1e-9)"
            % (limb_index,))
    theta3 = math.atan2(R_s[0, 2], R_s[2, 2])
    theta5 = math.atan2(R_s[1, 0], R_s[1, 1])
    return SphericalJointAngles(theta3=theta3, theta4=theta4, theta5=theta5, R_F=R_F)
