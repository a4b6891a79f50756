"""Analytic inverse Jacobian, constraint projector and parasitic coupling.

Rows 1-3 of the 6x6 matrix map a platform twist [v; w] to carriage rates
(reciprocal screws of the actuated prismatic joints); rows 4-6 are the
constraint wrenches whose product with any feasible twist is zero.
"""

import math
from dataclasses import dataclass

import numpy as np

from .config import limb_frames
from .errors import ConstraintViolationError, SingularityError

ACTUATION_SING_TOL = 1e-9
SVD_RCOND = 1e-10
COND_LIMIT = 1e12

# column order of the parasitic/independent reshuffle
PARASITIC_COLS = (0, 1, 5)    # v_x, v_y, w_z
INDEPENDENT_COLS = (2, 3, 4)  # v_z, w_x, w_y


@dataclass(frozen=True)
class JacobianBundle:
    Gt: np.ndarray    # 6x6, rows = actuation then constraint
    Ga: np.ndarray    # 6x3 actuation columns of G = Gt.T
    Gc: np.ndarray    # 6x3 constraint columns of G = Gt.T
    C1: np.ndarray    # 3x3 parasitic coefficient matrix
    C2: np.ndarray    # 3x2 independent coefficient matrix
    M: np.ndarray     # 3x3 parasitic map [C1^-1 C2 | 0] on (w_x, w_y, v_z)


@dataclass(frozen=True)
class ReshuffledJacobian:
    """Blocks of Gt with columns reordered to (v_x, v_y, w_z | v_z, w_x, w_y)."""

    G_ad: np.ndarray
    G_af: np.ndarray
    G_cd: np.ndarray
    G_cf: np.ndarray


def parasitic_coupling(pose, config):
    """Coupling (C1, C2, M) between parasitic and independent velocities.

    Each constraint row, written out with a_i = R a_home_i, is linear in the
    twist; collecting the parasitic components (v_x, v_y, w_z) on the left
    gives C1 xd_dot = C2 xi_dot, hence xd_dot = C1^-1 C2 (w_x, w_y) with v_z
    contributing nothing.
    """
    frames = limb_frames(config)
    C1 = np.empty((3, 3))
    C2 = np.empty((3, 2))
    for k, fr in enumerate(frames):
        c, s = math.cos(fr.xi), math.sin(fr.xi)
        ax, ay, az = pose.a[k]
        C1[k] = (-s, c, ax * c + ay * s)
        C2[k] = (az * c, az * s)
    if np.linalg.cond(C1) > COND_LIMIT:
        raise SingularityError("parasitic coupling matrix C1 is singular")
    M = np.zeros((3, 3))
    M[:, :2] = np.linalg.solve(C1, C2)
    return C1, C2, M


def inverse_jacobian(pose, config):
    """Screw-based 6x6 inverse Jacobian with its partitions at a closed pose."""
    frames = limb_frames(config)
    Gt = np.empty((6, 6))
    for k, fr in enumerate(frames):
        l = pose.l[k]
        a = pose.a[k]
        h = l @ fr.s1
        if abs(h) < ACTUATION_SING_TOL:
            raise SingularityError(
                "actuation singularity: limb %d is horizontal (l.s1 = %.3e)"
                % (fr.index, h))
        # moment of a unit line force through the attachment point a_i is
        # a x (line direction); validated against central differences of the
        # closure solve, which rejects the opposite ordering
        Gt[k, :3] = l / h
        Gt[k, 3:] = np.cross(a, l) / h
        Gt[3 + k, :3] = fr.s2
        Gt[3 + k, 3:] = np.cross(a, fr.s2)
    C1, C2, M = parasitic_coupling(pose, config)
    G = Gt.T
    return JacobianBundle(Gt=Gt, Ga=G[:, :3].copy(), Gc=G[:, 3:].copy(),
                          C1=C1, C2=C2, M=M)


def actuation_rates(pose, twist, config):
    """Carriage rates for a constraint-compatible task twist [v; w]."""
    twist = np.asarray(twist, dtype=float)
    bundle = inverse_jacobian(pose, config)
    residual = bundle.Gt[3:] @ twist
    if np.max(np.abs(residual)) >= 1e-9:
        raise ConstraintViolationError(
            "twist violates the structural constraints (residual %.3e)"
            % float(np.max(np.abs(residual))), residual=residual)
    return bundle.Gt[:3] @ twist


def projection_matrix(Gc):
    """Projector I - Gc Gc+ filtering a desired twist into the motion space."""
    u, s, vt = np.linalg.svd(Gc, full_matrices=False)
    if s[-1] < SVD_RCOND * s[0]:
        raise SingularityError(
            "constraint block is rank deficient (singular values %s)" % (s,))
    Gc_pinv = vt.T @ np.diag(1.0 / s) @ u.T
    return np.eye(6) - Gc @ Gc_pinv


def reshuffle(Gt):
    """Partition Gt by parasitic (v_x, v_y, w_z) and free (v_z, w_x, w_y) columns."""
    Gt = np.asarray(Gt)
    par = list(PARASITIC_COLS)
    ind = list(INDEPENDENT_COLS)
    return ReshuffledJacobian(
        G_ad=Gt[:3][:, par].copy(),
        G_af=Gt[:3][:, ind].copy(),
        G_cd=Gt[3:][:, par].copy(),
        G_cf=Gt[3:][:, ind].copy(),
    )


def unshuffle(blocks):
    """Inverse of :func:`reshuffle`; rebuilds the 6x6 matrix in twist order."""
    Gt = np.empty((6, 6))
    top = np.hstack([blocks.G_ad, blocks.G_af])
    bot = np.hstack([blocks.G_cd, blocks.G_cf])
    stacked = np.vstack([top, bot])
    order = list(PARASITIC_COLS) + list(INDEPENDENT_COLS)
    for new_idx, old_idx in enumerate(order):
        Gt[:, old_idx] = stacked[:, new_idx]
    return Gt
