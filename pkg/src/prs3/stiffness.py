"""Cartesian stiffness assembly from series-spring limb components.

Each limb contributes one axial coefficient (carriage + revolute joint +
limb body in series) on its actuation screw and one torsional coefficient
(spherical joint + fixed-length link in series, taken about the revolute
axis) on its constraint wrench. The platform-level 6x6 matrix is the
congruence K = G diag(k_a, k_c) G^T.
"""

from dataclasses import dataclass

import numpy as np

from .config import limb_frames
from .errors import ConfigError
from .jacobian import inverse_jacobian
from .kinematics import spherical_joint_angles


@dataclass(frozen=True)
class ComponentStiffness:
    k_axial: np.ndarray       # (3,) per-limb series axial coefficients, N/m
    k_torsional: np.ndarray   # (3,) per-limb series torsional coefficients, N*m/rad
    K_s: list                 # per-limb 3x3 rotated spherical-joint stiffness
    K_diag: np.ndarray        # 6x6 diag(k_a1..3, k_c1..3)


@dataclass(frozen=True)
class CartesianStiffness:
    K: np.ndarray             # 6x6 platform stiffness, [v; w] ordering
    reference: np.ndarray     # reference point offset from the platform center

    @property
    def K_a_par(self):
        return self.K[:3, :3]

    @property
    def K_a_perp(self):
        return self.K[:3, 3:]

    @property
    def K_c_par(self):
        return self.K[3:, :3]

    @property
    def K_c_perp(self):
        return self.K[3:, 3:]


def limb_axial_stiffness(d_i, config):
    """Series axial coefficient of one limb at carriage height d_i."""
    ax = config.axial
    if config.compliance_model == "parametric":
        pm = config.parametric
        # engaged lead-screw length scales the screw compliance; rail and
        # slider add in series
        k_carriage = 1.0 / (abs(d_i) / pm.EA_leadscrew
                            + 1.0 / pm.k_guiderail + 1.0 / pm.k_slider)
        k_limb_body = pm.EA_link / config.link_length
    else:
        k_carriage = ax.k_carriage
        k_limb_body = ax.k_limb_body
    for name, val in (("k_carriage", k_carriage), ("k_revolute", ax.k_revolute),
                      ("k_limb_body", k_limb_body)):
        if val <= 0:
            raise ConfigError("%s must be positive, got %r" % (name, val))
    return 1.0 / (1.0 / k_carriage + 1.0 / ax.k_revolute + 1.0 / k_limb_body)


def spherical_joint_stiffness(pose, limb_index, config):
    """Rotated 3x3 spherical-joint stiffness R_F^T Ks_bar R_F of one limb."""
    angles = spherical_joint_angles(pose, limb_index, config)
    Ks_bar = np.diag(config.spherical_axes_k)
    return angles.R_F.T @ Ks_bar @ angles.R_F


def limb_torsional_stiffness(pose, limb_index, config):
    """Series torsional coefficient about the limb's revolute axis."""
    fr = limb_frames(config)[limb_index - 1]
    K_s = spherical_joint_stiffness(pose, limb_index, config)
    k_si = float(fr.s2 @ K_s @ fr.s2)
    return 1.0 / (1.0 / k_si + 1.0 / config.torsional.k_limb_body_t)


def component_stiffness(pose, config):
    """All per-limb coefficients plus the assembled 6x6 joint-space diagonal."""
    k_ax = np.array([limb_axial_stiffness(pose.d[i], config) for i in range(3)])
    K_s = [spherical_joint_stiffness(pose, i + 1, config) for i in range(3)]
    k_to = np.array([limb_torsional_stiffness(pose, i + 1, config) for i in range(3)])
    return ComponentStiffness(k_axial=k_ax, k_torsional=k_to, K_s=K_s,
                              K_diag=np.diag(np.concatenate([k_ax, k_to])))


def assemble_cartesian_stiffness(pose, config):
    """Platform stiffness K = G diag(k_a, k_c) G^T at the platform center."""
    bundle = inverse_jacobian(pose, config)
    comps = component_stiffness(pose, config)
    G = bundle.Gt.T
    K = G @ comps.K_diag @ G.T
    return CartesianStiffness(K=K, reference=np.zeros(3))


def _skew(v):
    return np.array([[0.0, -v[2], v[1]],
                     [v[2], 0.0, -v[0]],
                     [-v[1], v[0], 0.0]])


def shift_reference(stiffness, offset):
    """Re-express K at a point displaced by ``offset`` from the current one.

    A twist at the new point maps to the old through the translation adjoint
    Ad = [[I, skew(r)], [0, I]]; K transforms by congruence Ad^T K Ad.
    """
    offset = np.asarray(offset, dtype=float)
    Ad = np.eye(6)
    Ad[:3, 3:] = _skew(offset)
    K_new = Ad.T @ stiffness.K @ Ad
    return CartesianStiffness(K=K_new, reference=stiffness.reference + offset)


def diagonal_stiffness(K):
    """The six diagonal entries (kpx, kpy, kpz, kax, kay, kaz) of K."""
    K = np.asarray(K)
    return tuple(float(K[i, i]) for i in range(6))
