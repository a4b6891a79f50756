"""prs3: kinematics, parasitic motion and stiffness maps for a 3-PRS machine."""

__version__ = "0.1.0"

from .config import ManipulatorConfig, LimbFrame, limb_frames, load_config
from .kinematics import Pose, rotation_from_tilt, solve_closure, spherical_joint_angles
from .jacobian import (JacobianBundle, ReshuffledJacobian, actuation_rates,
                       inverse_jacobian, parasitic_coupling, projection_matrix,
                       reshuffle)
from .stiffness import (CartesianStiffness, ComponentStiffness,
                        assemble_cartesian_stiffness, diagonal_stiffness,
                        limb_axial_stiffness, limb_torsional_stiffness,
                        shift_reference)
from .sweep import (OrientationGrid, SurfaceSample, TrajectoryResult,
                    integrate_trajectory, make_grid, parasitic_map,
                    stiffness_surfaces)
