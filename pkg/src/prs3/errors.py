"""Exception hierarchy for the prs3 package."""


class Prs3Error(Exception):
    """Base class for all prs3 errors."""


class ConfigError(Prs3Error):
    """A configuration value is missing, malformed, or out of range."""


class GeometryError(ConfigError):
    """The configured geometry cannot close (or a commanded pose is outside it)."""


class ClosureError(Prs3Error):
    """Newton iteration on the loop-closure residuals failed to converge."""

    def __init__(self, msg, residual=None):
        super().__init__(msg)
        self.residual = residual


class UnreachableError(ClosureError):
    """A limb cannot reach its platform attachment at the commanded pose."""


class SingularityError(Prs3Error):
    """A matrix required by the model is singular or numerically rank deficient."""


class ConstraintViolationError(Prs3Error):
    """A task twist is incompatible with the structural constraints."""

    def __init__(self, msg, residual=None):
        super().__init__(msg)
        self.residual = residual


class DegenerateRotationError(Prs3Error):
    """Euler-angle extraction hit a gimbal degeneracy; angles are not unique."""


class IntegrationError(Prs3Error):
    """Trajectory integration drifted off the constraint manifold."""

    def __init__(self, msg, time=None, residual=None):
        super().__init__(msg)
        self.time = time
        self.residual = residual
