"""Exception types shared across the package.

All errors derive from ValueError so callers can catch invalid input
generically; the CLI maps them to exit code 2.
"""


class InvalidInputError(ValueError):
    """Malformed or out-of-contract input (non-unit axis, open contour, ...)."""


class PiTurnError(InvalidInputError):
    """Rotation by pi requested in the vector representation.

    Pi-turns have tr R = -1 and sit at infinity in the vector picture, so
    they cannot be represented by a finite Rodrigues vector.
    """


class SingularSurfaceError(InvalidInputError):
    """Degenerate metric: the parameterization fails to be an immersion."""


class UmbilicError(InvalidInputError):
    """Principal directions requested at (or too close to) an umbilic point."""


class IntegrabilityError(InvalidInputError):
    """A field fails the integrability condition required for reconstruction."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class DomainError(InvalidInputError):
    """The requested domain contains a singularity of the Weierstrass datum."""
