"""Exception types shared across the package."""


class NonConvergence(RuntimeError):
    """Root iteration failed to reach the residual tolerance."""


class NoRootInRegion(RuntimeError):
    """A solver polynomial had no root inside the requested half-plane."""


class DegenerateMap(ValueError):
    """Moebius coefficients with (numerically) vanishing determinant."""


class NotInImage(ValueError):
    """Coefficient vector fails the alternating real/imaginary pattern."""


class NonRealInput(ValueError):
    """An operation restricted to real coefficients received complex data."""


class DimensionMismatch(ValueError):
    """Vector or matrix shapes are inconsistent with the declared sizes."""
