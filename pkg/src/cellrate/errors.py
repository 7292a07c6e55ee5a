"""Exception types shared across the package."""


class NumericalError(RuntimeError):
    """A numerical routine failed to converge."""


class QuadratureError(NumericalError):
    """Adaptive quadrature exceeded its subdivision depth."""


class BracketError(NumericalError):
    """No sign change found while bracketing a root."""
