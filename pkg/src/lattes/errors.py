class LattesError(Exception):
    """Base class for errors raised by this package."""


class LatticeError(LattesError, ValueError):
    """A value expected to be a lattice point is not one."""


class PoleError(LattesError, ArithmeticError):
    """Evaluation requested within the pole guard of an elliptic function."""


class ThetaConvergenceError(LattesError, ArithmeticError):
    """Theta series truncation would exceed the hard term cap."""


class ClosureError(LattesError, RuntimeError):
    """Group closure exceeded its element cap."""


class NotALineError(LattesError, ValueError):
    """The image of a line is not contained in a line."""


class DegenerateOrbitError(LattesError, ArithmeticError):
    """An orbit of a homogeneous map reached the origin."""


class VerificationFailure(LattesError, AssertionError):
    """A sampled certificate (regularity, critical line, ...) failed."""
