"""Exception types raised by pointspec."""


class PointSpecError(Exception):
    """Base class for all pointspec errors."""


class ConstraintViolated(PointSpecError, ValueError):
    """Characteristic parameters do not lie on the unit 3-sphere."""


class NonpositiveScale(PointSpecError, ValueError):
    """A length scale (L0 or the box half width) is not positive."""


class NotUnitary(PointSpecError, ValueError):
    """A boundary matrix fails the unitarity check."""


class NotParityInvariant(PointSpecError, ValueError):
    """A boundary matrix does not commute with sigma_1."""


class NonpositiveMomentum(PointSpecError, ValueError):
    pass


class SingularSystem(PointSpecError, ArithmeticError):
    pass


class LevelMismatch(PointSpecError, ValueError):
    """A level does not solve the secular condition of the given matrix."""


class AmbiguousContinuation(PointSpecError, RuntimeError):
    """Nearest-energy matching between adjacent path samples is not injective."""


class NotClosed(PointSpecError, ValueError):
    pass


class GridTooCoarse(PointSpecError, ValueError):
    """The finite-difference grid cannot resolve the requested levels."""
