"""Exception hierarchy shared by all modules."""


class MetaplecticError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(MetaplecticError, ValueError):
    pass


class ParameterError(MetaplecticError, ValueError):
    pass


class ValidationError(MetaplecticError, ValueError):
    """Input matrix is not symplectic within tolerance."""


class FactorizationError(MetaplecticError, ArithmeticError):
    pass


class DomainError(MetaplecticError, ValueError):
    pass


class DivergenceError(MetaplecticError, ArithmeticError):
    """A Gaussian integral does not converge."""


class ConditioningError(MetaplecticError, ArithmeticError):
    pass


class CapabilityError(MetaplecticError, NotImplementedError):
    pass


class GridError(MetaplecticError, ValueError):
    pass


class TruncationWarning(UserWarning):
    """Resampling needed values outside the grid support."""
