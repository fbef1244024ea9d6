"""Exception types shared across the package."""


class DomainError(ValueError):
    """A numeric argument lies outside its valid domain."""


class NotPositiveDefinite(ValueError):
    """A matrix that must be symmetric positive definite failed its factorization."""


class NonFinite(ArithmeticError):
    """A likelihood or probability evaluated to an invalid (non-finite) value."""


class InvalidConfig(ValueError):
    """A chain or run configuration is internally inconsistent."""


class InsufficientDraws(ValueError):
    """A diagnostic was given fewer draws or chains than it needs."""


class EmptyDraws(InsufficientDraws):
    """A draw collection holds no retained iterations."""


class MissingColumn(ValueError):
    """A required column is absent from the input table."""


class NonBinaryOutcome(ValueError):
    """The outcome column contains values other than 0 and 1."""


class EmptyAfterFiltering(ValueError):
    """No rows remain once rows with missing values are dropped."""


class ZeroVariance(ValueError):
    """A column slated for standardization is constant."""
