"""Exception hierarchy.

Two families matter to callers: :class:`NumericalError` (a solver could not
reach its accuracy contract) and :class:`PhysicsDomainError` (the inputs are
outside the regime where the requested quantity is defined).  The CLI maps
them to distinct exit codes.
"""


class AAIError(Exception):
    """Base class for all package errors."""


class ConfigError(AAIError, ValueError):
    """Malformed run configuration."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnknownKey(ConfigError):
    pass


class TypeMismatch(ConfigError):
    pass


class MissingRequired(ConfigError):
    pass


class NumericalError(AAIError, ArithmeticError):
    """A numerical method failed its accuracy or stability contract."""


class PowerOverflow(NumericalError):
    """A trigonometric-polynomial product needs a power of t above 1."""


class StepTooLarge(NumericalError):
    pass


class QuadratureNotConverged(NumericalError):
    pass


class UnstableStep(NumericalError):
    pass


class BoundaryLeak(NumericalError):
    pass


class DimensionTooSmall(NumericalError, ValueError):
    pass


class PhysicsDomainError(AAIError, ValueError):
    """Inputs outside the validity domain of the requested quantity."""


class PacketGapTooLarge(PhysicsDomainError):
    pass


class PhaseUndefined(PhysicsDomainError):
    pass


class UnsupportedIndex(PhysicsDomainError):
    pass


class UnsupportedLambda(PhysicsDomainError):
    pass


class GridTooNarrow(PhysicsDomainError):
    pass


class AliasRisk(PhysicsDomainError):
    pass
