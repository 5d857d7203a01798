"""Exception types shared across the package."""


class QMinimaxError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatchError(QMinimaxError):
    """Operands live on spaces of different dimensions."""


class EigensolverError(QMinimaxError):
    """The dense eigensolver failed to converge."""

    def __init__(self, dim: int, detail: str = ""):
        self.dim = dim
        msg = f"eigensolver failed to converge on a {dim}x{dim} matrix"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class InvalidKernelError(QMinimaxError):
    """A payoff kernel evaluated negative on the spectrum grid."""


class DegenerateKernelError(QMinimaxError):
    """A payoff kernel is identically zero on the spectrum grid."""


class SupportMismatchError(QMinimaxError):
    """A distribution's support does not match the payoff grid."""


class InfeasibleConstraintError(QMinimaxError):
    """The energy cap lies below the smallest energy level."""


class OracleNumericalError(QMinimaxError):
    """The best-response oracle could not certify its result."""


class SpecValidationError(QMinimaxError):
    """A game-spec document failed schema validation."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")
