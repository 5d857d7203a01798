"""Minimax values of energy-capped quantum zero-sum games, with certificates."""

from .classical import (
    ClassicalGame,
    ClassicalSolution,
    discretize_multiplication_operator,
    lift_to_quantum,
    solve_classical,
)
from .energy import (
    EnergyConstraint,
    OracleResult,
    best_response_max,
    best_response_min,
    diagonal_constraint,
    membership,
    mix_toward_ground,
)
from .errors import (
    DegenerateKernelError,
    DimensionMismatchError,
    EigensolverError,
    InfeasibleConstraintError,
    InvalidKernelError,
    OracleNumericalError,
    QMinimaxError,
    SpecValidationError,
    SupportMismatchError,
)
from .measures import (
    StepDistribution,
    cdf,
    difference,
    spectral_masses,
    total_variation,
)
from .operators import (
    DensityOperator,
    HermitianOperator,
    SpectralDecomposition,
    random_density,
    rank_one_state,
    spectral_decompose,
    trace_norm,
)
from .payoff import (
    PayoffKernel,
    PayoffMatrix,
    builtin_kernel,
    expected_payoff,
    fubini_swap_check,
    response_operator_blue,
    response_operator_red,
    table_kernel,
    tabulate,
)
from .solver import (
    GameInstance,
    GapCheck,
    SaddleResult,
    SolverParams,
    build_game,
    lower_value,
    solve,
    upper_value,
)

__version__ = "0.1.0"

__all__ = [
    "ClassicalGame",
    "ClassicalSolution",
    "DegenerateKernelError",
    "DensityOperator",
    "DimensionMismatchError",
    "EigensolverError",
    "EnergyConstraint",
    "GameInstance",
    "GapCheck",
    "HermitianOperator",
    "InfeasibleConstraintError",
    "InvalidKernelError",
    "OracleNumericalError",
    "OracleResult",
    "PayoffKernel",
    "PayoffMatrix",
    "QMinimaxError",
    "SaddleResult",
    "SolverParams",
    "SpecValidationError",
    "SpectralDecomposition",
    "StepDistribution",
    "SupportMismatchError",
    "best_response_max",
    "best_response_min",
    "build_game",
    "builtin_kernel",
    "cdf",
    "diagonal_constraint",
    "difference",
    "discretize_multiplication_operator",
    "expected_payoff",
    "fubini_swap_check",
    "lift_to_quantum",
    "lower_value",
    "membership",
    "mix_toward_ground",
    "random_density",
    "rank_one_state",
    "response_operator_blue",
    "response_operator_red",
    "solve",
    "solve_classical",
    "spectral_decompose",
    "spectral_masses",
    "table_kernel",
    "tabulate",
    "total_variation",
    "trace_norm",
    "upper_value",
]
