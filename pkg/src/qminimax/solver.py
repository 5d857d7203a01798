"""Saddle-point solver: fictitious play in state space with certified gaps.

Each iteration best-responds to the opponent's uniformly averaged state
through the energy-capped oracle; averages stay feasible because the
strategy sets are convex. The duality gap is always measured by fresh
oracle calls at the averaged pair, so a small gap is a checkable
certificate of the minimax value rather than an inference from iterate
differences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .energy import (
    EnergyConstraint,
    OracleNumericalError,
    _compress_energy,
    _max_raw,
    best_response_max,
    best_response_min,
    diagonal_constraint,
)
from .errors import DimensionMismatchError
from .measures import spectral_masses
from .operators import (
    DensityOperator,
    HermitianOperator,
    SpectralDecomposition,
    _eigh,
    hermitian_part,
    spectral_decompose,
)
from .payoff import (
    PayoffKernel,
    PayoffMatrix,
    response_operator_blue,
    response_operator_red,
    tabulate,
)

STEP_ORACLE_TOL = 1e-9
CHECK_ORACLE_TOL = 1e-10


@dataclass(frozen=True)
class SolverParams:
    gap_tol: float = 1e-3
    max_iters: int = 200000
    check_interval: int = 25
    seed: int = 0

    def __post_init__(self):
        if self.gap_tol <= 0:
            raise ValueError("gap_tol must be positive")
        if self.max_iters < 1 or self.check_interval < 1:
            raise ValueError("max_iters and check_interval must be >= 1")


@dataclass(frozen=True, eq=False)
class GameInstance:
    """Full description of one energy-capped bilinear game."""

    blue: HermitianOperator
    blue_decomp: SpectralDecomposition
    red: HermitianOperator
    red_decomp: SpectralDecomposition
    kernel: PayoffMatrix
    constraint_blue: EnergyConstraint
    constraint_red: EnergyConstraint
    params: SolverParams


def build_game(
    blue: HermitianOperator,
    red: HermitianOperator,
    kernel: PayoffKernel,
    constraint_blue: EnergyConstraint | None = None,
    constraint_red: EnergyConstraint | None = None,
    params: SolverParams | None = None,
    cluster_tol: float | None = None,
) -> GameInstance:
    """Validate and assemble a game: decompose players, tabulate the kernel.

    Omitted constraints default to diag(0, 1, ...) capped at the top level,
    which is inactive.
    """
    blue_decomp = spectral_decompose(blue, cluster_tol)
    red_decomp = spectral_decompose(red, cluster_tol)
    if constraint_blue is None:
        constraint_blue = diagonal_constraint(
            np.arange(blue.dim, dtype=float), float(max(blue.dim - 1, 0))
        )
    if constraint_red is None:
        constraint_red = diagonal_constraint(
            np.arange(red.dim, dtype=float), float(max(red.dim - 1, 0))
        )
    if constraint_blue.dim != blue.dim:
        raise DimensionMismatchError(
            f"blue constraint dim {constraint_blue.dim} != player dim {blue.dim}"
        )
    if constraint_red.dim != red.dim:
        raise DimensionMismatchError(
            f"red constraint dim {constraint_red.dim} != player dim {red.dim}"
        )
    matrix = tabulate(kernel, blue_decomp, red_decomp)
    return GameInstance(
        blue,
        blue_decomp,
        red,
        red_decomp,
        matrix,
        constraint_blue,
        constraint_red,
        params or SolverParams(),
    )


@dataclass(frozen=True)
class GapCheck:
    iteration: int
    lower: float
    upper: float
    gap: float


@dataclass(frozen=True, eq=False)
class SaddleResult:
    """Certified bracket [value_lower, value_upper] with witnessing states."""

    value_lower: float
    value_upper: float
    value: float
    gap: float
    rho_star: DensityOperator
    phi_star: DensityOperator
    iterations: int
    gap_history: tuple[GapCheck, ...]
    converged: bool


def lower_value(game: GameInstance, rho: DensityOperator) -> float:
    """Certified min over feasible red states of the payoff at fixed rho."""
    p = spectral_masses(rho, game.blue_decomp)
    m_red = response_operator_red(game.kernel, game.red_decomp, p)
    return best_response_min(m_red, game.constraint_red, CHECK_ORACLE_TOL).primal_value


def upper_value(game: GameInstance, phi: DensityOperator) -> float:
    """Certified max over feasible blue states of the payoff at fixed phi."""
    q = spectral_masses(phi, game.red_decomp)
    m_blue = response_operator_blue(game.kernel, game.blue_decomp, q)
    return best_response_max(m_blue, game.constraint_blue, CHECK_ORACLE_TOL).primal_value


class _ResponseContext:
    """Per-side precomputation for fast best responses inside the loop.

    The response operator always lives in the player's fixed eigenbasis, so
    the unconstrained-top fast path needs no eigensolve at all: the minimum
    energy reachable inside each spectral cluster is computed once.
    """

    def __init__(self, decomp: SpectralDecomposition, constraint: EnergyConstraint):
        self.projs = decomp.projectors
        k, d, _ = self.projs.shape
        self.flat = np.ascontiguousarray(self.projs.transpose(0, 2, 1).reshape(k, d * d))
        self.constraint = constraint
        self.cap = constraint.cap
        e_mat = constraint.operator.matrix
        self.cluster_emin = np.empty(k)
        self.cluster_state = []
        for i in range(k):
            p = self.projs[i]
            rank = int(round(float(np.trace(p).real)))
            w, v = _eigh(p)
            basis = v[:, d - rank:]
            eps, vecs = _compress_energy(e_mat, basis)
            self.cluster_emin[i] = float(eps[0])
            vec = vecs[:, 0]
            self.cluster_state.append(np.outer(vec, vec.conj()))
        self.states = np.stack(self.cluster_state)
        # with every cluster feasible on its own, step responses never touch
        # the dual search and the iteration closes over marginal vectors
        self.all_feasible = bool(np.all(self.cluster_emin <= self.cap))

    def argmax_cluster(self, coeffs: np.ndarray) -> int:
        """Index of the best feasible cluster; ties break to minimum energy."""
        i = int(np.argmax(coeffs))
        tie_tol = 1e-12 * (1.0 + abs(coeffs[i]))
        tied = np.nonzero(coeffs >= coeffs[i] - tie_tol)[0]
        if tied.size > 1:
            i = int(tied[np.argmin(self.cluster_emin[tied])])
        return i

    def masses(self, state_mat: np.ndarray) -> np.ndarray:
        return (self.flat @ state_mat.reshape(-1)).real

    def assemble(self, coeffs: np.ndarray) -> np.ndarray:
        return np.einsum("i,ijk->jk", coeffs, self.projs)

    def respond_max(self, coeffs: np.ndarray, warm: float | None):
        """Feasible maximizer of sum_i coeffs_i tr(rho P_i); returns
        (state matrix, value, new warm multiplier)."""
        i = int(np.argmax(coeffs))
        top = coeffs[i]
        tie_tol = 1e-12 * (1.0 + abs(top))
        if (
            np.sum(coeffs >= top - tie_tol) == 1
            and self.cluster_emin[i] <= self.cap
        ):
            return self.cluster_state[i], float(top), warm
        state, primal, _dual, mu, _gap = _max_raw(
            self.assemble(coeffs), self.constraint, STEP_ORACLE_TOL, warm=warm
        )
        return state, primal, (mu if mu > 0.0 else None)

    def respond_min(self, coeffs: np.ndarray, warm: float | None):
        state, value, warm = self.respond_max(-coeffs, warm)
        return state, -value, warm


def _certified_bracket(ctx_blue, ctx_red, values, rho, phi, warm):
    """One gap check: certified lower/upper values at the averaged pair."""
    warm_up, warm_low = warm
    p = ctx_blue.masses(rho)
    q = ctx_red.masses(phi)
    m_blue = ctx_blue.assemble(values @ q)
    m_red = ctx_red.assemble(values.T @ p)
    try:
        _s, upper, _d, mu_up, _g = _max_raw(
            m_blue, ctx_blue.constraint, CHECK_ORACLE_TOL, warm=warm_up
        )
    except OracleNumericalError:
        _s, upper, _d, mu_up, _g = _max_raw(
            m_blue, ctx_blue.constraint, STEP_ORACLE_TOL, warm=warm_up
        )
    try:
        _s, neg_lower, _d, mu_low, _g = _max_raw(
            -m_red, ctx_red.constraint, CHECK_ORACLE_TOL, warm=warm_low
        )
    except OracleNumericalError:
        _s, neg_lower, _d, mu_low, _g = _max_raw(
            -m_red, ctx_red.constraint, STEP_ORACLE_TOL, warm=warm_low
        )
    warm = (mu_up if mu_up > 0 else None, mu_low if mu_low > 0 else None)
    return -neg_lower, upper, warm


def _iterate_states(game, ctx_blue, ctx_red):
    """General averaged best-response loop over full state matrices."""
    params = game.params
    values = game.kernel.values
    rho = game.constraint_blue.ground_state().matrix.copy()
    phi = game.constraint_red.ground_state().matrix.copy()
    warm_b = warm_r = None
    for t in range(1, params.max_iters + 1):
        q = ctx_red.masses(phi)
        p = ctx_blue.masses(rho)
        rho_t, _val_b, warm_b = ctx_blue.respond_max(values @ q, warm_b)
        phi_t, _val_r, warm_r = ctx_red.respond_min(values.T @ p, warm_r)
        step = 1.0 / t
        rho += step * (rho_t - rho)
        phi += step * (phi_t - phi)
        if t % params.check_interval == 0 or t == params.max_iters:
            rho = hermitian_part(rho)
            rho /= np.trace(rho).real
            phi = hermitian_part(phi)
            phi /= np.trace(phi).real
            yield t, rho, phi


def _iterate_marginals(game, ctx_blue, ctx_red):
    """Same iteration closed over cluster mass vectors.

    Valid when every cluster admits a feasible state on its own: each step
    response is then a cached minimum-energy cluster state, the averaged
    state is the mass-weighted sum of those states, and its marginal vector
    is the mass vector itself. Exact algebraic shortcut, not a new scheme.
    """
    params = game.params
    values = game.kernel.values
    values_t = np.ascontiguousarray(values.T)
    p = ctx_blue.masses(game.constraint_blue.ground_state().matrix)
    q = ctx_red.masses(game.constraint_red.ground_state().matrix)
    for t in range(1, params.max_iters + 1):
        i = ctx_blue.argmax_cluster(values @ q)
        j = ctx_red.argmax_cluster(-(values_t @ p))
        step = 1.0 / t
        p *= 1.0 - step
        p[i] += step
        q *= 1.0 - step
        q[j] += step
        if t % params.check_interval == 0 or t == params.max_iters:
            rho = np.einsum("i,ijk->jk", p, ctx_blue.states)
            phi = np.einsum("i,ijk->jk", q, ctx_red.states)
            yield t, rho, phi


def solve(game: GameInstance) -> SaddleResult:
    """Run averaged best-response iteration until the certified gap closes.

    Non-convergence within max_iters is not an error: the result carries
    the best certified bracket observed and converged=False.
    """
    params = game.params
    ctx_blue = _ResponseContext(game.blue_decomp, game.constraint_blue)
    ctx_red = _ResponseContext(game.red_decomp, game.constraint_red)
    values = game.kernel.values
    if ctx_blue.all_feasible and ctx_red.all_feasible:
        iterates = _iterate_marginals(game, ctx_blue, ctx_red)
    else:
        iterates = _iterate_states(game, ctx_blue, ctx_red)

    check_warm = (None, None)
    history: list[GapCheck] = []
    best: tuple | None = None
    converged = False
    t = 0
    for t, rho, phi in iterates:
        lower, upper, check_warm = _certified_bracket(
            ctx_blue, ctx_red, values, rho, phi, check_warm
        )
        gap = upper - lower
        history.append(GapCheck(t, lower, upper, gap))
        if best is None or gap < best[0]:
            best = (gap, lower, upper, rho.copy(), phi.copy())
        if gap <= params.gap_tol:
            converged = True
            break

    gap, lower, upper, rho_best, phi_best = best
    return SaddleResult(
        value_lower=lower,
        value_upper=upper,
        value=0.5 * (lower + upper),
        gap=gap,
        rho_star=DensityOperator(rho_best),
        phi_star=DensityOperator(phi_best),
        iterations=t,
        gap_history=tuple(history),
        converged=converged,
    )
