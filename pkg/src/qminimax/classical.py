"""Classical matrix games on move grids, used as an independent cross-check.

The solver here is a deliberately separate implementation (vector
fictitious play over simplices, no spectral machinery) so that it can
validate the operator-based solver on commuting instances without sharing
any code path with it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError
from .operators import HermitianOperator, _frozen


@dataclass(frozen=True, eq=False)
class ClassicalGame:
    """Move grids for both players and a nonnegative payoff table."""

    blue_moves: np.ndarray
    red_moves: np.ndarray
    payoff: np.ndarray

    def __init__(self, blue_moves, red_moves, payoff):
        b = np.asarray(blue_moves, dtype=float).reshape(-1)
        r = np.asarray(red_moves, dtype=float).reshape(-1)
        z = np.asarray(payoff, dtype=float)
        for grid, name in ((b, "blue_moves"), (r, "red_moves")):
            if grid.size < 1 or (grid.size > 1 and np.any(np.diff(grid) <= 0)):
                raise ValueError(f"{name} must be a nonempty strictly increasing grid")
        if z.shape != (b.size, r.size):
            raise DimensionMismatchError(
                f"payoff shape {z.shape} does not match grids ({b.size} x {r.size})"
            )
        if np.any(z < 0):
            raise ValueError("classical payoff entries must be nonnegative")
        object.__setattr__(self, "blue_moves", _frozen(b))
        object.__setattr__(self, "red_moves", _frozen(r))
        object.__setattr__(self, "payoff", _frozen(z))


def discretize_multiplication_operator(grid) -> HermitianOperator:
    """Diagonal operator with the move grid as its spectrum."""
    g = np.asarray(grid, dtype=float).reshape(-1)
    if g.size < 1 or (g.size > 1 and np.any(np.diff(g) <= 0)):
        raise ValueError("grid must be nonempty and strictly increasing")
    return HermitianOperator(np.diag(g))


@dataclass(frozen=True, eq=False)
class ClassicalSolution:
    """Certified bracket for a classical matrix game."""

    value: float
    p: np.ndarray
    q: np.ndarray
    gap: float
    iterations: int
    converged: bool

    def __init__(self, value, p, q, gap, iterations, converged):
        object.__setattr__(self, "value", float(value))
        object.__setattr__(self, "p", _frozen(np.asarray(p, dtype=float)))
        object.__setattr__(self, "q", _frozen(np.asarray(q, dtype=float)))
        object.__setattr__(self, "gap", float(gap))
        object.__setattr__(self, "iterations", int(iterations))
        object.__setattr__(self, "converged", bool(converged))


def solve_classical(
    game: ClassicalGame,
    gap_tol: float = 1e-3,
    max_iters: int = 200000,
    check_interval: int = 25,
) -> ClassicalSolution:
    """Fictitious play over the two simplices with a certified gap.

    Both players best-respond (pure argmax/argmin) to the opponent's
    uniform average; every `check_interval` steps the bracket
    [min_j (p' Z)_j, max_i (Z q)_i] is evaluated exactly and the best
    bracket seen is returned.
    """
    z = game.payoff
    k, m = z.shape
    p = np.full(k, 1.0 / k)
    q = np.full(m, 1.0 / m)
    zq = z @ q        # running Z q_bar
    pz = p @ z        # running p_bar' Z
    best = None
    converged = False
    t = 0
    for t in range(1, max_iters + 1):
        i = int(np.argmax(zq))
        j = int(np.argmin(pz))
        step = 1.0 / t
        p *= 1.0 - step
        p[i] += step
        q *= 1.0 - step
        q[j] += step
        zq *= 1.0 - step
        zq += step * z[:, j]
        pz *= 1.0 - step
        pz += step * z[i, :]
        if t % check_interval == 0 or t == max_iters:
            lower = float(np.min(pz))
            upper = float(np.max(zq))
            gap = upper - lower
            if best is None or gap < best[0]:
                best = (gap, lower, upper, p.copy(), q.copy())
            if gap <= gap_tol:
                converged = True
                break
    gap, lower, upper, p_star, q_star = best
    return ClassicalSolution(
        value=0.5 * (lower + upper),
        p=p_star,
        q=q_star,
        gap=gap,
        iterations=t,
        converged=converged,
    )


def lift_to_quantum(game: ClassicalGame, energy_blue=None, energy_red=None, params=None):
    """Quantum instance with diagonal players carrying the classical game.

    Default energy operators are diag(0, 1, 2, ...) with the cap at the top
    level, which leaves the constraint inactive.
    """
    from .energy import diagonal_constraint
    from .payoff import table_kernel
    from .solver import build_game

    blue = discretize_multiplication_operator(game.blue_moves)
    red = discretize_multiplication_operator(game.red_moves)
    if energy_blue is None:
        n = game.blue_moves.size
        energy_blue = diagonal_constraint(np.arange(n, dtype=float), float(max(n - 1, 0)))
    if energy_red is None:
        n = game.red_moves.size
        energy_red = diagonal_constraint(np.arange(n, dtype=float), float(max(n - 1, 0)))
    return build_game(
        blue,
        red,
        table_kernel(game.payoff),
        constraint_blue=energy_blue,
        constraint_red=energy_red,
        params=params,
    )
