from __future__ import annotations

import numpy as np
import pytest

from qminimax import (
    ClassicalGame,
    DimensionMismatchError,
    SolverParams,
    discretize_multiplication_operator,
    lift_to_quantum,
    solve,
    solve_classical,
    spectral_masses,
)


def two_by_two_value(a, b, c, d):
    """Closed-form mixed value of [[a,b],[c,d]] when no saddle in pure moves."""
    return (a * d - b * c) / (a + d - b - c)


class TestClassicalGame:
    def test_rejects_decreasing_grid(self):
        with pytest.raises(ValueError):
            ClassicalGame([1.0, 0.0], [0.0, 1.0], [[1.0, 1.0], [1.0, 1.0]])

    def test_rejects_negative_payoff(self):
        with pytest.raises(ValueError):
            ClassicalGame([0.0, 1.0], [0.0, 1.0], [[1.0, -1.0], [1.0, 1.0]])

    def test_rejects_shape_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            ClassicalGame([0.0, 1.0], [0.0, 1.0], [[1.0, 1.0]])


class TestDiscretize:
    def test_two_point_grid(self):
        op = discretize_multiplication_operator([0.0, 1.0])
        np.testing.assert_allclose(op.matrix, np.diag([0.0, 1.0]))

    def test_three_point_grid_bounds(self):
        from qminimax import spectral_decompose

        op = discretize_multiplication_operator([-1.0, 0.0, 1.0])
        d = spectral_decompose(op)
        assert d.lower_bound == -1.0
        assert d.upper_bound == 1.0

    def test_uniform_grid(self):
        grid = np.linspace(0.0, 1.0, 11)
        op = discretize_multiplication_operator(grid)
        np.testing.assert_allclose(np.diag(op.matrix).real, grid)

    def test_rejects_non_increasing(self):
        with pytest.raises(ValueError):
            discretize_multiplication_operator([0.0, 0.0, 1.0])


class TestSolveClassical:
    def test_one_by_one(self):
        sol = solve_classical(ClassicalGame([0.5], [0.5], [[4.2]]))
        assert sol.value == pytest.approx(4.2, abs=1e-12)
        assert sol.p.tolist() == [1.0]
        assert sol.q.tolist() == [1.0]
        assert sol.gap <= 1e-12

    def test_matching_pennies(self):
        game = ClassicalGame([0.0, 1.0], [0.0, 1.0], [[1.0, 0.0], [0.0, 1.0]])
        sol = solve_classical(game, gap_tol=1e-3, max_iters=700000)
        assert sol.converged
        assert sol.gap <= 1e-3
        assert sol.value == pytest.approx(two_by_two_value(1, 0, 0, 1), abs=1e-3)
        np.testing.assert_allclose(sol.p, [0.5, 0.5], atol=1e-2)
        np.testing.assert_allclose(sol.q, [0.5, 0.5], atol=1e-2)

    def test_asymmetric_two_by_two(self):
        game = ClassicalGame([0.0, 1.0], [0.0, 1.0], [[3.0, 1.0], [1.0, 2.0]])
        sol = solve_classical(game, gap_tol=1e-3, max_iters=1000000)
        assert sol.converged
        assert sol.value == pytest.approx(5.0 / 3.0, abs=1e-3)
        np.testing.assert_allclose(sol.p, [1.0 / 3.0, 2.0 / 3.0], atol=1e-2)
        np.testing.assert_allclose(sol.q, [1.0 / 3.0, 2.0 / 3.0], atol=1e-2)

    def test_pure_saddle_game(self):
        # row 0 dominates; value is the row-0 minimum
        game = ClassicalGame([0.0, 1.0], [0.0, 1.0], [[2.0, 3.0], [1.0, 0.0]])
        sol = solve_classical(game)
        assert sol.value == pytest.approx(2.0, abs=1e-3)


class TestLift:
    def test_identity_table_lift_matches_classical(self):
        game = ClassicalGame([0.0, 1.0], [0.0, 1.0], [[1.0, 0.0], [0.0, 1.0]])
        quantum = lift_to_quantum(game, params=SolverParams(gap_tol=5e-3))
        res = solve(quantum)
        assert res.converged
        assert abs(res.value - 0.5) <= res.gap / 2 + 1e-9

    def test_one_by_one_lift(self):
        game = ClassicalGame([0.5], [0.5], [[4.2]])
        res = solve(lift_to_quantum(game))
        assert res.value == pytest.approx(4.2, abs=1e-9)

    def test_asymmetric_lift_cross_agreement(self):
        game = ClassicalGame([0.0, 1.0], [0.0, 1.0], [[3.0, 1.0], [1.0, 2.0]])
        gap_tol = 2e-3
        classical = solve_classical(game, gap_tol=gap_tol, max_iters=500000)
        res = solve(lift_to_quantum(game, params=SolverParams(gap_tol=gap_tol)))
        assert abs(classical.value - res.value) <= 2 * gap_tol + 1e-6

    def test_cross_oracle_agreement_random_games(self, rng):
        gap_tol = 5e-3
        for trial in range(20):
            k = int(rng.integers(1, 7))
            m = int(rng.integers(1, 7))
            payoff = rng.uniform(0.0, 5.0, size=(k, m))
            moves_b = np.arange(k, dtype=float)
            moves_r = np.arange(m, dtype=float)
            game = ClassicalGame(moves_b, moves_r, payoff)
            classical = solve_classical(game, gap_tol=gap_tol)
            quantum = solve(lift_to_quantum(game, params=SolverParams(gap_tol=gap_tol)))
            assert abs(classical.value - quantum.value) <= 2 * gap_tol + 1e-6

    def test_diagonal_state_sufficiency(self, rng):
        # quantum optimal marginals are feasible classical strategies that
        # achieve the classical value within the combined gaps
        gap_tol = 5e-3
        payoff = rng.uniform(0.0, 5.0, size=(3, 4))
        game = ClassicalGame(np.arange(3.0), np.arange(4.0), payoff)
        classical = solve_classical(game, gap_tol=gap_tol)
        quantum_game = lift_to_quantum(game, params=SolverParams(gap_tol=gap_tol))
        res = solve(quantum_game)
        p = spectral_masses(res.rho_star, quantum_game.blue_decomp).masses
        q = spectral_masses(res.phi_star, quantum_game.red_decomp).masses
        assert np.all(p >= -1e-10) and p.sum() == pytest.approx(1.0, abs=1e-10)
        assert np.all(q >= -1e-10) and q.sum() == pytest.approx(1.0, abs=1e-10)
        guaranteed_by_p = float(np.min(p @ payoff))
        paid_against_q = float(np.max(payoff @ q))
        tol = classical.gap + res.gap + 1e-6
        assert guaranteed_by_p >= classical.value - tol
        assert paid_against_q <= classical.value + tol
