"""Acceptance gate: every criterion at its stated tolerance.

Each test prints one PASS line when its criterion holds; pytest failure
output marks the criterion otherwise. The capped-instance battery is built
once and shared between the certificate criteria.
"""

from __future__ import annotations

import math
import time

import numpy as np
import pytest

from qminimax import (
    ClassicalGame,
    EnergyConstraint,
    HermitianOperator,
    SolverParams,
    best_response_max,
    build_game,
    diagonal_constraint,
    expected_payoff,
    lift_to_quantum,
    mix_toward_ground,
    random_density,
    solve,
    solve_classical,
    spectral_decompose,
    spectral_masses,
    table_kernel,
    trace_norm,
)
from qminimax.measures import difference, total_variation
from qminimax.payoff import fubini_swap_check

from conftest import random_hermitian, random_unitary
from test_energy import knapsack_max


def make_capped_instance(seed: int):
    """Random Hermitian players, random nonnegative kernel with zmax <= 5,
    and active energy caps set strictly between the ground and mean levels."""
    rng = np.random.default_rng(seed)
    d1 = int(rng.integers(2, 7))
    d2 = int(rng.integers(2, 7))
    blue = random_hermitian(d1, rng)
    red = random_hermitian(d2, rng)
    eb = random_hermitian(d1, rng)
    er = random_hermitian(d2, rng)
    web = np.linalg.eigvalsh(eb.matrix)
    wer = np.linalg.eigvalsh(er.matrix)
    fb = rng.uniform(0.15, 0.5)
    fr = rng.uniform(0.15, 0.5)
    kb = EnergyConstraint(eb, float(web[0] + fb * (web.mean() - web[0])))
    kr = EnergyConstraint(er, float(wer[0] + fr * (wer.mean() - wer[0])))
    nb = spectral_decompose(blue).eigenvalues.size
    nr = spectral_decompose(red).eigenvalues.size
    kernel = table_kernel(rng.uniform(0.0, 5.0, size=(nb, nr)))
    return build_game(
        blue, red, kernel, kb, kr, SolverParams(gap_tol=1e-2, max_iters=200000)
    )


@pytest.fixture(scope="module")
def capped_battery():
    battery = []
    for seed in range(100, 120):
        game = make_capped_instance(seed)
        t0 = time.perf_counter()
        result = solve(game)
        elapsed = time.perf_counter() - t0
        battery.append((seed, game, result, elapsed))
    return battery


def test_criterion_1_minimax_certificate(capped_battery):
    for seed, _game, res, elapsed in capped_battery:
        assert res.converged, f"seed {seed}: gap {res.gap} after {res.iterations} iters"
        assert res.gap <= 1e-2
        assert res.iterations <= 200000
        assert elapsed <= 30.0, f"seed {seed}: took {elapsed:.1f}s"
        violations = sum(1 for c in res.gap_history if c.lower > c.upper)
        assert violations == 0, f"seed {seed}: {violations} bracket violations"
    print(
        "\n[PASS] criterion 1: 20 capped instances certified to gap <= 1e-2 "
        f"(worst time {max(e for *_, e in capped_battery):.1f}s)"
    )


def test_criterion_2_quantum_matching_pennies():
    diag01 = HermitianOperator(np.diag([0.0, 1.0]))
    game = build_game(
        diag01,
        diag01,
        table_kernel([[1.0, 0.0], [0.0, 1.0]]),
        diagonal_constraint([0.0, 1.0], 10.0),
        diagonal_constraint([0.0, 1.0], 10.0),
        SolverParams(gap_tol=1e-3, max_iters=200000),
    )
    t0 = time.perf_counter()
    res = solve(game)
    elapsed = time.perf_counter() - t0
    assert elapsed <= 5.0, f"took {elapsed:.1f}s"
    assert abs(res.value - 0.5) <= 1e-3
    p = spectral_masses(res.rho_star, game.blue_decomp).masses
    q = spectral_masses(res.phi_star, game.red_decomp).masses
    np.testing.assert_allclose(p, [0.5, 0.5], atol=1e-2)
    np.testing.assert_allclose(q, [0.5, 0.5], atol=1e-2)
    print(
        f"\n[PASS] criterion 2: matching pennies value {res.value:.6f} "
        f"(gap {res.gap:.2e}) in {elapsed:.1f}s"
    )


def test_criterion_3_constrained_best_response_closed_form():
    sigma_x = HermitianOperator([[0.0, 1.0], [1.0, 0.0]])
    constraint = diagonal_constraint([0.0, 1.0], 0.25)
    t0 = time.perf_counter()
    res = best_response_max(sigma_x, constraint, gap_tol=1e-9)
    elapsed = time.perf_counter() - t0
    assert elapsed <= 0.1, f"took {elapsed*1e3:.0f}ms"
    assert abs(res.primal_value - math.sqrt(3.0) / 2.0) <= 1e-6
    energy = float(np.trace(res.state.matrix @ np.diag([0.0, 1.0])).real)
    assert abs(energy - 0.25) <= 1e-6
    assert res.gap <= 1e-9
    print(
        f"\n[PASS] criterion 3: oracle value {res.primal_value:.9f} "
        f"energy {energy:.9f} gap {res.gap:.1e} in {elapsed*1e3:.1f}ms"
    )


def test_criterion_4_proof_bound_suites():
    rng = np.random.default_rng(2468)
    blue = random_hermitian(6, rng, scale=2.0)
    red = random_hermitian(5, rng, scale=2.0)
    bd = spectral_decompose(blue)
    rd = spectral_decompose(red)
    kernel = table_kernel(rng.uniform(0.0, 5.0, size=(bd.eigenvalues.size, rd.eigenvalues.size)))
    game = build_game(blue, red, kernel)
    zmax = game.kernel.zmax

    def masses_pair(rho, phi):
        return (
            spectral_masses(rho, game.blue_decomp),
            spectral_masses(phi, game.red_decomp),
        )

    t0 = time.perf_counter()
    violations = {"lipschitz": 0, "tv": 0, "fubini": 0, "bilinear": 0}
    for _ in range(1000):
        rho = random_density(6, int(rng.integers(2**63)))
        phi1 = random_density(5, int(rng.integers(2**63)))
        phi2 = random_density(5, int(rng.integers(2**63)))
        p, q1 = masses_pair(rho, phi1)
        q2 = spectral_masses(phi2, game.red_decomp)
        k1 = expected_payoff(game.kernel, p, q1)
        k2 = expected_payoff(game.kernel, p, q2)
        tn = trace_norm(phi1.matrix - phi2.matrix)
        if abs(k1 - k2) > zmax * tn + 1e-9:
            violations["lipschitz"] += 1
        if total_variation(difference(q1, q2)) > tn + 1e-9:
            violations["tv"] += 1
        row, col = fubini_swap_check(game.kernel, p, q1)
        if abs(row - col) > 1e-12 * zmax:
            violations["fubini"] += 1
        rho2 = random_density(6, int(rng.integers(2**63)))
        t = rng.uniform()
        from qminimax import DensityOperator

        mixed = DensityOperator(t * rho.matrix + (1 - t) * rho2.matrix)
        p2 = spectral_masses(rho2, game.blue_decomp)
        pm = spectral_masses(mixed, game.blue_decomp)
        lhs = expected_payoff(game.kernel, pm, q1)
        rhs = t * k1 + (1 - t) * expected_payoff(game.kernel, p2, q1)
        if abs(lhs - rhs) > 1e-10:
            violations["bilinear"] += 1
    elapsed = time.perf_counter() - t0
    assert elapsed <= 60.0
    assert violations == {"lipschitz": 0, "tv": 0, "fubini": 0, "bilinear": 0}
    print(f"\n[PASS] criterion 4: 1000 trials x 4 bounds, zero violations, {elapsed:.1f}s")


def test_criterion_5_cross_oracle_classical_agreement():
    rng = np.random.default_rng(2026)
    gap_tol = 5e-3
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(20):
        k = int(rng.integers(1, 7))
        m = int(rng.integers(1, 7))
        payoff = rng.uniform(0.0, 5.0, size=(k, m))
        game = ClassicalGame(np.arange(k, dtype=float), np.arange(m, dtype=float), payoff)
        classical = solve_classical(game, gap_tol=gap_tol)
        quantum = solve(lift_to_quantum(game, params=SolverParams(gap_tol=gap_tol)))
        diff = abs(classical.value - quantum.value)
        worst = max(worst, diff)
        assert diff <= 2 * gap_tol + 1e-6
    elapsed = time.perf_counter() - t0
    assert elapsed <= 60.0
    print(f"\n[PASS] criterion 5: 20 games, worst disagreement {worst:.2e}, {elapsed:.1f}s")


def test_criterion_6_oracle_soundness():
    rng = np.random.default_rng(1357)
    worst_dominance = -np.inf
    worst_knapsack = 0.0
    monotonicity_violations = 0
    for dim in (2, 3, 4):
        for _ in range(50):
            m = random_hermitian(dim, rng, scale=2.0)
            e = random_hermitian(dim, rng, scale=1.5)
            levels = np.linalg.eigvalsh(e.matrix)
            cap = float(levels[0] + rng.uniform(0.05, 0.9) * (levels.mean() - levels[0]))
            constraint = EnergyConstraint(e, cap)
            res = best_response_max(m, constraint)
            for _ in range(30):
                rho = mix_toward_ground(
                    random_density(dim, int(rng.integers(2**63))), constraint
                )
                sampled = float(np.trace(rho.matrix @ m.matrix).real)
                worst_dominance = max(worst_dominance, sampled - res.primal_value)
            # commuting triple sharing an eigenbasis
            mvals = rng.normal(size=dim) * 2.0
            evals = np.sort(rng.normal(size=dim))
            u = random_unitary(dim, rng)
            mc = HermitianOperator(u @ np.diag(mvals) @ u.conj().T)
            ec = HermitianOperator(u @ np.diag(evals) @ u.conj().T)
            ccap = float(evals[0] + rng.uniform(0.05, 1.0) * (evals.mean() - evals[0] + 1e-3))
            got = best_response_max(mc, EnergyConstraint(ec, ccap)).primal_value
            worst_knapsack = max(worst_knapsack, abs(got - knapsack_max(mvals, evals, ccap)))
            # cap monotonicity over a 10-point grid
            caps = np.linspace(levels[0] + 1e-6, levels[-1] + 0.1, 10)
            values = [
                best_response_max(m, EnergyConstraint(e, float(c))).primal_value
                for c in caps
            ]
            monotonicity_violations += sum(
                1 for a, b in zip(values, values[1:]) if b < a - 1e-9
            )
    assert worst_dominance <= 1e-9
    assert worst_knapsack <= 1e-10
    assert monotonicity_violations == 0
    print(
        f"\n[PASS] criterion 6: dominance {worst_dominance:.2e}, "
        f"knapsack {worst_knapsack:.2e}, monotone caps"
    )


def test_criterion_7_saddle_inequalities(capped_battery):
    rng = np.random.default_rng(9753)
    worst = -np.inf
    for seed, game, res, _elapsed in capped_battery:
        assert res.converged
        q_star = spectral_masses(res.phi_star, game.red_decomp)
        p_star = spectral_masses(res.rho_star, game.blue_decomp)
        slack = res.gap + 1e-9
        for _ in range(500):
            rho = mix_toward_ground(
                random_density(game.blue.dim, int(rng.integers(2**63))),
                game.constraint_blue,
            )
            phi = mix_toward_ground(
                random_density(game.red.dim, int(rng.integers(2**63))),
                game.constraint_red,
            )
            up_dev = expected_payoff(
                game.kernel, spectral_masses(rho, game.blue_decomp), q_star
            ) - res.value_upper
            low_dev = res.value_lower - expected_payoff(
                game.kernel, p_star, spectral_masses(phi, game.red_decomp)
            )
            worst = max(worst, up_dev, low_dev)
            assert up_dev <= slack, f"seed {seed}"
            assert low_dev <= slack, f"seed {seed}"
    print(f"\n[PASS] criterion 7: 500 deviations x 20 games, worst excess {worst:.2e}")
