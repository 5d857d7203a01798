"""Randomized invariant suites behind the `verify` command.

Every suite draws seeded random states on the game's own spaces and
reports its worst violation against the stated slack; a correct build
shows violations at floating-point noise level.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .energy import mix_toward_ground
from .measures import difference, spectral_masses, total_variation
from .operators import DensityOperator, random_density, trace_norm
from .payoff import expected_payoff, fubini_swap_check
from .solver import GameInstance, solve

LIPSCHITZ_SLACK = 1e-9
TV_SLACK = 1e-9
BILINEARITY_SLACK = 1e-10
CERTIFICATE_SLACK = 1e-9


@dataclass(frozen=True)
class SuiteReport:
    name: str
    trials: int
    max_violation: float
    slack: float

    @property
    def passed(self) -> bool:
        return self.max_violation <= self.slack


def _payoff(game: GameInstance, rho: DensityOperator, phi: DensityOperator) -> float:
    p = spectral_masses(rho, game.blue_decomp)
    q = spectral_masses(phi, game.red_decomp)
    return expected_payoff(game.kernel, p, q)


def _random_states(dim: int, rng: np.random.Generator, n: int):
    return [random_density(dim, int(rng.integers(2**63))) for _ in range(n)]


def lipschitz_suite(game: GameInstance, samples: int, rng) -> SuiteReport:
    """|K(rho, phi1) - K(rho, phi2)| <= zmax * ||phi1 - phi2||_1, both sides."""
    zmax = game.kernel.zmax
    worst = -np.inf
    d1, d2 = game.blue.dim, game.red.dim
    for _ in range(samples):
        rho, = _random_states(d1, rng, 1)
        phi1, phi2 = _random_states(d2, rng, 2)
        lhs = abs(_payoff(game, rho, phi1) - _payoff(game, rho, phi2))
        worst = max(worst, lhs - zmax * trace_norm(phi1.matrix - phi2.matrix))
        rho1, rho2 = _random_states(d1, rng, 2)
        phi, = _random_states(d2, rng, 1)
        lhs = abs(_payoff(game, rho1, phi) - _payoff(game, rho2, phi))
        worst = max(worst, lhs - zmax * trace_norm(rho1.matrix - rho2.matrix))
    return SuiteReport("lipschitz_payoff", samples, worst, LIPSCHITZ_SLACK)


def total_variation_suite(game: GameInstance, samples: int, rng) -> SuiteReport:
    """TV of the induced signed distribution is at most the trace distance."""
    worst = -np.inf
    for _ in range(samples):
        phi1, phi2 = _random_states(game.red.dim, rng, 2)
        tv = total_variation(
            difference(
                spectral_masses(phi1, game.red_decomp),
                spectral_masses(phi2, game.red_decomp),
            )
        )
        worst = max(worst, tv - trace_norm(phi1.matrix - phi2.matrix))
        rho1, rho2 = _random_states(game.blue.dim, rng, 2)
        tv = total_variation(
            difference(
                spectral_masses(rho1, game.blue_decomp),
                spectral_masses(rho2, game.blue_decomp),
            )
        )
        worst = max(worst, tv - trace_norm(rho1.matrix - rho2.matrix))
    return SuiteReport("total_variation_bound", samples, worst, TV_SLACK)


def fubini_suite(game: GameInstance, samples: int, rng) -> SuiteReport:
    """Both summation orders of the expected payoff agree."""
    worst = -np.inf
    for _ in range(samples):
        rho, = _random_states(game.blue.dim, rng, 1)
        phi, = _random_states(game.red.dim, rng, 1)
        p = spectral_masses(rho, game.blue_decomp)
        q = spectral_masses(phi, game.red_decomp)
        row, col = fubini_swap_check(game.kernel, p, q)
        worst = max(worst, abs(row - col))
    return SuiteReport("fubini_swap", samples, worst, 1e-12 * game.kernel.zmax)


def bilinearity_suite(game: GameInstance, samples: int, rng) -> SuiteReport:
    """The payoff is affine in each argument under convex mixing."""
    worst = -np.inf
    for _ in range(samples):
        rho1, rho2 = _random_states(game.blue.dim, rng, 2)
        phi1, phi2 = _random_states(game.red.dim, rng, 2)
        t = rng.uniform()
        u = rng.uniform()
        rho_mix = DensityOperator(t * rho1.matrix + (1 - t) * rho2.matrix)
        phi_mix = DensityOperator(u * phi1.matrix + (1 - u) * phi2.matrix)
        lhs = _payoff(game, rho_mix, phi_mix)
        rhs = (
            t * u * _payoff(game, rho1, phi1)
            + t * (1 - u) * _payoff(game, rho1, phi2)
            + (1 - t) * u * _payoff(game, rho2, phi1)
            + (1 - t) * (1 - u) * _payoff(game, rho2, phi2)
        )
        worst = max(worst, abs(lhs - rhs))
    return SuiteReport("bilinearity", samples, worst, BILINEARITY_SLACK)


def saddle_certificate_suite(game: GameInstance, samples: int, rng) -> SuiteReport:
    """No feasible deviation beats the certified bracket."""
    result = solve(game)
    worst = -np.inf
    for _ in range(samples):
        rho = mix_toward_ground(
            random_density(game.blue.dim, int(rng.integers(2**63))), game.constraint_blue
        )
        phi = mix_toward_ground(
            random_density(game.red.dim, int(rng.integers(2**63))), game.constraint_red
        )
        worst = max(worst, _payoff(game, rho, result.phi_star) - result.value_upper)
        worst = max(worst, result.value_lower - _payoff(game, result.rho_star, phi))
    return SuiteReport("saddle_certificate", samples, worst, CERTIFICATE_SLACK)


ALL_SUITES = (
    lipschitz_suite,
    total_variation_suite,
    fubini_suite,
    bilinearity_suite,
    saddle_certificate_suite,
)


def run_suites(game: GameInstance, samples: int, seed: int) -> list[SuiteReport]:
    rng = np.random.default_rng(seed)
    return [suite(game, samples, rng) for suite in ALL_SUITES]
