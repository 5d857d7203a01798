"""State-induced spectral distributions as atomic mass vectors.

A state rho and a spectral decomposition induce the step distribution
lambda -> tr(rho E(lambda)); on a truncated space that distribution is a
finite list of point masses on the clustered spectrum, so Stieltjes
integrals reduce to finite sums and total variation to a mass sum.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError
from .operators import DensityOperator, SpectralDecomposition, _frozen

PROBABILITY_ATOL = 1e-10
SUPPORT_MERGE_ATOL = 1e-12


@dataclass(frozen=True, eq=False)
class StepDistribution:
    """Point masses on a strictly increasing support.

    Probability instances (built from a state) have nonnegative masses
    summing to 1; differences of distributions are signed and carry no
    constraint.
    """

    support: np.ndarray
    masses: np.ndarray

    def __init__(self, support, masses):
        s = np.asarray(support, dtype=float).reshape(-1)
        m = np.asarray(masses, dtype=float).reshape(-1)
        if s.shape != m.shape:
            raise DimensionMismatchError(
                f"support has {s.size} points but masses has {m.size}"
            )
        if s.size > 1 and np.any(np.diff(s) <= 0):
            raise ValueError("support must be strictly increasing")
        object.__setattr__(self, "support", _frozen(s))
        object.__setattr__(self, "masses", _frozen(m))

    def is_probability(self, atol: float = PROBABILITY_ATOL) -> bool:
        return bool(
            np.all(self.masses >= -atol) and abs(self.masses.sum() - 1.0) <= atol
        )


def spectral_masses(rho: DensityOperator, decomp: SpectralDecomposition) -> StepDistribution:
    """Masses tr(rho P_i) on the clustered spectrum of `decomp`."""
    if rho.dim != decomp.dim:
        raise DimensionMismatchError(
            f"state dim {rho.dim} != decomposition dim {decomp.dim}"
        )
    w = np.einsum("ij,kji->k", rho.matrix, decomp.projectors).real
    return StepDistribution(decomp.eigenvalues, w)


def cdf(dist: StepDistribution, lam: float) -> float:
    """Right-continuous cumulative mass at or below `lam`."""
    return float(dist.masses[dist.support <= lam].sum())


def total_variation(dist: StepDistribution) -> float:
    """Sum of absolute masses; equals the partition supremum for step functions."""
    return float(np.abs(dist.masses).sum())


def difference(s1: StepDistribution, s2: StepDistribution) -> StepDistribution:
    """Signed distribution s1 - s2 on the union of the two supports.

    Support points closer than 1e-12 are identified; on a shared clustered
    spectrum this reduces to exact matching.
    """
    points = np.concatenate([s1.support, s2.support])
    weights = np.concatenate([s1.masses, -s2.masses])
    order = np.argsort(points, kind="stable")
    points = points[order]
    weights = weights[order]

    support: list[float] = []
    masses: list[float] = []
    i = 0
    while i < points.size:
        j = i + 1
        while j < points.size and points[j] - points[i] <= SUPPORT_MERGE_ATOL:
            j += 1
        support.append(float(points[i:j].mean()))
        masses.append(float(weights[i:j].sum()))
        i = j
    return StepDistribution(support, masses)


def write_csv(dist: StepDistribution, path) -> None:
    """Export (lambda, mass, cdf) rows, one per support point."""
    running = np.cumsum(dist.masses)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["lambda", "mass", "cdf"])
        for lam, w, c in zip(dist.support, dist.masses, running):
            writer.writerow([repr(float(lam)), repr(float(w)), repr(float(c))])
