"""Payoff kernels, their grid tabulation, and the bilinear expected payoff.

The kernel is only ever evaluated on the product of the two players'
clustered spectra: atomic spectral measures charge nothing else, so the
grid maximum is the operative payoff bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    DegenerateKernelError,
    DimensionMismatchError,
    InvalidKernelError,
    SupportMismatchError,
)
from .measures import StepDistribution
from .operators import HermitianOperator, SpectralDecomposition, _frozen

GRID_MATCH_ATOL = 1e-12

BUILTIN_KERNELS: dict[str, Callable[[float, float, float], float]] = {
    "squared_difference": lambda lam, ell, shift: (lam - ell) ** 2 + shift,
    "shifted_product": lambda lam, ell, shift: lam * ell + shift,
}


@dataclass(frozen=True, eq=False)
class PayoffKernel:
    """A nonnegative payoff rule, either a named builtin or an explicit table.

    Builtins take an additive `shift` so users can enforce nonnegativity;
    a negative evaluation on the grid is a construction error at tabulation
    time, never silently clamped.
    """

    descriptor: dict
    _fn: Callable[[float, float], float] | None
    _table: np.ndarray | None

    def __init__(self, descriptor, fn=None, table=None):
        object.__setattr__(self, "descriptor", dict(descriptor))
        object.__setattr__(self, "_fn", fn)
        object.__setattr__(self, "_table", table)

    def evaluate(self, lam: float, ell: float) -> float:
        if self._fn is None:
            raise InvalidKernelError(
                "table kernels are evaluated only through tabulate()"
            )
        return float(self._fn(lam, ell))


def builtin_kernel(name: str, shift: float = 0.0) -> PayoffKernel:
    """Named closed-form kernel with an additive shift."""
    if name not in BUILTIN_KERNELS:
        raise InvalidKernelError(
            f"unknown builtin kernel {name!r}; choose from {sorted(BUILTIN_KERNELS)}"
        )
    base = BUILTIN_KERNELS[name]
    descriptor = {"type": "builtin", "name": name, "shift": float(shift)}
    return PayoffKernel(descriptor, fn=lambda lam, ell: base(lam, ell, shift))


def table_kernel(values) -> PayoffKernel:
    """Kernel given by explicit values on spectrum x spectrum."""
    table = np.asarray(values, dtype=float)
    if table.ndim != 2:
        raise InvalidKernelError(f"table must be 2-D, got shape {table.shape}")
    descriptor = {"type": "table", "values": table.tolist()}
    return PayoffKernel(descriptor, table=_frozen(table))


@dataclass(frozen=True, eq=False)
class PayoffMatrix:
    """Kernel values on the product of the two clustered spectra."""

    rows: np.ndarray    # blue eigenvalues
    cols: np.ndarray    # red eigenvalues
    values: np.ndarray  # shape (len(rows), len(cols)), nonnegative
    zmax: float
    argmax: tuple[float, float]

    def __init__(self, rows, cols, values, zmax, argmax):
        object.__setattr__(self, "rows", _frozen(np.asarray(rows, dtype=float)))
        object.__setattr__(self, "cols", _frozen(np.asarray(cols, dtype=float)))
        object.__setattr__(self, "values", _frozen(np.asarray(values, dtype=float)))
        object.__setattr__(self, "zmax", float(zmax))
        object.__setattr__(self, "argmax", (float(argmax[0]), float(argmax[1])))


def tabulate(
    kernel: PayoffKernel,
    blue: SpectralDecomposition,
    red: SpectralDecomposition,
) -> PayoffMatrix:
    """Evaluate the kernel on spectrum x spectrum and validate it there."""
    rows = blue.eigenvalues
    cols = red.eigenvalues
    if kernel._table is not None:
        values = kernel._table
        if values.shape != (rows.size, cols.size):
            raise DimensionMismatchError(
                f"table shape {values.shape} does not match spectra "
                f"({rows.size} x {cols.size})"
            )
        values = values.copy()
    else:
        ell_grid, lam_grid = np.meshgrid(cols, rows)
        values = np.vectorize(kernel.evaluate)(lam_grid, ell_grid).astype(float)

    if np.any(values < 0):
        i, j = np.unravel_index(int(np.argmin(values)), values.shape)
        raise InvalidKernelError(
            f"kernel is negative at (lambda={float(rows[i])!r}, l={float(cols[j])!r}): "
            f"{float(values[i, j])!r}"
        )
    zmax = float(values.max())
    if zmax == 0.0:
        raise DegenerateKernelError("kernel is identically zero on the spectrum grid")
    i, j = np.unravel_index(int(np.argmax(values)), values.shape)
    return PayoffMatrix(rows, cols, values, zmax, (rows[i], cols[j]))


def _check_support(dist: StepDistribution, grid: np.ndarray, which: str) -> None:
    if dist.support.size != grid.size or not np.allclose(
        dist.support, grid, rtol=0.0, atol=GRID_MATCH_ATOL
    ):
        raise SupportMismatchError(f"distribution support does not match {which} grid")


def expected_payoff(
    pm: PayoffMatrix, p: StepDistribution, q: StepDistribution
) -> float:
    """Bilinear payoff sum_ij Z_ij p_i q_j for probability mass vectors."""
    _check_support(p, pm.rows, "row")
    _check_support(q, pm.cols, "column")
    return float(p.masses @ pm.values @ q.masses)


def fubini_swap_check(
    pm: PayoffMatrix, p: StepDistribution, q: StepDistribution
) -> tuple[float, float]:
    """Evaluate the double sum in both orders; callers assert agreement."""
    _check_support(p, pm.rows, "row")
    _check_support(q, pm.cols, "column")
    row_major = float(np.dot(p.masses, pm.values @ q.masses))
    col_major = float(np.dot(pm.values.T @ p.masses, q.masses))
    return row_major, col_major


def response_operator_blue(
    pm: PayoffMatrix, blue: SpectralDecomposition, q: StepDistribution
) -> HermitianOperator:
    """Operator whose trace against rho equals the payoff at fixed red marginals.

    With a_i = sum_j Z_ij q_j the operator is sum_i a_i P_i, so
    tr(rho M) = expected_payoff(pm, masses(rho), q) for every state rho.
    """
    if not np.allclose(pm.rows, blue.eigenvalues, rtol=0.0, atol=GRID_MATCH_ATOL):
        raise DimensionMismatchError("payoff rows do not match the blue spectrum")
    _check_support(q, pm.cols, "column")
    a = pm.values @ q.masses
    return HermitianOperator(np.einsum("i,ijk->jk", a, blue.projectors))


def response_operator_red(
    pm: PayoffMatrix, red: SpectralDecomposition, p: StepDistribution
) -> HermitianOperator:
    """Mirror of response_operator_blue: b_j = sum_i Z_ij p_i on red projectors."""
    if not np.allclose(pm.cols, red.eigenvalues, rtol=0.0, atol=GRID_MATCH_ATOL):
        raise DimensionMismatchError("payoff columns do not match the red spectrum")
    _check_support(p, pm.rows, "row")
    b = pm.values.T @ p.masses
    return HermitianOperator(np.einsum("i,ijk->jk", b, red.projectors))
