"""Finite-dimensional Hermitian operators, spectral decompositions and states.

Everything here is dense complex128 linear algebra. All types are frozen
and hold non-writeable arrays, so instances can be shared freely.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, EigensolverError

HERMITICITY_ATOL = 1e-12
PSD_EIG_FLOOR = -1e-10
TRACE_ATOL = 1e-10


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def _as_square_complex(entries) -> np.ndarray:
    a = np.array(entries, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] < 1:
        raise DimensionMismatchError("dimension must be >= 1")
    return a


def hermitian_part(a: np.ndarray) -> np.ndarray:
    """Return (A + A*)/2."""
    return (a + a.conj().T) / 2


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """A validated self-adjoint matrix.

    Input is accepted if it is Hermitian within absolute tolerance 1e-12
    and stored exactly symmetrized; file-parsed matrices carry rounding,
    so near-Hermitian input is repaired rather than rejected.
    """

    matrix: np.ndarray

    def __init__(self, entries):
        a = _as_square_complex(entries)
        dev = np.max(np.abs(a - a.conj().T))
        if dev > HERMITICITY_ATOL:
            raise ValueError(
                f"matrix is not Hermitian: max |A - A*| = {dev:.3e} > {HERMITICITY_ATOL}"
            )
        object.__setattr__(self, "matrix", _frozen(hermitian_part(a)))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def frobenius_norm(self) -> float:
        return float(np.linalg.norm(self.matrix))


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Clustered eigenvalues with orthogonal spectral projectors.

    `eigenvalues` is strictly increasing; `projectors[i]` projects onto the
    eigenspace of `eigenvalues[i]`. The projectors resolve the identity and
    reconstruct the source operator.
    """

    eigenvalues: np.ndarray  # shape (k,), strictly increasing
    projectors: np.ndarray   # shape (k, d, d)

    def __init__(self, eigenvalues, projectors):
        w = np.asarray(eigenvalues, dtype=float)
        p = np.asarray(projectors, dtype=complex)
        if w.ndim != 1 or p.ndim != 3 or p.shape[0] != w.shape[0]:
            raise DimensionMismatchError("eigenvalues and projectors do not line up")
        if w.size > 1 and np.any(np.diff(w) <= 0):
            raise ValueError("clustered eigenvalues must be strictly increasing")
        object.__setattr__(self, "eigenvalues", _frozen(w))
        object.__setattr__(self, "projectors", _frozen(p))

    @property
    def dim(self) -> int:
        return self.projectors.shape[1]

    @property
    def lower_bound(self) -> float:
        """Smallest point of the spectrum, inf of the Rayleigh quotient."""
        return float(self.eigenvalues[0])

    @property
    def upper_bound(self) -> float:
        """Largest point of the spectrum, sup of the Rayleigh quotient."""
        return float(self.eigenvalues[-1])


def _eigh(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    try:
        return np.linalg.eigh(matrix)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - depends on LAPACK
        raise EigensolverError(matrix.shape[0], str(exc)) from exc


def cluster_eigenvalues(w: np.ndarray, tol: float) -> list[slice]:
    """Group the sorted eigenvalues `w` into runs with consecutive gaps <= tol."""
    slices = []
    start = 0
    for i in range(1, w.size):
        if w[i] - w[i - 1] > tol:
            slices.append(slice(start, i))
            start = i
    slices.append(slice(start, w.size))
    return slices


def spectral_decompose(
    a: HermitianOperator, cluster_tol: float | None = None
) -> SpectralDecomposition:
    """Diagonalize `a` and merge numerically coincident eigenvalues.

    Eigenvalues within `cluster_tol` of each other collapse to their
    multiplicity-weighted mean and their projectors are summed, so the
    support of any induced distribution is well defined. The default
    tolerance is 1e-8 * (1 + max|eigenvalue|).
    """
    w, v = _eigh(a.matrix)
    if cluster_tol is None:
        cluster_tol = 1e-8 * (1.0 + float(np.max(np.abs(w))))
    if cluster_tol <= 0:
        raise ValueError("cluster_tol must be positive")
    slices = cluster_eigenvalues(w, cluster_tol)
    eigenvalues = np.array([float(np.mean(w[s])) for s in slices])
    projectors = np.stack([v[:, s] @ v[:, s].conj().T for s in slices])
    return SpectralDecomposition(eigenvalues, projectors)


def trace_norm(t) -> float:
    """Sum of singular values of a square matrix (Tr sqrt(T*T))."""
    a = _as_square_complex(t)
    try:
        s = np.linalg.svd(a, compute_uv=False)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise EigensolverError(a.shape[0], str(exc)) from exc
    return float(np.sum(s))


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Positive semidefinite matrix of unit trace (a mixed quantum strategy)."""

    matrix: np.ndarray

    def __init__(self, entries):
        a = _as_square_complex(entries)
        dev = np.max(np.abs(a - a.conj().T))
        if dev > HERMITICITY_ATOL:
            raise ValueError(f"state is not Hermitian: max |A - A*| = {dev:.3e}")
        a = hermitian_part(a)
        tr = float(np.trace(a).real)
        if abs(tr - 1.0) > TRACE_ATOL:
            raise ValueError(f"state trace {tr!r} differs from 1 by more than {TRACE_ATOL}")
        w = np.linalg.eigvalsh(a)
        if w[0] < PSD_EIG_FLOOR:
            raise ValueError(f"state has negative eigenvalue {w[0]:.3e}")
        object.__setattr__(self, "matrix", _frozen(a))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def rank_one_state(v) -> DensityOperator:
    """Pure state |v><v| / <v|v> from a nonzero vector."""
    vec = np.asarray(v, dtype=complex).reshape(-1)
    n = np.linalg.norm(vec)
    if n == 0.0:
        raise ValueError("cannot normalize the zero vector into a state")
    vec = vec / n
    return DensityOperator(np.outer(vec, vec.conj()))


def random_density(dim: int, seed: int) -> DensityOperator:
    """Full-rank random state G G* / tr(G G*), deterministic in `seed`."""
    if dim < 1:
        raise DimensionMismatchError("dimension must be >= 1")
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    m = g @ g.conj().T
    return DensityOperator(m / np.trace(m).real)
