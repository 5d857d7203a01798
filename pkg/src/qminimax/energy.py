"""Energy-capped strategy sets and the certified linear best-response oracle.

The feasible set is {rho : tr(rho E) <= c} inside the density operators.
Maximizing tr(rho M) over it is solved through the one-parameter dual
g(mu) = lambda_max(M - mu*E) + mu*c, which is convex on mu >= 0; the primal
is recovered from top eigenspaces at the dual minimizer and the duality gap
is always certified by explicit primal and dual evaluations, never assumed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    InfeasibleConstraintError,
    OracleNumericalError,
)
from .operators import (
    DensityOperator,
    HermitianOperator,
    _eigh,
    _frozen,
    hermitian_part,
)

MEMBERSHIP_ATOL = 1e-9
DEFAULT_GAP_TOL = 1e-9
MAX_DOUBLINGS = 200
_CLUSTER_LADDER = (1e-12, 1e-10, 1e-8)
_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0


def _width_floor(hi: float) -> float:
    """Smallest meaningful bracket width around a multiplier of size hi.

    Searches run down to float spacing so that the recovery straddle, which
    is floored at twice this width, always encloses the located kink.
    """
    return 32.0 * np.spacing(max(1.0, hi))


@dataclass(frozen=True, eq=False)
class EnergyConstraint:
    """Energy operator plus a cap on mean energy.

    Rejected at construction when the cap lies below the smallest energy
    level, since the feasible set would be empty. On a truncated space the
    feasible set is automatically compact and convex.
    """

    operator: HermitianOperator
    cap: float
    _levels: np.ndarray   # raw eigenvalues of the energy operator, ascending
    _vectors: np.ndarray  # matching orthonormal eigenvectors (columns)

    def __init__(self, operator: HermitianOperator, cap: float):
        cap = float(cap)
        levels, vectors = _eigh(operator.matrix)
        if levels[0] - cap > 1e-12 * (1.0 + abs(cap) + abs(levels[0])):
            raise InfeasibleConstraintError(
                f"infeasible energy constraint: cap {cap!r} is below the "
                f"minimum energy {levels[0]!r}"
            )
        object.__setattr__(self, "operator", operator)
        object.__setattr__(self, "cap", cap)
        object.__setattr__(self, "_levels", _frozen(levels))
        object.__setattr__(self, "_vectors", _frozen(vectors))

    @property
    def dim(self) -> int:
        return self.operator.dim

    @property
    def min_energy(self) -> float:
        return float(self._levels[0])

    def ground_basis(self) -> np.ndarray:
        """Orthonormal basis of the lowest energy eigenspace."""
        tol = 1e-12 * (1.0 + abs(self._levels[0]))
        r = int(np.sum(self._levels <= self._levels[0] + tol))
        return self._vectors[:, :r]

    def ground_state(self) -> DensityOperator:
        """Normalized projector onto the lowest energy eigenspace."""
        b = self.ground_basis()
        return DensityOperator(b @ b.conj().T / b.shape[1])


def diagonal_constraint(levels, cap: float) -> EnergyConstraint:
    """Constraint with a diagonal energy operator from a level sequence."""
    return EnergyConstraint(HermitianOperator(np.diag(np.asarray(levels, dtype=float))), cap)


def membership(rho: DensityOperator, constraint: EnergyConstraint) -> bool:
    """tr(rho E) <= c within tolerance 1e-9."""
    if rho.dim != constraint.dim:
        raise DimensionMismatchError(
            f"state dim {rho.dim} != constraint dim {constraint.dim}"
        )
    energy = float(np.trace(rho.matrix @ constraint.operator.matrix).real)
    return energy <= constraint.cap + MEMBERSHIP_ATOL


def mix_toward_ground(rho: DensityOperator, constraint: EnergyConstraint) -> DensityOperator:
    """Feasible state obtained by mixing `rho` toward the ground state.

    If `rho` already satisfies the cap it is returned unchanged; otherwise
    the unique mixture with mean energy exactly at the cap is returned.
    """
    e_mat = constraint.operator.matrix
    energy = float(np.trace(rho.matrix @ e_mat).real)
    if energy <= constraint.cap:
        return rho
    ground = constraint.ground_state()
    e_ground = float(np.trace(ground.matrix @ e_mat).real)
    t = (energy - constraint.cap) / (energy - e_ground)
    t = min(1.0, max(0.0, t))
    return DensityOperator((1.0 - t) * rho.matrix + t * ground.matrix)


@dataclass(frozen=True, eq=False)
class OracleResult:
    """Certified output of a best-response call.

    `gap` is the certified duality gap: for maximization
    primal_value <= optimum <= dual_value with dual - primal = gap,
    and the mirrored ordering for minimization.
    """

    state: DensityOperator
    primal_value: float
    dual_value: float
    multiplier: float
    gap: float


class _Probe:
    """Eigendata of M - mu*E at one multiplier value."""

    __slots__ = ("mu", "w", "v", "lam", "g", "eps", "vecs", "harvested")

    def __init__(self, mu, w, v, cap):
        self.mu = mu
        self.w = w
        self.v = v
        self.lam = float(w[-1])
        self.g = self.lam + mu * cap
        self.eps = None   # compressed energies in the top cluster
        self.vecs = None  # matching vectors in the full space
        self.harvested = False


def _compress_energy(e_mat: np.ndarray, basis: np.ndarray):
    """Eigenvalues/vectors of the energy operator restricted to span(basis)."""
    c = basis.conj().T @ e_mat @ basis
    if c.shape == (1, 1):
        return np.array([c[0, 0].real]), basis
    eps, u = _eigh(hermitian_part(c))
    return eps, basis @ u


class _MaxEngine:
    """One maximization of tr(rho M) over an energy-capped set."""

    def __init__(self, m_mat, constraint, gap_tol):
        self.m = m_mat
        self.k = constraint
        self.e = constraint.operator.matrix
        self.c = constraint.cap
        self.gap_tol = gap_tol
        self.probes: dict[float, _Probe] = {}
        self.best_primal = -np.inf
        self.best_state = None
        self.best_dual = np.inf
        self.best_dual_mu = 0.0
        self.n_probes = 0
        # probes bracketing the energy crossing: left has top energy >= cap,
        # right has top energy <= cap
        self.cross_left: _Probe | None = None
        self.cross_right: _Probe | None = None

    # -- probing ----------------------------------------------------------

    def probe(self, mu: float) -> _Probe:
        p = self.probes.get(mu)
        if p is None:
            w, v = _eigh(self.m - mu * self.e if mu != 0.0 else self.m)
            p = _Probe(mu, w, v, self.c)
            self.probes[mu] = p
            self.n_probes += 1
            if p.g < self.best_dual:
                self.best_dual = p.g
                self.best_dual_mu = mu
        return p

    def top_energies(self, p: _Probe, ktol: float):
        basis = p.v[:, p.w >= p.lam - ktol]
        return _compress_energy(self.e, basis)

    def residual(self, mu: float) -> float:
        """Minimum top-eigenspace energy minus the cap; positive left of
        the dual minimizer, nonpositive at or right of it."""
        p = self.probe(mu)
        if p.eps is None:
            p.eps, p.vecs = self.top_energies(p, 1e-12 * (1.0 + abs(p.lam)))
        r = float(p.eps[0]) - self.c
        if r >= 0.0:
            if self.cross_left is None or p.mu > self.cross_left.mu:
                self.cross_left = p
        if r <= 0.0:
            if self.cross_right is None or p.mu < self.cross_right.mu:
                self.cross_right = p
        return r

    # -- candidate recovery -------------------------------------------------

    def consider(self, state_mat: np.ndarray) -> None:
        energy = float(np.trace(state_mat @ self.e).real)
        if energy > self.c + 1e-12 * (1.0 + abs(self.c)):
            return
        primal = float(np.trace(state_mat @ self.m).real)
        if primal > self.best_primal:
            self.best_primal = primal
            self.best_state = state_mat

    def consider_mixture(self, v1, e1, v2, e2) -> None:
        if e1 < e2:
            v1, e1, v2, e2 = v2, e2, v1, e1
        if not (e1 >= self.c >= e2):
            return
        if e1 == e2:
            self.consider(np.outer(v1, v1.conj()))
            return
        t = (self.c - e2) / (e1 - e2)
        rho = t * np.outer(v1, v1.conj()) + (1.0 - t) * np.outer(v2, v2.conj())
        self.consider(rho)

    def harvest(self, p: _Probe) -> None:
        """Feasible candidates supported on top clusters of one probe."""
        if p.harvested:
            return
        p.harvested = True
        scale = 1.0 + abs(p.lam)
        for ktol in _CLUSTER_LADDER:
            eps, vecs = self.top_energies(p, ktol * scale)
            if eps[0] <= self.c <= eps[-1]:
                self.consider_mixture(vecs[:, 0], float(eps[0]), vecs[:, -1], float(eps[-1]))
            if eps[0] <= self.c:
                self.consider(np.outer(vecs[:, 0], vecs[:, 0].conj()))
            if eps[-1] <= self.c:
                self.consider(np.outer(vecs[:, -1], vecs[:, -1].conj()))
            if self.certified():
                return

    def certified(self) -> bool:
        return (
            self.best_state is not None
            and self.best_dual - self.best_primal <= self.gap_tol
        )

    # -- dual search --------------------------------------------------------

    def bracket_by_doubling(self) -> tuple[float, float]:
        hi = 1.0
        for _ in range(MAX_DOUBLINGS):
            if self.residual(hi) <= 0.0:
                return 0.0, hi
            hi *= 2.0
        raise OracleNumericalError(
            f"dual bracketing failed after {MAX_DOUBLINGS} doublings "
            f"(dim {self.m.shape[0]}, cap {self.c!r}, slack "
            f"{self.c - self.k.min_energy!r})"
        )

    def bracket_from_warm(self, warm: float) -> tuple[float, float]:
        """Geometrically expanding bracket around a warm multiplier guess."""
        warm = max(warm, 1e-12)
        factor = 1.05
        if self.residual(warm) > 0.0:
            lo, hi = warm, warm * factor
            for _ in range(MAX_DOUBLINGS):
                if self.residual(hi) <= 0.0:
                    return lo, hi
                lo, hi, factor = hi, hi * factor, factor * factor
            raise OracleNumericalError("dual bracketing failed from warm start")
        lo, hi = warm / factor, warm
        while lo > 1e-12:
            if self.residual(lo) > 0.0:
                return lo, hi
            lo, hi, factor = lo / factor, lo, factor * factor
        return 0.0, hi

    def golden_section(self, lo: float, hi: float) -> None:
        a, b = lo, hi
        x1 = b - _INVPHI * (b - a)
        x2 = a + _INVPHI * (b - a)
        g1 = self.probe(x1).g
        g2 = self.probe(x2).g
        for _ in range(600):
            if b - a <= _width_floor(b):
                break
            if g1 <= g2:
                b, x2, g2 = x2, x1, g1
                x1 = b - _INVPHI * (b - a)
                g1 = self.probe(x1).g
            else:
                a, x1, g1 = x1, x2, g2
                x2 = a + _INVPHI * (b - a)
                g2 = self.probe(x2).g

    def illinois(self, lo: float, hi: float) -> None:
        """Bracketed secant on the energy residual; kinks shrink the bracket
        geometrically, smooth crossings converge superlinearly."""
        flo = self.residual(lo) if lo > 0.0 else self.residual(0.0)
        fhi = self.residual(hi)
        if flo <= 0.0:
            return
        side = 0
        for it in range(200):
            if hi - lo <= _width_floor(hi):
                return
            if it % 3 == 2 or flo == fhi:
                x = 0.5 * (lo + hi)
            else:
                x = hi - fhi * (hi - lo) / (fhi - flo)
                pad = 1e-3 * (hi - lo)
                x = min(max(x, lo + pad), hi - pad)
            fx = self.residual(x)
            if fx > 0.0:
                lo, flo = x, fx
                if side == 1:
                    fhi *= 0.5
                side = 1
            else:
                hi, fhi = x, fx
                if side == -1:
                    flo *= 0.5
                side = -1

    # -- main ---------------------------------------------------------------

    def run(self, warm: float | None):
        if warm is not None and warm > 0.0:
            # a barely-drifted multiplier often certifies in a single probe
            self.harvest(self.probe(warm))
            if self.certified():
                return self.finish(self.best_dual_mu)
        # unconstrained top eigenspace already contains a feasible state?
        p0 = self.probe(0.0)
        if self.residual(0.0) <= 0.0:
            v = p0.vecs[:, 0]
            self.consider(np.outer(v, v.conj()))
            if self.certified():
                return self.finish(0.0)
            self.harvest(p0)
            if self.certified():
                return self.finish(0.0)
            mu_star = 0.0
        else:
            if warm is not None and warm > 0.0:
                lo, hi = self.bracket_from_warm(warm)
                self.illinois(lo, hi)
            else:
                lo, hi = self.bracket_by_doubling()
                self.golden_section(lo, hi)
            mu_star = self.best_dual_mu

        self.harvest(self.probe(mu_star))
        if self.certified():
            return self.finish(mu_star)

        self.refine_crossing()
        if self.certified():
            return self.finish(self.best_dual_mu)

        raise OracleNumericalError(
            f"could not certify gap <= {self.gap_tol!r}: best gap "
            f"{self.best_dual - self.best_primal!r} after {self.n_probes} probes "
            f"(dim {self.m.shape[0]}, cap {self.c!r})"
        )

    def refine_crossing(self) -> None:
        """Bisect the tracked probe pair around the energy crossing.

        The cross-mixture of the two top eigenvectors straddles the cap by
        construction; shrinking the pair drives both the mixture's value
        loss and the dual evaluation error to floating-point level.
        """
        for _ in range(80):
            left, right = self.cross_left, self.cross_right
            if left is None or right is None:
                return
            self.consider_mixture(
                left.vecs[:, 0], float(left.eps[0]),
                right.vecs[:, 0], float(right.eps[0]),
            )
            self.harvest(left)
            self.harvest(right)
            if self.certified():
                return
            if right.mu - left.mu <= _width_floor(right.mu):
                return
            self.residual(0.5 * (left.mu + right.mu))

    def finish(self, mu_star: float):
        gap = self.best_dual - self.best_primal
        return self.best_state, self.best_primal, self.best_dual, mu_star, max(gap, 0.0)


def _face_restricted_max(m_mat, constraint):
    """Cap pinned at the ground energy: optimize over the ground eigenspace."""
    basis = constraint.ground_basis()
    comp = hermitian_part(basis.conj().T @ m_mat @ basis)
    if comp.shape == (1, 1):
        value, vec = float(comp[0, 0].real), basis[:, 0]
    else:
        w, u = _eigh(comp)
        value, vec = float(w[-1]), basis @ u[:, -1]
    return np.outer(vec, vec.conj()), value, value, 0.0, 0.0


def _max_raw(m_mat, constraint, gap_tol, warm=None):
    if m_mat.shape[0] != constraint.dim:
        raise DimensionMismatchError(
            f"objective dim {m_mat.shape[0]} != constraint dim {constraint.dim}"
        )
    slack = constraint.cap - constraint.min_energy
    if slack < -1e-9 * (1.0 + abs(constraint.cap)):
        raise InfeasibleConstraintError(
            f"infeasible energy constraint: cap {constraint.cap!r} is below the "
            f"minimum energy {constraint.min_energy!r}"
        )
    if slack <= 0.0:
        return _face_restricted_max(m_mat, constraint)
    return _MaxEngine(m_mat, constraint, gap_tol).run(warm)


def best_response_max(
    m: HermitianOperator,
    constraint: EnergyConstraint,
    gap_tol: float = DEFAULT_GAP_TOL,
    warm_multiplier: float | None = None,
) -> OracleResult:
    """Certified maximum of tr(rho M) over the energy-capped set.

    The dual minimizer is located by bracketing plus golden section (or a
    warm-started bracketed secant when `warm_multiplier` is given as a
    performance hint); the returned gap is always computed from explicit
    primal and dual evaluations and is at most `gap_tol`.
    """
    if gap_tol <= 0:
        raise ValueError("gap_tol must be positive")
    state, primal, dual, mu, gap = _max_raw(
        m.matrix, constraint, gap_tol, warm=warm_multiplier
    )
    return OracleResult(DensityOperator(state), primal, dual, mu, gap)


def best_response_min(
    m: HermitianOperator,
    constraint: EnergyConstraint,
    gap_tol: float = DEFAULT_GAP_TOL,
    warm_multiplier: float | None = None,
) -> OracleResult:
    """Certified minimum of tr(rho M): maximization of the negated objective."""
    if gap_tol <= 0:
        raise ValueError("gap_tol must be positive")
    state, primal, dual, mu, gap = _max_raw(
        -m.matrix, constraint, gap_tol, warm=warm_multiplier
    )
    return OracleResult(DensityOperator(state), -primal, -dual, mu, gap)
