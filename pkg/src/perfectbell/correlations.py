"""Joint outcome statistics, correlation matrices and classification of
perfect-correlation directions."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateMarginal,
    DimensionMismatch,
    NotSymmetricState,
    OutcomeOutOfRange,
    UnsupportedDimension,
)
from .linalg import RealSym3Eigensystem, as_matrix, real_sym3_eig, tensor_product
from .observables import spectral_decomposition, spin_components
from .states import DensityOperator

PERFECT_TOL = 1e-9
OUTCOME_TOL = 1e-9
_PROB_FLOOR = -1e-12


@dataclass(frozen=True)
class JointDistribution:
    """Probabilities ``probs[i, k]`` of Alice outcome ``alice[i]`` with Bob outcome ``bob[k]``."""

    alice: np.ndarray
    bob: np.ndarray
    probs: np.ndarray

    @classmethod
    def from_dict(cls, table: dict[tuple[float, float], float]) -> "JointDistribution":
        a = sorted({k[0] for k in table}, reverse=True)
        b = sorted({k[1] for k in table}, reverse=True)
        p = np.zeros((len(a), len(b)))
        for (la, lb), v in table.items():
            p[a.index(la), b.index(lb)] += v
        return cls(np.array(a, dtype=float), np.array(b, dtype=float), p)

    def prob(self, la: float, lb: float, tol: float = OUTCOME_TOL) -> float:
        ia = np.flatnonzero(np.abs(self.alice - la) <= tol)
        ib = np.flatnonzero(np.abs(self.bob - lb) <= tol)
        return float(self.probs[np.ix_(ia, ib)].sum())

    def moment(self) -> float:
        return float(self.alice @ self.probs @ self.bob)

    def total(self) -> float:
        return float(self.probs.sum())


def joint_distribution(rho: DensityOperator, x_a, x_b) -> JointDistribution:
    """p(la, lb) = tr[rho (P_a(la) (x) P_b(lb))] over spectral projections."""
    x_a = as_matrix(x_a)
    x_b = as_matrix(x_b)
    if x_a.shape[0] * x_b.shape[0] != rho.dim:
        raise DimensionMismatch(
            f"observables of dims {x_a.shape[0]}, {x_b.shape[0]} do not fit a state of dim {rho.dim}"
        )
    sa = spectral_decomposition(x_a)
    sb = spectral_decomposition(x_b)
    for lam in sa.eigenvalues + sb.eigenvalues:
        if abs(lam) > 1 + OUTCOME_TOL:
            raise OutcomeOutOfRange(f"eigenvalue {lam!r} lies outside [-1, 1]")
    p = np.empty((len(sa), len(sb)))
    for i, pa in enumerate(sa.projectors):
        for k, pb in enumerate(sb.projectors):
            p[i, k] = np.trace(rho.matrix @ tensor_product(pa, pb)).real
    p[(p < 0) & (p >= _PROB_FLOOR)] = 0.0
    return JointDistribution(np.array(sa.eigenvalues), np.array(sb.eigenvalues), p)


def product_expectation(rho: DensityOperator, x_a, x_b) -> float:
    """tr[rho (X_a (x) X_b)]."""
    x_a = as_matrix(x_a)
    x_b = as_matrix(x_b)
    if x_a.shape[0] * x_b.shape[0] != rho.dim:
        raise DimensionMismatch(
            f"observables of dims {x_a.shape[0]}, {x_b.shape[0]} do not fit a state of dim {rho.dim}"
        )
    return float(np.trace(rho.matrix @ tensor_product(x_a, x_b)).real)


@dataclass(frozen=True)
class Marginal:
    outcomes: np.ndarray
    probs: np.ndarray

    def mean(self) -> float:
        return float(self.outcomes @ self.probs)

    def variance(self) -> float:
        m = self.mean()
        return float(((self.outcomes - m) ** 2) @ self.probs)

    def prob(self, lam: float, tol: float = OUTCOME_TOL) -> float:
        return float(self.probs[np.abs(self.outcomes - lam) <= tol].sum())


def marginals(jd: JointDistribution) -> tuple[Marginal, Marginal]:
    return Marginal(jd.alice, jd.probs.sum(axis=1)), Marginal(jd.bob, jd.probs.sum(axis=0))


def perfect_mass(jd: JointDistribution, sign: int, tol: float = OUTCOME_TOL) -> float:
    """Probability of {la == lb} (sign +1) or {la == -lb != 0} (sign -1)."""
    la = jd.alice[:, None]
    lb = jd.bob[None, :]
    if sign == 1:
        mask = np.abs(la - lb) <= tol
    else:
        mask = (np.abs(la + lb) <= tol) & (np.abs(la) > tol)
    return float(jd.probs[mask].sum())


def check_perfect(jd: JointDistribution, sign: int, eps: float = PERFECT_TOL) -> bool:
    return perfect_mass(jd, sign) >= 1 - eps


def pearson(jd: JointDistribution) -> float:
    ma, mb = marginals(jd)
    va, vb = ma.variance(), mb.variance()
    if va <= 1e-12 or vb <= 1e-12:
        raise DegenerateMarginal(f"marginal variances {va:.3e}, {vb:.3e}")
    da = jd.alice - ma.mean()
    db = jd.bob - mb.mean()
    cov = float(da @ jd.probs @ db)
    return cov / (np.sqrt(va) * np.sqrt(vb))


@dataclass(frozen=True)
class CorrelationMatrix:
    entries: np.ndarray
    eigen: RealSym3Eigensystem = field(repr=False)
    kind: str  # "qubit-T" or "qutrit-Z"

    @classmethod
    def from_entries(cls, entries, kind: str = "qubit-T") -> "CorrelationMatrix":
        m = np.asarray(entries, dtype=float)
        return cls(m, real_sym3_eig(m), kind)

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.eigen.eigenvalues

    @property
    def eigenvectors(self) -> np.ndarray:
        return self.eigen.eigenvectors

    def form(self, x, y) -> float:
        """Bilinear form (x, M y)."""
        return float(np.asarray(x) @ self.entries @ np.asarray(y))


def correlation_matrix(rho: DensityOperator) -> CorrelationMatrix:
    """T_ij = tr[rho sigma_i (x) sigma_j] for qubits, Z_ij = tr[rho S_i (x) S_j] for qutrits."""
    if rho.local_dim not in (2, 3):
        raise UnsupportedDimension(f"correlation matrices need d in (2, 3), got {rho.local_dim}")
    if not rho.symmetric:
        raise NotSymmetricState(f"swap residual {rho.swap_residual:.3e}")
    ops = spin_components(rho.local_dim)
    m = np.array([[product_expectation(rho, a, b) for b in ops] for a in ops])
    kind = "qubit-T" if rho.local_dim == 2 else "qutrit-Z"
    return CorrelationMatrix(m, real_sym3_eig(m), kind)


_AXES = {0: "X", 1: "Y", 2: "Z"}


def _axis_name(v: np.ndarray, tol: float = 1e-9) -> str | None:
    k = int(np.argmax(np.abs(v)))
    if abs(abs(v[k]) - 1) <= tol:
        return _AXES[k]
    return None


@dataclass(frozen=True)
class PerfectClassification:
    """Which unit directions r satisfy (r, T r) = sign.

    ``case`` is the number of eigenvalues of T within ``eps`` of ``sign``:
    1 gives a single direction (up to sign), 2 a plane, 3 every direction,
    0 none.
    """

    sign: int
    case: int
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray = field(repr=False)
    unit_eigenvalue_indices: tuple[int, ...]
    residuals: tuple[float, ...]
    eps: float

    @property
    def has_direction(self) -> bool:
        return self.case > 0

    @property
    def basis(self) -> np.ndarray:
        """Orthonormal basis (rows) of the admissible subspace."""
        return self.eigenvectors[:, list(self.unit_eigenvalue_indices)].T

    @property
    def directions_type(self) -> str:
        return {0: "none", 1: "vector", 2: "plane", 3: "sphere"}[self.case]

    def distance_to_set(self, r) -> float:
        """Euclidean distance from unit r to the admissible set on the sphere."""
        r = np.asarray(r, dtype=float)
        if self.case == 0:
            return float("inf")
        proj = self.basis.T @ (self.basis @ r)
        n = np.linalg.norm(proj)
        if n == 0:
            return float(np.sqrt(2.0))
        return float(np.linalg.norm(r - proj / n))

    def describe(self) -> str:
        if self.case == 0:
            return "none"
        if self.case == 3:
            return "all directions"
        names = [_axis_name(v) for v in self.basis]
        if self.case == 1:
            return f"axis {names[0]}" if names[0] else f"vector {np.round(self.basis[0], 6).tolist()}"
        if all(names):
            return "plane " + "".join(sorted(names))
        return f"plane spanned by {np.round(self.basis, 6).tolist()}"

    def to_json(self) -> dict:
        if self.case == 0:
            directions = {"type": "none"}
        elif self.case == 3:
            directions = {"type": "sphere"}
        else:
            directions = {"type": self.directions_type, "basis": self.basis.tolist()}
        return {
            "sign": self.sign,
            "case": self.case,
            "eigenvalues": self.eigenvalues.tolist(),
            "residuals": list(self.residuals),
            "directions": directions,
        }


def classify_perfect_directions(t: CorrelationMatrix, sign: int, eps: float = PERFECT_TOL) -> PerfectClassification:
    vals = t.eigenvalues
    idx = tuple(int(m) for m in range(3) if abs(vals[m] - sign) <= eps)
    residuals = tuple(float(abs(vals[m] - sign)) for m in range(3))
    return PerfectClassification(
        sign=sign,
        case=len(idx),
        eigenvalues=vals.copy(),
        eigenvectors=t.eigenvectors.copy(),
        unit_eigenvalue_indices=idx,
        residuals=residuals,
        eps=eps,
    )
