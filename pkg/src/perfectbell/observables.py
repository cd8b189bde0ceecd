"""Spin observables for qubits and qutrits and their spectral projections."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadIndex, NotHermitian, NotUnit
from .linalg import HERMITIAN_TOL, as_matrix, hermitian_eig, hermiticity_residual

UNIT_TOL = 1e-6
CLUSTER_GAP = 1e-8

_SQ2 = np.sqrt(2.0)

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

SPIN1 = (
    np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=complex) / _SQ2,
    np.array([[0, -1j, 0], [1j, 0, -1j], [0, 1j, 0]], dtype=complex) / _SQ2,
    np.array([[1, 0, 0], [0, 0, 0], [0, 0, -1]], dtype=complex),
)


def direction(r) -> np.ndarray:
    """Validate a 3-vector as a unit direction and renormalize it.

    Vectors whose norm is off by more than ``UNIT_TOL`` are rejected rather
    than silently normalized.
    """
    r = np.asarray(r, dtype=float).reshape(-1)
    if r.shape != (3,):
        raise NotUnit(f"direction must have 3 components, got {r.shape[0]}")
    norm = float(np.linalg.norm(r))
    if abs(norm - 1.0) > UNIT_TOL:
        raise NotUnit(f"|r| = {norm!r}")
    return r / norm


def parse_direction(text: str) -> np.ndarray:
    """Parse ``"x,y,z"`` into a unit direction."""
    parts = [p for p in text.replace(" ", "").split(",") if p]
    try:
        return direction([float(p) for p in parts])
    except ValueError as exc:
        if isinstance(exc, NotUnit):
            raise
        raise NotUnit(f"cannot parse direction {text!r}") from exc


def pauli(i: int) -> np.ndarray:
    if i not in (1, 2, 3):
        raise BadIndex(f"Pauli index must be 1, 2 or 3, got {i!r}")
    return PAULI[i - 1].copy()


def spin1(i: int) -> np.ndarray:
    if i not in (1, 2, 3):
        raise BadIndex(f"spin-1 index must be 1, 2 or 3, got {i!r}")
    return SPIN1[i - 1].copy()


def sigma_r(r) -> np.ndarray:
    r = direction(r)
    return r[0] * PAULI[0] + r[1] * PAULI[1] + r[2] * PAULI[2]


def spin1_r(r) -> np.ndarray:
    r = direction(r)
    return r[0] * SPIN1[0] + r[1] * SPIN1[1] + r[2] * SPIN1[2]


def spin_r(r, d: int) -> np.ndarray:
    """sigma_r for d == 2, S_r for d == 3."""
    if d == 2:
        return sigma_r(r)
    if d == 3:
        return spin1_r(r)
    raise BadIndex(f"spin observables exist here only for d in (2, 3), got {d}")


def spin_components(d: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if d == 2:
        return PAULI
    if d == 3:
        return SPIN1
    raise BadIndex(f"spin observables exist here only for d in (2, 3), got {d}")


@dataclass(frozen=True)
class QubitObservableDecomposition:
    alpha: float
    r: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return self.alpha * np.eye(2) + sum(self.r[k] * PAULI[k] for k in range(3))


def decompose_qubit_observable(x) -> QubitObservableDecomposition:
    """Write X = alpha*I + r.sigma with alpha = tr[X]/2, r_i = tr[X sigma_i]/2."""
    x = as_matrix(x)
    if x.shape != (2, 2):
        raise BadIndex(f"qubit observable must be 2x2, got {x.shape}")
    res = hermiticity_residual(x)
    if res > HERMITIAN_TOL:
        raise NotHermitian(f"max |X - X^dagger| = {res:.3e}")
    alpha = 0.5 * np.trace(x).real
    r = np.array([0.5 * np.trace(x @ p).real for p in PAULI])
    return QubitObservableDecomposition(float(alpha), r)


@dataclass(frozen=True)
class SpectralDecomposition:
    eigenvalues: tuple[float, ...]
    projectors: tuple[np.ndarray, ...]

    def __iter__(self):
        return iter(zip(self.eigenvalues, self.projectors))

    def __len__(self):
        return len(self.eigenvalues)

    def reconstruct(self) -> np.ndarray:
        return sum(lam * p for lam, p in self)


def spectral_decomposition(x, gap: float = CLUSTER_GAP) -> SpectralDecomposition:
    """Eigenvalues clustered (neighbours closer than ``gap`` merge) with their projectors."""
    eig = hermitian_eig(x)
    vals, vecs = eig.eigenvalues, eig.eigenvectors
    groups: list[list[int]] = [[0]]
    for k in range(1, len(vals)):
        if abs(vals[k] - vals[groups[-1][-1]]) < gap:
            groups[-1].append(k)
        else:
            groups.append([k])
    eigenvalues = []
    projectors = []
    for g in groups:
        v = vecs[:, g]
        eigenvalues.append(float(np.mean(vals[g])))
        projectors.append(v @ v.conj().T)
    return SpectralDecomposition(tuple(eigenvalues), tuple(projectors))


def spin1_rotation(axis, angle: float) -> np.ndarray:
    """U = exp(-i angle n.S) on C^3, computed through the spectral form of n.S."""
    n_s = spin1_r(axis)
    eig = hermitian_eig(n_s)
    v = eig.eigenvectors
    return (v * np.exp(-1j * angle * eig.eigenvalues)) @ v.conj().T


def qubit_rotation(axis, angle: float) -> np.ndarray:
    """U = exp(-i angle/2 n.sigma)."""
    n = direction(axis)
    return np.cos(angle / 2) * np.eye(2) - 1j * np.sin(angle / 2) * sigma_r(n)


def rotation_matrix(axis, angle: float) -> np.ndarray:
    """Rodrigues formula for the proper rotation of R^3 about ``axis``."""
    n = direction(axis)
    k = np.array([[0, -n[2], n[1]], [n[2], 0, -n[0]], [-n[1], n[0], 0]])
    return np.eye(3) + np.sin(angle) * k + (1 - np.cos(angle)) * (k @ k)
