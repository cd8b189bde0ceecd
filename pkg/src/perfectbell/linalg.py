"""Small dense linear algebra for 2-, 3-, 4- and 9-dimensional operators.

General Hermitian problems go through LAPACK (``numpy.linalg.eigh``); the
3x3 real symmetric correlation matrices use a hand-written cyclic Jacobi
sweep so that classification of perfect-correlation directions does not
share a code path with the general solver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotHermitian, NotSymmetric

HERMITIAN_TOL = 1e-9
RECON_TOL = 1e-10
_TIE_TOL = 1e-10
_ZERO_TOL = 1e-12


@dataclass(frozen=True)
class HermitianEigensystem:
    eigenvalues: np.ndarray  # descending, real
    eigenvectors: np.ndarray  # columns, orthonormal

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


@dataclass(frozen=True)
class RealSym3Eigensystem:
    eigenvalues: np.ndarray  # shape (3,), descending
    eigenvectors: np.ndarray  # shape (3, 3), column m is v_m

    def reconstruct(self) -> np.ndarray:
        r = self.eigenvectors
        return (r * self.eigenvalues) @ r.T


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    return m


def tensor_product(a, b) -> np.ndarray:
    """Kronecker product; entry ((i,k),(j,l)) is a[i,j]*b[k,l]."""
    return np.kron(as_matrix(a), as_matrix(b))


def trace_product(a, b) -> complex:
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")
    # tr[AB] = sum_ij A_ij B_ji
    return complex(np.sum(a * b.T))


def hermiticity_residual(h) -> float:
    h = as_matrix(h)
    return float(np.max(np.abs(h - h.conj().T))) if h.size else 0.0


def _normalize_phase(v: np.ndarray) -> np.ndarray:
    """Rotate the phase so the first nonzero component is real positive."""
    for x in v:
        if abs(x) > _ZERO_TOL:
            return v * (abs(x) / x)
    return v


def _sort_key_vector(v: np.ndarray) -> tuple:
    key = []
    for x in np.asarray(v, dtype=complex):
        key.extend((round(x.real, 12), round(x.imag, 12)))
    return tuple(key)


def _canonical_order(values: np.ndarray, vectors: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Descending eigenvalues; ties ordered by lexicographically largest vector first."""
    n = len(values)
    vecs = [_normalize_phase(vectors[:, k]) for k in range(n)]
    idx = sorted(range(n), key=lambda k: -values[k])
    # group near-equal eigenvalues, then reorder each group by vector
    out: list[int] = []
    i = 0
    while i < n:
        j = i + 1
        while j < n and abs(values[idx[j]] - values[idx[i]]) <= _TIE_TOL:
            j += 1
        group = sorted(idx[i:j], key=lambda k: _sort_key_vector(vecs[k]), reverse=True)
        out.extend(group)
        i = j
    vals = np.array([values[k] for k in out])
    vmat = np.column_stack([vecs[k] for k in out])
    return vals, vmat


def hermitian_eig(h) -> HermitianEigensystem:
    h = as_matrix(h)
    res = hermiticity_residual(h)
    if res > HERMITIAN_TOL:
        raise NotHermitian(f"max |H - H^dagger| = {res:.3e}")
    h = 0.5 * (h + h.conj().T)
    w, v = np.linalg.eigh(h)
    w, v = _canonical_order(w.real, v)
    return HermitianEigensystem(w, v)


def jacobi_eigh(m, tol: float = 1e-15, max_sweeps: int = 50) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi diagonalisation of a real symmetric matrix.

    Returns (eigenvalues, eigenvectors-as-columns), unsorted.
    """
    a = np.array(m, dtype=float)
    n = a.shape[0]
    v = np.eye(n)
    scale = max(np.max(np.abs(a)), 1.0)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.triu(a, 1) ** 2))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0)) if theta != 0 else 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot = np.eye(n)
                rot[p, p] = rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                a = rot.T @ a @ rot
                a[p, q] = a[q, p] = 0.0
                v = v @ rot
    return np.diag(a).copy(), v


def real_sym3_eig(m) -> RealSym3Eigensystem:
    m = np.asarray(m, dtype=float)
    if m.shape != (3, 3):
        raise DimensionMismatch(f"expected 3x3, got {m.shape}")
    asym = float(np.max(np.abs(m - m.T)))
    if asym > HERMITIAN_TOL:
        raise NotSymmetric(f"max |M - M^T| = {asym:.3e}")
    w, v = jacobi_eigh(0.5 * (m + m.T))
    w, v = _canonical_order(w, v)
    return RealSym3Eigensystem(w, v.real)
