"""The original-Bell left-hand side for spin measurements, its analytic
maximum over measurement directions, an independent sphere-grid oracle and
CHSH evaluations.

For a correlation matrix T (qubit T or qutrit Z) and unit directions
a, r, c the functional is

    W(a, r, c) = |(a, T r) - (a, T c)| + sign * (r, T c),

evaluated under the constraint (r, T r) = sign.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import golden

from .correlations import (
    PERFECT_TOL,
    CorrelationMatrix,
    PerfectClassification,
    classify_perfect_directions,
    product_expectation,
)
from .errors import BadParameter, NoFeasibleR, NoPerfectDirection, PreconditionViolated
from .observables import direction, spin_r
from .sphere import fibonacci_sphere
from .states import DensityOperator

TSIRELSON = 2.0 * np.sqrt(2.0)
CHSH_DERIVED_BOUND = TSIRELSON - 1.0
QUANTUM_BOUND = 1.5
CLASSICAL_BOUND = 1.0

C_SCAN_POINTS = 2048
PLANE_SCAN_POINTS = 1024
REFINE_TOL = 1e-10
_DEGENERATE = 1e-12
_X_AXIS = np.array([1.0, 0.0, 0.0])


def _entries(t) -> np.ndarray:
    return t.entries if isinstance(t, CorrelationMatrix) else np.asarray(t, dtype=float)


def _as_corr(t) -> CorrelationMatrix:
    return t if isinstance(t, CorrelationMatrix) else CorrelationMatrix.from_entries(t)


@dataclass(frozen=True)
class BellEvaluation:
    sign: int
    a: np.ndarray
    r: np.ndarray
    c: np.ndarray
    value: float
    a_degenerate: bool = False

    def to_json(self) -> dict:
        return {
            "sign": self.sign,
            "a": self.a.tolist(),
            "r": self.r.tolist(),
            "c": self.c.tolist(),
            "value": self.value,
            "a_degenerate": self.a_degenerate,
        }


@dataclass(frozen=True)
class EigenbasisCoordinates:
    beta: np.ndarray
    gamma: np.ndarray


@dataclass(frozen=True)
class MaximizationResult:
    best: BellEvaluation
    method: str  # "analytic" or "grid"
    classification: PerfectClassification | None = field(default=None, repr=False)
    grid_resolution: int | None = None
    feasible_points: int | None = None
    perfect_residual: float = 0.0

    @property
    def value(self) -> float:
        return self.best.value

    def to_json(self) -> dict:
        out = {
            "method": self.method,
            "value": self.value,
            "best": self.best.to_json(),
            "perfect_residual": self.perfect_residual,
        }
        if self.grid_resolution is not None:
            out["grid_resolution"] = self.grid_resolution
            out["feasible_points"] = self.feasible_points
        if self.classification is not None:
            out["classification"] = self.classification.to_json()
        return out


def eval_W(t, a, r, c, sign: int) -> float:
    m = _entries(t)
    a, r, c = direction(a), direction(r), direction(c)
    return float(abs(a @ m @ r - a @ m @ c) + sign * (r @ m @ c))


def w_functional(rho: DensityOperator, x_a, x_b1, x_b2, sign: int) -> float:
    """|tr[rho X_a(x)X_b1] - tr[rho X_a(x)X_b2]| + sign * tr[rho X_b1(x)X_b2]."""
    e1 = product_expectation(rho, x_a, x_b1)
    e2 = product_expectation(rho, x_a, x_b2)
    e3 = product_expectation(rho, x_b1, x_b2)
    return abs(e1 - e2) + sign * e3


def eval_W_trace(rho: DensityOperator, a, r, c, sign: int) -> float:
    """The same functional evaluated directly from traces of spin observables."""
    d = rho.local_dim
    return w_functional(rho, spin_r(a, d), spin_r(r, d), spin_r(c, d), sign)


def optimal_a(t, r, c) -> tuple[np.ndarray, bool]:
    """Best Alice direction for fixed r, c: a = T(r - c)/|T(r - c)|.

    Returns ``(a, degenerate)``; when T(r - c) vanishes the x-axis is
    returned with ``degenerate=True`` (the term is then 0 for every a).
    """
    m = _entries(t)
    v = m @ (np.asarray(r, dtype=float) - np.asarray(c, dtype=float))
    n = float(np.linalg.norm(v))
    if n <= _DEGENERATE:
        return _X_AXIS.copy(), True
    return v / n, False


def _reduced_value(m: np.ndarray, r: np.ndarray, c: np.ndarray, sign: int) -> float:
    # value after optimizing a
    return float(np.linalg.norm(m @ (r - c)) + sign * (r @ m @ c))


def eigenbasis_coordinates(t, r, c) -> EigenbasisCoordinates:
    v = _as_corr(t).eigenvectors
    return EigenbasisCoordinates(v.T @ np.asarray(r, dtype=float), v.T @ np.asarray(c, dtype=float))


def _scan_and_refine(f, lo: float, hi: float, n: int) -> tuple[float, float]:
    """Maximize a 1-D function: dense scan, then golden section in the best bracket."""
    xs = np.linspace(lo, hi, n)
    ys = np.array([f(x) for x in xs])
    k = int(np.argmax(ys))
    if 0 < k < n - 1:
        try:
            x = float(golden(lambda s: -f(s), brack=(xs[k - 1], xs[k], xs[k + 1]), tol=REFINE_TOL))
        except (ValueError, RuntimeError):
            x = float(xs[k])
        fx = f(x)
        if fx >= ys[k]:
            return x, fx
    return float(xs[k]), float(ys[k])


def _unit_subspace(t: CorrelationMatrix, eps: float) -> list[int]:
    return [m for m in range(3) if abs(abs(t.eigenvalues[m]) - 1.0) <= eps]


def maximize_over_c(t, r, sign: int, eps: float = PERFECT_TOL) -> tuple[np.ndarray, float]:
    """Maximize the a-optimized functional over Bob's second direction c.

    When the eigenspace of T for eigenvalues of modulus one is at least
    two-dimensional, c is placed in it at angle pi/3 to r, reaching 3/2.
    Otherwise c = g r + sqrt(1 - g^2) u with u the eigenvector of largest
    |eigenvalue| off r, and the overlap g is found by scan + golden section.
    """
    t = _as_corr(t)
    m = t.entries
    r = direction(r)
    rtr = float(r @ m @ r)
    if abs(rtr - sign) > eps:
        raise PreconditionViolated(f"(r, T r) = {rtr!r} is not within {eps:g} of {sign}")
    vecs = t.eigenvectors
    unit = _unit_subspace(t, eps)
    if len(unit) >= 2:
        basis = vecs[:, unit]
        w = None
        for k in range(basis.shape[1]):
            cand = basis[:, k] - (basis[:, k] @ r) * r
            if w is None or np.linalg.norm(cand) > np.linalg.norm(w):
                w = cand
        w = w / np.linalg.norm(w)
        c = 0.5 * r + (np.sqrt(3.0) / 2.0) * w
        c = c / np.linalg.norm(c)
        return c, _reduced_value(m, r, c, sign)

    # one-dimensional reduction: only the overlap with r and the strongest
    # off-axis eigen-direction matter
    m0 = int(np.argmin([abs(t.eigenvalues[k] - sign) for k in range(3)]))
    others = [k for k in range(3) if k != m0]
    k_best = max(others, key=lambda k: (abs(t.eigenvalues[k]), -k))
    u = vecs[:, k_best] - (vecs[:, k_best] @ r) * r
    if np.linalg.norm(u) <= _DEGENERATE:
        k_alt = others[1] if others[0] == k_best else others[0]
        u = vecs[:, k_alt] - (vecs[:, k_alt] @ r) * r
    u = u / np.linalg.norm(u)

    def c_of(g: float) -> np.ndarray:
        g = min(1.0, max(-1.0, g))
        return g * r + np.sqrt(max(0.0, 1.0 - g * g)) * u

    g_best, _ = _scan_and_refine(lambda g: _reduced_value(m, r, c_of(g), sign), -1.0, 1.0, C_SCAN_POINTS)
    c = c_of(g_best)
    c = c / np.linalg.norm(c)
    return c, _reduced_value(m, r, c, sign)


def _evaluate(t: CorrelationMatrix, r: np.ndarray, sign: int, eps: float) -> BellEvaluation:
    c, _ = maximize_over_c(t, r, sign, eps)
    a, degenerate = optimal_a(t, r, c)
    return BellEvaluation(sign, a, r, c, eval_W(t, a, r, c, sign), degenerate)


def maximize_W(t, sign: int, eps: float = PERFECT_TOL) -> MaximizationResult:
    """Analytic maximum of W over a, c and the admissible perfect directions r."""
    if sign not in (1, -1):
        raise BadParameter(f"sign must be +1 or -1, got {sign!r}")
    t = _as_corr(t)
    cls = classify_perfect_directions(t, sign, eps)
    if cls.case == 0:
        raise NoPerfectDirection(
            f"no eigenvalue of the correlation matrix within {eps:g} of {sign}: {t.eigenvalues.tolist()}"
        )
    basis = cls.basis
    if cls.case == 2:
        v1, v2 = basis

        def r_of(theta: float) -> np.ndarray:
            r = np.cos(theta) * v1 + np.sin(theta) * v2
            return r / np.linalg.norm(r)

        theta, _ = _scan_and_refine(
            lambda th: maximize_over_c(t, r_of(th), sign, eps)[1], 0.0, np.pi, PLANE_SCAN_POINTS
        )
        r = r_of(theta)
    else:
        # case 1: the single admissible axis; case 3: the value does not depend on r
        r = basis[0] / np.linalg.norm(basis[0])
    best = _evaluate(t, r, sign, eps)
    residual = abs(float(r @ t.entries @ r) - sign)
    return MaximizationResult(best, "analytic", cls, perfect_residual=residual)


def _snap(m: np.ndarray, pts: np.ndarray, sign: int, squarings: int = 64) -> tuple[np.ndarray, np.ndarray]:
    """Project points onto the dominant eigenspace of I + sign*T by repeated squaring.

    The perfect-correlation directions are exactly the eigenvectors of
    I + sign*T with eigenvalue 2, its largest; no eigensolver is used.
    """
    p = np.eye(3) + sign * m
    for _ in range(squarings):
        p = p @ p
        p /= np.max(np.abs(p))
    snapped = pts @ p.T
    norms = np.linalg.norm(snapped, axis=1)
    keep = norms > 1e-6 * np.max(norms)
    return snapped[keep] / norms[keep, None], keep


def grid_search_max(t, sign: int, resolution: int = 64) -> MaximizationResult:
    """Exhaustive Fibonacci-sphere search, independent of the analytic path.

    r ranges over the resolution**2 lattice points with |(r, T r) - sign| below
    10/resolution**2, each snapped onto the exact perfect-direction set; c
    ranges over the same lattice and a is chosen optimally for each (r, c).
    Ties are broken by lowest (r, c) index.
    """
    if resolution < 8:
        raise BadParameter(f"resolution must be >= 8, got {resolution}")
    if sign not in (1, -1):
        raise BadParameter(f"sign must be +1 or -1, got {sign!r}")
    m = _entries(t)
    pts = np.asarray(fibonacci_sphere(resolution * resolution))
    band = 10.0 / resolution**2
    q = np.einsum("ni,ij,nj->n", pts, m, pts)
    feasible = np.flatnonzero(np.abs(q - sign) <= band)
    if feasible.size == 0:
        raise NoFeasibleR(f"no lattice point within {band:g} of (r, T r) = {sign}")
    rs, _ = _snap(m, pts[feasible], sign)
    if rs.shape[0] == 0:
        raise NoFeasibleR("snapping removed every feasible point")
    _, first = np.unique(np.round(rs, 9), axis=0, return_index=True)
    rs = rs[np.sort(first)]

    tc = pts @ m.T  # rows: T c
    tc_sq = np.einsum("ij,ij->i", tc, tc)
    best_val = -np.inf
    best_rc = (0, 0)
    chunk = 256
    for start in range(0, rs.shape[0], chunk):
        block = rs[start : start + chunk]
        tr = block @ m.T
        tr_sq = np.einsum("ij,ij->i", tr, tr)
        cross = tr @ tc.T
        dist = np.sqrt(np.clip(tr_sq[:, None] + tc_sq[None, :] - 2.0 * cross, 0.0, None))
        vals = dist + sign * (block @ tc.T)
        k = int(np.argmax(vals))
        if vals.flat[k] > best_val:
            best_val = float(vals.flat[k])
            best_rc = (start + k // vals.shape[1], k % vals.shape[1])
    r = rs[best_rc[0]]
    c = pts[best_rc[1]].copy()
    a, degenerate = optimal_a(m, r, c)
    value = eval_W(m, a, r, c, sign)
    best = BellEvaluation(sign, a, r, c, value, degenerate)
    residual = abs(float(r @ m @ r) - sign)
    return MaximizationResult(
        best,
        "grid",
        grid_resolution=resolution,
        feasible_points=int(feasible.size),
        perfect_residual=residual,
    )


def chsh_value(rho: DensityOperator, a1, a2, b1, b2) -> float:
    """E(A1B1) - E(A1B2) + E(A2B1) + E(A2B2)."""
    e = product_expectation
    return e(rho, a1, b1) - e(rho, a1, b2) + e(rho, a2, b1) + e(rho, a2, b2)


@dataclass(frozen=True)
class ChshBoundCheck:
    W: float
    bound: float
    holds: bool


def chsh_derived_bound_check(rho: DensityOperator, x_a, x_b1, x_b2, sign: int) -> ChshBoundCheck:
    """Compare W with the Tsirelson-derived bound 2*sqrt(2) - |tr[rho X_b1 (x) X_b1]|."""
    w = w_functional(rho, x_a, x_b1, x_b2, sign)
    bound = TSIRELSON - abs(product_expectation(rho, x_b1, x_b1))
    return ChshBoundCheck(w, bound, w <= bound + 1e-9)
