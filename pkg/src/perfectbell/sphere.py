"""Near-uniform point sets on the unit sphere."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

_GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))


@lru_cache(maxsize=16)
def _fibonacci(n: int) -> np.ndarray:
    k = np.arange(n, dtype=float)
    z = 1.0 - (2.0 * k + 1.0) / n
    rho = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    phi = k * _GOLDEN_ANGLE
    pts = np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    pts.setflags(write=False)
    return pts


def fibonacci_sphere(n: int) -> np.ndarray:
    """Return an (n, 3) read-only array of Fibonacci-lattice points on S^2."""
    if n < 1:
        raise ValueError(f"need at least one point, got {n}")
    return _fibonacci(int(n))


def random_unit_vectors(rng: np.random.Generator, n: int) -> np.ndarray:
    v = rng.normal(size=(n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)
