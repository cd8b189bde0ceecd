"""Bipartite density operators: Bell states, Werner states, mixtures and
random families with perfect correlations along a known direction."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import BadParameter, UnsupportedDimension
from .linalg import as_matrix, hermiticity_residual, tensor_product
from .observables import (
    PAULI,
    direction,
    qubit_rotation,
    spin1,
    spin1_rotation,
)

STATE_TOL = 1e-9

BELL_KINDS = ("phi_plus", "phi_minus", "psi_plus", "psi_minus")


def swap_operator(d: int) -> np.ndarray:
    """SWAP|i>|j> = |j>|i> on C^d (x) C^d."""
    s = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            s[j * d + i, i * d + j] = 1.0
    return s


@dataclass(frozen=True)
class DensityOperator:
    local_dim: int
    matrix: np.ndarray = field(repr=False)
    label: str = ""

    def __post_init__(self):
        m = as_matrix(self.matrix)
        if m.shape != (self.local_dim**2, self.local_dim**2):
            raise UnsupportedDimension(
                f"matrix shape {m.shape} does not match local_dim {self.local_dim}"
            )
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.local_dim**2

    @property
    def swap_residual(self) -> float:
        s = swap_operator(self.local_dim)
        return float(np.max(np.abs(s @ self.matrix @ s - self.matrix)))

    @property
    def symmetric(self) -> bool:
        return self.swap_residual <= STATE_TOL

    def expectation(self, op) -> float:
        return float(np.trace(self.matrix @ as_matrix(op)).real)

    def conjugate(self, u_local) -> "DensityOperator":
        """Return (U (x) U) rho (U (x) U)^dagger."""
        uu = tensor_product(u_local, u_local)
        return DensityOperator(self.local_dim, uu @ self.matrix @ uu.conj().T, self.label)

    def to_json(self) -> dict:
        return {
            "local_dim": self.local_dim,
            "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in self.matrix],
        }


@dataclass
class CheckResult:
    name: str
    passed: bool
    residual: float


@dataclass
class ValidationReport:
    checks: list[CheckResult]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_json(self) -> dict:
        return {c.name: {"passed": c.passed, "residual": c.residual} for c in self.checks}


def validate_state(rho: DensityOperator, tol: float = STATE_TOL) -> ValidationReport:
    m = rho.matrix
    herm = hermiticity_residual(m)
    trace_res = abs(np.trace(m) - 1.0)
    min_eig = float(np.min(np.linalg.eigvalsh(0.5 * (m + m.conj().T))))
    swap_res = rho.swap_residual
    return ValidationReport(
        [
            CheckResult("hermitian", herm <= tol, herm),
            CheckResult("trace", trace_res <= tol, float(trace_res)),
            CheckResult("positive", min_eig >= -tol, max(0.0, -min_eig)),
            CheckResult("swap_symmetric", swap_res <= tol, swap_res),
        ]
    )


def _ket(d: int, *pairs: tuple[int, int, complex]) -> np.ndarray:
    v = np.zeros(d * d, dtype=complex)
    for i, j, amp in pairs:
        v[i * d + j] += amp
    return v / np.linalg.norm(v)


def pure(vec, d: int, label: str = "") -> DensityOperator:
    v = np.asarray(vec, dtype=complex)
    v = v / np.linalg.norm(v)
    return DensityOperator(d, np.outer(v, v.conj()), label)


def bell_vector(kind: str) -> np.ndarray:
    if kind == "phi_plus":
        return _ket(2, (0, 0, 1), (1, 1, 1))
    if kind == "phi_minus":
        return _ket(2, (0, 0, 1), (1, 1, -1))
    if kind == "psi_plus":
        return _ket(2, (0, 1, 1), (1, 0, 1))
    if kind == "psi_minus":
        return _ket(2, (0, 1, 1), (1, 0, -1))
    raise BadParameter(f"unknown Bell state {kind!r}; expected one of {BELL_KINDS}")


def make_bell_state(kind: str) -> DensityOperator:
    return pure(bell_vector(kind), 2, kind)


def maximally_mixed(d: int) -> DensityOperator:
    return DensityOperator(d, np.eye(d * d) / (d * d), f"mixed_d{d}")


def mixture(weights, states) -> DensityOperator:
    weights = np.asarray(weights, dtype=float)
    if np.any(weights < 0) or abs(weights.sum() - 1.0) > STATE_TOL:
        raise BadParameter(f"mixture weights must be nonnegative and sum to 1, got {weights}")
    dims = {s.local_dim for s in states}
    if len(dims) != 1:
        raise UnsupportedDimension(f"cannot mix states with local dims {sorted(dims)}")
    m = sum(w * s.matrix for w, s in zip(weights, states))
    return DensityOperator(dims.pop(), m, "mixture")


@dataclass(frozen=True)
class SymmetricProjectors:
    d: int
    plus: np.ndarray
    minus: np.ndarray

    @property
    def rank_plus(self) -> int:
        return self.d * (self.d + 1) // 2

    @property
    def rank_minus(self) -> int:
        return self.d * (self.d - 1) // 2


def symmetric_projectors(d: int) -> SymmetricProjectors:
    if d < 2:
        raise BadParameter(f"d must be >= 2, got {d}")
    s = swap_operator(d)
    eye = np.eye(d * d)
    return SymmetricProjectors(d, (eye + s) / 2, (eye - s) / 2)


@dataclass(frozen=True)
class WernerParams:
    d: int
    phi: float

    def __post_init__(self):
        if self.d < 2:
            raise BadParameter(f"Werner d must be >= 2, got {self.d}")
        if not -1.0 <= self.phi <= 1.0:
            raise BadParameter(f"Werner phi must lie in [-1, 1], got {self.phi}")


def make_werner(params: WernerParams | None = None, *, d: int | None = None, phi: float | None = None) -> DensityOperator:
    if params is None:
        params = WernerParams(d, phi)
    proj = symmetric_projectors(params.d)
    w_plus = (1 + params.phi) / 2
    w_minus = (1 - params.phi) / 2
    m = w_plus * proj.plus / proj.rank_plus + w_minus * proj.minus / proj.rank_minus
    return DensityOperator(params.d, m, f"werner_d{params.d}_phi{params.phi:g}")


# -- random families ---------------------------------------------------------


def _random_axis_angle(rng: np.random.Generator) -> tuple[np.ndarray, float]:
    z = rng.uniform(-1.0, 1.0)
    az = rng.uniform(0.0, 2 * np.pi)
    s = np.sqrt(max(0.0, 1 - z * z))
    axis = np.array([s * np.cos(az), s * np.sin(az), z])
    return direction(axis), float(rng.uniform(0.0, np.pi))


def _random_density(k: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(k, k)) + 1j * rng.normal(size=(k, k))
    m = g @ g.conj().T
    return m / np.trace(m).real


def _check_sign(sign: int) -> int:
    if sign not in (1, -1):
        raise BadParameter(f"sign must be +1 or -1, got {sign!r}")
    return sign


@dataclass(frozen=True)
class GeneratedState:
    """A random state together with the direction known to be perfect for it."""

    state: DensityOperator
    sign: int
    direction: np.ndarray
    unitary: np.ndarray = field(repr=False)


def random_perfect_two_qubit_with_direction(seed: int, sign: int) -> GeneratedState:
    """Random symmetric two-qubit state with tr[rho sigma_r(x)sigma_r] = sign.

    For sign +1 the unrotated state is an arbitrary density operator on
    span{e1e1, e2e2}, where sigma_3 (x) sigma_3 = +1; this includes every
    mixture of phi_+ and phi_-.  For sign -1 it is p*psi_+ + (1-p)*psi_-.
    The result is conjugated by U (x) U for a random rotation U.
    """
    sign = _check_sign(sign)
    rng = np.random.default_rng(seed)
    if sign == 1:
        block = _random_density(2, rng)
        basis = np.zeros((4, 2), dtype=complex)
        basis[0, 0] = 1.0  # e1e1
        basis[3, 1] = 1.0  # e2e2
        base = DensityOperator(2, basis @ block @ basis.conj().T)
    else:
        p = rng.uniform()
        base = mixture([p, 1 - p], [make_bell_state("psi_plus"), make_bell_state("psi_minus")])
    axis, angle = _random_axis_angle(rng)
    u = qubit_rotation(axis, angle)
    rho = base.conjugate(u)
    # U sigma_3 U^dagger = sigma_r  =>  r_i = tr[U sigma_3 U^dagger sigma_i] / 2
    rotated = u @ np.diag([1.0, -1.0]) @ u.conj().T
    r = np.array([0.5 * np.trace(rotated @ p).real for p in PAULI])
    state = DensityOperator(2, rho.matrix, f"random_qubit_s{seed}_{'+' if sign > 0 else '-'}")
    return GeneratedState(state, sign, direction(r), u)


def random_perfect_two_qubit(seed: int, sign: int) -> DensityOperator:
    return random_perfect_two_qubit_with_direction(seed, sign).state


def random_perfect_two_qutrit_with_direction(seed: int, sign: int) -> GeneratedState:
    """Random symmetric two-qutrit state with tr[rho S_r(x)S_r] = sign.

    For sign +1 the unrotated state is an arbitrary density operator on
    span{e1e1, e3e3}; for sign -1 it mixes the projectors onto
    (e1e3 + e3e1)/sqrt2 and (e1e3 - e3e1)/sqrt2, both in the -1 eigenspace
    of S_3 (x) S_3.  Conjugation by U (x) U with U = exp(-i theta n.S)
    follows.
    """
    sign = _check_sign(sign)
    rng = np.random.default_rng(seed)
    if sign == 1:
        block = _random_density(2, rng)
        basis = np.zeros((9, 2), dtype=complex)
        basis[0, 0] = 1.0  # e1e1
        basis[8, 1] = 1.0  # e3e3
        base = DensityOperator(3, basis @ block @ basis.conj().T)
    else:
        p = rng.uniform()
        sym = pure(_ket(3, (0, 2, 1), (2, 0, 1)), 3)
        anti = pure(_ket(3, (0, 2, 1), (2, 0, -1)), 3)
        base = mixture([p, 1 - p], [sym, anti])
    axis, angle = _random_axis_angle(rng)
    u = spin1_rotation(axis, angle)
    rho = base.conjugate(u)
    rotated = u @ spin1(3) @ u.conj().T
    # tr[S_i S_j] = 2 delta_ij for spin 1
    r = np.array([0.5 * np.trace(rotated @ spin1(k)).real for k in (1, 2, 3)])
    state = DensityOperator(3, rho.matrix, f"random_qutrit_s{seed}_{'+' if sign > 0 else '-'}")
    return GeneratedState(state, sign, direction(r), u)


def random_perfect_two_qutrit(seed: int, sign: int) -> DensityOperator:
    return random_perfect_two_qutrit_with_direction(seed, sign).state


# -- JSON state format -------------------------------------------------------


def state_from_json(obj: dict) -> DensityOperator:
    """Build a state from the shared JSON format.

    Accepts an explicit matrix ``{"local_dim": d, "matrix": [[[re, im], ...], ...]}``
    or a constructor spec: ``{"kind": "bell", "which": ...}``,
    ``{"kind": "werner", "d": ..., "phi": ...}``, ``{"kind": "mixed", "d": ...}``,
    ``{"kind": "mixture", "components": [{"weight": w, "state": {...}}, ...]}``.
    """
    if not isinstance(obj, dict):
        raise BadParameter("state JSON must be an object")
    kind = obj.get("kind")
    try:
        if kind is None:
            d = int(obj["local_dim"])
            rows = obj["matrix"]
            m = np.array([[complex(e[0], e[1]) if isinstance(e, (list, tuple)) else complex(e) for e in row] for row in rows])
            return DensityOperator(d, m)
        if kind == "bell":
            return make_bell_state(obj["which"])
        if kind == "werner":
            return make_werner(WernerParams(int(obj["d"]), float(obj["phi"])))
        if kind == "mixed":
            return maximally_mixed(int(obj.get("d", 2)))
        if kind == "mixture":
            comps = obj["components"]
            return mixture([float(c["weight"]) for c in comps], [state_from_json(c["state"]) for c in comps])
    except (KeyError, TypeError, IndexError) as exc:
        raise BadParameter(f"malformed state JSON: {exc!r}") from exc
    raise BadParameter(f"unknown state kind {kind!r}")


def load_state(path) -> DensityOperator:
    with open(Path(path)) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise BadParameter(f"{path}: invalid JSON ({exc})") from exc
    rho = state_from_json(obj)
    return rho


def _kv(text: str) -> dict[str, str]:
    out = {}
    for part in filter(None, text.split(",")):
        if "=" not in part:
            raise BadParameter(f"expected key=value, got {part!r}")
        k, v = part.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def builtin_state(spec: str) -> DensityOperator:
    """Resolve ``NAME[:key=value,...]`` to a state.

    Names: the four Bell states, ``werner`` (d, phi), ``mixed`` (d),
    ``bell-mixture`` (p: weight of phi_plus against phi_minus),
    ``random-qubit`` / ``random-qutrit`` (seed, sign).
    """
    name, _, args = spec.partition(":")
    kw = _kv(args)
    try:
        if name in BELL_KINDS:
            return make_bell_state(name)
        if name == "werner":
            return make_werner(WernerParams(int(kw.get("d", 2)), float(kw.get("phi", 0.0))))
        if name == "mixed":
            return maximally_mixed(int(kw.get("d", 2)))
        if name == "bell-mixture":
            p = float(kw.get("p", 0.5))
            return mixture([p, 1 - p], [make_bell_state("phi_plus"), make_bell_state("phi_minus")])
        if name == "random-qubit":
            return random_perfect_two_qubit(int(kw.get("seed", 0)), int(kw.get("sign", 1)))
        if name == "random-qutrit":
            return random_perfect_two_qutrit(int(kw.get("seed", 0)), int(kw.get("sign", 1)))
    except ValueError as exc:
        if isinstance(exc, BadParameter):
            raise
        raise BadParameter(f"bad builtin parameters in {spec!r}: {exc}") from exc
    raise BadParameter(f"unknown builtin state {name!r}")
