"""Classical (local hidden variable) side of the 2x2-setting scenario.

Deterministic strategies assign one outcome per setting; stochastic models
are finite mixtures of local response distributions.  The Bell left-hand
side |E11 - E12| + sign*E22 is bounded by 1 once the responses for a2 and b1
are perfectly (anti)correlated, and reaches 3 without that constraint.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .correlations import JointDistribution, check_perfect
from .errors import BadParameter, EmptyOutcomeSet, PreconditionViolated

SETTINGS = ("a1", "a2", "b1", "b2")
DICHOTOMIC = (-1.0, 1.0)
TRICHOTOMIC = (-1.0, 0.0, 1.0)
_ZERO = 1e-12


@dataclass(frozen=True)
class DeterministicStrategy:
    f_a1: float
    f_a2: float
    f_b1: float
    f_b2: float

    def bell_lhs(self, sign: int) -> float:
        return abs(self.f_a1 * self.f_b1 - self.f_a1 * self.f_b2) + sign * self.f_a2 * self.f_b2

    def to_json(self, sign: int | None = None) -> dict:
        out = {"f_a1": self.f_a1, "f_a2": self.f_a2, "f_b1": self.f_b1, "f_b2": self.f_b2}
        if sign is not None:
            out["value"] = self.bell_lhs(sign)
        return out


def _outcome_sets(outcomes) -> list[tuple[float, ...]]:
    """Accept one outcome set shared by all settings, or a dict/sequence of four."""
    if isinstance(outcomes, dict):
        sets = [tuple(outcomes[s]) for s in SETTINGS]
    else:
        outcomes = list(outcomes)
        if outcomes and all(np.ndim(o) == 0 for o in outcomes):
            sets = [tuple(outcomes)] * 4
        else:
            sets = [tuple(o) for o in outcomes]
    if len(sets) != 4:
        raise BadParameter(f"need outcome sets for 4 settings, got {len(sets)}")
    for name, s in zip(SETTINGS, sets):
        if not s:
            raise EmptyOutcomeSet(f"setting {name} has no outcomes")
        if any(not -1.0 <= float(v) <= 1.0 for v in s):
            raise BadParameter(f"outcomes for {name} must lie in [-1, 1]: {s}")
    return [tuple(float(v) for v in s) for s in sets]


def enumerate_deterministic(outcomes) -> list[DeterministicStrategy]:
    sets = _outcome_sets(outcomes)
    return [DeterministicStrategy(*vals) for vals in itertools.product(*sets)]


def constrain_perfect(strategies, sign: int) -> list[DeterministicStrategy]:
    """Keep strategies with f_a2 == sign*f_b1 (and f_b1 != 0 for sign -1)."""
    kept = []
    for s in strategies:
        if s.f_a2 != sign * s.f_b1:
            continue
        if sign == -1 and abs(s.f_b1) <= _ZERO:
            continue
        kept.append(s)
    return kept


def max_bell_lhv(outcomes, sign: int, constrained: bool = True) -> tuple[float, DeterministicStrategy]:
    """Exact maximum over deterministic strategies; ties go to the lowest index."""
    strategies = enumerate_deterministic(outcomes)
    if constrained:
        strategies = constrain_perfect(strategies, sign)
    if not strategies:
        raise EmptyOutcomeSet("no strategy satisfies the perfect-correlation constraint")
    values = [s.bell_lhs(sign) for s in strategies]
    k = int(np.argmax(values))
    return float(values[k]), strategies[k]


@dataclass(frozen=True)
class ScenarioExpectations:
    E11: float
    E12: float
    E21: float
    E22: float

    def bell_lhs(self, sign: int) -> float:
        return abs(self.E11 - self.E12) + sign * self.E22


@dataclass
class StochasticLhvModel:
    """Finite hidden-variable model.

    ``weights[w]`` is nu(omega_w); ``responses[setting][w]`` is the outcome
    distribution of that setting at omega_w over ``outcomes[setting]``.
    """

    weights: np.ndarray
    outcomes: dict[str, np.ndarray]
    responses: dict[str, np.ndarray] = field(repr=False)

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        self.outcomes = {s: np.asarray(self.outcomes[s], dtype=float) for s in SETTINGS}
        self.responses = {s: np.atleast_2d(np.asarray(self.responses[s], dtype=float)) for s in SETTINGS}
        if np.any(self.weights < 0) or abs(self.weights.sum() - 1) > 1e-12:
            raise BadParameter("hidden-variable weights must be nonnegative and sum to 1")
        for s in SETTINGS:
            resp = self.responses[s]
            if resp.shape != (len(self.weights), len(self.outcomes[s])):
                raise BadParameter(f"responses for {s} have shape {resp.shape}")
            if np.any(resp < 0) or np.any(np.abs(resp.sum(axis=1) - 1) > 1e-12):
                raise BadParameter(f"responses for {s} must be probability vectors")

    @classmethod
    def from_deterministic(cls, strategy: DeterministicStrategy) -> "StochasticLhvModel":
        vals = strategy.to_json()
        outcomes = {s: np.array([vals["f_" + s]]) for s in SETTINGS}
        responses = {s: np.ones((1, 1)) for s in SETTINGS}
        return cls(np.ones(1), outcomes, responses)

    def f(self, setting: str) -> np.ndarray:
        """Local mean outcome f_setting(omega) for every hidden-variable point."""
        return self.responses[setting] @ self.outcomes[setting]

    def joint(self, sa: str, sb: str) -> JointDistribution:
        pa, pb = self.responses[sa], self.responses[sb]
        probs = np.einsum("w,wi,wk->ik", self.weights, pa, pb)
        return JointDistribution(self.outcomes[sa], self.outcomes[sb], probs)


def eval_stochastic(model: StochasticLhvModel) -> tuple[ScenarioExpectations, dict[tuple[str, str], JointDistribution]]:
    nu = model.weights
    fa1, fa2, fb1, fb2 = (model.f(s) for s in SETTINGS)
    exp = ScenarioExpectations(
        E11=float(nu @ (fa1 * fb1)),
        E12=float(nu @ (fa1 * fb2)),
        E21=float(nu @ (fa2 * fb1)),
        E22=float(nu @ (fa2 * fb2)),
    )
    joints = {(a, b): model.joint(a, b) for a in ("a1", "a2") for b in ("b1", "b2")}
    return exp, joints


@dataclass(frozen=True)
class ClassicalBoundReport:
    sign: int
    value: float
    value_from_joints: float
    bound: float
    passed: bool

    def to_json(self) -> dict:
        return {
            "sign": self.sign,
            "value": self.value,
            "value_from_joints": self.value_from_joints,
            "bound": self.bound,
            "pass": self.passed,
        }


def verify_classical_bound(model: StochasticLhvModel, sign: int, eps: float = 1e-9) -> ClassicalBoundReport:
    """Check |E11 - E12| + sign*E22 <= 1 for a model perfect under (a2, b1)."""
    exp, joints = eval_stochastic(model)
    if not check_perfect(joints[("a2", "b1")], sign, eps):
        raise PreconditionViolated(f"outcomes under (a2, b1) are not perfectly {'correlated' if sign > 0 else 'anticorrelated'}")
    value = exp.bell_lhs(sign)
    m = {k: jd.moment() for k, jd in joints.items()}
    from_joints = abs(m[("a1", "b1")] - m[("a1", "b2")]) + sign * m[("a2", "b2")]
    return ClassicalBoundReport(sign, value, from_joints, 1.0, value <= 1.0 + eps)


def random_constrained_model(rng: np.random.Generator, sign: int, n_points: int = 10, outcomes=TRICHOTOMIC) -> StochasticLhvModel:
    """Random finite model whose (a2, b1) responses are deterministic and (anti)equal.

    Responses for a1 and b2 are arbitrary distributions.
    """
    outs = np.asarray(outcomes, dtype=float)
    k = len(outs)
    weights = rng.dirichlet(np.ones(n_points))
    choices = outs if sign == 1 else outs[np.abs(outs) > _ZERO]
    b1_vals = rng.choice(choices, size=n_points)
    a2_vals = sign * b1_vals

    def onehot(vals):
        resp = np.zeros((n_points, k))
        for w, v in enumerate(vals):
            resp[w, int(np.argmin(np.abs(outs - v)))] = 1.0
        return resp

    responses = {
        "a1": rng.dirichlet(np.ones(k), size=n_points),
        "b2": rng.dirichlet(np.ones(k), size=n_points),
        "a2": onehot(a2_vals),
        "b1": onehot(b1_vals),
    }
    return StochasticLhvModel(weights, {s: outs for s in SETTINGS}, responses)
