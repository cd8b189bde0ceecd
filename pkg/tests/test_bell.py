import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize_scalar

from perfectbell.bell import (
    CHSH_DERIVED_BOUND,
    QUANTUM_BOUND,
    TSIRELSON,
    chsh_derived_bound_check,
    chsh_value,
    eigenbasis_coordinates,
    eval_W,
    eval_W_trace,
    grid_search_max,
    maximize_over_c,
    maximize_W,
    optimal_a,
)
from perfectbell.correlations import CorrelationMatrix, classify_perfect_directions, correlation_matrix
from perfectbell.errors import BadParameter, NoFeasibleR, NoPerfectDirection, PreconditionViolated
from perfectbell.observables import pauli, sigma_r, spin_r
from perfectbell.states import (
    make_bell_state,
    maximally_mixed,
    random_perfect_two_qubit,
    random_perfect_two_qubit_with_direction,
    random_perfect_two_qutrit,
    random_perfect_two_qutrit_with_direction,
)

from conftest import random_unit

X, Y, Z = np.eye(3)
SINGLET_T = -np.eye(3)
MIX_T = np.diag([0.5, -0.5, 1.0])  # 0.75 phi_plus + 0.25 phi_minus


def _admissible_r(rng, cls):
    v = rng.normal(size=cls.case) @ cls.basis
    return v / np.linalg.norm(v)


class TestEvalW:
    def test_singlet_optimal_triple(self):
        r, c = Z, np.array([np.sqrt(3) / 2, 0, 0.5])
        a = c - r  # |c - r| = 1 at angle pi/3
        assert eval_W(SINGLET_T, a, r, c, -1) == pytest.approx(1.5, abs=1e-12)

    def test_phi_plus_triple(self):
        t = np.diag([1.0, -1.0, 1.0])
        r, c = Z, np.array([np.sqrt(3) / 2, 0, 0.5])
        a, _ = optimal_a(t, r, c)
        assert eval_W(t, a, r, c, 1) == pytest.approx(1.5, abs=1e-12)

    def test_collinear_directions(self):
        assert eval_W(SINGLET_T, X, Z, Z, -1) == pytest.approx(1.0)

    def test_trace_form_agrees(self, rng):
        for seed in range(20):
            sign = 1 - 2 * (seed % 2)
            for rho in (random_perfect_two_qubit(seed, sign), random_perfect_two_qutrit(seed, sign)):
                t = correlation_matrix(rho)
                for _ in range(5):
                    a, r, c = random_unit(rng, 3)
                    assert eval_W(t, a, r, c, sign) == pytest.approx(eval_W_trace(rho, a, r, c, sign), abs=1e-12)


class TestOptimalA:
    def test_beats_random_a(self, rng):
        for seed in range(10):
            t = correlation_matrix(random_perfect_two_qubit(seed, 1))
            r, c = random_unit(rng, 2)
            a, _ = optimal_a(t, r, c)
            best = eval_W(t, a, r, c, 1)
            others = [eval_W(t, b, r, c, 1) for b in random_unit(rng, 1000)]
            assert best >= max(others) - 1e-12

    def test_singlet_example(self):
        a, degenerate = optimal_a(SINGLET_T, Z, X)
        np.testing.assert_allclose(a, (X - Z) / np.sqrt(2))
        assert not degenerate

    def test_degenerate(self):
        a, degenerate = optimal_a(np.diag([0.0, 0.0, 1.0]), Z, Z)
        assert degenerate
        np.testing.assert_array_equal(a, X)


class TestMaximizeOverC:
    def test_singlet(self):
        c, value = maximize_over_c(SINGLET_T, Z, -1)
        assert value == pytest.approx(1.5, abs=1e-12)
        assert c @ Z == pytest.approx(0.5, abs=1e-12)

    def test_product_like(self):
        _, value = maximize_over_c(np.diag([0.0, 0.0, 1.0]), Z, 1)
        assert value == pytest.approx(1.0, abs=1e-9)

    def test_mixture(self):
        c, value = maximize_over_c(MIX_T, Z, 1)
        assert value == pytest.approx(7 / 6, abs=1e-9)
        assert c @ Z == pytest.approx(2 / 3, abs=1e-5)

    def test_mixture_against_closed_form(self):
        def g(gamma):
            return np.sqrt((1 - gamma) ** 2 + 0.25 * (1 - gamma**2)) + gamma

        res = minimize_scalar(lambda x: -g(x), bounds=(-1, 1), method="bounded", options={"xatol": 1e-12})
        assert -res.fun == pytest.approx(7 / 6, abs=1e-9)
        _, value = maximize_over_c(MIX_T, Z, 1)
        assert value == pytest.approx(-res.fun, abs=1e-9)

    def test_dense_scan_oracle(self, rng):
        # brute-force c over a random cloud never beats the 1-D reduction
        for seed in range(10):
            g = random_perfect_two_qubit_with_direction(seed, 1 - 2 * (seed % 2))
            t = correlation_matrix(g.state)
            _, value = maximize_over_c(t, g.direction, g.sign)
            cs = random_unit(rng, 4000)
            m = t.entries
            vals = np.linalg.norm((g.direction - cs) @ m, axis=1) + g.sign * (cs @ m @ g.direction)
            assert vals.max() <= value + 1e-9
            assert vals.max() >= value - 5e-2

    def test_precondition(self):
        with pytest.raises(PreconditionViolated):
            maximize_over_c(MIX_T, X, 1)


class TestMaximizeW:
    @pytest.mark.parametrize(
        "kind, sign, case",
        [
            ("psi_minus", -1, 3),
            ("phi_plus", 1, 2),
            ("phi_plus", -1, 1),
            ("phi_minus", 1, 2),
            ("psi_plus", -1, 1),
        ],
    )
    def test_bell_states(self, kind, sign, case):
        res = maximize_W(correlation_matrix(make_bell_state(kind)), sign)
        assert res.classification.case == case
        assert res.value == pytest.approx(1.5, abs=1e-9)
        assert res.perfect_residual <= 1e-12

    def test_mixture(self):
        assert maximize_W(MIX_T, 1).value == pytest.approx(7 / 6, abs=1e-9)

    def test_no_direction(self):
        with pytest.raises(NoPerfectDirection):
            maximize_W(correlation_matrix(maximally_mixed(2)), 1)

    def test_bad_sign(self):
        with pytest.raises(BadParameter):
            maximize_W(SINGLET_T, 0)

    def test_witness_is_consistent(self):
        res = maximize_W(MIX_T, 1)
        b = res.best
        assert eval_W(MIX_T, b.a, b.r, b.c, 1) == pytest.approx(res.value, abs=1e-12)
        coords = eigenbasis_coordinates(MIX_T, b.r, b.c)
        assert np.linalg.norm(coords.beta) == pytest.approx(1)

    def test_random_within_bounds(self):
        for seed in range(30):
            for sign in (1, -1):
                value = maximize_W(correlation_matrix(random_perfect_two_qubit(seed, sign)), sign).value
                assert 1.0 - 1e-9 <= value <= QUANTUM_BOUND + 1e-9


class TestGridSearch:
    @pytest.mark.parametrize("kind, sign", [("psi_minus", -1), ("phi_plus", 1), ("phi_plus", -1)])
    def test_bell_states(self, kind, sign):
        res = grid_search_max(correlation_matrix(make_bell_state(kind)), sign, 64)
        assert res.value == pytest.approx(1.5, abs=2e-3)
        assert res.value <= 1.5 + 1e-9

    def test_mixture(self):
        assert grid_search_max(MIX_T, 1, 64).value == pytest.approx(7 / 6, abs=2e-3)

    def test_agrees_with_analytic(self):
        for seed in range(10):
            for sign in (1, -1):
                t = correlation_matrix(random_perfect_two_qubit(seed, sign))
                assert grid_search_max(t, sign, 48).value == pytest.approx(maximize_W(t, sign).value, abs=5e-3)

    def test_refinement(self):
        vals = [grid_search_max(SINGLET_T, -1, n).value for n in (8, 16, 32, 64)]
        assert all(v <= 1.5 + 1e-9 for v in vals)
        assert 1.5 - vals[-1] <= 1.5 - vals[0] + 1e-12

    def test_no_feasible(self):
        with pytest.raises(NoFeasibleR):
            grid_search_max(np.diag([0.1, 0.2, 0.3]), 1, 16)

    def test_resolution_floor(self):
        with pytest.raises(BadParameter):
            grid_search_max(SINGLET_T, -1, 7)


class TestChsh:
    def test_tsirelson(self, singlet):
        b1, b2 = -(Z + X) / np.sqrt(2), (Z - X) / np.sqrt(2)
        v = chsh_value(singlet, sigma_r(Z), sigma_r(X), sigma_r(b1), sigma_r(b2))
        assert v == pytest.approx(TSIRELSON, abs=1e-12)

    def test_mixed_zero(self):
        s = pauli(3)
        assert chsh_value(maximally_mixed(2), s, s, s, s) == pytest.approx(0)

    def test_singlet_aligned(self, singlet):
        s = pauli(3)
        assert chsh_value(singlet, s, s, s, s) == pytest.approx(-2)

    def test_derived_bound_constant(self):
        assert CHSH_DERIVED_BOUND == pytest.approx(1.828427, abs=1e-6)

    def test_singlet_example(self, singlet):
        chk = chsh_derived_bound_check(singlet, sigma_r(X), sigma_r(Z), sigma_r(X), -1)
        assert chk.bound == pytest.approx(TSIRELSON - 1)
        assert chk.holds

    def test_random_perfect_states(self, rng):
        for seed in range(40):
            sign = 1 - 2 * (seed % 2)
            for rho in (random_perfect_two_qubit(seed, sign), random_perfect_two_qutrit(seed, sign)):
                cls = classify_perfect_directions(correlation_matrix(rho), sign)
                d = rho.local_dim
                for _ in range(10):
                    r = _admissible_r(rng, cls)
                    a, c = random_unit(rng, 2)
                    chk = chsh_derived_bound_check(rho, spin_r(a, d), spin_r(r, d), spin_r(c, d), sign)
                    assert chk.holds


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([1, -1]))
def test_analytic_never_exceeds_quantum_bound(seed, sign):
    g = random_perfect_two_qutrit_with_direction(seed, sign)
    t = correlation_matrix(g.state)
    assert maximize_W(t, sign).value <= QUANTUM_BOUND + 1e-9
