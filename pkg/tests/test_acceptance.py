"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the summary lines.
"""

import time

import numpy as np

from perfectbell.bell import (
    CHSH_DERIVED_BOUND,
    TSIRELSON,
    chsh_derived_bound_check,
    grid_search_max,
    maximize_W,
)
from perfectbell.correlations import (
    JointDistribution,
    check_perfect,
    classify_perfect_directions,
    correlation_matrix,
    joint_distribution,
    pearson,
    product_expectation,
)
from perfectbell.linalg import tensor_product
from perfectbell.lhv import DICHOTOMIC, TRICHOTOMIC, max_bell_lhv
from perfectbell.observables import sigma_r, spin1, spin1_r, spin_r
from perfectbell.sphere import random_unit_vectors
from perfectbell.states import (
    make_bell_state,
    make_werner,
    random_perfect_two_qubit,
    random_perfect_two_qutrit,
)

BELL_T = {
    "phi_plus": np.diag([1.0, -1.0, 1.0]),
    "phi_minus": np.diag([-1.0, 1.0, 1.0]),
    "psi_plus": np.diag([1.0, 1.0, -1.0]),
    "psi_minus": np.diag([-1.0, -1.0, -1.0]),
}


def report(number: int, title: str, ok: bool, detail: str) -> None:
    print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} -- {detail}")
    assert ok, detail


def test_01_singlet_maximum():
    t = correlation_matrix(make_bell_state("psi_minus"))
    start = time.perf_counter()
    analytic = maximize_W(t, -1).value
    grid = grid_search_max(t, -1, 64).value
    elapsed = time.perf_counter() - start
    ok = abs(analytic - 1.5) <= 1e-9 and abs(grid - analytic) <= 5e-3 and elapsed < 1.0
    report(1, "singlet maximum", ok, f"analytic={analytic:.12f} grid={grid:.6f} time={elapsed:.3f}s")


def test_02_bell_states_reach_three_halves():
    expected = {
        ("phi_plus", 1): "plane XZ",
        ("phi_minus", 1): "plane YZ",
        ("psi_plus", 1): "plane XY",
        ("psi_minus", -1): "all directions",
    }
    worst, bad = 0.0, []
    for (kind, sign), where in expected.items():
        res = maximize_W(correlation_matrix(make_bell_state(kind)), sign)
        worst = max(worst, abs(res.value - 1.5))
        if res.classification.describe() != where or abs(res.value - 1.5) > 1e-9:
            bad.append(kind)
    report(2, "all four Bell states reach 3/2", not bad, f"max |W-1.5|={worst:.2e} failures={bad}")


def test_03_qubit_property_suite():
    start = time.perf_counter()
    max_analytic, max_excess, n = -np.inf, -np.inf, 0
    for seed in range(500):
        for sign in (1, -1):
            t = correlation_matrix(random_perfect_two_qubit(seed, sign))
            analytic = maximize_W(t, sign).value
            grid = grid_search_max(t, sign, 64).value
            max_analytic = max(max_analytic, analytic)
            max_excess = max(max_excess, grid - analytic)
            n += 1
    elapsed = time.perf_counter() - start
    ok = n == 1000 and max_analytic <= 1.5 + 1e-9 and max_excess <= 5e-3 and elapsed < 60
    report(
        3,
        "two-qubit upper bound",
        ok,
        f"n={n} max W={max_analytic:.9f} max(grid-analytic)={max_excess:.2e} time={elapsed:.1f}s",
    )


def test_04_qutrit_property_suite():
    max_grid, n = -np.inf, 0
    for seed in range(250):
        for sign in (1, -1):
            t = correlation_matrix(random_perfect_two_qutrit(seed, sign))
            max_grid = max(max_grid, grid_search_max(t, sign, 64).value)
            n += 1
    ok = n == 500 and max_grid <= 1.5 + 5e-3
    report(4, "two-qutrit upper bound", ok, f"n={n} max grid W={max_grid:.9f}")


def test_05_classical_bound():
    c_plus = max_bell_lhv(DICHOTOMIC, 1)[0]
    c_minus = max_bell_lhv(DICHOTOMIC, -1)[0]
    u_plus = max_bell_lhv(DICHOTOMIC, 1, constrained=False)[0]
    u_minus = max_bell_lhv(DICHOTOMIC, -1, constrained=False)[0]
    tri = max(max_bell_lhv(TRICHOTOMIC, s)[0] for s in (1, -1))
    ratio = 1.5 / c_minus
    ok = c_plus == 1.0 and c_minus == 1.0 and u_plus == 3.0 and u_minus == 3.0 and tri <= 1.0 and ratio == 1.5
    report(
        5,
        "classical bound",
        ok,
        f"constrained=({c_plus}, {c_minus}) unconstrained=({u_plus}, {u_minus}) trichotomic={tri} ratio={ratio}",
    )


def test_06_chsh_derived_bound():
    rng = np.random.default_rng(6)
    worst_gap, violations, bounds = np.inf, 0, set()
    n = 10_000
    for i in range(n):
        sign = 1 if i % 2 == 0 else -1
        gen = random_perfect_two_qubit if i % 4 < 2 else random_perfect_two_qutrit
        rho = gen(i, sign)
        d = rho.local_dim
        cls = classify_perfect_directions(correlation_matrix(rho), sign)
        # r is drawn from the admissible perfect-correlation set
        r = rng.normal(size=cls.case) @ cls.basis
        r /= np.linalg.norm(r)
        a, c = random_unit_vectors(rng, 2)
        chk = chsh_derived_bound_check(rho, spin_r(a, d), spin_r(r, d), spin_r(c, d), sign)
        worst_gap = min(worst_gap, chk.bound - chk.W)
        violations += not chk.holds
        bounds.add(round(float(chk.bound), 6))
    ok = violations == 0 and bounds == {1.828427} and abs(CHSH_DERIVED_BOUND - (TSIRELSON - 1)) < 1e-15
    report(6, "CHSH-derived bound", ok, f"n={n} violations={violations} min slack={worst_gap:.4f} bounds={sorted(bounds)}")


def test_07_bell_correlation_matrices():
    err = max(np.max(np.abs(correlation_matrix(make_bell_state(k)).entries - t)) for k, t in BELL_T.items())
    report(7, "Bell-state correlation matrices", err <= 1e-10, f"max entry error={err:.2e}")


def test_08_spin1_spectrum():
    rng = np.random.default_rng(8)
    err = 0.0
    for r in random_unit_vectors(rng, 1000):
        vals = np.sort(np.linalg.eigvalsh(spin1_r(r)))
        err = max(err, np.max(np.abs(vals - [-1.0, 0.0, 1.0])))
    report(8, "spin-1 spectrum {1, 0, -1}", err <= 1e-9, f"n=1000 max error={err:.2e}")


def _corpus(rng):
    states = [make_bell_state(k) for k in BELL_T]
    states += [make_werner(d=d, phi=phi) for d in (2, 3) for phi in (-1.0, -0.4, 0.0, 0.6, 1.0)]
    states += [random_perfect_two_qubit(s, 1 - 2 * (s % 2)) for s in range(20)]
    states += [random_perfect_two_qutrit(s, 1 - 2 * (s % 2)) for s in range(20)]
    for rho in states:
        d = rho.local_dim
        axes = list(np.eye(3)) + list(random_unit_vectors(rng, 4))
        for a in axes:
            for b in axes[::2]:
                yield rho, spin_r(a, d), spin_r(b, d)


def test_09_consistency_oracle():
    rng = np.random.default_rng(9)
    moment_err, pairs = 0.0, 0
    for rho, xa, xb in _corpus(rng):
        moment_err = max(moment_err, abs(product_expectation(rho, xa, xb) - joint_distribution(rho, xa, xb).moment()))
        pairs += 1
    pearson_err = 0.0
    for _ in range(500):
        p = rng.uniform(0.01, 0.99)
        pearson_err = max(pearson_err, abs(pearson(JointDistribution.from_dict({(1, 1): p, (-1, -1): 1 - p})) - 1))
        pearson_err = max(pearson_err, abs(pearson(JointDistribution.from_dict({(1, -1): p, (-1, 1): 1 - p})) + 1))
    for kind, t in BELL_T.items():
        rho = make_bell_state(kind)
        for axis in range(3):
            e = np.eye(3)[axis]
            jd = joint_distribution(rho, sigma_r(e), sigma_r(e))
            pearson_err = max(pearson_err, abs(pearson(jd) - t[axis, axis]))
    ok = moment_err <= 1e-9 and pearson_err <= 1e-9
    report(9, "moment and Pearson consistency", ok, f"pairs={pairs} moment error={moment_err:.2e} Pearson error={pearson_err:.2e}")


def test_10_werner_negative_check():
    w = make_werner(d=3, phi=1.0)
    s3 = spin1(3)
    # tr[(A (x) A) P_+] / rank P_+ with tr[(A (x) A) P_+] = ((tr A)^2 + tr A^2) / 2
    oracle = float(((np.trace(s3) ** 2 + np.trace(s3 @ s3)) / 2).real) / 6
    value = w.expectation(tensor_product(s3, s3))
    perfect = check_perfect(joint_distribution(w, s3, s3), 1)
    ok = abs(value - 1 / 6) <= 1e-10 and abs(oracle - 1 / 6) <= 1e-15 and not perfect
    report(10, "Werner state has no perfect correlation", ok, f"tr[W S3 S3]={value:.12f} oracle={oracle:.12f} perfect={perfect}")

