import math

import numpy as np
import pytest

from conftest import random_params
from harqjam.closed_form import expected_jam_power, expected_success, phi
from harqjam.params import SystemParams, chunk_rng, g_bar
from harqjam.policy import (
    ConvergenceError,
    JammingPolicy,
    Mode,
    expected_jam_power_cc,
    jam_threshold_cc,
    mu_max,
    passive_policy,
    solve_p1,
    solve_p2,
    subproblem_qbar,
    subproblem_value,
)
import oracles

MU_MAX = 0.009917933293295192
# at mu = mu_max / 4, from golden-section on phi(q) - mu q and bisection on exp(5 g) phi(0) = v
V_QUARTER = 0.09915599398223994
TAU_QUARTER = 0.10783292812998652
QBAR_QUARTER = 50 / 3


def test_passive_policy():
    p = passive_policy()
    assert (p.mode, p.threshold, p.jam_power) == (Mode.PASSIVE, 0.0, 0.0)


def test_policy_invariants():
    with pytest.raises(ValueError):
        JammingPolicy(Mode.PASSIVE, 0.0, 1.0)
    with pytest.raises(ValueError):
        JammingPolicy(Mode.THRESHOLD_NC, -0.1, 1.0)
    assert JammingPolicy("threshold_cc", 0.1, 2.0).mode is Mode.THRESHOLD_CC


def test_power_at_strict_threshold():
    p = JammingPolicy(Mode.THRESHOLD_NC, 0.3, 7.0)
    assert p.power_at(0.2999) == 7.0
    assert p.power_at(0.3) == 0.0
    np.testing.assert_array_equal(p.power_at(np.array([0.0, 0.3, 1.0])), [7.0, 0.0, 0.0])


def test_solve_p1_reference(ref):
    p = solve_p1(ref, 100.0)
    assert p.mode is Mode.THRESHOLD_NC
    assert p.threshold == g_bar(ref)
    assert p.jam_power == pytest.approx(100 / (1 - math.exp(-1.5)), rel=1e-14)
    assert p.jam_power == pytest.approx(128.72169167888683, rel=1e-12)


def test_solve_p1_applied_power_mc(ref):
    p = solve_p1(ref, 100.0)
    g1 = chunk_rng(5, 0).exponential(1 / ref.lambda1, 10**6)
    applied = p.power_at(g1)
    se = applied.std() / math.sqrt(applied.size)
    assert abs(applied.mean() - 100.0) < 3 * se


def test_solve_p1_limits(ref):
    assert solve_p1(ref, 1e-12).jam_power < 1e-11
    assert solve_p1(ref.replace(lambda1=1e4), 5.0).jam_power == pytest.approx(5.0, rel=1e-9)
    with pytest.raises(ValueError):
        solve_p1(ref, 0.0)


def test_mu_max_reference(ref):
    assert mu_max(ref) == pytest.approx(3 / 50 * math.exp(-1.8), rel=1e-14)
    assert mu_max(ref) == pytest.approx(MU_MAX, rel=1e-12)


def test_qbar(ref):
    m = mu_max(ref)
    assert subproblem_qbar(ref, m) == 0.0
    assert subproblem_qbar(ref, 2 * m) == 0.0
    assert subproblem_qbar(ref, m / 4) == pytest.approx(QBAR_QUARTER, rel=1e-12)
    assert subproblem_qbar(ref, 1e-20) > 1e8


def test_qbar_maximises_subproblem(ref):
    mu = mu_max(ref) / 4
    q_best, v_best = oracles.golden_max(lambda q: phi(ref, q) - mu * q, 0.0, 1e6)
    assert subproblem_qbar(ref, mu) == pytest.approx(q_best, rel=1e-6)
    assert subproblem_value(ref, mu) == pytest.approx(v_best, rel=1e-12)


def test_subproblem_value(ref):
    m = mu_max(ref)
    assert subproblem_value(ref, m) == pytest.approx(phi(ref, 0.0), rel=1e-14)
    assert subproblem_value(ref, 3 * m) == pytest.approx(phi(ref, 0.0), rel=1e-14)
    assert subproblem_value(ref, m / 4) == pytest.approx(math.exp(-1.8) / 4 + phi(ref, 0.0), rel=1e-12)
    assert subproblem_value(ref, m / 4) == pytest.approx(V_QUARTER, rel=1e-12)


@pytest.mark.parametrize("frac", [1e-6, 1e-3, 0.1, 0.25, 0.5, 0.9, 0.999])
def test_subproblem_value_is_kkt_point(ref, frac):
    mu = frac * mu_max(ref)
    q = subproblem_qbar(ref, mu)
    assert subproblem_value(ref, mu) == pytest.approx(phi(ref, q) - mu * q, rel=1e-12, abs=1e-15)


def test_jam_threshold(ref):
    m = mu_max(ref)
    assert jam_threshold_cc(ref, m) == 0.0
    assert jam_threshold_cc(ref, 5 * m) == 0.0
    assert jam_threshold_cc(ref, m / 4) == pytest.approx(TAU_QUARTER, rel=1e-12)
    assert jam_threshold_cc(ref, m / 4) == pytest.approx(0.2 * math.log(1 + (math.exp(-1.8) / 4) / phi(ref, 0.0)), rel=1e-14)


def test_jam_threshold_clamps_at_g_bar():
    # a strong suspicious link rarely retransmits unjammed, so listening is nearly worthless
    p = SystemParams(lambda0=0.05)
    assert jam_threshold_cc(p, 1e-12) == g_bar(p)


def test_jam_threshold_small_mu_limit(ref):
    # without the clamp the limit is ln(a / (a - b)) / lambda1
    a, b = math.exp(-1.5), math.exp(-1.8)
    assert jam_threshold_cc(ref, 1e-18) == pytest.approx(math.log(a / (a - b)) / 5, rel=1e-6)


def test_expected_jam_power_cc(ref):
    m = mu_max(ref)
    assert expected_jam_power_cc(ref, m) == 0.0
    assert expected_jam_power_cc(ref, 1e-16) > 1e6
    expected = -math.expm1(-5 * TAU_QUARTER) * QBAR_QUARTER
    assert expected_jam_power_cc(ref, m / 4) == pytest.approx(expected, rel=1e-12)
    assert expected == pytest.approx(6.946079000663411, rel=1e-12)


def test_expected_jam_power_cc_mc(ref):
    mu = mu_max(ref) / 4
    tau, qbar = jam_threshold_cc(ref, mu), subproblem_qbar(ref, mu)
    g1 = chunk_rng(9, 0).exponential(0.2, 10**7)
    applied = np.where(g1 < tau, qbar, 0.0)
    se = applied.std() / math.sqrt(applied.size)
    assert abs(applied.mean() - expected_jam_power_cc(ref, mu)) < 3 * se


def test_solver_maps_monotone_in_mu(ref):
    mus = np.linspace(1e-7, mu_max(ref), 1000)
    tau = np.array([jam_threshold_cc(ref, m) for m in mus])
    qbar = np.array([subproblem_qbar(ref, m) for m in mus])
    power = np.array([expected_jam_power_cc(ref, m) for m in mus])
    assert np.all(np.diff(tau) <= 0)
    assert np.all(np.diff(qbar) <= 0)
    assert np.all(np.diff(power) < 0)


def test_solve_p2_inverts_forward_map(ref):
    m = mu_max(ref)
    q_ave = expected_jam_power_cc(ref, m / 4)
    sol = solve_p2(ref, q_ave)
    assert sol.mu_star == pytest.approx(m / 4, rel=1e-7)
    assert sol.policy.threshold == pytest.approx(TAU_QUARTER, rel=1e-7)
    assert sol.policy.jam_power == pytest.approx(QBAR_QUARTER, rel=1e-7)
    assert sol.policy.mode is Mode.THRESHOLD_CC
    assert 0 < sol.iterations <= 200


def test_solve_p2_near_quarter_mu_max(ref):
    sol = solve_p2(ref, 6.939)
    assert sol.mu_star == pytest.approx(mu_max(ref) / 4, rel=1e-3)


@pytest.mark.parametrize("q_ave", [1e-4, 0.1, 1.0, 10.0, 100.0, 1e3, 1e5])
def test_solve_p2_budget_tight(ref, q_ave):
    sol = solve_p2(ref, q_ave, tol=1e-8)
    assert abs(sol.avg_power - q_ave) <= 1e-8 * q_ave
    assert 0 < sol.mu_star <= mu_max(ref)
    assert sol.policy.threshold <= g_bar(ref)
    assert sol.objective == pytest.approx(expected_success(ref, sol.policy, True), rel=1e-15)


def test_solve_p2_small_budget_approaches_passive(ref):
    sol = solve_p2(ref, 1e-9)
    assert sol.mu_star == pytest.approx(mu_max(ref), rel=1e-2)
    assert sol.policy.threshold < 1e-2
    assert sol.objective == pytest.approx(expected_success(ref, passive_policy(), True), abs=1e-6)


def test_solve_p2_errors(ref):
    with pytest.raises(ValueError):
        solve_p2(ref, 0.0)
    with pytest.raises(ValueError):
        solve_p2(ref, 1.0, tol=0.0)
    with pytest.raises(ConvergenceError):
        solve_p2(ref, 1e300)
    with pytest.raises(ConvergenceError):
        solve_p2(ref, 10.0, tol=1e-15, max_iter=3)


@pytest.mark.parametrize("q_ave", [1.0, 10.0, 100.0])
def test_solve_p2_stationarity(ref, q_ave):
    sol = solve_p2(ref, q_ave)
    q = sol.policy.jam_power
    h = 1e-6 * max(1.0, q)
    fd = (phi(ref, q + h) - phi(ref, q - h)) / (2 * h)
    assert abs(fd - sol.mu_star) < 1e-6


@pytest.mark.parametrize("q_ave", [1.0, 10.0, 100.0])
def test_solve_p2_beats_threshold_grid(ref, q_ave):
    sol = solve_p2(ref, q_ave)
    gb = g_bar(ref)
    best = -1.0
    for tau in np.linspace(gb / 200, gb, 200):
        full = q_ave / -math.expm1(-ref.lambda1 * tau)
        for s in np.linspace(1 / 200, 1, 200):
            pol = JammingPolicy(Mode.THRESHOLD_CC, tau, s * full)
            best = max(best, expected_success(ref, pol, True))
    assert sol.objective >= best - 1e-9


def test_solve_p2_per_state_optimality(ref):
    # the policy maximises phat(g1, Q) - mu* Q state by state over a power grid
    from harqjam.closed_form import p_eav_combining

    sol = solve_p2(ref, 10.0)
    qs = np.concatenate([[0.0], np.logspace(-3, 4, 2000)])
    for g1 in np.linspace(0, 0.6, 61):
        ours = p_eav_combining(ref, g1, sol.policy.power_at(g1)) - sol.mu_star * sol.policy.power_at(g1)
        grid = max(p_eav_combining(ref, g1, q) - sol.mu_star * q for q in qs)
        assert ours >= grid - 1e-12


@pytest.mark.parametrize("q_ave", [0.5, 5.0, 50.0, 500.0])
def test_dominance_and_threshold_ordering(ref, q_ave):
    p1 = solve_p1(ref, q_ave)
    sol = solve_p2(ref, q_ave)
    assert sol.policy.threshold <= p1.threshold
    assert expected_success(ref, p1, False) >= expected_success(ref, passive_policy(), False)
    assert sol.objective >= expected_success(ref, passive_policy(), True)
    assert sol.objective >= expected_success(ref, p1, True)
    assert expected_jam_power(ref, p1) == pytest.approx(q_ave, rel=1e-14)


def test_threshold_nondecreasing_in_budget(ref):
    taus = [solve_p2(ref, q).policy.threshold for q in np.logspace(-2, 5, 60)]
    assert np.all(np.diff(taus) >= 0)
    assert taus[-1] <= g_bar(ref)


def test_random_parameter_battery():
    rng = np.random.default_rng(77)
    for _ in range(30):
        p = random_params(rng)
        q_ave = float(10 ** rng.uniform(-1, 3))
        sol = solve_p2(p, q_ave)
        assert abs(sol.avg_power - q_ave) <= 1e-8 * q_ave
        assert sol.policy.threshold <= g_bar(p)
        assert 0.0 <= sol.objective <= 1.0
        assert sol.objective >= expected_success(p, solve_p1(p, q_ave), True) - 1e-9


def test_solve_p2_extreme_path_loss():
    # mu_max ~ 1e-130: the geometric midpoint must not underflow
    p = SystemParams(p0=1.0, rate=4.0, sigma2=2.0, lambda0=0.01, lambda1=10.0, lambda2=0.3)
    assert mu_max(p) < 1e-120
    sol = solve_p2(p, 50.0)
    assert abs(sol.avg_power - 50.0) <= 1e-8 * 50.0
    assert 0.0 <= sol.objective <= 1.0


def test_solve_p2_unspendable_budget_raises():
    # jam region has probability ~1e-131; spending Q_ave = 50 would need mu ~ 1e-460
    p = SystemParams(p0=1.0, rate=4.0, sigma2=2.0, lambda0=10.0, lambda1=5.0, lambda2=0.3)
    with pytest.raises(ConvergenceError):
        solve_p2(p, 50.0)
