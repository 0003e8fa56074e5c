"""Fixed-point solver, regime classification, queue, sensitivities."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aloha_aoi.fixed_point import (
    ConvergenceError,
    Regime,
    classify_regime,
    count_roots_grid,
    f_value,
    g_value,
    queue_steady_state,
    solve_fixed_point,
    solve_p_l_grid,
    steady_state_sensitivity,
)
from aloha_aoi.params import SystemParams, compute_c, derive_constants

# tri-root benchmark instance: q=1, lambda*c*R^2=20, noiseless, xi=0.015
# roots frozen from a 50-digit bisection oracle
TRI_ROOTS = (2.0611592019657e-9, 0.13926939548990, 0.61833717887641)
TRI_G_ROOTS = (8.4865111676e-4, 0.27326302401014)
TRI_XI_LOW = 1.0629994532536e-7
TRI_XI_HIGH = 0.019021156369950


def tri_params() -> SystemParams:
    c = compute_c(3.0, 0.2)
    return SystemParams(lam=20.0 / (c * 9.0), R=3.0, alpha=3.0, theta=0.2,
                        gamma=math.inf, q=1.0, xi=0.015)


def test_xi1_closed_form_chain():
    # lam=0.05, R=3, alpha=3, theta=0.2, gamma=20: p = exp(-(L + 0.27))
    p = SystemParams(lam=0.05, R=3.0, alpha=3.0, theta=0.2, gamma=20.0,
                     q=1.0, xi=1.0)
    sol = solve_fixed_point(p)
    assert derive_constants(p).lcr2 == pytest.approx(1.16925804176142, rel=1e-13)
    assert sol.p_L == pytest.approx(0.23710361441536, rel=1e-13)
    assert sol.regime is Regime.SINGLE_ROOT
    assert sol.p_A == sol.p_S == sol.p_L == sol.selected


def test_lambda_zero_closed_form():
    p = SystemParams(lam=0.0, R=3.0, alpha=3.0, theta=0.2, gamma=20.0,
                     q=0.7, xi=0.3)
    assert solve_fixed_point(p).p_L == pytest.approx(math.exp(-0.27), rel=1e-14)


def test_tri_root_instance():
    sol = solve_fixed_point(tri_params())
    assert sol.regime is Regime.TRI_ROOT
    assert len(sol.roots) == 3
    for got, want in zip(sol.roots, TRI_ROOTS):
        assert got == pytest.approx(want, rel=1e-9, abs=1e-15)
    for got, want in zip(sol.g_roots, TRI_G_ROOTS):
        assert got == pytest.approx(want, rel=1e-9)
    assert sol.p_A == sol.roots[0]
    assert sol.p_S == sol.roots[1]
    assert sol.p_L == sol.roots[2] == sol.selected
    assert all(r < 1e-10 for r in sol.residuals)


def test_classify_regime_window():
    cls = classify_regime(tri_params())
    assert cls.regime is Regime.TRI_ROOT
    assert cls.xi_low == pytest.approx(TRI_XI_LOW, rel=1e-9)
    assert cls.xi_high == pytest.approx(TRI_XI_HIGH, rel=1e-9)
    assert cls.xi_low < 0.015 < cls.xi_high
    # outside the window: single root again
    for xi in (1e-8, 0.05, 0.9):
        p = tri_params().replace(xi=xi)
        assert classify_regime(p).regime is Regime.SINGLE_ROOT
        assert solve_fixed_point(p).regime is Regime.SINGLE_ROOT


def test_classify_small_ql_has_no_window():
    p = SystemParams(lam=0.01, R=1.0, alpha=3.0, theta=0.2, gamma=20.0,
                     q=0.5, xi=0.5)
    cls = classify_regime(p)
    assert cls.regime is Regime.SINGLE_ROOT
    assert cls.xi_low is None and cls.xi_high is None


def test_f_g_raise_at_xi1():
    consts = derive_constants(
        SystemParams(lam=0.05, R=3.0, alpha=3.0, theta=0.2, gamma=20.0,
                     q=1.0, xi=1.0))
    with pytest.raises(ValueError):
        f_value(0.5, consts)
    with pytest.raises(ValueError):
        g_value(0.5, consts)


@settings(max_examples=60, deadline=None)
@given(
    lam=st.floats(1e-4, 0.1), r=st.floats(0.5, 3.0),
    alpha=st.floats(2.5, 5.0), theta=st.floats(0.05, 1.0),
    q=st.floats(0.05, 1.0), xi=st.floats(0.05, 0.99),
)
def test_roots_satisfy_fixed_point(lam, r, alpha, theta, q, xi):
    p = SystemParams(lam=lam, R=r, alpha=alpha, theta=theta, gamma=20.0,
                     q=q, xi=xi)
    sol = solve_fixed_point(p)
    consts = derive_constants(p)
    for root in sol.roots:
        assert abs(f_value(root, consts)) < 1e-10
    # root count parity with the closed-form classifier
    expected = 3 if classify_regime(p).regime is Regime.TRI_ROOT else 1
    assert len(sol.roots) == expected


def test_queue_steady_state():
    # frozen: rho at p_L of the tri-root instance
    sol = solve_fixed_point(tri_params())
    qs = queue_steady_state(tri_params(), sol.p_L)
    assert qs.rho == pytest.approx(0.024036068671046, rel=1e-9)
    assert qs.pi0 + qs.pi1 == pytest.approx(1.0, rel=1e-14)
    assert qs.r == pytest.approx(0.015 * qs.pi0, rel=1e-14)
    # saturated link: never empty
    p1 = tri_params().replace(xi=1.0)
    assert queue_steady_state(p1, 0.5).rho == pytest.approx(1.0)


def test_sensitivities_match_finite_differences():
    rng = np.random.default_rng(7)
    checked = 0
    while checked < 30:
        p = SystemParams(
            lam=float(rng.uniform(0.005, 0.08)), R=float(rng.uniform(0.5, 3.0)),
            alpha=float(rng.uniform(2.5, 4.5)), theta=float(rng.uniform(0.1, 1.0)),
            gamma=float(rng.uniform(5.0, 50.0)),
            q=float(rng.uniform(0.1, 1.0)), xi=float(rng.uniform(0.1, 0.95)),
        )
        sol = solve_fixed_point(p)
        if sol.regime is Regime.TRI_ROOT:
            continue
        sens = steady_state_sensitivity(p, sol.p_L)
        for field, name in (("d_lambda", "lam"), ("d_xi", "xi"), ("d_q", "q")):
            x = getattr(p, name)
            h = max(x, 1e-3) * 1e-6
            hi = solve_fixed_point(p.replace(**{name: x + h})).p_L
            lo = solve_fixed_point(p.replace(**{name: x - h})).p_L
            fd = (hi - lo) / (2.0 * h)
            assert getattr(sens, field) == pytest.approx(fd, rel=1e-3)
            assert getattr(sens, field) < 0.0
        checked += 1


def test_sensitivity_xi1_closed_form():
    p = SystemParams(lam=0.05, R=3.0, alpha=3.0, theta=0.2, gamma=20.0,
                     q=0.8, xi=1.0)
    pl = solve_fixed_point(p).p_L
    sens = steady_state_sensitivity(p, pl)
    h = 1e-8
    fd = (solve_fixed_point(p.replace(lam=0.05 + h)).p_L
          - solve_fixed_point(p.replace(lam=0.05 - h)).p_L) / (2 * h)
    assert sens.d_lambda == pytest.approx(fd, rel=1e-5)


def test_sensitivity_rejects_unstable_root():
    sol = solve_fixed_point(tri_params())
    with pytest.raises(ValueError):
        steady_state_sensitivity(tri_params(), sol.p_S)
    with pytest.raises(ConvergenceError):
        steady_state_sensitivity(tri_params(), sol.p_L, g_tol=1e6)


def test_grid_solver_matches_scalar():
    rng = np.random.default_rng(11)
    L = rng.uniform(0.05, 6.0, 200)
    q = rng.uniform(0.05, 1.0, 200)
    xi = rng.uniform(0.05, 1.0, 200)
    xi[:20] = 1.0
    K = rng.uniform(0.0, 0.5, 200)
    grid = solve_p_l_grid(L, q, xi, K)
    c = compute_c(3.0, 0.2)
    for i in range(200):
        p = SystemParams(lam=L[i] / c, R=1.0, alpha=3.0, theta=0.2,
                         gamma=(math.inf if K[i] == 0 else 0.2 / K[i]),
                         q=q[i], xi=xi[i])
        assert grid[i] == pytest.approx(solve_fixed_point(p).p_L,
                                        rel=1e-10, abs=1e-13)


def test_count_roots_grid_matches_scalar():
    rng = np.random.default_rng(13)
    L = rng.uniform(2.0, 40.0, 300)
    q = rng.uniform(0.2, 1.0, 300)
    xi = 10 ** rng.uniform(-6, 0, 300)
    K = np.zeros(300)
    counts = count_roots_grid(L, q, xi, K)
    c = compute_c(3.0, 0.2)
    for i in range(300):
        p = SystemParams(lam=L[i] / c, R=1.0, alpha=3.0, theta=0.2,
                         gamma=math.inf, q=q[i], xi=xi[i])
        assert counts[i] == len(solve_fixed_point(p).roots)
