"""Peak AoI evaluation and the three closed-form optimizers."""
import math

import numpy as np
import pytest

from aloha_aoi.aoi import (
    Branch,
    analytical_peak_aoi,
    grid_oracle,
    optimize_joint,
    optimize_q,
    optimize_xi,
    peak_aoi,
    solve_p_star,
)
from aloha_aoi.params import SystemParams, compute_c


def params_from_lk(L: float, K: float, q: float = 1.0, xi: float = 1.0) -> SystemParams:
    """Build a parameter set realizing given (lambda*c*R^2, K) exactly."""
    theta = 0.2
    c = compute_c(3.0, theta)
    gamma = math.inf if K == 0.0 else theta / K  # R=1, alpha=3
    return SystemParams(lam=L / c, R=1.0, alpha=3.0, theta=theta, gamma=gamma,
                        q=q, xi=xi)


def test_peak_aoi_formula():
    p = SystemParams(lam=0.05, R=3.0, alpha=3.0, theta=0.2, gamma=20.0,
                     q=0.5, xi=0.25)
    res = peak_aoi(p, 0.4)
    assert res.a_p == pytest.approx(1 / 0.25 + 2 / (0.5 * 0.4) - 1, rel=1e-14)
    assert res.a_p == pytest.approx(res.mean_service + res.mean_interdeparture,
                                    rel=1e-14)
    with pytest.raises(ValueError):
        peak_aoi(p, 0.0)


def test_analytical_peak_aoi_chain():
    # frozen: lam=0.05, R=3, alpha=3, theta=0.2, gamma=20, q=1, xi=1
    p = SystemParams(lam=0.05, R=3.0, alpha=3.0, theta=0.2, gamma=20.0,
                     q=1.0, xi=1.0)
    assert analytical_peak_aoi(p).a_p == pytest.approx(8.43513079685225,
                                                       rel=1e-12)


def test_p_star_frozen():
    # largest fixed-point root at q=1 for L=10, xi=0.5, K=0.27
    p = params_from_lk(10.0, 0.27, q=0.3, xi=0.5)
    assert solve_p_star(p) == pytest.approx(3.4669392592954e-5, rel=1e-9)


def test_optimize_q_interior_frozen():
    # L=10, xi=0.5, K=0.27: interior optimum, 50-digit oracle values
    p = params_from_lk(10.0, 0.27, q=0.9, xi=0.5)
    res = optimize_q(p)
    assert res.branch is Branch.INTERIOR
    assert res.q_opt == pytest.approx(0.10288946143178, rel=1e-10)
    assert res.a_p_opt == pytest.approx(70.2170512471104, rel=1e-10)
    assert res.p_at_opt == pytest.approx(0.28083162177838, rel=1e-8)
    assert res.xi_opt is None


def test_optimize_q_boundary():
    # small L: q*=1 and A_p from p_star
    p = params_from_lk(0.5, 0.0, q=0.4, xi=0.5)
    res = optimize_q(p)
    assert res.branch is Branch.BOUNDARY
    assert res.q_opt == 1.0
    expected = 1 / 0.5 + 2 / res.p_star - 1
    assert res.a_p_opt == pytest.approx(expected, rel=1e-12)


def test_optimize_xi_interior_frozen():
    # q=1, L=2, K=0
    p = params_from_lk(2.0, 0.0, q=1.0, xi=0.9)
    res = optimize_xi(p)
    assert res.branch is Branch.INTERIOR
    assert res.xi_opt == pytest.approx(0.21731932887270, rel=1e-10)
    assert res.a_p_opt == pytest.approx(7.76020463621502, rel=1e-10)
    assert res.p_at_opt == pytest.approx(0.48092170020263, rel=1e-9)


def test_optimize_xi_boundary_frozen():
    # q=1, L=0.3, K=0: xi*=1, A_p = 2*exp(0.3)
    p = params_from_lk(0.3, 0.0, q=1.0, xi=0.4)
    res = optimize_xi(p)
    assert res.branch is Branch.BOUNDARY
    assert res.xi_opt == 1.0
    assert res.a_p_opt == pytest.approx(2.69971761515201, rel=1e-12)


def test_optimize_joint_is_xi_at_q1():
    p = params_from_lk(2.0, 0.1, q=0.3, xi=0.5)
    joint = optimize_joint(p)
    inner = optimize_xi(p.replace(q=1.0))
    assert joint.q_opt == 1.0
    assert joint.xi_opt == inner.xi_opt
    assert joint.a_p_opt == inner.a_p_opt


def test_branch_continuity():
    # the two optimize_xi branch formulas agree at L = 1/(2q)
    for q in (0.3, 0.6, 1.0):
        for K in (0.0, 0.27):
            L = 1.0 / (2.0 * q)
            boundary = (2.0 / q) * math.exp(L * q + K)
            s = math.sqrt(1.0 + 4.0 / (q * L))
            e = math.exp(-2.0 / (s + 1.0) - K)
            interior = (q * L * (s + 1.0) + 2.0) / (2.0 * q * e)
            assert interior == pytest.approx(boundary, rel=1e-9)


def test_optimizers_match_grid_oracle():
    rng = np.random.default_rng(3)
    res_1d = 2000
    for _ in range(12):
        L = float(10 ** rng.uniform(-1, 1))
        K = float(rng.uniform(0.0, 0.5))
        xi = float(rng.uniform(0.1, 1.0))
        q = float(rng.uniform(0.1, 1.0))

        p = params_from_lk(L, K, q=q, xi=xi)
        for which, opt in (("q", optimize_q(p)), ("xi", optimize_xi(p))):
            oracle = grid_oracle(p, which, resolution=res_1d)
            arg = opt.q_opt if which == "q" else opt.xi_opt
            grid_arg = oracle.q_argmin if which == "q" else oracle.xi_argmin
            assert abs(arg - grid_arg) <= 1.0 / res_1d + 1e-12
            assert opt.a_p_opt <= oracle.a_p_min + 1e-9


def test_joint_matches_2d_oracle():
    p = params_from_lk(2.0, 0.1, q=0.4, xi=0.5)
    joint = optimize_joint(p)
    oracle = grid_oracle(p, "joint", resolution=150)
    assert oracle.q_argmin == 1.0
    assert abs(joint.xi_opt - oracle.xi_argmin) <= 1.0 / 150 + 1e-12
    assert joint.a_p_opt <= oracle.a_p_min + 1e-9


def test_grid_oracle_validation():
    p = params_from_lk(1.0, 0.0)
    with pytest.raises(ValueError):
        grid_oracle(p, "q", resolution=10)
    with pytest.raises(ValueError):
        grid_oracle(p, "bogus")
