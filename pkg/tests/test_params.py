"""Parameter validation and derived constants."""
import math

import pytest

from aloha_aoi.params import SystemParams, compute_c, derive_constants


# frozen against a 50-digit evaluation of pi*theta^(2/alpha)/sinc(2/alpha)
C_ORACLE = {
    (4.0, 1.0): 4.93480220054468,   # equals pi^2/2 exactly
    (3.0, 0.2): 2.59835120391427,
    (3.0, 0.5): 4.78620383987517,
    (3.0, 0.8): 6.54743475366254,
}


def test_compute_c_oracle_values():
    for (alpha, theta), expected in C_ORACLE.items():
        assert compute_c(alpha, theta) == pytest.approx(expected, rel=1e-14)


def test_compute_c_alpha4_theta1_is_pi_sq_over_2():
    assert compute_c(4.0, 1.0) == pytest.approx(math.pi**2 / 2.0, rel=1e-15)


def test_compute_c_zero_theta():
    assert compute_c(3.0, 0.0) == 0.0


def test_compute_c_rejects_bad_domain():
    with pytest.raises(ValueError):
        compute_c(2.0, 0.5)
    with pytest.raises(ValueError):
        compute_c(3.0, -0.1)


@pytest.mark.parametrize("bad", [
    dict(lam=-1.0), dict(R=0.0), dict(alpha=2.0), dict(theta=-0.5),
    dict(gamma=0.0), dict(gamma=math.nan), dict(q=0.0), dict(q=1.5),
    dict(xi=0.0), dict(xi=1.01),
])
def test_systemparams_validation(bad):
    base = dict(lam=0.05, R=3.0, alpha=3.0, theta=0.2, gamma=20.0, q=1.0, xi=1.0)
    with pytest.raises(ValueError):
        SystemParams(**{**base, **bad})


def test_noiseless_flag_and_k():
    p = SystemParams(lam=0.05, R=3.0, alpha=3.0, theta=0.2, gamma=math.inf,
                     q=1.0, xi=1.0)
    assert p.noiseless
    assert derive_constants(p).K == 0.0
    p2 = p.replace(gamma=20.0)
    assert not p2.noiseless
    # K = theta * R^alpha / gamma = 0.2*27/20
    assert derive_constants(p2).K == pytest.approx(0.27, rel=1e-15)


def test_derived_constants_m_n():
    p = SystemParams(lam=0.05, R=3.0, alpha=3.0, theta=0.2, gamma=20.0,
                     q=0.5, xi=0.4)
    c = derive_constants(p)
    assert c.lcr2 == pytest.approx(p.lam * c.c * p.R**2, rel=1e-15)
    assert c.M == pytest.approx(c.lcr2 * 0.4 / 0.6, rel=1e-15)
    assert c.N == pytest.approx(0.4 / (0.5 * 0.6), rel=1e-15)
    c1 = derive_constants(p.replace(xi=1.0))
    assert c1.M is None and c1.N is None


def test_replace_returns_new_frozen_instance():
    p = SystemParams(lam=0.05, R=3.0, alpha=3.0, theta=0.2, gamma=20.0,
                     q=1.0, xi=1.0)
    p2 = p.replace(q=0.5)
    assert p.q == 1.0 and p2.q == 0.5
    with pytest.raises(Exception):
        p.q = 0.7
