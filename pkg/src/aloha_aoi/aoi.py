"""Peak age of information and its closed-form optimizers.

The peak AoI of a link with success probability p is

    A_p = 1/xi + 2/(q*p) - 1

and is minimized in closed form over q (given xi), over xi (given q), or
jointly.  Each optimizer re-verifies its output by re-evaluating A_p through
the full fixed-point solve at the returned argument; brute-force lattice
oracles are provided for independent validation.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .fixed_point import solve_fixed_point, solve_p_l_grid
from .params import SystemParams, derive_constants


class VerificationError(RuntimeError):
    """Closed-form optimum disagrees with the re-solved peak AoI."""


class Branch(enum.Enum):
    INTERIOR = "Interior"
    BOUNDARY = "Boundary"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class PeakAoiResult:
    a_p: float
    p_used: float
    mean_service: float         # E[T] = 1/(q*p)
    mean_interdeparture: float  # E[Y] = 1/xi - 1 + 1/(q*p)


def peak_aoi(params: SystemParams, p: float) -> PeakAoiResult:
    """Peak AoI in slots for a given steady-state success probability."""
    if not (0.0 < p <= 1.0):
        raise ValueError(f"p must be in (0, 1] (got {p})")
    service = 1.0 / (params.q * p)
    inter = 1.0 / params.xi - 1.0 + service
    return PeakAoiResult(
        a_p=service + inter, p_used=p, mean_service=service,
        mean_interdeparture=inter,
    )


def analytical_peak_aoi(params: SystemParams) -> PeakAoiResult:
    """Convenience chain: solve the fixed point, then evaluate the peak AoI
    at the selected steady state (p_L)."""
    return peak_aoi(params, solve_fixed_point(params).selected)


def solve_p_star(params: SystemParams) -> float:
    """Auxiliary success probability: the largest non-zero root of the
    fixed point with the access probability forced to one."""
    return solve_fixed_point(params.replace(q=1.0)).p_L


@dataclass(frozen=True)
class OptimizationResult:
    q_opt: float | None
    xi_opt: float | None
    a_p_opt: float
    branch: Branch
    p_at_opt: float             # success probability re-solved at the optimum
    p_star: float | None = None  # auxiliary root, set when tuning q
    fallback: bool = False       # interior formula left (0,1]; boundary used


_VERIFY_RTOL = 1e-6


def _verify(params: SystemParams, a_p_closed: float) -> float:
    p = solve_fixed_point(params).selected
    a_p = peak_aoi(params, p).a_p
    if not math.isclose(a_p, a_p_closed, rel_tol=_VERIFY_RTOL):
        raise VerificationError(
            f"closed-form optimum {a_p_closed:.12g} != re-solved {a_p:.12g} "
            f"at q={params.q:g}, xi={params.xi:g}"
        )
    return p


def optimize_q(params: SystemParams) -> OptimizationResult:
    """Minimize the peak AoI over the access probability q, xi given."""
    consts = derive_constants(params)
    L, K, xi = consts.lcr2, consts.K, params.xi
    p_star = solve_p_star(params)

    fallback = False
    if L > 1.0 + p_star * (1.0 - xi) / xi:
        denom = L - math.exp(-K - 1.0) * (1.0 - xi) / xi
        q_opt = 1.0 / denom if denom > 0 else math.inf
        if 0.0 < q_opt <= 1.0:
            a_p = 2.0 * L * math.exp(K + 1.0) - 1.0 / xi + 1.0
            p_at = _verify(params.replace(q=q_opt), a_p)
            return OptimizationResult(
                q_opt=q_opt, xi_opt=None, a_p_opt=a_p, branch=Branch.INTERIOR,
                p_at_opt=p_at, p_star=p_star,
            )
        fallback = True  # floating-point edge: argument left (0,1]

    a_p = 1.0 / xi + 2.0 / p_star - 1.0
    p_at = _verify(params.replace(q=1.0), a_p)
    return OptimizationResult(
        q_opt=1.0, xi_opt=None, a_p_opt=a_p, branch=Branch.BOUNDARY,
        p_at_opt=p_at, p_star=p_star, fallback=fallback,
    )


def optimize_xi(params: SystemParams) -> OptimizationResult:
    """Minimize the peak AoI over the arrival rate xi, q given."""
    consts = derive_constants(params)
    L, K, q = consts.lcr2, consts.K, params.q

    fallback = False
    if L > 1.0 / (2.0 * q):
        s = math.sqrt(1.0 + 4.0 / (q * L))
        e = math.exp(-2.0 / (s + 1.0) - K)
        xi_opt = 2.0 * q * e / (q * L * (s + 1.0) + 2.0 * q * e - 2.0)
        if 0.0 < xi_opt <= 1.0:
            a_p = (q * L * (s + 1.0) + 2.0) / (2.0 * q * e)
            p_at = _verify(params.replace(xi=xi_opt), a_p)
            return OptimizationResult(
                q_opt=None, xi_opt=xi_opt, a_p_opt=a_p, branch=Branch.INTERIOR,
                p_at_opt=p_at,
            )
        fallback = True

    a_p = (2.0 / q) * math.exp(L * q + K)
    p_at = _verify(params.replace(xi=1.0), a_p)
    return OptimizationResult(
        q_opt=None, xi_opt=1.0, a_p_opt=a_p, branch=Branch.BOUNDARY,
        p_at_opt=p_at, fallback=fallback,
    )


def optimize_joint(params: SystemParams) -> OptimizationResult:
    """Minimize the peak AoI over q and xi jointly; the optimal q is one."""
    inner = optimize_xi(params.replace(q=1.0))
    return OptimizationResult(
        q_opt=1.0, xi_opt=inner.xi_opt, a_p_opt=inner.a_p_opt,
        branch=inner.branch, p_at_opt=inner.p_at_opt, fallback=inner.fallback,
    )


@dataclass(frozen=True)
class GridOracleResult:
    q_argmin: float | None
    xi_argmin: float | None
    a_p_min: float
    resolution: int


def _axis(resolution: int) -> np.ndarray:
    # lattice over (0, 1]: {1/n, 2/n, ..., 1}
    return np.arange(1, resolution + 1, dtype=float) / resolution


def grid_oracle(
    params: SystemParams, which: str, resolution: int = 10_000
) -> GridOracleResult:
    """Brute-force lattice minimization of A_p through the full fixed-point
    solve; validation oracle for the closed-form optimizers."""
    if resolution < 100:
        raise ValueError("resolution must be at least 100 points per axis")
    consts = derive_constants(params)
    L, K = consts.lcr2, consts.K

    if which == "q":
        qs = _axis(resolution)
        xis = np.full_like(qs, params.xi)
    elif which == "xi":
        xis = _axis(resolution)
        qs = np.full_like(xis, params.q)
    elif which == "joint":
        qg, xg = np.meshgrid(_axis(resolution), _axis(resolution), indexing="ij")
        qs, xis = qg.ravel(), xg.ravel()
    else:
        raise ValueError(f"unknown oracle axis {which!r}")

    p = solve_p_l_grid(L, qs, xis, K)
    a_p = 1.0 / xis + 2.0 / (qs * p) - 1.0
    i = int(np.argmin(a_p))
    return GridOracleResult(
        q_argmin=float(qs[i]) if which in ("q", "joint") else None,
        xi_argmin=float(xis[i]) if which in ("xi", "joint") else None,
        a_p_min=float(a_p[i]),
        resolution=resolution,
    )
