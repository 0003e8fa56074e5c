"""Success-probability fixed point: root finding, regime classification,
queue steady state, and steady-state parameter sensitivities.

The fixed point couples the per-attempt success probability p of a generic
link to the buffer occupancy of every other link:

    p = exp(-lcr2 * q*xi / (xi + p*q*(1 - xi)) - K)

For xi < 1 the non-zero roots coincide with the zeros of

    f(p) = -ln(p) - M/(N + p) - K,      M = lcr2*xi/(1-xi), N = xi/(q*(1-xi))

whose derivative changes sign exactly at the real roots of the quadratic

    g(p) = M*p - (N + p)^2.

f is therefore monotone between consecutive g-roots, so bisection per
monotonic segment finds every root robustly.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .params import DerivedConstants, SystemParams, derive_constants

#: roots smaller than this are clamped and flagged
_P_FLOOR = 1e-300


class ConvergenceError(RuntimeError):
    """Root finding failed to converge or lost its bracket."""


class Regime(enum.Enum):
    SINGLE_ROOT = "SingleRoot"
    TRI_ROOT = "TriRoot"

    def __str__(self) -> str:  # stable CSV token
        return self.value


def f_value(p: float, consts: DerivedConstants) -> float:
    """f(p) = -ln p - M/(N+p) - K; its sign brackets the fixed-point roots."""
    if p <= 0:
        raise ValueError(f"p must be > 0 (got {p})")
    if consts.M is None or consts.N is None:
        raise ValueError("f_value is undefined at xi=1; use the direct exponential form")
    return -math.log(p) - consts.M / (consts.N + p) - consts.K


def g_value(p: float, consts: DerivedConstants) -> float:
    """g(p) = M*p - (N+p)^2, the sign of f'(p) up to a positive factor."""
    if consts.M is None or consts.N is None:
        raise ValueError("g_value is undefined at xi=1")
    return consts.M * p - (consts.N + p) ** 2


@dataclass(frozen=True)
class FixedPointSolution:
    roots: tuple[float, ...]        # ascending non-zero roots, length 1 or 3
    regime: Regime
    p_A: float
    p_S: float
    p_L: float
    selected: float                 # steady state used downstream (p_L)
    g_roots: tuple[float, ...]      # real roots of g in (0, 1], 0..2 of them
    residuals: tuple[float, ...]    # |f(root)| (0.0 for the closed xi=1 form)
    clamped: bool = False           # smallest root hit the floating-point floor


def _bisect_decreasing(f, lo: float, hi: float, max_iter: int) -> float:
    # invariant: f(lo) > 0 >= f(hi) on a segment where f is monotone
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _bisect_increasing(f, lo: float, hi: float, max_iter: int) -> float:
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def solve_fixed_point(
    params: SystemParams, tol: float = 1e-12, max_iter: int = 200
) -> FixedPointSolution:
    """Find every non-zero root of the fixed-point equation in (0, 1].

    Tangency (double-root) configurations have no sign change across the
    touching segments and collapse to SingleRoot; the largest detected root
    is then reported as p_L.  The selected steady state defaults to p_L,
    the branch reached from an initially empty network; p_A is exposed for
    the bistable window but never auto-selected.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    consts = derive_constants(params)
    L, K, q, xi = consts.lcr2, consts.K, params.q, params.xi

    if xi == 1.0 or L == 0.0:
        # exponent is p-independent: p = exp(-L*q*1 - K) for xi=1, exp(-K) for L=0
        arg = -(L * q + K) if xi == 1.0 else -K
        p = math.exp(arg)
        clamped = p < _P_FLOOR
        p = max(p, _P_FLOOR)
        return FixedPointSolution(
            roots=(p,), regime=Regime.SINGLE_ROOT, p_A=p, p_S=p, p_L=p,
            selected=p, g_roots=(), residuals=(0.0,), clamped=clamped,
        )

    M, N = consts.M, consts.N

    def f(p: float) -> float:
        return -math.log(p) - M / (N + p) - K

    # real g-roots delimit the monotonic segments of f
    disc = 0.25 * M * M - M * N
    g_in_range: list[float] = []
    if disc > 0.0:
        sq = math.sqrt(disc)
        for r in (0.5 * M - N - sq, 0.5 * M - N + sq):
            if 0.0 < r < 1.0:
                g_in_range.append(r)

    # lower bound with guaranteed f(lo) > 0: -ln(lo) dominates M/N + K
    lo0 = max(math.exp(-min(M / N + K + 50.0, 700.0)), _P_FLOOR)
    clamped = f(lo0) <= 0.0  # true root lies below the representable floor

    breakpoints = [lo0, *g_in_range, 1.0]
    roots: list[float] = []
    decreasing = True  # f decreases on the first segment (from +inf)
    for a, b in zip(breakpoints[:-1], breakpoints[1:]):
        fa, fb = f(a), f(b)
        if decreasing and fa > 0.0 > fb:
            roots.append(_bisect_decreasing(f, a, b, max_iter))
        elif not decreasing and fa < 0.0 < fb:
            roots.append(_bisect_increasing(f, a, b, max_iter))
        decreasing = not decreasing  # every interior breakpoint is a g-root

    if clamped and not roots:
        roots = [lo0]
    if not roots:
        raise ConvergenceError("no sign change found for the fixed-point equation")
    if len(roots) == 2:
        # tangency collapsed on one side only; report the largest root
        roots = [max(roots)]

    roots.sort()
    residuals = tuple(abs(f(r)) for r in roots)
    if len(roots) == 3:
        regime = Regime.TRI_ROOT
        p_a, p_s, p_l = roots
    else:
        regime = Regime.SINGLE_ROOT
        p_a = p_s = p_l = roots[0]
    return FixedPointSolution(
        roots=tuple(roots), regime=regime, p_A=p_a, p_S=p_s, p_L=p_l,
        selected=p_l, g_roots=tuple(g_in_range), residuals=residuals,
        clamped=clamped,
    )


@dataclass(frozen=True)
class RegimeClassification:
    regime: Regime
    xi_low: float | None   # lower edge of the bistable arrival-rate window
    xi_high: float | None  # upper edge; both None when q*lcr2 <= 4


def _xi_window(L: float, q: float, K: float) -> tuple[float, float]:
    # defined only for q*L > 4
    s = math.sqrt(0.25 - 1.0 / (q * L))
    num_l = 0.5 * q * L - 1.0 - q * L * s
    den_l = math.exp(-K - 1.0 / (0.5 - s))
    num_h = 0.5 * q * L - 1.0 + q * L * s
    den_h = math.exp(-K - 1.0 / (0.5 + s))
    xi_l = q / (q + num_l / den_l)
    xi_h = q / (q + num_h / den_h)
    return xi_l, xi_h


def classify_regime(params: SystemParams) -> RegimeClassification:
    """Closed-form bistability test; must agree with the root count of
    solve_fixed_point on non-degenerate inputs."""
    consts = derive_constants(params)
    L, K, q, xi = consts.lcr2, consts.K, params.q, params.xi
    if q * L <= 4.0:
        return RegimeClassification(Regime.SINGLE_ROOT, None, None)
    xi_l, xi_h = _xi_window(L, q, K)
    if xi == 1.0:
        return RegimeClassification(Regime.SINGLE_ROOT, xi_l, xi_h)
    upper = ((1.0 - xi) * q + xi) ** 2 / (q * q * xi * (1.0 - xi))
    tri = (L < upper) and (xi_l < xi < xi_h)
    return RegimeClassification(
        Regime.TRI_ROOT if tri else Regime.SINGLE_ROOT, xi_l, xi_h
    )


@dataclass(frozen=True)
class QueueSteadyState:
    pi0: float   # stationary probability of an empty buffer
    pi1: float
    r: float     # effective packet arrival rate xi*pi0
    rho: float   # offered load


def queue_steady_state(params: SystemParams, p: float) -> QueueSteadyState:
    """Stationary distribution of the per-link single-buffer queue at
    service rate q*p."""
    if not (0.0 < p <= 1.0):
        raise ValueError(f"p must be in (0, 1] (got {p})")
    q, xi = params.q, params.xi
    denom = xi + q * p - xi * q * p
    pi0 = q * p / denom
    rho = xi / denom
    return QueueSteadyState(pi0=pi0, pi1=1.0 - pi0, r=xi * pi0, rho=rho)


@dataclass(frozen=True)
class SteadyStateSensitivity:
    d_lambda: float
    d_xi: float
    d_q: float
    g_at_p: float  # g(p) < 0 at a steady state


def steady_state_sensitivity(
    params: SystemParams, p: float, g_tol: float = 1e-9
) -> SteadyStateSensitivity:
    """Implicit derivatives of a steady-state root with respect to lambda,
    xi, and q.  All three are negative at a steady state, where g(p) < 0.

    Raises ConvergenceError when |g(p)| falls below g_tol (the derivative is
    singular at a tangency), and ValueError when g(p) > 0 (p is the unstable
    middle root, not a steady state).
    """
    if not (0.0 < p <= 1.0):
        raise ValueError(f"p must be in (0, 1] (got {p})")
    consts = derive_constants(params)
    L, K, q, xi = consts.lcr2, consts.K, params.q, params.xi
    c_r2 = consts.c * params.R ** 2

    if xi == 1.0:
        # exponent is p-independent; differentiate p = exp(-L*q - K) directly
        return SteadyStateSensitivity(
            d_lambda=-c_r2 * q * p, d_xi=-L * p * p * q * q, d_q=-L * p,
            g_at_p=-math.inf,
        )

    g = g_value(p, consts)
    if abs(g) <= g_tol:
        raise ConvergenceError(f"g(p)={g:g} is within tolerance of a tangency; derivative singular")
    if g > 0.0:
        raise ValueError(f"g(p)={g:g} > 0: p is not a steady-state root")

    denom = g * (1.0 - xi) ** 2
    d_xi = L * p * p / denom
    d_q = L * (xi / q) ** 2 * p / denom
    d_lam = c_r2 * (xi / q) * p * (xi + p * q * (1.0 - xi)) / denom
    return SteadyStateSensitivity(d_lambda=d_lam, d_xi=d_xi, d_q=d_q, g_at_p=g)


# ---------------------------------------------------------------------------
# vectorized helpers over parameter lattices (used by grid oracles and sweeps)
# ---------------------------------------------------------------------------

def solve_p_l_grid(lcr2, q, xi, K, iters: int = 90) -> np.ndarray:
    """Largest fixed-point root p_L, elementwise over broadcast arrays.

    Same bisection-per-monotonic-segment construction as solve_fixed_point,
    restricted to the segment containing p_L.
    """
    L, q, xi, K = np.broadcast_arrays(
        *(np.asarray(a, dtype=float) for a in (lcr2, q, xi, K))
    )
    shape = L.shape
    L, q, xi, K = (a.ravel().copy() for a in (L, q, xi, K))

    closed = (xi >= 1.0) | (L == 0.0)
    out = np.empty(L.shape)
    out[closed] = np.exp(-(np.where(xi[closed] >= 1.0, L[closed] * q[closed], 0.0) + K[closed]))

    open_ = ~closed
    if np.any(open_):
        Lo, qo, xo, Ko = L[open_], q[open_], xi[open_], K[open_]
        M = Lo * xo / (1.0 - xo)
        N = xo / (qo * (1.0 - xo))
        disc = 0.25 * M * M - M * N
        sq = np.sqrt(np.maximum(disc, 0.0))
        r1 = 0.5 * M - N - sq
        r2 = 0.5 * M - N + sq
        have = disc > 0.0

        lo = np.maximum(np.exp(-np.minimum(M / N + Ko + 50.0, 700.0)), _P_FLOOR)
        hi = np.ones_like(Lo)

        in_r2 = have & (r2 > 0.0) & (r2 < 1.0)
        safe_r2 = np.where(in_r2, r2, 0.5)
        f_r2 = -np.log(safe_r2) - M / (N + safe_r2) - Ko
        case_hi = in_r2 & (f_r2 > 0.0)       # p_L in (r2, 1]
        lo = np.where(case_hi, r2, lo)
        in_r1 = have & (r1 > 0.0) & (r1 < 1.0) & ~case_hi
        hi = np.where(in_r1, r1, hi)          # p_L in (0, r1]

        for _ in range(iters):
            mid = 0.5 * (lo + hi)
            fm = -np.log(mid) - M / (N + mid) - Ko
            pos = fm > 0.0
            lo = np.where(pos, mid, lo)
            hi = np.where(pos, hi, mid)
        out[open_] = 0.5 * (lo + hi)
    return out.reshape(shape)


def count_roots_grid(lcr2, q, xi, K) -> np.ndarray:
    """Number of non-zero fixed-point roots (1 or 3), elementwise, from the
    sign pattern of f at the g-roots."""
    L, q, xi, K = np.broadcast_arrays(
        *(np.asarray(a, dtype=float) for a in (lcr2, q, xi, K))
    )
    count = np.ones(L.shape, dtype=int)
    open_ = (xi < 1.0) & (L > 0.0)
    Lo, qo, xo, Ko = L[open_], q[open_], xi[open_], K[open_]
    M = Lo * xo / (1.0 - xo)
    N = xo / (qo * (1.0 - xo))
    disc = 0.25 * M * M - M * N
    sq = np.sqrt(np.maximum(disc, 0.0))
    r1 = 0.5 * M - N - sq
    r2 = 0.5 * M - N + sq
    ok = (disc > 0.0) & (r1 > 0.0) & (r2 < 1.0)
    s1 = np.where(ok, r1, 0.5)
    s2 = np.where(ok, r2, 0.5)
    f1 = -np.log(s1) - M / (N + s1) - Ko
    f2 = -np.log(s2) - M / (N + s2) - Ko
    tri = ok & (f1 < 0.0) & (f2 > 0.0)
    sub = np.ones(Lo.shape, dtype=int)
    sub[tri] = 3
    count[open_] = sub
    return count
