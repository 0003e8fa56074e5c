"""Monte Carlo driver: seeding, realization dispatch, aggregation.

Realization i runs on the stream SeedSequence(seed).spawn(realizations)[i],
so results are bit-identical for a given (config, seed) regardless of the
worker count, and identical across the compiled and pure-python engines.
"""
from __future__ import annotations

import functools
import math
import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np
from scipy import integrate as _integrate
from scipy import stats as _stats

from ..params import SystemParams
from . import engine_py
from .config import RealizationResult, SimConfig, SimStats

try:
    from . import _engine_cy
except ImportError:  # extension not built; numpy engine only
    _engine_cy = None

DEFAULT_BACKEND = (
    "python"
    if _engine_cy is None or os.environ.get("ALOHA_AOI_FORCE_PYTHON")
    else "cython"
)


def available_backends() -> tuple[str, ...]:
    return ("cython", "python") if _engine_cy is not None else ("python",)


@functools.lru_cache(maxsize=None)
def far_field_integral(side: float, alpha: float) -> float:
    """Integral of |x - center|^(-alpha) over the plane outside the window.

    Multiplied by the node density and the fraction of transmitting nodes,
    this is the expected interference the finite window cannot produce; the
    engines add it to the noise term so the empirical success probability
    matches the infinite-network model instead of the truncated one.
    """
    half = side / 2.0

    def integrand(phi: float) -> float:
        r_edge = half / math.cos(phi)
        return r_edge ** (2.0 - alpha) / (alpha - 2.0)

    val, _ = _integrate.quad(integrand, 0.0, math.pi / 4.0)
    return 8.0 * val


def _run_one(config: SimConfig, index: int, backend: str) -> RealizationResult:
    child = np.random.SeedSequence(config.seed).spawn(config.realizations)[index]
    rng = np.random.Generator(np.random.PCG64(child))
    p = config.params
    n = int(rng.poisson(p.lam * config.area_side**2))
    warmup = int(config.warmup_fraction * config.slots)
    inv_gamma = 0.0 if p.noiseless else 1.0 / p.gamma
    torus = config.boundary == "torus"
    ffi = (
        p.lam * far_field_integral(config.area_side, p.alpha)
        if config.far_field_compensation
        else 0.0
    )
    if backend == "cython":
        cutoff2 = (
            config.interference_cutoff**2
            if config.interference_cutoff is not None
            else math.inf
        )
        raw = _engine_cy.run_realization(
            rng.bit_generator, n, config.area_side, p.R, p.alpha, p.theta,
            inv_gamma, p.q, p.xi, config.slots, warmup, cutoff2, torus, ffi,
        )
    else:
        raw = engine_py.run_realization(
            rng, n, config.area_side, p.R, p.alpha, p.theta, inv_gamma,
            p.q, p.xi, config.slots, warmup, config.interference_cutoff, torus,
            ffi,
        )
    return RealizationResult(*raw)


def _mean_ci(values: list[float]) -> tuple[float, float]:
    m = len(values)
    if m == 0:
        return math.nan, math.nan
    mean = sum(values) / m
    if m < 2:
        return mean, math.nan
    var = sum((v - mean) ** 2 for v in values) / (m - 1)
    half = float(_stats.t.ppf(0.975, m - 1)) * math.sqrt(var / m)
    return mean, half


def run_simulation(config: SimConfig, backend: str | None = None) -> SimStats:
    """Run all realizations and aggregate peak-AoI statistics.

    Realizations with zero typical-link deliveries are excluded from the
    peak-AoI mean and reported in realizations_excluded.
    """
    backend = backend or DEFAULT_BACKEND
    if backend not in available_backends():
        raise ValueError(
            f"backend {backend!r} unavailable (built: {available_backends()})"
        )

    indices = range(config.realizations)
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = list(
                pool.map(_run_one, [config] * config.realizations, indices,
                         [backend] * config.realizations)
            )
    else:
        results = [_run_one(config, i, backend) for i in indices]

    peaks = [r.peak_mean for r in results if r.peak_count > 0]
    rates = [r.success_rate for r in results if r.attempts > 0]
    peak_mean, peak_ci = _mean_ci(peaks)
    rate_mean, rate_ci = _mean_ci(rates)
    return SimStats(
        peak_aoi_mean=peak_mean,
        peak_aoi_ci95=peak_ci,
        success_count=sum(r.successes for r in results),
        success_rate=rate_mean,
        success_rate_ci95=rate_ci,
        drops=sum(r.drops for r in results),
        empty_fraction=(
            sum(r.empty_slots for r in results)
            / max(sum(r.measured_slots for r in results), 1)
        ),
        realizations_used=len(peaks),
        realizations_excluded=config.realizations - len(peaks),
        backend=backend,
        per_realization_peak=tuple(peaks),
        per_realization_rate=tuple(rates),
    )
