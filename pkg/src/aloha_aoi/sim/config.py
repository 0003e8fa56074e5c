"""Simulation configuration and aggregated statistics."""
from __future__ import annotations

from dataclasses import dataclass, field

from ..params import SystemParams


@dataclass(frozen=True)
class SimConfig:
    params: SystemParams
    area_side: float = 50.0
    slots: int = 10_000
    realizations: int = 10
    seed: int = 0
    warmup_fraction: float = 0.1
    interference_cutoff: float | None = None  # radius; None = no cutoff
    boundary: str = "window"                  # "window" or "torus"
    far_field_compensation: bool = True       # account for out-of-window interference
    workers: int = 1

    def __post_init__(self) -> None:
        if self.slots < 1:
            raise ValueError("slots must be >= 1")
        if self.realizations < 1:
            raise ValueError("realizations must be >= 1")
        if not (0.0 <= self.warmup_fraction < 0.5):
            raise ValueError("warmup_fraction must be in [0, 0.5)")
        if self.area_side <= 2 * self.params.R:
            raise ValueError("area_side must exceed 2*R")
        if self.boundary not in ("window", "torus"):
            raise ValueError(f"boundary must be 'window' or 'torus' (got {self.boundary!r})")
        if self.interference_cutoff is not None and self.interference_cutoff <= 0:
            raise ValueError("interference_cutoff must be positive or None")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass(frozen=True)
class RealizationResult:
    """Raw per-realization tallies (post-warmup unless noted)."""

    peak_sum: int        # sum of AoI peak values at typical-link deliveries
    peak_count: int      # number of typical-link deliveries
    attempts: int        # slots in which the typical link transmitted
    successes: int       # successful typical-link transmissions
    drops: int           # typical-link arrivals discarded on a full buffer
    empty_slots: int     # slots with an empty typical buffer at slot start
    measured_slots: int  # slots after warmup

    @property
    def peak_mean(self) -> float | None:
        return self.peak_sum / self.peak_count if self.peak_count else None

    @property
    def success_rate(self) -> float | None:
        return self.successes / self.attempts if self.attempts else None


@dataclass(frozen=True)
class SimStats:
    peak_aoi_mean: float        # mean over realizations with >= 1 delivery
    peak_aoi_ci95: float        # 95% CI half-width (Student t); nan if < 2
    success_count: int
    success_rate: float         # mean of per-realization per-attempt rates
    success_rate_ci95: float
    drops: int
    empty_fraction: float       # empirical P(empty buffer at slot start)
    realizations_used: int
    realizations_excluded: int  # zero-delivery realizations, flagged
    backend: str
    per_realization_peak: tuple[float, ...] = field(default=())
    per_realization_rate: tuple[float, ...] = field(default=())
