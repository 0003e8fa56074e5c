"""Readable single-slot reference model of the network.

The fast engines (engine_py / _engine_cy) implement the same slot dynamics
in a monolithic loop; this module exposes the per-slot snapshot and a
step function for inspection and statistical tests.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ..params import SystemParams


def sample_ppp(density: float, area_side: float, rng: np.random.Generator) -> np.ndarray:
    """Draw interferer transmitter positions: Poisson count with mean
    density*area_side^2, positions i.i.d. uniform over the window."""
    if density < 0:
        raise ValueError("density must be >= 0")
    n = rng.poisson(density * area_side * area_side)
    return rng.random((n, 2)) * area_side


def place_typical(area_side: float, r_link: float, rng: np.random.Generator):
    """Typical receiver at the window center, its transmitter at distance R
    in a uniformly random direction."""
    center = area_side / 2.0
    phi = rng.random() * 2.0 * math.pi
    rx = np.array([center, center])
    tx = rx + r_link * np.array([math.cos(phi), math.sin(phi)])
    return tx, rx


@dataclass(frozen=True)
class SlotState:
    """Network snapshot entering a slot (index 0 of flag arrays = typical)."""

    slot: int
    tx_positions: np.ndarray        # (n, 2) interferer transmitters
    rx_positions: np.ndarray        # (n, 2) their receivers
    typical_tx: np.ndarray
    typical_rx: np.ndarray
    queue_flags: np.ndarray         # (n+1,) bool, buffer occupancy
    access_flags: np.ndarray        # (n+1,) bool, transmit decision last slot
    fading: np.ndarray | None       # (m, m) gains drawn last slot, or None
    typical_aoi: int
    typical_gen_slot: int | None    # generation slot of the buffered packet


@dataclass(frozen=True)
class SlotEvent:
    delivered: bool
    peak: int | None    # AoI value just before the reset, when delivered
    dropped: bool       # a typical-link arrival met a full buffer


def initial_state(
    params: SystemParams, area_side: float, rng: np.random.Generator
) -> SlotState:
    positions = sample_ppp(params.lam, area_side, rng)
    angles = rng.random(len(positions)) * 2.0 * math.pi
    rx = positions + params.R * np.stack([np.cos(angles), np.sin(angles)], axis=1)
    tx0, rx0 = place_typical(area_side, params.R, rng)
    n = len(positions)
    return SlotState(
        slot=0, tx_positions=positions, rx_positions=rx,
        typical_tx=tx0, typical_rx=rx0,
        queue_flags=np.zeros(n + 1, dtype=bool),
        access_flags=np.zeros(n + 1, dtype=bool),
        fading=None, typical_aoi=1, typical_gen_slot=None,
    )


def step_slot(
    state: SlotState,
    params: SystemParams,
    rng: np.random.Generator,
    area_side: float,
    mobility: bool = True,
    cutoff: float | None = None,
    boundary: str = "window",
) -> tuple[SlotState, SlotEvent]:
    """Advance the network one slot: arrivals, access, channel, decoding,
    bookkeeping, in that order.

    With mobility (the default) every interferer pair is re-drawn from the
    PPP window each slot, realizing i.i.d. interference across time; the
    typical pair never moves.
    """
    n = len(state.tx_positions)
    t = state.slot
    queue = state.queue_flags.copy()

    # (a) arrivals: unit-size buffer, arrivals to a full buffer are dropped
    arrivals = rng.random(n + 1) < params.xi
    dropped = bool(arrivals[0] and queue[0])
    gen_slot = state.typical_gen_slot
    if arrivals[0] and not queue[0]:
        gen_slot = t
    queue |= arrivals

    # (b) access
    active = queue & (rng.random(n + 1) < params.q)

    # (c) channel: high-mobility re-draw plus fresh unit-mean fading
    if mobility:
        tx_i = rng.random((n, 2)) * area_side
        angles = rng.random(n) * 2.0 * math.pi
        rx_i = tx_i + params.R * np.stack([np.cos(angles), np.sin(angles)], axis=1)
    else:
        tx_i, rx_i = state.tx_positions, state.rx_positions

    tx = np.vstack([state.typical_tx[None, :], tx_i])
    rx = np.vstack([state.typical_rx[None, :], rx_i])

    # (d) decoding for every transmitting link
    act = np.flatnonzero(active)
    m = act.size
    succ = np.zeros(n + 1, dtype=bool)
    fading = None
    if m:
        delta = np.abs(rx[act][:, None, :] - tx[act][None, :, :])
        if boundary == "torus":
            delta = np.minimum(delta, area_side - delta)
        d2 = (delta**2).sum(axis=2)
        diag = np.arange(m)
        d2[diag, diag] = params.R**2
        mask = d2 <= (cutoff**2 if cutoff is not None else math.inf)
        mask[diag, diag] = True
        fading = np.where(mask, rng.standard_exponential((m, m)), 0.0)
        with np.errstate(divide="ignore"):
            gain = fading * d2 ** (-params.alpha / 2.0)
        own = gain[diag, diag]
        interf = gain.sum(axis=1) - own
        noise = 0.0 if params.noiseless else 1.0 / params.gamma
        succ[act] = own > params.theta * (interf + noise)
        queue[act[succ[act]]] = False

    # (e) bookkeeping for the typical link
    delivered = bool(succ[0])
    if delivered:
        peak = state.typical_aoi + 1  # age reached just before the reset
        aoi = t - gen_slot + 1
        gen_slot = None
    else:
        peak = None
        aoi = state.typical_aoi + 1

    new_state = replace(
        state, slot=t + 1, tx_positions=tx_i, rx_positions=rx_i,
        queue_flags=queue, access_flags=active, fading=fading,
        typical_aoi=aoi, typical_gen_slot=gen_slot,
    )
    return new_state, SlotEvent(delivered=delivered, peak=peak, dropped=dropped)
