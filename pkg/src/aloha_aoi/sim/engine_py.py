"""Pure-numpy realization engine (fallback for the compiled kernel).

Random-draw contract, shared bit-for-bit with the compiled engine (both
consume only raw next_double variates from the underlying bit generator):

  1. one uniform: orientation of the typical pair;
  then per slot, in order:
  2. n+1 uniforms: arrival coin per link (index 0 = typical);
  3. n+1 uniforms: access coin per link;
  4. 2n uniforms, row-major (x0, y0, x1, y1, ...): interferer positions;
  5. n uniforms: interferer receiver orientations;
  6. one uniform u per needed fading gain, transformed as -log1p(-u):
     - xi < 1: row-major over (active receiver, active transmitter) pairs;
     - xi = 1: only the typical receiver's row, and only when the typical
       link transmits (interferer buffers are refilled every slot, so their
       decoding outcomes cannot influence any statistic);
     pairs beyond the interference cutoff are skipped (never the own link).

All randomness consumed before the engine runs (the Poisson node count) is
drawn by the caller from the same stream.

ffi_coeff is the deterministic far-field interference coefficient
(density * pathloss integral over the plane outside the window); each slot
it is scaled by the observed fraction of transmitting interferers and added
to the noise term, which removes the finite-window truncation bias.
"""
from __future__ import annotations

import math

import numpy as np


def _pathloss_from_d2(d2, alpha: float):
    # x^(-alpha/2) with fast paths for the common exponents
    if alpha == 3.0:
        return 1.0 / (d2 * np.sqrt(d2))
    if alpha == 4.0:
        return 1.0 / (d2 * d2)
    return d2 ** (-alpha / 2.0)


def run_realization(
    rng: np.random.Generator,
    n: int,
    side: float,
    r_link: float,
    alpha: float,
    theta: float,
    inv_gamma: float,
    q: float,
    xi: float,
    slots: int,
    warmup_slots: int,
    cutoff: float | None,
    torus: bool,
    ffi_coeff: float = 0.0,
) -> tuple[int, int, int, int, int, int, int]:
    """Simulate one realization; returns the RealizationResult field tuple."""
    two_pi = 2.0 * math.pi
    phi0 = rng.random() * two_pi
    center = side / 2.0
    ntot = n + 1
    tx = np.empty((ntot, 2))
    rx = np.empty((ntot, 2))
    rx[0] = (center, center)
    tx[0] = (center + r_link * math.cos(phi0), center + r_link * math.sin(phi0))

    queue = np.zeros(ntot, dtype=bool)
    gen0 = 0          # generation slot of the packet in the typical buffer
    age = 1           # typical-link AoI at the start of the current slot
    cutoff2 = cutoff * cutoff if cutoff is not None else math.inf
    r_pow_own = r_link ** (-alpha)
    saturated = xi == 1.0

    peak_sum = peak_count = attempts = successes = 0
    drops = empty_slots = measured = 0

    for t in range(slots):
        measure = t >= warmup_slots
        if measure:
            measured += 1
            if not queue[0]:
                empty_slots += 1

        arrivals = rng.random(ntot) < xi
        access_coin = rng.random(ntot) < q
        pos = rng.random((n, 2))
        pos *= side
        ang = rng.random(n)
        ang *= two_pi

        if arrivals[0]:
            if queue[0]:
                if measure:
                    drops += 1
            else:
                gen0 = t
        queue |= arrivals
        active = queue & access_coin
        m_interf = int(np.count_nonzero(active[1:]))
        i_far = ffi_coeff * (m_interf / n) if n else 0.0

        tx[1:] = pos
        rx[1:, 0] = pos[:, 0] + r_link * np.cos(ang)
        rx[1:, 1] = pos[:, 1] + r_link * np.sin(ang)

        succ0 = False
        if saturated:
            if active[0]:
                jj = np.flatnonzero(active[1:]) + 1
                dx = np.abs(rx[0, 0] - tx[jj, 0])
                dy = np.abs(rx[0, 1] - tx[jj, 1])
                if torus:
                    dx = np.minimum(dx, side - dx)
                    dy = np.minimum(dy, side - dy)
                d2 = dx * dx + dy * dy
                keep = d2 <= cutoff2
                # own gain is drawn first (lowest transmitter index)
                own = -math.log1p(-rng.random()) * r_pow_own
                h = -np.log1p(-rng.random(int(keep.sum())))
                interf = float(np.dot(h, _pathloss_from_d2(d2[keep], alpha)))
                succ0 = own > theta * (interf + i_far + inv_gamma)
                queue[0] = not succ0
        else:
            act = np.flatnonzero(active)
            m = act.size
            if m:
                dx = np.abs(rx[act, 0][:, None] - tx[act, 0][None, :])
                dy = np.abs(rx[act, 1][:, None] - tx[act, 1][None, :])
                if torus:
                    dx = np.minimum(dx, side - dx)
                    dy = np.minimum(dy, side - dy)
                d2 = dx * dx + dy * dy
                diag = np.arange(m)
                d2[diag, diag] = r_link * r_link
                mask = d2 <= cutoff2
                mask[diag, diag] = True
                h = np.zeros((m, m))
                h[mask] = -np.log1p(-rng.random(int(mask.sum())))
                with np.errstate(divide="ignore"):
                    gain = h * _pathloss_from_d2(d2, alpha)
                own = gain[diag, diag]
                interf = gain.sum(axis=1) - own
                succ = own > theta * (interf + i_far + inv_gamma)
                queue[act[succ]] = False
                succ0 = bool(active[0] and succ[0])  # typical is act[0]

        if measure and active[0]:
            attempts += 1
            if succ0:
                successes += 1
        if succ0:
            if measure:
                peak_sum += age + 1  # age reached just before the reset
                peak_count += 1
            age = t - gen0 + 1
        else:
            age += 1

    return (peak_sum, peak_count, attempts, successes, drops, empty_slots, measured)
