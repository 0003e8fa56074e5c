"""Benchmark the compiled realization engine against the numpy fallback.

Runs the same seeded configurations through both backends, checks they agree
bit-for-bit, and reports wall-clock time per realization.

Usage: python benchmarks/bench_sim.py [--slots N] [--realizations M]
"""
from __future__ import annotations

import argparse
import math
import time

from aloha_aoi import SimConfig, SystemParams
from aloha_aoi.sim import run_simulation
from aloha_aoi.sim.runner import available_backends

CASES = [
    ("saturated, q=1 (typical-only decode)",
     SystemParams(lam=0.05, R=3.0, alpha=3.0, theta=0.2, gamma=20.0, q=1.0, xi=1.0)),
    ("saturated, q=0.5",
     SystemParams(lam=0.05, R=3.0, alpha=3.0, theta=0.8, gamma=20.0, q=0.5, xi=1.0)),
    ("queued, xi=0.4 (all links decoded)",
     SystemParams(lam=0.05, R=3.0, alpha=3.0, theta=0.5, gamma=20.0, q=0.5, xi=0.4)),
    ("queued, generic alpha=3.5",
     SystemParams(lam=0.03, R=2.0, alpha=3.5, theta=0.5, gamma=20.0, q=0.5, xi=0.4)),
]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--slots", type=int, default=5000)
    ap.add_argument("--realizations", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    backends = available_backends()
    print(f"backends: {', '.join(backends)}")
    if "cython" not in backends:
        print("compiled engine not built; nothing to compare")
        return

    header = f"{'case':40s} {'cython':>10s} {'python':>10s} {'speedup':>8s}  match"
    print(header)
    print("-" * len(header))
    for label, params in CASES:
        cfg = SimConfig(params=params, slots=args.slots,
                        realizations=args.realizations, seed=args.seed)
        times = {}
        stats = {}
        for backend in ("cython", "python"):
            t0 = time.perf_counter()
            stats[backend] = run_simulation(cfg, backend=backend)
            times[backend] = (time.perf_counter() - t0) / args.realizations
        match = (
            stats["cython"].per_realization_peak == stats["python"].per_realization_peak
            and stats["cython"].per_realization_rate == stats["python"].per_realization_rate
        )
        speedup = times["python"] / times["cython"]
        print(f"{label:40s} {times['cython']*1e3:8.1f}ms {times['python']*1e3:8.1f}ms "
              f"{speedup:7.2f}x  {match}")
        if not match:
            raise SystemExit("backend outputs diverged")


if __name__ == "__main__":
    main()
