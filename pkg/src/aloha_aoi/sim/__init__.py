"""Discrete-time Monte Carlo simulation of the random-access network.

A compiled (Cython) realization engine is used when available; a pure-numpy
engine with an identical random-draw contract is the fallback.  Set
ALOHA_AOI_FORCE_PYTHON=1 before import to force the fallback.
"""
from .config import RealizationResult, SimConfig, SimStats
from .model import SlotEvent, SlotState, initial_state, place_typical, sample_ppp, step_slot
from .runner import DEFAULT_BACKEND, available_backends, run_simulation

__all__ = [
    "DEFAULT_BACKEND",
    "RealizationResult",
    "SimConfig",
    "SimStats",
    "SlotEvent",
    "SlotState",
    "available_backends",
    "initial_state",
    "place_typical",
    "run_simulation",
    "sample_ppp",
    "step_slot",
]
