"""Peak age-of-information analysis, optimization, and simulation for
slotted-ALOHA Poisson bipolar networks."""
from .aoi import (
    Branch,
    GridOracleResult,
    OptimizationResult,
    PeakAoiResult,
    VerificationError,
    analytical_peak_aoi,
    grid_oracle,
    optimize_joint,
    optimize_q,
    optimize_xi,
    peak_aoi,
    solve_p_star,
)
from .fixed_point import (
    ConvergenceError,
    FixedPointSolution,
    QueueSteadyState,
    Regime,
    RegimeClassification,
    SteadyStateSensitivity,
    classify_regime,
    f_value,
    g_value,
    queue_steady_state,
    solve_fixed_point,
    solve_p_l_grid,
    steady_state_sensitivity,
)
from .params import DerivedConstants, SystemParams, compute_c, derive_constants
from .sim import SimConfig, SimStats, run_simulation

__version__ = "0.1.0"
