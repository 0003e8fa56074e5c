"""System parameters and derived constants shared by every analysis module."""
from __future__ import annotations

import math
from dataclasses import dataclass


def compute_c(alpha: float, theta: float) -> float:
    """Interference geometry constant c = pi * theta^(2/alpha) / sinc(2/alpha).

    sinc is the normalized convention sin(pi x)/(pi x).  Two conventions for
    this constant circulate in the literature (multiplying vs. dividing by
    sinc(2/alpha)); the dividing form is the standard Rayleigh-fading
    interference functional and is the one used throughout this package.
    Callers that want the other convention can scale the result themselves.
    """
    if alpha <= 2:
        raise ValueError(f"alpha must exceed 2 (got {alpha}); interference diverges otherwise")
    if theta < 0:
        raise ValueError(f"theta must be >= 0 (got {theta})")
    if theta == 0:
        return 0.0
    x = 2.0 / alpha
    sinc = math.sin(math.pi * x) / (math.pi * x)
    return math.pi * theta**x / sinc


@dataclass(frozen=True)
class SystemParams:
    """Full parameter tuple of the network model.

    gamma is the mean received SNR; gamma=math.inf is the explicit noiseless
    mode (zero thermal noise).
    """

    lam: float  # node deployment density (per unit area)
    R: float    # TX-RX distance
    alpha: float  # path-loss exponent, > 2
    theta: float  # SINR decoding threshold
    gamma: float  # mean received SNR; math.inf for noiseless
    q: float    # channel access probability in (0, 1]
    xi: float   # packet arrival rate in (0, 1]

    def __post_init__(self) -> None:
        if self.lam < 0:
            raise ValueError(f"lambda must be >= 0 (got {self.lam})")
        if self.R <= 0:
            raise ValueError(f"R must be > 0 (got {self.R})")
        if self.alpha <= 2:
            raise ValueError(f"alpha must be > 2 (got {self.alpha})")
        if self.theta < 0:
            raise ValueError(f"theta must be >= 0 (got {self.theta})")
        if not (self.gamma > 0):
            raise ValueError(f"gamma must be > 0 (got {self.gamma})")
        if not (0 < self.q <= 1):
            raise ValueError(f"q must be in (0, 1] (got {self.q})")
        if not (0 < self.xi <= 1):
            raise ValueError(f"xi must be in (0, 1] (got {self.xi})")

    @property
    def noiseless(self) -> bool:
        return math.isinf(self.gamma)

    def replace(self, **kwargs) -> "SystemParams":
        from dataclasses import replace

        return replace(self, **kwargs)


@dataclass(frozen=True)
class DerivedConstants:
    """Constants of the fixed-point equation derived from SystemParams.

    M and N are None at xi = 1, where the load expression degenerates and the
    fixed point is evaluated in its original exponential form instead.
    """

    c: float
    K: float      # noise exponent theta * R^alpha / gamma
    lcr2: float   # lambda * c * R^2
    M: float | None  # lcr2 * xi / (1 - xi)
    N: float | None  # xi / (q * (1 - xi))


def derive_constants(params: SystemParams) -> DerivedConstants:
    """Pure function mapping SystemParams to the fixed-point constants."""
    c = compute_c(params.alpha, params.theta)
    K = 0.0 if params.noiseless else params.theta * params.R**params.alpha / params.gamma
    lcr2 = params.lam * c * params.R**2
    if params.xi == 1.0:
        M = N = None
    else:
        M = lcr2 * params.xi / (1.0 - params.xi)
        N = params.xi / (params.q * (1.0 - params.xi))
    return DerivedConstants(c=c, K=K, lcr2=lcr2, M=M, N=N)
