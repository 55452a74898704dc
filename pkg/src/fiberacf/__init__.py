"""fiberacf: autocorrelation and capacity bounds for dispersion-free nonlinear fiber.

The package models a fiber with Kerr nonlinearity, no dispersion and
distributed amplification whose noise is a complex Wiener process, and
provides:
- Closed-form conditional autocorrelation functions and their low-noise approximation
- Power spectral densities of isolated pulses and ring-modulated PAM
- Received-power, bandwidth and energy bounds for bandlimited receivers
- Capacity upper bounds, the power threshold and the scaled-bandwidth study
- A seeded, thread-count independent Monte Carlo channel used as an oracle
- Figure tables, validation suites and the ``fiberacf`` command line
"""

from ._logger import Logger, LogLevel
from .autocorrelation import AcfGrid, AcfMode, AcfRegime, AcfValue, acf_approx, acf_exact, acf_rect_isolated, acf_ring
from .capacity import (
    CapacityCurve,
    CapacityKind,
    capacity_upper1,
    capacity_upper2,
    eta_bound,
    scaled_b_curve,
    shannon_c,
)
from .channel_mc import McEstimate, MonteCarloEngine, mc_acf, mecozzi_identity_check
from .config import AppConfig, load_config
from .exceptions import (
    ConfigError,
    ContractError,
    DomainError,
    FiberAcfError,
    RootBracketError,
    UnsupportedRegimeError,
    ValidationFailure,
)
from .params import DerivedConstants, FiberParams, derive_constants, rho
from .power_bounds import BoundRegime, BoundReport, RegimeTag, avg_power_bound, inst_power_bound, power_threshold
from .special_functions import HyperbolicPair, eval_hyperbolic
from .spectrum import Psd, PsdGrid, psd_cyclostationary, psd_ring_pam

__all__ = [
    "FiberParams",
    "DerivedConstants",
    "derive_constants",
    "rho",
    "AppConfig",
    "load_config",
    "HyperbolicPair",
    "eval_hyperbolic",
    "AcfValue",
    "AcfGrid",
    "AcfMode",
    "AcfRegime",
    "acf_exact",
    "acf_approx",
    "acf_rect_isolated",
    "acf_ring",
    "Psd",
    "PsdGrid",
    "psd_cyclostationary",
    "psd_ring_pam",
    "BoundRegime",
    "BoundReport",
    "RegimeTag",
    "inst_power_bound",
    "avg_power_bound",
    "power_threshold",
    "CapacityCurve",
    "CapacityKind",
    "shannon_c",
    "capacity_upper1",
    "capacity_upper2",
    "eta_bound",
    "scaled_b_curve",
    "McEstimate",
    "MonteCarloEngine",
    "mc_acf",
    "mecozzi_identity_check",
    "Logger",
    "LogLevel",
    "FiberAcfError",
    "DomainError",
    "ConfigError",
    "UnsupportedRegimeError",
    "ContractError",
    "RootBracketError",
    "ValidationFailure",
]
