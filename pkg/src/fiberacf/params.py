"""Fiber parameter record, derived constants and unit handling.

Everything is kept in SI units (W, m, s, Hz). dBm and prefixed units are only
used at the configuration and reporting edges through :func:`parse_quantity`,
:func:`format_quantity`, :func:`dbm_to_watts` and :func:`watts_to_dbm`.
"""

import dataclasses
import math
import numbers
import re
import threading
from dataclasses import dataclass

import numpy as np
from cachetools import LRUCache, cached
from numpy.typing import ArrayLike, NDArray

from ._logger import create_logger
from .exceptions import DomainError
from .special_functions import eval_hyperbolic_array, sinc

BOLTZMANN = 1.380649e-23
"""Boltzmann constant in J/K."""

# Reference fiber defaults.
TABLE_GAMMA = 1.27e-3
TABLE_LENGTH = 2.0e6
TABLE_N_A = 6.674e-24
TABLE_BANDWIDTH = 5.0e11
TABLE_N0 = 4.142e-21
TABLE_SYMBOL_PERIOD = 10e-12
TABLE_TEMPERATURE = 300.0

# Below this value of 1 - ρ² the ratios S_I/√(1-ρ²) and T_I/√(1-ρ²) use their limits.
RHO_LIMIT_EPS = 1e-8

_logger = create_logger()
_derive_lock = threading.RLock()


@dataclass(frozen=True)
class FiberParams:
    """Physical constants of a dispersion-free fiber with distributed amplification.

    γ = 0 and N_A = 0 are accepted and give the linear and noise-free reference
    channels. z, B and N₀ must be positive.

    Attributes:
        gamma: Kerr coefficient in 1/(W·m); 0 gives the linear channel.
        z: Fiber length in m.
        n_a: Amplifier noise PSD per unit distance in W/(Hz·m); 0 gives a noise-free fiber.
        b: Amplifier (noise) bandwidth in Hz.
        n0: Receiver noise PSD in W/Hz.
        t_s: Symbol period in s, for PAM contexts.
        t_e: Receiver temperature in K. Informational; ``n0`` is authoritative.
    """

    gamma: float
    z: float
    n_a: float
    b: float
    n0: float
    t_s: float | None = None
    t_e: float | None = None

    def __post_init__(self) -> None:
        for name in ("gamma", "z", "n_a", "b", "n0"):
            value = getattr(self, name)
            if not isinstance(value, numbers.Real) or not math.isfinite(value):
                raise DomainError(f"{name} must be a finite number, got {value!r}", name=name, value=value)
        for name in ("gamma", "n_a"):
            if getattr(self, name) < 0:
                raise DomainError(f"{name} must be non-negative", name=name, value=getattr(self, name))
        for name in ("z", "b", "n0"):
            if getattr(self, name) <= 0:
                raise DomainError(f"{name} must be positive", name=name, value=getattr(self, name))
        for name in ("t_s", "t_e"):
            value = getattr(self, name)
            if value is not None and not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be positive when given", name=name, value=value)

    @classmethod
    def table(cls) -> "FiberParams":
        """The reference parameter set (2000 km, 500 GHz amplifier bandwidth)."""
        return cls(
            gamma=TABLE_GAMMA,
            z=TABLE_LENGTH,
            n_a=TABLE_N_A,
            b=TABLE_BANDWIDTH,
            n0=TABLE_N0,
            t_s=TABLE_SYMBOL_PERIOD,
            t_e=TABLE_TEMPERATURE,
        )

    @property
    def k(self) -> float:
        """Noise power per unit distance K = N_A·B in W/m."""
        return self.n_a * self.b

    def with_bandwidth(self, b: float) -> "FiberParams":
        """Copy with a different amplifier bandwidth (N_A fixed, so K scales with B)."""
        return dataclasses.replace(self, b=b)

    def with_gamma(self, gamma: float) -> "FiberParams":
        """Copy with a different Kerr coefficient."""
        return dataclasses.replace(self, gamma=gamma)

    def with_noise(self, n_a: float) -> "FiberParams":
        """Copy with a different amplifier noise PSDD."""
        return dataclasses.replace(self, n_a=n_a)


@dataclass(frozen=True)
class DerivedConstants:
    """Constants shared by the autocorrelation, bound and capacity formulas.

    ``c1`` and ``c3`` include the attenuation e^(-√(γKz²)) of their tail terms;
    ``c1_flat`` and ``c3_flat`` omit it and are the looser variants.
    """

    params: FiberParams
    k: float
    kz: float
    kappa: float
    gkz2: float
    gkz2_half: float
    sqrt_gkz2: float
    delta: float
    p_o: float
    c1: float
    c2: float
    c3: float
    c1_flat: float
    c3_flat: float

    @property
    def tail_attenuation(self) -> float:
        """The factor e^(-√(γKz²)) applied to the tail constants."""
        return math.exp(-self.sqrt_gkz2)

    def c1_for(self, tail_attenuation: bool) -> float:
        """c₁ with or without the tail attenuation factor."""
        return self.c1 if tail_attenuation else self.c1_flat

    def c3_for(self, tail_attenuation: bool) -> float:
        """c₃ with or without the tail attenuation factor."""
        return self.c3 if tail_attenuation else self.c3_flat


def _bound_constants(p: FiberParams, kz: float, kappa: float, gkz2: float, delta: float) -> tuple[float, float, float]:
    """Return (c1_flat, c2, c3_flat); each is +inf when its defining formula divides by zero."""
    k, delta2 = p.k, delta * delta
    if kappa > 0:
        c1_flat = 20.0 * (kz + delta2 + math.sqrt(18.0 / (kappa * math.e)) * delta + 9.0 / (kappa * math.e))
    else:
        c1_flat = math.inf
    if gkz2 > 0:
        bracket = kz + delta2 + math.sqrt(6.0 * kz / math.e) * delta + math.sqrt(18.0) * kz / math.e
        c2 = 100.0 / gkz2 * bracket
    else:
        c2 = math.inf
    if p.gamma > 0:
        gamma_e2 = p.gamma * math.e**2
        c3_flat = 20.0 * (kz + delta2 + (80.0 * k / gamma_e2) ** 0.25 * delta + math.sqrt(20.0 * k / gamma_e2))
    else:
        c3_flat = math.inf
    return c1_flat, c2, c3_flat


@cached(cache=LRUCache(maxsize=256), lock=_derive_lock)
def derive_constants(p: FiberParams) -> DerivedConstants:
    """Compute K, κ, δ, P_o and the received-power bound constants c₁, c₂, c₃.

    Constants whose defining formula divides by γ or κ are +inf when γ = 0 or
    K = 0; the bounds they feed are then vacuous.

    Args:
        p: Parameter record.

    Returns:
        The DerivedConstants for ``p``. Results are cached per record.

    Example:
        >>> dc = derive_constants(FiberParams.table())
        >>> round(dc.kappa, 1)
        28.7
    """
    k = p.k
    kz = k * p.z
    kappa = 2.0 * p.gamma**2 * k * p.z**3 / 3.0
    gkz2 = p.gamma * k * p.z**2
    sqrt_gkz2 = math.sqrt(gkz2)
    delta = math.sqrt(3.0 * kz / (4.0 * math.e))
    p_o = 3.0 * (kz + delta * delta)
    attenuation = math.exp(-sqrt_gkz2)
    c1_flat, c2, c3_flat = _bound_constants(p, kz, kappa, gkz2, delta)

    dc = DerivedConstants(
        params=p,
        k=k,
        kz=kz,
        kappa=kappa,
        gkz2=gkz2,
        gkz2_half=gkz2 / 2.0,
        sqrt_gkz2=sqrt_gkz2,
        delta=delta,
        p_o=p_o,
        c1=c1_flat * attenuation,
        c2=c2,
        c3=c3_flat * attenuation,
        c1_flat=c1_flat,
        c3_flat=c3_flat,
    )
    _logger.debug("Derived constants for B=%g Hz: kappa=%g 1/W, gKz^2=%g, delta=%g", p.b, kappa, gkz2, delta)
    return dc


def rho(tau: ArrayLike, b: float) -> float | NDArray[np.float64]:
    """Noise correlation coefficient ρ(τ) = sinc(Bτ)."""
    return sinc(np.multiply(b, tau))


def _check_rho(rho_value: ArrayLike) -> NDArray[np.float64]:
    arr = np.asarray(rho_value, dtype=np.float64)
    if np.any(np.isnan(arr)) or np.any(np.abs(arr) > 1.0):
        raise DomainError("Correlation coefficient must satisfy |rho| <= 1", name="rho", value=rho_value)
    return arr


def c_of_rho(dc: DerivedConstants, rho_value: float) -> complex:
    """Rate density c = -jγ(K/2)√(1-ρ²) of the two-instant noise pair.

    Raises:
        DomainError: If |ρ| > 1.
    """
    r2 = 1.0 - float(_check_rho(rho_value)) ** 2
    return complex(0.0, -dc.params.gamma * dc.k / 2.0 * math.sqrt(max(r2, 0.0)))


@dataclass(frozen=True)
class MixingRatios:
    """Hyperbolic values at c(ρ) with the ratios a_s = S_I/√(1-ρ²), a_t = T_I/√(1-ρ²).

    Near |ρ| = 1 the ratios take their limits γ(K/2)z² and γKz³/3.
    """

    s: NDArray[np.complex128]
    t: NDArray[np.complex128]
    a_s: NDArray[np.float64]
    a_t: NDArray[np.float64]
    r: NDArray[np.float64]
    limit: NDArray[np.bool_]


def mixing_ratios(dc: DerivedConstants, rho_value: ArrayLike) -> MixingRatios:
    """Evaluate S, T and the mixing ratios over an array of correlation coefficients."""
    rho_arr = np.atleast_1d(_check_rho(rho_value))
    p = dc.params
    r2 = np.clip(1.0 - rho_arr**2, 0.0, 1.0)
    r = np.sqrt(r2)
    s, t = eval_hyperbolic_array(-1j * p.gamma * dc.k / 2.0 * r, p.z)
    limit = r2 < RHO_LIMIT_EPS
    safe_r = np.where(limit, 1.0, r)
    a_s = np.where(limit, dc.gkz2_half, s.imag / safe_r)
    a_t = np.where(limit, p.gamma * dc.k * p.z**3 / 3.0, t.imag / safe_r)
    return MixingRatios(s=s, t=t, a_s=a_s, a_t=a_t, r=r, limit=limit)


def delta_of_rho(dc: DerivedConstants, rho_value: ArrayLike) -> float | NDArray[np.float64]:
    """Per-lag amplitude offset δ(c) = √(S_I²/(eγT_I√(1-ρ²))), never above ``dc.delta``.

    Falls back to ``dc.delta`` where γT_I vanishes.
    """
    mr = mixing_ratios(dc, rho_value)
    den = math.e * dc.params.gamma * mr.a_t
    with np.errstate(divide="ignore", invalid="ignore"):
        value = np.where(den > 0, np.sqrt(mr.a_s**2 / np.where(den > 0, den, 1.0)), dc.delta)
    return float(value[0]) if np.ndim(rho_value) == 0 else value


_UNITS: dict[str, tuple[float, str]] = {
    "m": (1.0, "length"),
    "km": (1e3, "length"),
    "Hz": (1.0, "frequency"),
    "kHz": (1e3, "frequency"),
    "MHz": (1e6, "frequency"),
    "GHz": (1e9, "frequency"),
    "THz": (1e12, "frequency"),
    "s": (1.0, "time"),
    "ms": (1e-3, "time"),
    "us": (1e-6, "time"),
    "ns": (1e-9, "time"),
    "ps": (1e-12, "time"),
    "fs": (1e-15, "time"),
    "W": (1.0, "power"),
    "mW": (1e-3, "power"),
    "/W/m": (1.0, "nonlinearity"),
    "/W/km": (1e-3, "nonlinearity"),
    "W/Hz/m": (1.0, "noise_psdd"),
    "W/Hz": (1.0, "noise_psd"),
    "K": (1.0, "temperature"),
}

_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(\S+)\s*$")


def parse_quantity(text: str, dimension: str | None = None) -> float:
    """Parse a quantity such as ``"500 GHz"`` or ``"1.27 /W/km"`` into SI units.

    ``dBm`` is accepted for powers.

    Args:
        text: Number followed by a unit.
        dimension: If given, the unit must belong to this dimension
            (``"length"``, ``"frequency"``, ``"time"``, ``"power"``,
            ``"nonlinearity"``, ``"noise_psdd"``, ``"noise_psd"``, ``"temperature"``).

    Returns:
        The value in SI units.

    Raises:
        DomainError: If the text does not parse, the unit is unknown, or the
            dimension does not match.
    """
    match = _QUANTITY.match(text)
    if not match:
        raise DomainError(f"Cannot parse quantity '{text}'", name="quantity", value=text)
    number, unit = float(match.group(1)), match.group(2)
    if unit == "dBm":
        scale_dim: tuple[float, str] | None = None
        found_dim = "power"
    else:
        scale_dim = _UNITS.get(unit)
        if scale_dim is None:
            raise DomainError(f"Unknown unit '{unit}' in '{text}'", name="unit", value=unit)
        found_dim = scale_dim[1]
    if dimension is not None and found_dim != dimension:
        raise DomainError(f"Expected a {dimension} quantity, got '{text}'", name="unit", value=unit)
    return dbm_to_watts(number) if scale_dim is None else number * scale_dim[0]


def format_quantity(value: float, unit: str) -> str:
    """Format an SI value in the given unit, e.g. ``format_quantity(5e11, "GHz") == "500 GHz"``."""
    if unit == "dBm":
        return f"{watts_to_dbm(value):.15g} dBm"
    if unit not in _UNITS:
        raise DomainError(f"Unknown unit '{unit}'", name="unit", value=unit)
    return f"{value / _UNITS[unit][0]:.15g} {unit}"


def dbm_to_watts(p_dbm: ArrayLike) -> float | NDArray[np.float64]:
    """Convert dBm to watts."""
    out = 1e-3 * np.power(10.0, np.asarray(p_dbm, dtype=np.float64) / 10.0)
    return float(out) if out.ndim == 0 else out


def watts_to_dbm(p_w: ArrayLike) -> float | NDArray[np.float64]:
    """Convert watts to dBm; 0 W maps to -inf."""
    with np.errstate(divide="ignore"):
        out = 10.0 * np.log10(np.asarray(p_w, dtype=np.float64) / 1e-3)
    return float(out) if out.ndim == 0 else out
