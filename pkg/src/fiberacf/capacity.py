"""Capacity bounds and capacity demonstrations.

Rates are in bits/s and spectral efficiencies in bits/s/Hz. The received-power
bound P̄_r(W) used by both upper bounds is min(Kz + P, average-power bound),
the linear value on the left of the crossover and the nonlinear bound on the right.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import integrate, stats

from ._logger import create_logger
from .channel_mc import McEstimate, MonteCarloEngine
from .exceptions import DomainError, RootBracketError, UnsupportedRegimeError
from .params import DerivedConstants, derive_constants
from .power_bounds import avg_power_bound, bandwidth_lower_bound, power_threshold
from .special_functions import sinc

_logger = create_logger()


def _check_positive(value: float, name: str) -> None:
    if not (math.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be positive, got {value}", name=name, value=value)


def shannon_c(w: float, p: ArrayLike, n0: float) -> float | NDArray[np.float64]:
    """AWGN capacity W·log₂(1 + P/(WN₀)) in bits/s; tends to (P/N₀)·log₂e as W → ∞.

    Raises:
        DomainError: If ``w`` or ``n0`` is not positive or any ``p`` < 0.
    """
    _check_positive(w, "w")
    _check_positive(n0, "n0")
    arr = np.asarray(p, dtype=np.float64)
    if np.any(arr < 0):
        raise DomainError("Power must be non-negative", name="p", value=p)
    out = w * np.log1p(arr / (w * n0)) / math.log(2.0)
    return float(out) if out.ndim == 0 else out


def shannon_eta(w: float, p: ArrayLike, n0: float) -> float | NDArray[np.float64]:
    """AWGN spectral efficiency log₂(1 + P/(WN₀)) in bits/s/Hz."""
    out = np.asarray(shannon_c(w, p, n0)) / w
    return float(out) if out.ndim == 0 else out


def received_power_bound(p: float, w: float, dc: DerivedConstants, *, tail_attenuation: bool = False) -> float:
    """P̄_r(W) = min(Kz + P, average-power bound) for W ≤ B.

    Raises:
        UnsupportedRegimeError: If W > B.
    """
    bound = avg_power_bound(p, w, dc, tail_attenuation=tail_attenuation).bound
    return min(dc.kz + p, bound)


def capacity_upper1(p: float, w: float, dc: DerivedConstants, *, tail_attenuation: bool = False) -> float:
    """log₂(1 + P̄_r(W)/(WN₀)) in bits/s/Hz.

    Raises:
        UnsupportedRegimeError: If W > B.
    """
    p_r = received_power_bound(p, w, dc, tail_attenuation=tail_attenuation)
    return math.log1p(p_r / (w * dc.params.n0)) / math.log(2.0)


def capacity_upper2_from_power(p_r: float, w: float, dc: DerivedConstants) -> float:
    """log₂((P̄_r + WN₀)/(Kz·W/B + WN₀)) for a given received-power bound.

    Raises:
        UnsupportedRegimeError: If W > B.
    """
    if w > dc.params.b:
        raise UnsupportedRegimeError(f"Noise-aware capacity bound needs W <= B, got W/B={w / dc.params.b:g}")
    noise = w * dc.params.n0
    return math.log2((p_r + noise) / (dc.kz * w / dc.params.b + noise))


def capacity_upper2(p: float, w: float, dc: DerivedConstants, *, tail_attenuation: bool = False) -> float:
    """Capacity bound that discounts the in-band amplifier noise Kz·W/B.

    Never larger than :func:`capacity_upper1` at the same inputs.

    Raises:
        UnsupportedRegimeError: If W > B.
    """
    if w > dc.params.b:
        raise UnsupportedRegimeError(f"Noise-aware capacity bound needs W <= B, got W/B={w / dc.params.b:g}")
    p_r = received_power_bound(p, w, dc, tail_attenuation=tail_attenuation)
    return capacity_upper2_from_power(p_r, w, dc)


def eta_bound(
    p: float, w: float, dc: DerivedConstants, q: float = 0.99, *, tail_attenuation: bool = False
) -> float:
    """Spectral-efficiency bound C(W)/max(W, W_min) with W_min = B·(W/B bound).

    Equals :func:`capacity_upper1` while W_min ≤ W and falls off beyond the
    power threshold.
    """
    upper1 = capacity_upper1(p, w, dc, tail_attenuation=tail_attenuation)
    w_min = dc.params.b * bandwidth_lower_bound(p, dc, q, tail_attenuation=tail_attenuation).ratio
    return w * upper1 / max(w, w_min)


class CapacityKind(str, Enum):
    """Which formula a CapacityCurve holds."""

    SHANNON = "shannon"
    UPPER1 = "upper1"
    UPPER2 = "upper2"
    ETA = "eta"
    SCALED_B = "scaled_b"


@dataclass(frozen=True)
class CapacityCurve:
    """Spectral efficiency in bits/s/Hz over a launch-power grid in W."""

    p_grid: NDArray[np.float64]
    values: NDArray[np.float64]
    kind: CapacityKind


@dataclass(frozen=True)
class CapacityCurves:
    """All fixed-bandwidth curves at one receiver bandwidth, with the power threshold.

    ``threshold_w`` is NaN when the threshold cannot be bracketed.
    """

    shannon: CapacityCurve
    upper1: CapacityCurve
    upper2: CapacityCurve
    eta: CapacityCurve
    threshold_w: float


def capacity_curves(
    p_grid: ArrayLike, w: float, dc: DerivedConstants, q: float = 0.99, *, tail_attenuation: bool = False
) -> CapacityCurves:
    """Evaluate the Shannon reference, both upper bounds and the η bound on a power grid."""
    powers = np.asarray(p_grid, dtype=np.float64)
    n0 = dc.params.n0
    upper1 = np.array([capacity_upper1(p, w, dc, tail_attenuation=tail_attenuation) for p in powers])
    upper2 = np.array([capacity_upper2(p, w, dc, tail_attenuation=tail_attenuation) for p in powers])
    eta = np.array([eta_bound(p, w, dc, q, tail_attenuation=tail_attenuation) for p in powers])
    try:
        threshold = power_threshold(dc, q, tail_attenuation=tail_attenuation)
    except RootBracketError as e:
        _logger.warn("No power threshold: %s", e)
        threshold = math.nan
    return CapacityCurves(
        shannon=CapacityCurve(powers, np.asarray(shannon_eta(w, powers, n0)), CapacityKind.SHANNON),
        upper1=CapacityCurve(powers, upper1, CapacityKind.UPPER1),
        upper2=CapacityCurve(powers, upper2, CapacityKind.UPPER2),
        eta=CapacityCurve(powers, eta, CapacityKind.ETA),
        threshold_w=threshold,
    )


@dataclass(frozen=True)
class ScaledBandwidthStudy:
    """Bounds when the amplifier bandwidth grows with power as B = W·max(1, √(κ̂P/512))."""

    p_grid: NDArray[np.float64]
    b: NDArray[np.float64]
    received_power: NDArray[np.float64]
    upper1: NDArray[np.float64]
    upper2: NDArray[np.float64]
    kappa_hat: float

    def power_exponent(self, p_min: float = 0.0) -> float:
        """Log-log slope of the received-power bound over powers ≥ ``p_min``."""
        keep = self.p_grid >= p_min
        if np.count_nonzero(keep) < 2:
            raise DomainError("Need at least two grid powers above p_min", name="p_min", value=p_min)
        return float(np.polyfit(np.log(self.p_grid[keep]), np.log(self.received_power[keep]), 1)[0])

    def curve(self, which: CapacityKind = CapacityKind.UPPER1) -> CapacityCurve:
        """The upper1 or upper2 values as a SCALED_B curve."""
        values = self.upper1 if which is CapacityKind.UPPER1 else self.upper2
        return CapacityCurve(self.p_grid, values, CapacityKind.SCALED_B)


def scaled_b_study(
    p_grid: ArrayLike,
    w: float,
    dc_template: DerivedConstants,
    kappa_hat: float | None = None,
    *,
    tail_attenuation: bool = True,
) -> ScaledBandwidthStudy:
    """Recompute every B-dependent constant per power with B = W·max(1, √(κ̂P/512)).

    Args:
        p_grid: Launch powers.
        w: Receiver bandwidth, also the smallest amplifier bandwidth.
        dc_template: Constants whose fiber record supplies γ, z, N_A and N₀.
        kappa_hat: κ̂; defaults to κ evaluated at B = W.
        tail_attenuation: Keep e^(-√(γKz²)) in c₁ and c₃. On by default here: the flat
            constants grow with B and would hide the decay of the received power.
    """
    _check_positive(w, "w")
    powers = np.asarray(p_grid, dtype=np.float64)
    base = dc_template.params.with_bandwidth(w)
    k_hat = derive_constants(base).kappa if kappa_hat is None else kappa_hat
    widths, received, upper1, upper2 = [], [], [], []
    for p in powers:
        dc = derive_constants(base.with_bandwidth(w * max(1.0, math.sqrt(k_hat * p / 512.0))))
        p_r = received_power_bound(float(p), w, dc, tail_attenuation=tail_attenuation)
        widths.append(dc.params.b)
        received.append(p_r)
        upper1.append(math.log1p(p_r / (w * dc.params.n0)) / math.log(2.0))
        upper2.append(capacity_upper2_from_power(p_r, w, dc))
    return ScaledBandwidthStudy(
        p_grid=powers,
        b=np.array(widths),
        received_power=np.array(received),
        upper1=np.array(upper1),
        upper2=np.array(upper2),
        kappa_hat=k_hat,
    )


def scaled_b_curve(p_grid: ArrayLike, w: float, dc_template: DerivedConstants) -> CapacityCurve:
    """Upper-bound curve of :func:`scaled_b_study`."""
    return scaled_b_study(p_grid, w, dc_template).curve()


def infinite_bandwidth_capacity_bound(p: float, t_s: float, dc: DerivedConstants, n0: float | None = None) -> float:
    """Per-sample capacity bound in bits/s when B → ∞ at fixed K.

    (1/T_s)·log₂(1 + T_s·P·e^(-κP)/N₀) for P < 1/κ, and the plateau
    (1/T_s)·log₂(1 + T_s/(κeN₀)) from P = 1/κ on.
    """
    _check_positive(t_s, "t_s")
    noise = dc.params.n0 if n0 is None else n0
    if p < 0:
        raise DomainError(f"Power must be non-negative, got {p}", name="p", value=p)
    if dc.kappa > 0 and p >= 1.0 / dc.kappa:
        signal = 1.0 / (dc.kappa * math.e)
    else:
        signal = p * math.exp(-dc.kappa * p)
    return math.log1p(t_s * signal / noise) / (t_s * math.log(2.0))


def infinite_bandwidth_capacity_limit(dc: DerivedConstants, n0: float | None = None) -> float:
    """T_s → 0 limit log₂e/(κeN₀) of the infinite-bandwidth bound."""
    noise = dc.params.n0 if n0 is None else n0
    return math.log2(math.e) / (dc.kappa * math.e * noise)


def three_sample_demo(
    x: float,
    t_small: float,
    dc: DerivedConstants,
    trials: int = 10000,
    seed: int = 42,
    *,
    same_noise: bool = False,
    engine: MonteCarloEngine | None = None,
) -> McEstimate:
    """Monte Carlo mean of the three-sample estimate T_s((y₁+y₂)/2 - y₀) of x².

    The launch is 0, x/√T_s and -x/√T_s at t = 0, T and 2T, and y_k is the
    output power |u₀(kT) + √K·w(z, kT)|². The noise samples are jointly
    Gaussian with correlation sinc(B·ΔT); ``same_noise`` uses one sample for
    all three instants, which makes the estimate exact.

    Args:
        x: Real symbol in √J.
        t_small: Sample spacing T in s.
        dc: Derived constants; ``dc.params.t_s`` must be set.
        trials: Number of trials.
        seed: Root seed.
        same_noise: Use identical noise at the three instants.
        engine: Engine to run on.

    Raises:
        DomainError: If T is not positive or the fiber record has no symbol period.
    """
    _check_positive(t_small, "t_small")
    t_s = dc.params.t_s
    if t_s is None:
        raise DomainError("The three-sample receiver needs a symbol period", name="t_s", value=None)
    launch = np.array([0.0, x / math.sqrt(t_s), -x / math.sqrt(t_s)])
    lags = np.arange(3)[:, None] - np.arange(3)[None, :]
    variance = dc.params.z / 2.0
    cov = variance * np.asarray(sinc(dc.params.b * t_small * lags))
    sqrt_k = math.sqrt(dc.k)

    def draw(rng: np.random.Generator, n: int) -> NDArray[np.float64]:
        if same_noise:
            return np.repeat(rng.normal(0.0, math.sqrt(variance), (n, 1)), 3, axis=1)
        return rng.multivariate_normal(np.zeros(3), cov, size=n, method="eigh", check_valid="ignore")

    def kernel(rng: np.random.Generator, n: int) -> NDArray[np.complex128]:
        w_r = draw(rng, n)
        w_i = draw(rng, n)
        y = (launch[None, :] + sqrt_k * w_r) ** 2 + dc.k * w_i**2
        return (t_s * ((y[:, 1] + y[:, 2]) / 2.0 - y[:, 0])).astype(np.complex128)

    return (engine or MonteCarloEngine()).run(kernel, trials, seed)


@dataclass(frozen=True)
class FskDemo:
    """Output pulses of intensity-modulated PAM through the noise-free nonlinear channel.

    Attributes:
        symbols: Real symbol amplitudes x_k.
        complex_gram: Complex inner products ⟨u_i, u_k⟩.
        real_gram: Real (Euclidean) inner products Re⟨u_i, u_k⟩.
        d_min: Minimum Euclidean distance between pulses.
        union_bound_pe: (M-1)·Q(d_min/√(2N₀)).
        energy: Average symbol energy (28M²-1)Δ²/3.
        rate: log₂M / T_s in bits/s.
    """

    symbols: NDArray[np.float64]
    complex_gram: NDArray[np.complex128]
    real_gram: NDArray[np.float64]
    d_min: float
    union_bound_pe: float
    energy: float
    rate: float


def fsk_demo(
    m: int, delta: float = 0.5, t_s: float = 1.0, n0: float = 1.0, gamma: float | None = None
) -> FskDemo:
    """Gram matrices, minimum distance and union bound of the ASK-to-FSK conversion.

    Symbols are x = (2i-1)Δ for i = M+1..2M. Each output pulse is
    x·√(a·s)·exp(j2πh·x²·s) on s = t - T_s + 1 ∈ [1-T_s, 1) with
    a = 1/(T_s(1-T_s/2)) and h = γ/(2πT_s(1-T_s/2)). The default
    γ = 2π(1-T_s/2) gives hT_s = 1; with Δ = 1/2 and T_s = 1 every
    frequency difference is an integer and the real inner products vanish.

    Raises:
        DomainError: If ``m`` < 2 or ``t_s`` is outside (0, 1].
    """
    if m < 2:
        raise DomainError(f"Need at least 2 symbols, got {m}", name="m", value=m)
    if not 0 < t_s <= 1.0:
        raise DomainError(f"Pulse width must lie in (0, 1], got {t_s}", name="t_s", value=t_s)
    _check_positive(n0, "n0")
    gamma = 2.0 * math.pi * (1.0 - t_s / 2.0) if gamma is None else gamma
    a = 1.0 / (t_s * (1.0 - t_s / 2.0))
    h = gamma / (2.0 * math.pi * t_s * (1.0 - t_s / 2.0))
    symbols = (2.0 * np.arange(m + 1, 2 * m + 1) - 1.0) * delta
    lower, upper = 1.0 - t_s, 1.0

    gram = np.empty((m, m), dtype=np.complex128)
    for i, xi in enumerate(symbols):
        for k, xk in enumerate(symbols):
            omega = 2.0 * math.pi * h * (xi * xi - xk * xk)
            if omega == 0.0:
                re, im = integrate.quad(lambda s: a * s, lower, upper)[0], 0.0
            else:
                re = integrate.quad(lambda s: a * s, lower, upper, weight="cos", wvar=omega)[0]
                im = integrate.quad(lambda s: a * s, lower, upper, weight="sin", wvar=omega)[0]
            gram[i, k] = xi * xk * complex(re, im)

    real_gram = gram.real.copy()
    diag = np.diag(real_gram)
    distances = np.sqrt(np.maximum(diag[:, None] + diag[None, :] - 2.0 * real_gram, 0.0))
    d_min = float(np.min(distances[~np.eye(m, dtype=bool)]))
    union = float((m - 1) * stats.norm.sf(d_min / math.sqrt(2.0 * n0)))
    energy = (28.0 * m * m - 1.0) * delta * delta / 3.0
    return FskDemo(
        symbols=symbols,
        complex_gram=gram,
        real_gram=real_gram,
        d_min=d_min,
        union_bound_pe=union,
        energy=energy,
        rate=math.log2(m) / t_s,
    )


def fsk_rate(p: ArrayLike, n0: float, t_s: float, target_pe: float) -> float | NDArray[np.float64]:
    """Achievable FSK rate [(6/28)·P·T_s/N₀ + ln P̃_e]·log₂e / T_s in bits/s.

    Raises:
        DomainError: If ``target_pe`` is outside (0, 1).
    """
    if not 0 < target_pe < 1:
        raise DomainError(
            f"Target error probability must lie in (0, 1), got {target_pe}", name="target_pe", value=target_pe
        )
    _check_positive(n0, "n0")
    _check_positive(t_s, "t_s")
    out = (6.0 / 28.0 * np.asarray(p, dtype=np.float64) * t_s / n0 + math.log(target_pe)) * math.log2(math.e) / t_s
    return float(out) if out.ndim == 0 else out
