"""Received-power, energy and bandwidth bounds.

The instantaneous bounds limit the power a receiver of bandwidth W can
collect around one time instant with launch power P_t. They come in three
regimes selected by W/B and x = γ(K/2)z². The average bounds are concave in
P and feed the propagating-bandwidth bound W/B and the power threshold beyond
which W must exceed B.

All powers are in W, energies in J and bandwidths in Hz.
"""

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import integrate, optimize

from ._logger import create_logger
from .autocorrelation import acf_amplitude_bound, acf_exact_array
from .exceptions import DomainError, RootBracketError, UnsupportedRegimeError
from .params import DerivedConstants, derive_constants, mixing_ratios, rho
from .special_functions import erf_ratio
from .spectrum import triangle_filter_time

THRESHOLD_BRACKET = (1e-3, 1e4)
DOMINANCE_POINTS_PER_INVERSE_B = 32
DOMINANCE_SPAN_INVERSE_W = 64.0

_logger = create_logger()


class RegimeTag(str, Enum):
    """Which instantaneous-power lemma applies."""

    LEMMA1 = "lemma1"
    LEMMA2 = "lemma2"
    LEMMA3 = "lemma3"
    UNSUPPORTED = "unsupported"

    @classmethod
    def is_supported(cls, tag: "RegimeTag") -> bool:
        """Check if a bound exists for the tag."""
        return tag is not cls.UNSUPPORTED


@dataclass(frozen=True)
class BoundRegime:
    """Receiver bandwidth and noise-nonlinearity product with the lemma they select.

    Attributes:
        w: Receiver bandwidth.
        b: Amplifier bandwidth.
        gkz2_half: x = γ(K/2)z².
        tag: The primary lemma.
        alternatives: Every lemma whose conditions hold; more than one on a boundary.
    """

    w: float
    b: float
    gkz2_half: float
    tag: RegimeTag
    alternatives: tuple[RegimeTag, ...] = ()

    @classmethod
    def classify(cls, w: float, dc: DerivedConstants) -> "BoundRegime":
        """Select the regime for receiver bandwidth ``w``.

        Raises:
            DomainError: If ``w`` is not positive.
        """
        if not w > 0:
            raise DomainError(f"Receiver bandwidth must be positive, got {w}", name="w", value=w)
        b, x = dc.params.b, dc.gkz2_half
        matches = []
        if w <= b and x <= 1.0:
            matches.append(RegimeTag.LEMMA1)
        if w <= b and x >= 1.0:
            matches.append(RegimeTag.LEMMA2)
        if w >= b and x <= 1.0:
            matches.append(RegimeTag.LEMMA3)
        tag = matches[0] if matches else RegimeTag.UNSUPPORTED
        return cls(w=w, b=b, gkz2_half=x, tag=tag, alternatives=tuple(matches))

    @property
    def w_over_b(self) -> float:
        """W/B."""
        return self.w / self.b


@dataclass(frozen=True)
class BoundReport:
    """A bound with its addends.

    ``components`` holds ``term_erf``, ``term_tail1`` and ``term_tail2``, which
    sum to ``bound``. On a regime boundary ``alternative_bounds`` maps every
    applicable tag to its value.
    """

    p: float
    bound: float
    regime: BoundRegime
    components: dict[str, float]
    alternative_bounds: dict[RegimeTag, float] = field(default_factory=dict)


def f_special(s: float, p: ArrayLike, a: float, b_coef: float, c_coef: float = 1.0) -> float | NDArray[np.float64]:
    """(a + b_coef·√p + c_coef·p)·(√π/2)·erf(√(sp))/√(sp).

    The value at p = 0 is a. With P_o = 3a/c_coef, p ↦ f(s, p + P_o) is
    non-decreasing and concave on p ≥ 0.

    Raises:
        DomainError: If ``s`` ≤ 0 or any ``p`` < 0.
    """
    if not s > 0:
        raise DomainError(f"Rate s must be positive, got {s}", name="s", value=s)
    arr = np.asarray(p, dtype=np.float64)
    if np.any(arr < 0):
        raise DomainError("Power must be non-negative", name="p", value=p)
    out = (a + b_coef * np.sqrt(arr) + c_coef * arr) * np.asarray(erf_ratio(np.sqrt(s * arr)))
    return float(out) if out.ndim == 0 else out


def _f(dc: DerivedConstants, s: float, p: float) -> float:
    """The bound function f(s, P) = [Kz + (√P + δ)²]·erf_ratio(√(sP))."""
    return float(f_special(s, p, dc.kz + dc.delta**2, 2.0 * dc.delta, 1.0))


def _check_power(p: float, name: str = "p") -> None:
    if not (math.isfinite(p) and p >= 0):
        raise DomainError(f"Power must be finite and non-negative, got {p}", name=name, value=p)


def _inst_terms(p_t: float, tag: RegimeTag, w_over_b: float, dc: DerivedConstants) -> dict[str, float]:
    pre = 4.0 * (dc.kz + (math.sqrt(p_t) + dc.delta) ** 2)
    y1 = math.sqrt(dc.kappa * p_t / 8.0)
    tail = 5.0 * math.exp(-dc.sqrt_gkz2 - dc.kappa / 9.0 * p_t)

    if tag is RegimeTag.LEMMA1:
        return {
            "term_erf": pre * 2.0 * w_over_b * float(erf_ratio(y1)),
            "term_tail1": pre * tail,
            "term_tail2": 0.0,
        }
    if tag is RegimeTag.LEMMA2:
        y2 = math.sqrt(p_t / (3.0 * dc.kz))
        gamma_over_k = dc.params.gamma / (20.0 * dc.k)
        return {
            "term_erf": pre * 2.0 * w_over_b * (2.0 / dc.gkz2) * float(erf_ratio(y2)),
            "term_tail1": pre * 25.0 * w_over_b / dc.gkz2 * math.exp(-p_t / (math.sqrt(18.0) * dc.kz)),
            "term_tail2": pre * 5.0 * math.exp(-dc.sqrt_gkz2 - math.sqrt(gamma_over_k) * p_t),
        }
    if tag is RegimeTag.LEMMA3:
        b_over_w = 1.0 / w_over_b
        return {
            "term_erf": pre * 2.0 * float(erf_ratio(y1 * b_over_w)),
            "term_tail1": pre * 0.25 * (1.0 - b_over_w) * math.exp(-dc.kappa / 8.0 * p_t * b_over_w**2),
            "term_tail2": pre * tail,
        }
    raise UnsupportedRegimeError("No received-power bound for W > B with gamma*(K/2)*z^2 > 1", regime=tag)


def inst_power_bound(p_t: float, regime: BoundRegime, dc: DerivedConstants) -> BoundReport:
    """Bound on the power collected by a bandwidth-W receiver at launch power P_t.

    Args:
        p_t: Launch power at the sampling instant.
        regime: Output of :meth:`BoundRegime.classify`.
        dc: Derived constants.

    Returns:
        The BoundReport; ``alternative_bounds`` is filled on regime boundaries.

    Raises:
        UnsupportedRegimeError: For W > B with γ(K/2)z² > 1.
        DomainError: If ``p_t`` is negative.

    Example:
        >>> dc = derive_constants(FiberParams.table())
        >>> report = inst_power_bound(0.1, BoundRegime.classify(dc.params.b, dc), dc)
        >>> report.regime.tag
        <RegimeTag.LEMMA1: 'lemma1'>
    """
    _check_power(p_t, "p_t")
    if not RegimeTag.is_supported(regime.tag):
        raise UnsupportedRegimeError(
            f"No received-power bound for W/B={regime.w_over_b:g} with gamma*(K/2)*z^2={regime.gkz2_half:g}",
            regime=regime,
        )
    components = _inst_terms(p_t, regime.tag, regime.w_over_b, dc)
    alternatives: dict[RegimeTag, float] = {}
    if len(regime.alternatives) > 1:
        for tag in regime.alternatives:
            alternatives[tag] = math.fsum(_inst_terms(p_t, tag, regime.w_over_b, dc).values())
    return BoundReport(
        p=p_t,
        bound=math.fsum(components.values()),
        regime=regime,
        components=components,
        alternative_bounds=alternatives,
    )


def _tau_grid(w: float, b: float) -> NDArray[np.float64]:
    step = 1.0 / (DOMINANCE_POINTS_PER_INVERSE_B * max(w, b))
    tau_max = DOMINANCE_SPAN_INVERSE_W / min(w, b)
    return np.linspace(0.0, tau_max, int(math.ceil(tau_max / step)) + 1)


def _tail_weight(w: float, tau_max: float) -> float:
    """Upper bound on ∫_{τmax}^∞ |b(τ)| dτ, from |b| ≤ 2/(π²Wτ²)."""
    return 2.0 / (math.pi**2 * w * tau_max)


def _tail_rho(b: float, tau_max: float) -> NDArray[np.float64]:
    """End points of the |ρ| range beyond τmax, from |sinc(x)| ≤ 1/(π|x|)."""
    return np.array([min(1.0, 1.0 / (math.pi * b * tau_max)), 0.0])


def lemma_integrand_power(p_t: float, w: float, dc: DerivedConstants) -> float:
    """2[Kz + (√P_t+δ)²]·∫₀^∞ |S|²·exp(-γT_I√(1-ρ²)P_t/2)·|b(τ)| dτ.

    This is the quantity the instantaneous bounds limit. The integral is a
    trapezoid sum out to 64/min(W, B) plus the largest envelope over the
    remaining |ρ| range times the filter tail weight.
    """
    _check_power(p_t, "p_t")
    tau = _tau_grid(w, dc.params.b)
    mr = mixing_ratios(dc, rho(tau, dc.params.b))
    envelope = np.abs(mr.s) ** 2 * np.exp(-dc.params.gamma * mr.t.imag * mr.r * p_t / 2.0)
    integral = float(integrate.trapezoid(envelope * np.abs(triangle_filter_time(tau, w)), tau))
    edge = mixing_ratios(dc, _tail_rho(dc.params.b, float(tau[-1])))
    edge_envelope = np.abs(edge.s) ** 2 * np.exp(-dc.params.gamma * edge.t.imag * edge.r * p_t / 2.0)
    integral += float(np.max(edge_envelope)) * _tail_weight(w, float(tau[-1]))
    return 2.0 * (dc.kz + (math.sqrt(p_t) + dc.delta) ** 2) * integral


def _avg_tag(w: float, dc: DerivedConstants) -> RegimeTag:
    if w > dc.params.b:
        raise UnsupportedRegimeError(
            f"Average-power bounds need W <= B, got W/B={w / dc.params.b:g}", regime=RegimeTag.LEMMA3
        )
    return RegimeTag.LEMMA1 if dc.gkz2_half <= 1.0 else RegimeTag.LEMMA2


def avg_power_bound(
    p: float, w: float, dc: DerivedConstants, regime: BoundRegime | None = None, *, tail_attenuation: bool = False
) -> BoundReport:
    """Bound on the average received power in bandwidth W ≤ B at average launch power P.

    For γ(K/2)z² ≤ 1: c₁ + (8W/B)·f(κ/8, P + P_o).
    Otherwise: (W/B)c₂ + c₃ + 16(W/B)/(γKz²)·f(1/(3Kz), P + P_o).

    Args:
        p: Average launch power.
        w: Receiver bandwidth.
        dc: Derived constants.
        regime: Pre-classified regime; computed from ``w`` when omitted.
        tail_attenuation: Include e^(-√(γKz²)) in c₁ and c₃ (tighter; off by default).

    Raises:
        UnsupportedRegimeError: If W > B.
        DomainError: If ``p`` is negative.
    """
    _check_power(p)
    regime = regime or BoundRegime.classify(w, dc)
    tag = _avg_tag(regime.w, dc)
    ratio = regime.w / dc.params.b
    p_shift = p + dc.p_o
    if tag is RegimeTag.LEMMA1:
        components = {
            "term_erf": 8.0 * ratio * _f(dc, dc.kappa / 8.0, p_shift),
            "term_tail1": dc.c1_for(tail_attenuation),
            "term_tail2": 0.0,
        }
    else:
        components = {
            "term_erf": 16.0 * ratio / dc.gkz2 * _f(dc, 1.0 / (3.0 * dc.kz), p_shift),
            "term_tail1": ratio * dc.c2,
            "term_tail2": dc.c3_for(tail_attenuation),
        }
    return BoundReport(p=p, bound=math.fsum(components.values()), regime=regime, components=components)


class BandwidthVariant(str, Enum):
    """EXACT keeps the erf; ERF_LE_1 replaces it by one."""

    EXACT = "exact"
    ERF_LE_1 = "erf_le_1"


@dataclass(frozen=True)
class BandwidthBound:
    """Lower bound on W/B needed to keep a fraction q of Kz+P in band.

    ``ratio`` is ``raw_ratio`` clamped at zero.
    """

    ratio: float
    raw_ratio: float
    variant: BandwidthVariant

    @property
    def vacuous(self) -> bool:
        """True when the bound says nothing (raw ratio ≤ 0)."""
        return self.raw_ratio <= 0.0

    @property
    def clamped(self) -> bool:
        """True when the raw ratio was negative and clamped."""
        return self.raw_ratio < 0.0


def bandwidth_lower_bound(
    p: float,
    dc: DerivedConstants,
    q: float = 0.99,
    variant: BandwidthVariant = BandwidthVariant.EXACT,
    *,
    tail_attenuation: bool = False,
) -> BandwidthBound:
    """Smallest W/B compatible with q·(Kz+P) of the power falling in |f| ≤ W/2.

    Raises:
        DomainError: If ``q`` is outside (0.5, 1) or ``p`` is negative.
    """
    _check_power(p)
    if not 0.5 < q < 1.0:
        raise DomainError(f"Fraction q must lie in (0.5, 1), got {q}", name="q", value=q)
    p_shift = p + dc.p_o
    target = q * (dc.kz + p)
    envelope = dc.kz + (math.sqrt(p_shift) + dc.delta) ** 2

    if dc.gkz2_half <= 1.0:
        numerator = target - dc.c1_for(tail_attenuation)
        if variant is BandwidthVariant.EXACT:
            raw = numerator / (8.0 * _f(dc, dc.kappa / 8.0, p_shift))
        else:
            raw = numerator * math.sqrt(dc.kappa / 8.0 * p_shift) / (8.0 * envelope)
    else:
        numerator = target - dc.c3_for(tail_attenuation)
        if variant is BandwidthVariant.EXACT:
            raw = numerator / (dc.c2 + 16.0 / dc.gkz2 * _f(dc, 1.0 / (3.0 * dc.kz), p_shift))
        else:
            root = math.sqrt(p_shift)
            raw = numerator * root / (dc.c2 * root + math.sqrt(512.0 / dc.kappa) * envelope)
    return BandwidthBound(ratio=max(raw, 0.0), raw_ratio=raw, variant=variant)


def _bracketed_root(fn, lower: float, upper: float, what: str) -> float:
    f_lower, f_upper = fn(lower), fn(upper)
    if not (np.isfinite(f_lower) and np.isfinite(f_upper)) or f_lower * f_upper > 0:
        raise RootBracketError(
            f"No sign change for the {what} on [{lower:g}, {upper:g}] W",
            lower=lower,
            upper=upper,
            f_lower=f_lower,
            f_upper=f_upper,
        )
    return float(optimize.brentq(fn, lower, upper, rtol=1e-10, xtol=1e-12))


def power_threshold(
    dc: DerivedConstants,
    q: float = 0.99,
    *,
    tail_attenuation: bool = False,
    variant: BandwidthVariant = BandwidthVariant.EXACT,
    bracket: tuple[float, float] = THRESHOLD_BRACKET,
) -> float:
    """Launch power at which the bandwidth bound reaches W = B.

    Raises:
        RootBracketError: If the bound does not cross 1 inside ``bracket``.

    Example:
        >>> round(power_threshold(derive_constants(FiberParams.table())), 1)
        18.7
    """

    def excess(p: float) -> float:
        return bandwidth_lower_bound(p, dc, q, variant, tail_attenuation=tail_attenuation).raw_ratio - 1.0

    threshold = _bracketed_root(excess, *bracket, what="bandwidth ratio")
    _logger.debug("Power threshold %g W (q=%g, tail_attenuation=%s)", threshold, q, tail_attenuation)
    return threshold


def received_power_crossover(
    w: float, dc: DerivedConstants, *, tail_attenuation: bool = False, bracket: tuple[float, float] = THRESHOLD_BRACKET
) -> float:
    """Launch power above which the average bound drops below the linear value Kz + P.

    Raises:
        RootBracketError: If there is no crossing inside ``bracket``.
    """
    regime = BoundRegime.classify(w, dc)

    def gap(p: float) -> float:
        return avg_power_bound(p, w, dc, regime, tail_attenuation=tail_attenuation).bound - (dc.kz + p)

    return _bracketed_root(gap, *bracket, what="received-power crossover")


def expected_scaling_exponents(beta: float) -> tuple[float, float]:
    """Large-P exponents of the received-power bound and the minimum bandwidth when B ∝ P^β.

    (1-3β)/2 and (1+3β)/2 for β ≤ 1; -β and 2β for β ≥ 1.
    """
    if beta < 0:
        raise DomainError(f"beta must be non-negative, got {beta}", name="beta", value=beta)
    if beta <= 1.0:
        return (1.0 - 3.0 * beta) / 2.0, (1.0 + 3.0 * beta) / 2.0
    return -beta, 2.0 * beta


def scaling_exponents(
    beta: float,
    dc_template: DerivedConstants,
    p_grid: ArrayLike,
    q: float = 0.99,
    *,
    p_ref: float | None = None,
    tail_attenuation: bool = True,
) -> tuple[float, float]:
    """Fitted log-log slopes of the received-power bound and W_min with B scaled as P^β.

    B(P) = B₀·(P/P_ref)^β with B₀ the template bandwidth; the receiver
    bandwidth stays at B₀. The asymptotic exponents only show once
    γ(K/2)z² ≫ 1 and, for β ≥ 1, Kz ≫ P over the whole grid. For the
    reference fiber at β = 2 that means P_ref = 1 mW and P from 10 W up.

    Args:
        beta: Bandwidth growth exponent.
        dc_template: Constants whose fiber record supplies B₀ and the other parameters.
        p_grid: Launch powers.
        q: In-band fraction of the bandwidth bound.
        p_ref: Power at which B = B₀; defaults to the first grid power.
        tail_attenuation: Keep e^(-√(γKz²)) in c₁ and c₃. On by default here: the
            flat constants grow with B and would mask the decay.

    Returns:
        (received-power exponent, bandwidth exponent).

    Raises:
        DomainError: If ``beta`` < 0, ``p_ref`` is not positive, or the grid has
            fewer than two positive powers.
    """
    if beta < 0:
        raise DomainError(f"beta must be non-negative, got {beta}", name="beta", value=beta)
    powers = np.asarray(p_grid, dtype=np.float64)
    if powers.size < 2 or np.any(powers <= 0):
        raise DomainError("p_grid needs at least two positive powers", name="p_grid", value=p_grid)
    b_ref = dc_template.params.b
    p_ref = float(powers[0]) if p_ref is None else p_ref
    if not p_ref > 0:
        raise DomainError(f"p_ref must be positive, got {p_ref}", name="p_ref", value=p_ref)
    received, bandwidth = [], []
    for p in powers:
        dc = derive_constants(dc_template.params.with_bandwidth(b_ref * (p / p_ref) ** beta))
        received.append(avg_power_bound(float(p), b_ref, dc, tail_attenuation=tail_attenuation).bound)
        ratio = bandwidth_lower_bound(float(p), dc, q, tail_attenuation=tail_attenuation).ratio
        bandwidth.append(ratio * dc.params.b)
    log_p = np.log(powers)
    with np.errstate(divide="ignore"):
        received_slope = float(np.polyfit(log_p, np.log(received), 1)[0])
        bandwidth_slope = float(np.polyfit(log_p, np.log(bandwidth), 1)[0])
    return received_slope, bandwidth_slope


def energy_bound_time_resolution(p_t: float, t_r: float, dc: DerivedConstants) -> float:
    """Bound on the energy an integrate-and-dump receiver collects over T_r.

    For T_r ≥ 1/B: 4[Kz+(√P_t+δ)²]·[(1/B)·erf_ratio(y) + 5(T_r - 1/B)e^(-√(γKz²) - κP_t/9)];
    otherwise 4[Kz+(√P_t+δ)²]·T_r·erf_ratio(y·B·T_r), with y = √(κP_t/8).

    Raises:
        DomainError: If ``t_r`` is not positive or ``p_t`` is negative.
    """
    _check_power(p_t, "p_t")
    if not t_r > 0:
        raise DomainError(f"Time resolution must be positive, got {t_r}", name="t_r", value=t_r)
    pre = 4.0 * (dc.kz + (math.sqrt(p_t) + dc.delta) ** 2)
    y = math.sqrt(dc.kappa * p_t / 8.0)
    inv_b = 1.0 / dc.params.b
    if t_r >= inv_b:
        tail = 5.0 * (t_r - inv_b) * math.exp(-dc.sqrt_gkz2 - dc.kappa / 9.0 * p_t)
        return pre * (inv_b * float(erf_ratio(y)) + tail)
    return pre * t_r * float(erf_ratio(y * dc.params.b * t_r))


def _pam_shape(y: float) -> float:
    """(√π/y)[erf(y) - (1 - e^(-y²))/(y√π)], with value 1 at y = 0."""
    if y < 1e-2:
        y2 = y * y
        return 1.0 - y2 / 6.0 + y2 * y2 / 30.0 - y2**3 / 168.0
    return 2.0 * float(erf_ratio(y)) - (-math.expm1(-y * y)) / (y * y)


def pam_rect_energy_bound(p: float, dc: DerivedConstants, t_r: float | None = None) -> float:
    """Energy bound for PAM with rectangular pulses, ring modulation and T_r ≤ 1/B.

    [Kz + P(1 + γ²K²z⁴)]·T_r·h(y) with y = √(κP/2)·B·T_r; equals (Kz+P)·T_r when γ = 0.

    Raises:
        UnsupportedRegimeError: If γ(K/2)z² > 1.
        DomainError: If ``t_r`` exceeds 1/B or ``p`` is negative.
    """
    _check_power(p)
    if dc.gkz2_half > 1.0:
        raise UnsupportedRegimeError(
            f"PAM energy bound needs gamma*(K/2)*z^2 <= 1, got {dc.gkz2_half:g}", regime=RegimeTag.LEMMA2
        )
    inv_b = 1.0 / dc.params.b
    t_r = inv_b if t_r is None else t_r
    if not 0 < t_r <= inv_b * (1.0 + 1e-12):
        raise DomainError(f"Time resolution must lie in (0, 1/B], got {t_r}", name="t_r", value=t_r)
    y = math.sqrt(dc.kappa * p / 2.0) * dc.params.b * t_r
    return (dc.kz + p * (1.0 + dc.gkz2**2)) * t_r * _pam_shape(y)


@dataclass(frozen=True)
class DominanceCase:
    """One constant-envelope input for the dominance check."""

    p_t: float
    phase_delta: float
    w: float


def random_constant_envelope_cases(
    n: int, dc: DerivedConstants, tag: RegimeTag, seed: int = 0, p_range: tuple[float, float] = (1e-4, 1e2)
) -> list[DominanceCase]:
    """Random constant-envelope cases with log-uniform P_t and a W inside the regime.

    W is drawn from (0.05B, B] for LEMMA1 and LEMMA2 and from [B, 8B] for LEMMA3.

    Raises:
        UnsupportedRegimeError: If ``dc`` cannot produce the requested regime.
    """
    if not RegimeTag.is_supported(tag):
        raise UnsupportedRegimeError("Cannot draw cases for the unsupported regime", regime=tag)
    wants_large_x = tag is RegimeTag.LEMMA2
    if (dc.gkz2_half >= 1.0) != wants_large_x and dc.gkz2_half != 1.0:
        raise UnsupportedRegimeError(
            f"gamma*(K/2)*z^2={dc.gkz2_half:g} is outside regime {tag.value}", regime=tag
        )
    rng = np.random.default_rng(seed)
    b = dc.params.b
    log_p = rng.uniform(math.log(p_range[0]), math.log(p_range[1]), n)
    phases = rng.uniform(-math.pi, math.pi, n)
    if tag is RegimeTag.LEMMA3:
        widths = rng.uniform(b, 8.0 * b, n)
    else:
        widths = b - rng.uniform(0.0, 0.95 * b, n)
    return [
        DominanceCase(p_t=float(math.exp(lp)), phase_delta=float(ph), w=float(w))
        for lp, ph, w in zip(log_p, phases, widths, strict=True)
    ]


def dominance_margin(case: DominanceCase, dc: DerivedConstants) -> float:
    """Relative margin (bound - filtered power)/bound for one constant-envelope input.

    The filtered power is 2∫|A(τ)|·|b(τ)| dτ over the whole line, with A the
    exact autocorrelation for |u0|² = |u0p|² = P_t and fixed phase difference.
    Beyond the lag grid |A| is replaced by its amplitude bound.
    """
    regime = BoundRegime.classify(case.w, dc)
    bound = inst_power_bound(case.p_t, regime, dc).bound
    tau = _tau_grid(case.w, dc.params.b)
    amplitude = math.sqrt(case.p_t)
    u0 = amplitude * np.exp(1j * case.phase_delta)
    acf = np.abs(acf_exact_array(u0, amplitude, rho(tau, dc.params.b), dc))
    half_line = float(integrate.trapezoid(acf * np.abs(triangle_filter_time(tau, case.w)), tau))
    edge = max(acf_amplitude_bound(u0, amplitude, float(r), dc) for r in _tail_rho(dc.params.b, float(tau[-1])))
    half_line += edge * _tail_weight(case.w, float(tau[-1]))
    return (bound - 4.0 * half_line) / bound
