"""Closed-form autocorrelation functions of the dispersion-free channel.

All functions take launch samples u0 = u₀(t) and u0p = u₀(t') in √W and the
noise correlation coefficient ρ = sinc(B(t - t')), and return watts.

The exact form evaluates S and T at c = -jγ(K/2)√(1-ρ²) and uses the ratios
a_s = S_I/√(1-ρ²) and a_t = T_I/√(1-ρ²), which stay finite as |ρ| → 1:

    A = |S|²·[T_R·K·ρ + (S_R u0 + j a_s (u0 - ρ u0p))·(S_R u0p + j a_s (u0p - ρ u0))*]
        · exp(jγT_R(|u0|² - |u0p|²)) · exp(-γ a_t (|u0|² + |u0p|² - 2ρ Re(u0 u0p*)))

The low-noise form replaces S and T by their leading terms and uses
κ = (2/3)γ²Kz³.
"""

from collections.abc import Callable
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .exceptions import DomainError
from .params import DerivedConstants, _check_rho, delta_of_rho, mixing_ratios, rho
from .special_functions import bessel_i0e_i1e, eval_hyperbolic

LaunchFn = Callable[[NDArray[np.float64]], ArrayLike]


class AcfRegime(str, Enum):
    """Which formula produced an autocorrelation value."""

    EXACT = "exact"
    APPROX = "approx"
    LIMIT_RHO1 = "limit_rho1"

    @classmethod
    def is_closed_form(cls, regime: "AcfRegime") -> bool:
        """Check if the value comes from the exact expression (including its |ρ| → 1 limit)."""
        return regime in (cls.EXACT, cls.LIMIT_RHO1)


class AmplitudeBoundVariant(str, Enum):
    """Envelope used by :func:`acf_amplitude_bound`.

    DOMINANT keeps only the larger launch power in the exponent. OFFSET shifts
    both amplitudes by δ(c) and keeps the mean of the two powers.
    """

    DOMINANT = "dominant"
    OFFSET = "offset"


class AcfMode(str, Enum):
    """Exact or low-noise evaluation for grid and pulse helpers."""

    EXACT = "exact"
    APPROX = "approx"


@dataclass(frozen=True)
class AcfValue:
    """An autocorrelation value A(t, t') in W, tagged with its regime."""

    value: complex
    regime: AcfRegime


@dataclass(frozen=True)
class AcfGrid:
    """Autocorrelation values on a (t, t') grid; ``values[i, j]`` is A(t_i, t'_j)."""

    t_axis: NDArray[np.float64]
    tp_axis: NDArray[np.float64]
    values: NDArray[np.complex128]

    def is_hermitian(self, rtol: float = 1e-12) -> bool:
        """Check A(t, t') = A(t', t)*; False when the axes differ."""
        if self.t_axis.shape != self.tp_axis.shape or not np.array_equal(self.t_axis, self.tp_axis):
            return False
        scale = max(float(np.max(np.abs(self.values))), np.finfo(np.float64).tiny)
        return bool(np.max(np.abs(self.values - self.values.conj().T)) <= rtol * scale)

    def abs_db(self) -> NDArray[np.float64]:
        """10·log₁₀|A| per grid point."""
        with np.errstate(divide="ignore"):
            return 10.0 * np.log10(np.abs(self.values))


def _broadcast(u0: ArrayLike, u0p: ArrayLike, rho_value: ArrayLike):
    a, b, r = np.broadcast_arrays(
        np.asarray(u0, dtype=np.complex128), np.asarray(u0p, dtype=np.complex128), _check_rho(rho_value)
    )
    return a, b, r


def _mixing_power(u0: NDArray[np.complex128], u0p: NDArray[np.complex128], r: NDArray[np.float64]):
    """|u0|² + |u0p|² - 2ρ·Re(u0·u0p*), never negative for |ρ| ≤ 1."""
    m = np.abs(u0) ** 2 + np.abs(u0p) ** 2 - 2.0 * r * (u0 * np.conj(u0p)).real
    return np.maximum(m, 0.0)


def acf_exact_array(
    u0: ArrayLike, u0p: ArrayLike, rho_value: ArrayLike, dc: DerivedConstants
) -> NDArray[np.complex128]:
    """Exact conditional autocorrelation, broadcast over arrays of (u0, u0p, ρ).

    Raises:
        DomainError: If any |ρ| > 1.
    """
    a, b, r = _broadcast(u0, u0p, rho_value)
    shape = a.shape
    a, b, r = a.ravel(), b.ravel(), r.ravel()
    mr = mixing_ratios(dc, r)
    gamma = dc.params.gamma
    s_r, t_r = mr.s.real, mr.t.real

    first = s_r * a + 1j * mr.a_s * (a - r * b)
    second = s_r * b + 1j * mr.a_s * (b - r * a)
    bracket = t_r * dc.k * r + first * np.conj(second)
    spm = np.exp(1j * gamma * t_r * (np.abs(a) ** 2 - np.abs(b) ** 2))
    mixing = np.exp(-gamma * mr.a_t * _mixing_power(a, b, r))
    return (np.abs(mr.s) ** 2 * bracket * spm * mixing).reshape(shape)


def acf_exact(u0: complex, u0p: complex, rho_value: float, dc: DerivedConstants) -> AcfValue:
    """Exact conditional autocorrelation E[U(z,t)U(z,t')* | u0, u0p].

    For 1 - ρ² below 1e-8 the mixing ratios take their |ρ| → 1 limits and
    the value is tagged LIMIT_RHO1.

    Args:
        u0: Launch sample at t.
        u0p: Launch sample at t'.
        rho_value: Noise correlation coefficient.
        dc: Derived constants.

    Returns:
        The AcfValue.

    Raises:
        DomainError: If |ρ| > 1.

    Example:
        >>> dc = derive_constants(FiberParams.table())
        >>> round(acf_exact(0.3, 0.3, 1.0, dc).value.real, 6)  # Kz + |u0|²
        0.090007
    """
    value = complex(acf_exact_array(u0, u0p, rho_value, dc))
    limit = bool(mixing_ratios(dc, rho_value).limit[0])
    return AcfValue(value=value, regime=AcfRegime.LIMIT_RHO1 if limit else AcfRegime.EXACT)


def acf_approx_array(
    u0: ArrayLike, u0p: ArrayLike, rho_value: ArrayLike, dc: DerivedConstants
) -> NDArray[np.complex128]:
    """Low-noise autocorrelation, broadcast over arrays of (u0, u0p, ρ)."""
    a, b, r = _broadcast(u0, u0p, rho_value)
    p = dc.params
    power_diff = np.abs(a) ** 2 - np.abs(b) ** 2
    base = dc.k * r * p.z + a * np.conj(b) + 1j * p.gamma * dc.k * r * (p.z**2 / 2.0) * power_diff
    return base * np.exp(1j * p.gamma * p.z * power_diff) * np.exp(-dc.kappa / 2.0 * _mixing_power(a, b, r))


def acf_approx(u0: complex, u0p: complex, rho_value: float, dc: DerivedConstants) -> AcfValue:
    """Low-noise autocorrelation, accurate when √(γKz²) ≪ 1.

    Raises:
        DomainError: If |ρ| > 1.
    """
    return AcfValue(value=complex(acf_approx_array(u0, u0p, rho_value, dc)), regime=AcfRegime.APPROX)


def _evaluate(mode: AcfMode, u0: ArrayLike, u0p: ArrayLike, rho_value: ArrayLike, dc: DerivedConstants):
    if mode is AcfMode.EXACT:
        return acf_exact_array(u0, u0p, rho_value, dc)
    return acf_approx_array(u0, u0p, rho_value, dc)


def _rect_launch(p: float, t_s: float) -> LaunchFn:
    amplitude = np.sqrt(p)

    def launch(t: NDArray[np.float64]) -> NDArray[np.float64]:
        return np.where(np.abs(t) <= t_s / 2.0, amplitude, 0.0)

    return launch


def acf_rect_isolated(
    t: float,
    tp: float,
    p: float,
    t_s: float,
    dc: DerivedConstants,
    rho_value: float | None = None,
    mode: AcfMode = AcfMode.EXACT,
) -> AcfValue:
    """Autocorrelation for an isolated rectangular pulse of power P on |t| ≤ T_s/2.

    In APPROX mode the four cases reduce to (Kρz+P)e^(-κP(1-ρ)) inside the
    pulse and Kρz outside it.

    Args:
        t: First time instant in s.
        tp: Second time instant in s.
        p: Pulse power in W.
        t_s: Pulse width in s.
        dc: Derived constants.
        rho_value: Noise correlation; defaults to sinc(B(t - tp)).
        mode: EXACT or APPROX evaluation.

    Raises:
        DomainError: If ``p`` < 0 or ``t_s`` ≤ 0.
    """
    if p < 0:
        raise DomainError(f"Pulse power must be non-negative, got {p}", name="p", value=p)
    if not t_s > 0:
        raise DomainError(f"Pulse width must be positive, got {t_s}", name="t_s", value=t_s)
    launch = _rect_launch(p, t_s)
    r = rho(t - tp, dc.params.b) if rho_value is None else rho_value
    value = complex(_evaluate(mode, launch(np.asarray(t)), launch(np.asarray(tp)), r, dc))
    if mode is AcfMode.APPROX:
        return AcfValue(value=value, regime=AcfRegime.APPROX)
    limit = bool(mixing_ratios(dc, r).limit[0])
    return AcfValue(value=value, regime=AcfRegime.LIMIT_RHO1 if limit else AcfRegime.EXACT)


def acf_grid(
    launch: LaunchFn,
    t_axis: ArrayLike,
    tp_axis: ArrayLike,
    dc: DerivedConstants,
    mode: AcfMode = AcfMode.EXACT,
) -> AcfGrid:
    """Evaluate A(t, t') on the outer product of two time axes.

    Args:
        launch: Vectorised launch signal, seconds -> √W.
        t_axis: Times t in s.
        tp_axis: Times t' in s.
        dc: Derived constants.
        mode: EXACT or APPROX evaluation.
    """
    t_arr = np.asarray(t_axis, dtype=np.float64)
    tp_arr = np.asarray(tp_axis, dtype=np.float64)
    u0 = np.asarray(launch(t_arr), dtype=np.complex128)
    u0p = np.asarray(launch(tp_arr), dtype=np.complex128)
    r = rho(t_arr[:, None] - tp_arr[None, :], dc.params.b)
    values = _evaluate(mode, u0[:, None], u0p[None, :], r, dc)
    return AcfGrid(t_axis=t_arr, tp_axis=tp_arr, values=np.asarray(values, dtype=np.complex128))


def acf_grid_rect(
    t_axis: ArrayLike,
    tp_axis: ArrayLike,
    p: float,
    t_s: float,
    dc: DerivedConstants,
    mode: AcfMode = AcfMode.EXACT,
) -> AcfGrid:
    """:func:`acf_grid` for an isolated rectangular pulse of power P and width T_s."""
    if p < 0:
        raise DomainError(f"Pulse power must be non-negative, got {p}", name="p", value=p)
    return acf_grid(_rect_launch(p, t_s), t_axis, tp_axis, dc, mode)


def _ring_same(p: float, r: NDArray[np.float64], dc: DerivedConstants) -> NDArray[np.float64]:
    return (dc.k * r * dc.params.z + p) * np.exp(-dc.kappa * p * (1.0 - r))


def _ring_other(p: float, r: NDArray[np.float64], dc: DerivedConstants) -> NDArray[np.float64]:
    # I_n(κPρ)e^(-κP) = I_ne(|κPρ|)·e^(κP(|ρ|-1)); I₁ is odd.
    y = dc.kappa * p * np.abs(r)
    i0e, i1e = bessel_i0e_i1e(y)
    scale = np.exp(dc.kappa * p * (np.abs(r) - 1.0))
    return dc.k * r * dc.params.z * i0e * scale + p * np.sign(r) * i1e * scale


def acf_ring(same_symbol: bool, p: float, rho_value: float, dc: DerivedConstants) -> AcfValue:
    """Phase-averaged autocorrelation for ring modulation with uniform phases.

    Within one symbol the phases agree and A = (Kρz+P)e^(-κP(1-ρ)); across
    symbols they are independent and A = e^(-κP)[Kρz·I₀(κPρ) + P·I₁(κPρ)].

    Raises:
        DomainError: If ``p`` < 0 or |ρ| > 1.
    """
    if p < 0:
        raise DomainError(f"Ring power must be non-negative, got {p}", name="p", value=p)
    r = np.atleast_1d(_check_rho(rho_value))
    value = _ring_same(p, r, dc) if same_symbol else _ring_other(p, r, dc)
    return AcfValue(value=complex(value[0]), regime=AcfRegime.APPROX)


def acf_ring_time_avg(tau: ArrayLike, p: float, t_s: float, dc: DerivedConstants) -> float | NDArray[np.float64]:
    """Time-averaged ring-PAM autocorrelation Ā(τ), real and even in τ.

    For |τ| < T_s the two branches are mixed with weights 1 - |τ|/T_s and
    |τ|/T_s; beyond T_s only the cross-symbol branch remains. Ā(0) = Kz + P.

    Raises:
        DomainError: If ``p`` < 0 or ``t_s`` ≤ 0.
    """
    if p < 0:
        raise DomainError(f"Ring power must be non-negative, got {p}", name="p", value=p)
    if not t_s > 0:
        raise DomainError(f"Symbol period must be positive, got {t_s}", name="t_s", value=t_s)
    tau_arr = np.abs(np.asarray(tau, dtype=np.float64))
    r = np.asarray(rho(tau_arr, dc.params.b))
    weight = np.clip(tau_arr / t_s, 0.0, 1.0)
    out = (1.0 - weight) * _ring_same(p, r, dc) + weight * _ring_other(p, r, dc)
    return float(out) if out.ndim == 0 else out


def ring_tail_coefficient(p: float, dc: DerivedConstants) -> float:
    """Coefficient α of the slowly decaying α·ρ(τ) part of Ā(τ) beyond T_s.

    For small ρ, e^(-κP)[Kρz·I₀(κPρ) + P·I₁(κPρ)] ≈ e^(-κP)(Kz + κP²/2)·ρ.
    """
    return float(np.exp(-dc.kappa * p) * (dc.kz + dc.kappa * p * p / 2.0))


def acf_constant_envelope(p: float, phase_delta: float, rho_value: float, dc: DerivedConstants) -> AcfValue:
    """Exact autocorrelation for |u0|² = |u0p|² = P with phase difference φ(t) - φ(t').

    Raises:
        DomainError: If ``p`` < 0 or |ρ| > 1.
    """
    if p < 0:
        raise DomainError(f"Envelope power must be non-negative, got {p}", name="p", value=p)
    mr = mixing_ratios(dc, rho_value)
    r = float(_check_rho(rho_value))
    s_r, a_s, a_t = mr.s.real[0], mr.a_s[0], mr.a_t[0]
    rotation = np.exp(1j * phase_delta)
    signal = p * rotation * (s_r**2 + a_s**2 * (1.0 - r * np.conj(rotation)) ** 2)
    bracket = mr.t.real[0] * dc.k * r + signal
    mixing = np.exp(-dc.params.gamma * a_t * 2.0 * p * (1.0 - r * np.cos(phase_delta)))
    value = complex(abs(mr.s[0]) ** 2 * bracket * mixing)
    return AcfValue(value=value, regime=AcfRegime.LIMIT_RHO1 if mr.limit[0] else AcfRegime.EXACT)


def mixing_exponent(u0: ArrayLike, u0p: ArrayLike, rho_value: ArrayLike, dc: DerivedConstants):
    """Signal-noise mixing exponent -γ·a_t·(|u0|² + |u0p|² - 2ρRe(u0u0p*)).

    Real and non-positive; zero at t = t' (ρ = 1, u0 = u0p).
    """
    a, b, r = _broadcast(u0, u0p, rho_value)
    mr = mixing_ratios(dc, r.ravel())
    out = (-dc.params.gamma * mr.a_t * _mixing_power(a.ravel(), b.ravel(), r.ravel())).reshape(a.shape)
    return float(out) if out.ndim == 0 else out


def acf_amplitude_bound(
    u0: complex,
    u0p: complex,
    rho_value: float,
    dc: DerivedConstants,
    variant: AmplitudeBoundVariant = AmplitudeBoundVariant.OFFSET,
) -> float:
    """Upper bound on |A(t, t')|.

    DOMINANT: [Kz + |u0|²(1+γKz²)²]·exp(-γT_I√(1-ρ²)|u0|²) with |u0| ≥ |u0p|;
    the samples are swapped here when needed.

    OFFSET: |S|²[Kz + (|u0|+δ(c))(|u0p|+δ(c))]·exp(-γT_I√(1-ρ²)(|u0|²+|u0p|²)/2).

    Raises:
        DomainError: If |ρ| > 1.
    """
    mr = mixing_ratios(dc, rho_value)
    t_i_r = mr.t.imag[0] * mr.r[0]
    gamma = dc.params.gamma
    big, small = sorted((abs(u0), abs(u0p)), reverse=True)
    if variant is AmplitudeBoundVariant.DOMINANT:
        return float((dc.kz + big**2 * (1.0 + dc.gkz2) ** 2) * np.exp(-gamma * t_i_r * big**2))
    delta_c = float(delta_of_rho(dc, float(rho_value)))
    envelope = dc.kz + (big + delta_c) * (small + delta_c)
    return float(abs(mr.s[0]) ** 2 * envelope * np.exp(-gamma * t_i_r * (big**2 + small**2) / 2.0))


def first_moment_factor(u0: complex, dc: DerivedConstants) -> complex:
    """E₁(c)·S(c)² with c = -jγK/2 and E₁ = exp(jγ|u0|²T(c)), so that E[U] = u0·E₁S²."""
    p = dc.params
    pair = eval_hyperbolic(complex(0.0, -p.gamma * dc.k / 2.0), p.z)
    return complex(np.exp(1j * p.gamma * abs(u0) ** 2 * pair.t) * pair.s**2)


def acf_infinite_bandwidth(u0: complex, u0p: complex, t_equal: bool, dc: DerivedConstants) -> AcfValue:
    """Autocorrelation when B → ∞ at fixed K; distinct instants are independent.

    Returns Kz + |u0|² at t = t' and v(t)·v(t')* with v = u0·E₁(c)S(c)² otherwise.
    """
    if t_equal:
        return AcfValue(value=complex(dc.kz + abs(u0) ** 2), regime=AcfRegime.LIMIT_RHO1)
    v = u0 * first_moment_factor(u0, dc)
    vp = u0p * first_moment_factor(u0p, dc)
    return AcfValue(value=complex(v * np.conj(vp)), regime=AcfRegime.EXACT)
