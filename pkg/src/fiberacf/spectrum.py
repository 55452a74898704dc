"""Power spectral densities, band power and the triangular bounding filter.

A Psd holds three parts:

* ``smooth``: a sampled continuous density on a symmetric frequency grid;
* ``flat_density`` over ``|f| < flat_band/2``: the analytic transform of an
  α·sinc(Bτ) tail removed before quadrature;
* ``dc_line``: the weight of a spectral line at f = 0, from a non-zero
  asymptote of the time-averaged autocorrelation.
"""

import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import integrate

from ._logger import create_logger
from .autocorrelation import acf_exact_array, acf_ring_time_avg, ring_tail_coefficient
from .exceptions import ContractError, DomainError
from .params import DerivedConstants, rho
from .special_functions import sinc

MAX_FINITE_HORIZON_SAMPLES = 4096
CONTRACT_RTOL = 1e-4

_logger = create_logger()


@dataclass(frozen=True)
class PsdGrid:
    """Resolution of the cyclostationary PSD quadrature.

    Attributes:
        samples_per_inverse_b: Lag samples per 1/B.
        span_b: Frequency half-span in units of B.
        window_inverse_b: Lag window beyond T_s in units of 1/B.
        freq_step_b: Frequency step in units of B.
    """

    samples_per_inverse_b: int = 64
    span_b: float = 8.0
    window_inverse_b: float = 64.0
    freq_step_b: float = 1.0 / 64.0

    def __post_init__(self) -> None:
        if self.samples_per_inverse_b < 4:
            raise DomainError(
                "samples_per_inverse_b must be at least 4",
                name="samples_per_inverse_b",
                value=self.samples_per_inverse_b,
            )
        for name in ("span_b", "window_inverse_b", "freq_step_b"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive", name=name, value=getattr(self, name))

    def refined(self) -> "PsdGrid":
        """Grid with half the lag and frequency steps."""
        return PsdGrid(
            samples_per_inverse_b=2 * self.samples_per_inverse_b,
            span_b=self.span_b,
            window_inverse_b=self.window_inverse_b,
            freq_step_b=self.freq_step_b / 2.0,
        )


@dataclass(frozen=True)
class Psd:
    """A power spectral density in W/Hz with an optional flat band and DC line."""

    freqs: NDArray[np.float64]
    smooth: NDArray[np.float64]
    dc_line: float = 0.0
    flat_density: float = 0.0
    flat_band: float = 0.0

    def flat_part(self, f: ArrayLike) -> NDArray[np.float64]:
        """The flat in-band density at ``f``; half its value on the band edge."""
        af = np.abs(np.asarray(f, dtype=np.float64))
        edge = self.flat_band / 2.0
        return np.where(af < edge, self.flat_density, np.where(af == edge, self.flat_density / 2.0, 0.0))

    @property
    def density(self) -> NDArray[np.float64]:
        """Continuous density (smooth plus flat band) on ``freqs``."""
        return self.smooth + self.flat_part(self.freqs)

    def total_power(self) -> float:
        """Integrated density over the grid plus the DC line."""
        return band_power(self, 2.0 * float(np.max(np.abs(self.freqs))))

    def density_dbw_per_hz(self) -> NDArray[np.float64]:
        """Density in dBW/Hz; non-positive values map to -inf."""
        d = self.density
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(d > 0, 10.0 * np.log10(np.where(d > 0, d, 1.0)), -np.inf)


def _cosine_transform(
    g: NDArray[np.float64], tau: NDArray[np.float64], freqs: NDArray[np.float64]
) -> NDArray[np.float64]:
    """2∫₀^τmax g(τ)cos(2πfτ)dτ for a real even g, by the trapezoid rule."""
    out = np.empty_like(freqs)
    # Row blocks keep the (f, τ) matrix small.
    block = max(1, 2_000_000 // max(tau.size, 1))
    for start in range(0, freqs.size, block):
        f = freqs[start : start + block]
        kernel = np.cos(2.0 * np.pi * f[:, None] * tau[None, :])
        out[start : start + block] = 2.0 * integrate.trapezoid(kernel * g[None, :], tau, axis=-1)
    return out


def psd_cyclostationary(
    acf_tau: Callable[[NDArray[np.float64]], ArrayLike],
    t_s: float,
    asymptote: float,
    grid: PsdGrid,
    b: float,
    rho_tail: float = 0.0,
) -> Psd:
    """PSD of a time-averaged autocorrelation Ā(τ) that is real and even.

    The transform is taken of Ā(τ) - asymptote - rho_tail·sinc(Bτ) over
    0 ≤ τ ≤ T_s + window/B. The asymptote becomes the DC line and the sinc
    tail a flat density rho_tail/B on |f| < B/2.

    Args:
        acf_tau: Vectorised Ā(τ) in W.
        t_s: Symbol period in s; the lag window extends window/B beyond it.
        asymptote: Limit of Ā(τ) for large |τ|, in W.
        grid: Quadrature resolution.
        b: Amplifier bandwidth in Hz; sets the lag and frequency units.
        rho_tail: Coefficient α of the α·sinc(Bτ) tail.

    Returns:
        The Psd on frequencies -span_b·B ... span_b·B.

    Raises:
        ContractError: If Ā(τ) - α·sinc(Bτ) is still further than 1e-4·Ā(0)
            from ``asymptote`` over the last 1/B of the lag window.
        DomainError: If ``t_s`` or ``b`` is not positive.
    """
    if not t_s > 0:
        raise DomainError(f"Symbol period must be positive, got {t_s}", name="t_s", value=t_s)
    if not b > 0:
        raise DomainError(f"Bandwidth must be positive, got {b}", name="b", value=b)

    d_tau = 1.0 / (grid.samples_per_inverse_b * b)
    tau_max = t_s + grid.window_inverse_b / b
    tau = np.linspace(0.0, tau_max, int(math.ceil(tau_max / d_tau)) + 1)
    values = np.asarray(acf_tau(tau), dtype=np.float64)
    g = values - asymptote - rho_tail * np.asarray(sinc(b * tau))

    # The residual must have settled over the last 1/B of the lag window.
    settled = g[tau >= tau_max - 1.0 / b]
    worst = float(settled[np.argmax(np.abs(settled))])
    if abs(worst) > CONTRACT_RTOL * abs(float(values[0])):
        raise ContractError(
            f"Autocorrelation near tau = {tau_max:g} s is {asymptote + worst:g} W, "
            f"expected the asymptote {asymptote:g} W",
            quantity="acf(tau_max)",
            expected=asymptote,
            actual=asymptote + worst,
        )

    df = grid.freq_step_b * b
    n_freq = int(round(grid.span_b / grid.freq_step_b))
    positive = np.arange(n_freq + 1) * df
    half = _cosine_transform(g, tau, positive)
    freqs = np.concatenate([-positive[:0:-1], positive])
    smooth = np.concatenate([half[:0:-1], half])
    _logger.debug("PSD quadrature: %d lags, %d frequencies, tail alpha=%g W", tau.size, freqs.size, rho_tail)
    return Psd(freqs=freqs, smooth=smooth, dc_line=asymptote, flat_density=rho_tail / b, flat_band=b)


def psd_ring_pam(p: float, dc: DerivedConstants, t_s: float | None = None, grid: PsdGrid | None = None) -> Psd:
    """PSD of ring-modulated PAM with rectangular pulses and uniform phases.

    Args:
        p: Launch power in W.
        dc: Derived constants.
        t_s: Symbol period; defaults to the fiber record's ``t_s``.
        grid: Quadrature resolution; defaults to PsdGrid().

    Raises:
        DomainError: If no symbol period is available.
    """
    period = dc.params.t_s if t_s is None else t_s
    if period is None:
        raise DomainError("Ring PAM needs a symbol period", name="t_s", value=None)
    return psd_cyclostationary(
        lambda tau: acf_ring_time_avg(tau, p, period, dc),
        period,
        0.0,
        grid or PsdGrid(),
        dc.params.b,
        rho_tail=ring_tail_coefficient(p, dc),
    )


def psd_finite_horizon(launch: ArrayLike, dt: float, dc: DerivedConstants, freqs: ArrayLike) -> Psd:
    """PSD of a sampled launch record over the horizon T = N·dt.

    Evaluates (1/T)∫∫A(t, t')e^(-j2πf(t-t'))dt dt' as a double Riemann sum of
    the exact autocorrelation on the sample grid.

    Args:
        launch: N launch samples u₀(k·dt) in √W, N ≤ 4096.
        dt: Sample spacing in s.
        dc: Derived constants.
        freqs: Frequencies in Hz.

    Raises:
        DomainError: If N exceeds 4096 or ``dt`` is not positive.
    """
    u = np.asarray(launch, dtype=np.complex128).ravel()
    if u.size == 0 or u.size > MAX_FINITE_HORIZON_SAMPLES:
        raise DomainError(
            f"Launch record must hold 1..{MAX_FINITE_HORIZON_SAMPLES} samples, got {u.size}",
            name="launch",
            value=u.size,
        )
    if not dt > 0:
        raise DomainError(f"Sample spacing must be positive, got {dt}", name="dt", value=dt)
    t = np.arange(u.size) * dt
    horizon = u.size * dt
    acf = acf_exact_array(u[:, None], u[None, :], rho(t[:, None] - t[None, :], dc.params.b), dc)
    f = np.asarray(freqs, dtype=np.float64)
    phasor = np.exp(-2j * np.pi * f[:, None] * t[None, :])
    density = np.einsum("fi,ij,fj->f", phasor, acf, phasor.conj()).real * dt * dt / horizon
    return Psd(freqs=f, smooth=density)


def band_power(psd: Psd, w: float) -> float:
    """Power in |f| ≤ W/2, including the DC line.

    Raises:
        DomainError: If ``w`` is negative or wider than the frequency grid.
    """
    edge = float(np.max(np.abs(psd.freqs)))
    if w < 0 or w / 2.0 > edge * (1.0 + 1e-12):
        raise DomainError(f"Band {w:g} Hz outside the PSD grid of half-span {edge:g} Hz", name="w", value=w)
    half = min(w / 2.0, edge)
    inside = np.abs(psd.freqs) < half
    f = np.concatenate([[-half], psd.freqs[inside], [half]])
    edge_lo = np.interp(-half, psd.freqs, psd.smooth)
    edge_hi = np.interp(half, psd.freqs, psd.smooth)
    s = np.concatenate([[edge_lo], psd.smooth[inside], [edge_hi]])
    smooth = float(integrate.trapezoid(s, f)) if half > 0 else 0.0
    return smooth + psd.flat_density * min(w, psd.flat_band) + psd.dc_line


def triangle_filter_time(tau: ArrayLike, w: float) -> float | NDArray[np.float64]:
    """b(τ) = 2W·sinc²(Wτ); its integral over τ ≥ 0 is 1."""
    if not w > 0:
        raise DomainError(f"Filter width must be positive, got {w}", name="w", value=w)
    out = 2.0 * w * np.asarray(sinc(np.multiply(w, tau))) ** 2
    return float(out) if out.ndim == 0 else out


def triangle_filter_freq(f: ArrayLike, w: float) -> float | NDArray[np.float64]:
    """b̃(f) = 2·max(1 - |f|/W, 0)."""
    if not w > 0:
        raise DomainError(f"Filter width must be positive, got {w}", name="w", value=w)
    out = 2.0 * np.maximum(1.0 - np.abs(np.asarray(f, dtype=np.float64)) / w, 0.0)
    return float(out) if out.ndim == 0 else out


def triangle_filter(x: ArrayLike, w: float, domain: str = "time") -> float | NDArray[np.float64]:
    """Triangular bounding filter in the ``"time"`` or ``"freq"`` domain."""
    if domain == "time":
        return triangle_filter_time(x, w)
    if domain == "freq":
        return triangle_filter_freq(x, w)
    raise DomainError(f"domain must be 'time' or 'freq', got '{domain}'", name="domain", value=domain)
