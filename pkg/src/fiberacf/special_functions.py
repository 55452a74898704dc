"""Complex hyperbolic functions and the scalar special functions used by the bounds.

S(c) = sech(√(2c)·z) and T(c) = tanh(√(2c)·z)/√(2c) drive every closed form in
the package. Both are even in w = √(2c)·z, so they are evaluated as power series
in w² near the origin and through exponentials elsewhere.
"""

import math
import threading
from dataclasses import dataclass

import numpy as np
from cachetools import LRUCache, cached
from numpy.typing import ArrayLike, NDArray
from scipy import special

from .exceptions import DomainError

_SERIES_TERMS = 20
_SERIES_RADIUS = 0.5

# Lower limits on S_R and S_I for c = -jx/z², found numerically.
S_R_FLOOR = -0.136
S_I_FLOOR = -0.028

_coefficient_lock = threading.RLock()


@dataclass(frozen=True)
class HyperbolicPair:
    """Values of S(c) (dimensionless) and T(c) (meters)."""

    s: complex
    t: complex

    @property
    def s_r(self) -> float:
        """Real part of S."""
        return self.s.real

    @property
    def s_i(self) -> float:
        """Imaginary part of S."""
        return self.s.imag

    @property
    def t_r(self) -> float:
        """Real part of T."""
        return self.t.real

    @property
    def t_i(self) -> float:
        """Imaginary part of T."""
        return self.t.imag


@cached(cache=LRUCache(maxsize=8), lock=_coefficient_lock)
def _series_coefficients(terms: int) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Taylor coefficients in w² of sech(w) and tanh(w)/w.

    sech(w) = Σ E_{2k} w^{2k} / (2k)! and
    tanh(w)/w = Σ_{k≥1} 2^{2k} (2^{2k} - 1) B_{2k} w^{2k-2} / (2k)!.
    """
    k = np.arange(terms)
    euler = special.euler(2 * (terms - 1))[::2]
    sech = euler / special.factorial(2 * k)

    n = np.arange(1, terms + 1)
    bernoulli = special.bernoulli(2 * terms)[2::2]
    four_n = 4.0**n
    tanh_over_w = four_n * (four_n - 1.0) * bernoulli / special.factorial(2 * n)
    # Leading terms exact so that c = 0 returns (1, z) bit for bit.
    sech[0] = 1.0
    tanh_over_w[0] = 1.0
    sech.setflags(write=False)
    tanh_over_w.setflags(write=False)
    return sech, tanh_over_w


def _check_length(z: float) -> None:
    if not math.isfinite(z) or z <= 0:
        raise DomainError(f"Fiber length must be positive and finite, got {z!r}", name="z", value=z)


def _pair_from_root(w: NDArray[np.complex128], z: float) -> tuple[NDArray[np.complex128], NDArray[np.complex128]]:
    """Evaluate (S, T) from w = √(2c)·z, elementwise."""
    s = np.empty_like(w)
    t = np.empty_like(w)
    small = np.abs(w) < _SERIES_RADIUS

    if np.any(small):
        sech_coef, tanh_coef = _series_coefficients(_SERIES_TERMS)
        w2 = w[small] ** 2
        s[small] = np.polynomial.polynomial.polyval(w2, sech_coef)
        t[small] = z * np.polynomial.polynomial.polyval(w2, tanh_coef)

    large = ~small
    if np.any(large):
        # S and T are even in w.
        wl = np.where(w[large].real < 0, -w[large], w[large])
        decay = np.exp(-2.0 * wl)
        s[large] = 2.0 * np.exp(-wl) / (1.0 + decay)
        t[large] = z * (1.0 - decay) / ((1.0 + decay) * wl)
    return s, t


def eval_hyperbolic_array(c: ArrayLike, z: float) -> tuple[NDArray[np.complex128], NDArray[np.complex128]]:
    """Vectorised S(c) and T(c) over an array of rate densities.

    Args:
        c: Complex rate densities in 1/m², any shape.
        z: Fiber length in meters.

    Returns:
        Arrays (S, T) with the shape of ``c`` (scalars become length-1 arrays).

    Raises:
        DomainError: If ``z`` is not positive or any ``c`` is not finite.
    """
    _check_length(z)
    c_arr = np.atleast_1d(np.asarray(c, dtype=np.complex128))
    if not np.all(np.isfinite(c_arr)):
        raise DomainError("Rate density c must be finite", name="c", value=c)
    return _pair_from_root(np.sqrt(2.0 * c_arr) * z, z)


def eval_hyperbolic(c: complex, z: float, *, negate_root: bool = False) -> HyperbolicPair:
    """Evaluate S(c) = sech(√(2c)z) and T(c) = tanh(√(2c)z)/√(2c).

    Args:
        c: Complex rate density in 1/m².
        z: Fiber length in meters.
        negate_root: Use -√(2c) instead of the principal root. The result is
            the same either way; the flag exists so callers can check that.

    Returns:
        The HyperbolicPair; c = 0 gives exactly (1, z).

    Raises:
        DomainError: If ``c`` is not finite or ``z`` is not positive.

    Example:
        >>> pair = eval_hyperbolic(-0.0085j / 2e6**2, 2e6)
        >>> abs(pair.s) <= 1.0
        True
    """
    _check_length(z)
    c = complex(c)
    if not (math.isfinite(c.real) and math.isfinite(c.imag)):
        raise DomainError(f"Rate density c must be finite, got {c!r}", name="c", value=c)
    root = np.sqrt(np.complex128(2.0 * c))
    if negate_root:
        root = -root
    s, t = _pair_from_root(np.array([root * z]), z)
    return HyperbolicPair(s=complex(s[0]), t=complex(t[0]))


def hyperbolic_differences(c: ArrayLike, z: float) -> tuple[NDArray[np.complex128], NDArray[np.complex128]]:
    """Return ((1 - S)/c, (T - z)/c) without cancellation as c → 0.

    Both quotients are entire in c, so the small-|w| branch divides the series
    term by term. At c = 0 they equal (z², -2z³/3).
    """
    _check_length(z)
    c_arr = np.atleast_1d(np.asarray(c, dtype=np.complex128))
    w = np.sqrt(2.0 * c_arr) * z
    small = np.abs(w) < _SERIES_RADIUS
    one_minus_s = np.empty_like(c_arr)
    t_minus_z = np.empty_like(c_arr)

    if np.any(small):
        sech_coef, tanh_coef = _series_coefficients(_SERIES_TERMS)
        w2 = w[small] ** 2
        # w² = 2cz², so dividing the series by c leaves 2z² times the tail in w².
        one_minus_s[small] = -2.0 * z**2 * np.polynomial.polynomial.polyval(w2, sech_coef[1:])
        t_minus_z[small] = 2.0 * z**3 * np.polynomial.polynomial.polyval(w2, tanh_coef[1:])

    large = ~small
    if np.any(large):
        s, t = _pair_from_root(w[large], z)
        one_minus_s[large] = (1.0 - s) / c_arr[large]
        t_minus_z[large] = (t - z) / c_arr[large]
    return one_minus_s, t_minus_z


def erf_real(y: ArrayLike) -> float | NDArray[np.float64]:
    """Real error function with exact odd symmetry.

    Raises:
        DomainError: If ``y`` is not finite.
    """
    arr = np.asarray(y, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise DomainError("erf argument must be finite", name="y", value=y)
    out = np.copysign(special.erf(np.abs(arr)), arr)
    return float(out) if out.ndim == 0 else out


def erf_ratio(y: ArrayLike) -> float | NDArray[np.float64]:
    """(√π/2)·erf(y)/y, equal to 1 at y = 0."""
    arr = np.asarray(y, dtype=np.float64)
    y2 = arr * arr
    series = 1.0 - y2 / 3.0 + y2 * y2 / 10.0
    safe = np.where(arr == 0.0, 1.0, arr)
    direct = 0.5 * math.sqrt(math.pi) * special.erf(safe) / safe
    out = np.where(np.abs(arr) < 1e-3, series, direct)
    return float(out) if out.ndim == 0 else out


def bessel_i0e_i1e(y: ArrayLike) -> tuple[float | NDArray[np.float64], float | NDArray[np.float64]]:
    """Exponentially scaled modified Bessel functions e^(-y)I₀(y) and e^(-y)I₁(y).

    Raises:
        DomainError: If any ``y`` is negative or NaN.
    """
    arr = np.asarray(y, dtype=np.float64)
    if np.any(np.isnan(arr)) or np.any(arr < 0):
        raise DomainError("Scaled Bessel argument must be non-negative", name="y", value=y)
    i0, i1 = special.i0e(arr), special.i1e(arr)
    if arr.ndim == 0:
        return float(i0), float(i1)
    return i0, i1


def sinc(y: ArrayLike) -> float | NDArray[np.float64]:
    """Normalised sinc sin(πy)/(πy), exactly 1 at 0 and exactly 0 at other integers."""
    arr = np.asarray(y, dtype=np.float64)
    out = np.where((arr != 0.0) & (arr == np.round(arr)), 0.0, np.sinc(arr))
    return float(out) if out.ndim == 0 else out


def _relative(rhs: NDArray[np.float64], lhs: NDArray[np.float64]) -> NDArray[np.float64]:
    scale = np.maximum(np.abs(rhs), np.finfo(np.float64).tiny)
    return (rhs - lhs) / scale


def hyperbolic_bound_margins(x: ArrayLike, z: float) -> dict[str, NDArray[np.float64]]:
    """Relative margins of the envelope inequalities of S and T at c = -jx/z².

    Each entry is (bound - value)/|bound| per sample, so an inequality holds
    exactly where its margin is non-negative.

    Args:
        x: Non-negative noise-nonlinearity products.
        z: Fiber length in meters.

    Returns:
        Mapping of inequality name to margin array.
    """
    xs = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if np.any(xs < 0):
        raise DomainError("x must be non-negative", name="x", value=x)
    s, t = eval_hyperbolic_array(-1j * xs / z**2, z)
    abs_s = np.abs(s)
    s_r, s_i, t_r, t_i = s.real, s.imag, t.real, t.imag
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(t_i > 0, s_i**2 / t_i, 0.0)
        lower_t_i = (z / 3.0) * np.minimum(xs, np.where(xs > 0, 1.0 / np.sqrt(xs), np.inf))

    return {
        "abs_s_le_1": _relative(np.ones_like(xs), abs_s),
        "abs_t_le_z": _relative(np.full_like(xs, z), np.abs(t)),
        "s_r_upper": _relative(np.ones_like(xs), s_r),
        "s_r_lower": _relative(s_r, np.full_like(xs, S_R_FLOOR)),
        "t_r_upper": _relative(np.full_like(xs, z), t_r),
        "t_r_lower": t_r / z,
        "s_i_upper": np.where(xs > 0, _relative(xs, s_i), -np.abs(s_i)),
        "s_i_lower": _relative(s_i, np.full_like(xs, S_I_FLOOR)),
        "t_i_upper": np.where(xs > 0, _relative(2.0 * xs * z / 3.0, t_i), -np.abs(t_i) / z),
        "t_i_lower": np.where(xs > 0, _relative(t_i, lower_t_i), 0.0),
        "abs_s_decay": _relative(math.sqrt(5.0) * np.exp(-np.sqrt(xs)), abs_s),
        "s_i_sq_over_t_i": np.where(xs > 0, _relative(1.5 * xs / z, ratio), 0.0),
    }


def sinc_bound_margins(y: ArrayLike) -> dict[str, NDArray[np.float64]]:
    """Margins of the sinc envelopes; entries outside an inequality's range are +inf."""
    ys = np.atleast_1d(np.asarray(y, dtype=np.float64))
    s = np.asarray(sinc(ys))
    inside = np.abs(ys) <= 1.0
    return {
        "abs_le_one_minus_y2": np.where(inside, (1.0 - ys**2) - np.abs(s), np.inf),
        "abs_le_quarter": np.where(inside, np.inf, 0.25 - np.abs(s)),
        "sq_le_one_minus_y2": np.where(inside, (1.0 - ys**2) - s**2, np.inf),
        "sq_le_twentieth": np.where(inside, np.inf, 0.05 - s**2),
        "sq_ge_one_minus_4y2": s**2 - (1.0 - 4.0 * ys**2),
    }


def exponential_bound_margins(y: ArrayLike, a: float) -> dict[str, NDArray[np.float64]]:
    """Relative margins of y·e^(-ay) ≤ 1/(ae) and y·e^(-ay²) ≤ 1/√(2ae) for y ≥ 0.

    Raises:
        DomainError: If ``a`` is not positive.
    """
    if not a > 0:
        raise DomainError(f"Exponential rate must be positive, got {a!r}", name="a", value=a)
    ys = np.atleast_1d(np.asarray(y, dtype=np.float64))
    linear_peak = 1.0 / (a * math.e)
    quadratic_peak = 1.0 / math.sqrt(2.0 * a * math.e)
    return {
        "linear": (linear_peak - ys * np.exp(-a * ys)) / linear_peak,
        "quadratic": (quadratic_peak - ys * np.exp(-a * ys**2)) / quadratic_peak,
    }
