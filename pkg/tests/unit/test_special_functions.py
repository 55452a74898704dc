import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fiberacf.exceptions import DomainError
from fiberacf.special_functions import (
    S_I_FLOOR,
    S_R_FLOOR,
    HyperbolicPair,
    bessel_i0e_i1e,
    erf_ratio,
    erf_real,
    eval_hyperbolic,
    eval_hyperbolic_array,
    exponential_bound_margins,
    hyperbolic_bound_margins,
    hyperbolic_differences,
    sinc,
    sinc_bound_margins,
)


def _direct(c: complex, z: float) -> tuple[complex, complex]:
    w = cmath.sqrt(2 * c)
    return 1 / cmath.cosh(w * z), cmath.tanh(w * z) / w


class TestEvalHyperbolic:
    def test_zero_rate_density(self):
        """Test that c = 0 gives exactly S = 1 and T = z."""
        pair = eval_hyperbolic(0j, 3.0)
        assert pair == HyperbolicPair(s=1 + 0j, t=3 + 0j)

    @pytest.mark.parametrize("c", [0.3 - 0.1j, -2.0j, 5.0 + 5.0j, 1e-3j, -0.4 + 0.9j])
    def test_matches_direct_formula(self, c):
        """Test agreement with cmath sech and tanh away from the origin."""
        s, t = _direct(c, 1.0)
        pair = eval_hyperbolic(c, 1.0)
        assert pair.s == pytest.approx(s, rel=1e-12)
        assert pair.t == pytest.approx(t, rel=1e-12)

    def test_small_argument_series_matches_direct(self):
        """Test the series branch against the closed form near its switching radius."""
        c = 0.1j  # |w| ≈ 0.447, inside the series disc
        s, t = _direct(c, 1.0)
        pair = eval_hyperbolic(c, 1.0)
        assert pair.s == pytest.approx(s, rel=1e-14)
        assert pair.t == pytest.approx(t, rel=1e-14)

    def test_large_argument_does_not_overflow(self):
        """Test that very large |c| returns finite, tiny S."""
        pair = eval_hyperbolic(-1e8j, 1.0)
        assert abs(pair.s) < 1e-100
        assert math.isfinite(pair.t.real) and math.isfinite(pair.t.imag)

    def test_property_accessors(self):
        """Test the real and imaginary part accessors."""
        pair = eval_hyperbolic(-1j, 1.0)
        assert pair.s_r == pair.s.real
        assert pair.s_i == pair.s.imag
        assert pair.t_r == pair.t.real
        assert pair.t_i == pair.t.imag

    @given(
        st.floats(min_value=-40.0, max_value=40.0, allow_nan=False),
        st.floats(min_value=-40.0, max_value=40.0, allow_nan=False),
    )
    @settings(max_examples=200, deadline=None)
    def test_branch_invariance(self, re, im):
        """Test that the sign of the square root does not change S or T."""
        a = eval_hyperbolic(complex(re, im), 1.0)
        b = eval_hyperbolic(complex(re, im), 1.0, negate_root=True)
        assert abs(a.s - b.s) <= 1e-14 * max(abs(a.s), 1e-300)
        assert abs(a.t - b.t) <= 1e-14 * max(abs(a.t), 1e-300)

    def test_array_matches_scalar(self):
        """Test that the vectorised evaluation agrees with the scalar one."""
        c = np.array([-1j, 0.2 + 0.3j, 0j, -50j])
        s, t = eval_hyperbolic_array(c, 2.0)
        for ci, si, ti in zip(c, s, t, strict=True):
            pair = eval_hyperbolic(ci, 2.0)
            assert si == pytest.approx(pair.s, rel=1e-15, abs=1e-300)
            assert ti == pytest.approx(pair.t, rel=1e-15, abs=1e-300)

    @pytest.mark.parametrize("z", [0.0, -1.0, math.inf])
    def test_rejects_bad_length(self, z):
        """Test that a non-positive or infinite length is rejected."""
        with pytest.raises(DomainError, match="Fiber length"):
            eval_hyperbolic(1j, z)

    def test_rejects_non_finite_c(self):
        """Test that an infinite rate density is rejected."""
        with pytest.raises(DomainError, match="finite") as exc_info:
            eval_hyperbolic(complex(math.inf, 0.0), 1.0)
        assert exc_info.value.name == "c"


class TestHyperbolicDifferences:
    def test_zero_limit(self):
        """Test the c = 0 values z² and -2z³/3."""
        one_minus_s, t_minus_z = hyperbolic_differences(0j, 2.0)
        assert one_minus_s[0] == pytest.approx(4.0, rel=1e-15)
        assert t_minus_z[0] == pytest.approx(-16.0 / 3.0, rel=1e-15)

    @pytest.mark.parametrize("c", [0.05j, -0.1j, 0.5 + 0.5j, -3j])
    def test_matches_direct_quotients(self, c):
        """Test against (1 - S)/c and (T - z)/c computed directly."""
        s, t = _direct(c, 1.0)
        one_minus_s, t_minus_z = hyperbolic_differences(c, 1.0)
        assert one_minus_s[0] == pytest.approx((1 - s) / c, rel=1e-10)
        assert t_minus_z[0] == pytest.approx((t - 1.0) / c, rel=1e-10)

    def test_tiny_c_has_no_cancellation(self):
        """Test that the quotients stay at their limits for |c| = 1e-14."""
        one_minus_s, t_minus_z = hyperbolic_differences(1e-14j, 1.0)
        assert one_minus_s[0] == pytest.approx(1.0, rel=1e-12)
        assert t_minus_z[0] == pytest.approx(-2.0 / 3.0, rel=1e-12)


class TestEnvelopes:
    def test_all_hyperbolic_envelopes_hold(self):
        """Test every S and T envelope on log-spaced x in [1e-6, 1e3]."""
        x = np.logspace(-6, 3, 10_000)
        for name, margin in hyperbolic_bound_margins(x, 1.0).items():
            assert np.min(margin) >= -1e-12, name

    def test_envelopes_are_length_independent(self):
        """Test that the relative margins do not depend on z."""
        x = np.logspace(-3, 2, 50)
        a = hyperbolic_bound_margins(x, 1.0)
        b = hyperbolic_bound_margins(x, 2e6)
        for name in a:
            np.testing.assert_allclose(a[name], b[name], rtol=1e-9, atol=1e-12, err_msg=name)

    def test_floors_are_attained_closely(self):
        """Test that S_R and S_I come within 1% of their floors somewhere."""
        x = np.logspace(-1, 3, 20_000)
        s, _ = eval_hyperbolic_array(-1j * x, 1.0)
        assert S_R_FLOOR <= np.min(s.real) <= 0.99 * S_R_FLOOR
        assert S_I_FLOOR <= np.min(s.imag) <= 0.99 * S_I_FLOOR

    def test_rejects_negative_x(self):
        """Test that negative products are rejected."""
        with pytest.raises(DomainError, match="non-negative"):
            hyperbolic_bound_margins([-1.0], 1.0)

    @given(st.floats(min_value=1e-6, max_value=1e3))
    def test_abs_s_decay_envelope(self, x):
        """Test |S(-jx/z²)| ≤ √5·e^(-√x)."""
        pair = eval_hyperbolic(-1j * x, 1.0)
        assert abs(pair.s) <= math.sqrt(5.0) * math.exp(-math.sqrt(x)) * (1 + 1e-12)

    def test_sinc_margins(self):
        """Test the sinc envelopes on a dense grid."""
        y = np.linspace(-8.0, 8.0, 16_001)
        for name, margin in sinc_bound_margins(y).items():
            assert np.min(margin) >= -1e-12, name

    @pytest.mark.parametrize("a", [0.1, 1.0, 28.7])
    def test_exponential_margins(self, a):
        """Test y·e^(-ay) ≤ 1/(ae) and y·e^(-ay²) ≤ 1/√(2ae)."""
        for name, margin in exponential_bound_margins(np.logspace(-6, 3, 5000), a).items():
            assert np.min(margin) >= -1e-12, name

    def test_exponential_margins_vanish_at_peak(self):
        """Test that the linear margin is zero at y = 1/a."""
        margins = exponential_bound_margins([0.5], 2.0)
        assert margins["linear"][0] == pytest.approx(0.0, abs=1e-15)

    def test_exponential_margins_reject_bad_rate(self):
        """Test that a non-positive rate is rejected."""
        with pytest.raises(DomainError, match="positive"):
            exponential_bound_margins([1.0], 0.0)


class TestScalarFunctions:
    def test_sinc_exact_zeros(self):
        """Test that sinc is exactly 0 at non-zero integers and 1 at 0."""
        assert sinc(0.0) == 1.0
        assert np.all(sinc(np.arange(1, 50)) == 0.0)
        assert sinc(-3.0) == 0.0

    def test_sinc_value(self):
        """Test sinc(1/2) = 2/π."""
        assert sinc(0.5) == pytest.approx(2.0 / math.pi, rel=1e-15)

    @given(st.floats(min_value=-30.0, max_value=30.0, allow_nan=False))
    def test_erf_odd_symmetry(self, y):
        """Test erf(-y) = -erf(y) exactly."""
        assert erf_real(-y) == -erf_real(y)

    def test_erf_rejects_infinity(self):
        """Test that erf refuses non-finite input."""
        with pytest.raises(DomainError, match="finite"):
            erf_real(math.inf)

    def test_erf_ratio_limits(self):
        """Test (√π/2)erf(y)/y at 0, near 0 and for large y."""
        assert erf_ratio(0.0) == 1.0
        assert erf_ratio(1e-4) == pytest.approx(1.0 - 1e-8 / 3.0, rel=1e-15)
        assert erf_ratio(50.0) == pytest.approx(math.sqrt(math.pi) / 100.0, rel=1e-15)

    def test_erf_ratio_continuous_at_switch(self):
        """Test that the series and direct branches agree at the switch point."""
        assert erf_ratio(0.999e-3) == pytest.approx(erf_ratio(1.001e-3), rel=1e-9)

    def test_bessel_values(self):
        """Test the scaled Bessel functions at 0 and against their asymptote."""
        i0, i1 = bessel_i0e_i1e(0.0)
        assert (i0, i1) == (1.0, 0.0)
        i0, i1 = bessel_i0e_i1e(1e4)
        assert i0 == pytest.approx(1.0 / math.sqrt(2 * math.pi * 1e4), rel=1e-4)
        assert i1 == pytest.approx(i0, rel=1e-4)

    def test_bessel_rejects_negative(self):
        """Test that negative arguments are rejected."""
        with pytest.raises(DomainError, match="non-negative"):
            bessel_i0e_i1e(np.array([1.0, -0.5]))
