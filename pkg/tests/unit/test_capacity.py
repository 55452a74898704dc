import math
from unittest.mock import patch

import numpy as np
import pytest
from scipy import stats

from fiberacf.capacity import (
    CapacityKind,
    capacity_curves,
    capacity_upper1,
    capacity_upper2,
    eta_bound,
    fsk_demo,
    fsk_rate,
    infinite_bandwidth_capacity_bound,
    infinite_bandwidth_capacity_limit,
    received_power_bound,
    scaled_b_curve,
    scaled_b_study,
    shannon_c,
    shannon_eta,
    three_sample_demo,
)
from fiberacf.exceptions import DomainError, RootBracketError, UnsupportedRegimeError
from fiberacf.params import FiberParams, derive_constants, watts_to_dbm
from fiberacf.power_bounds import power_threshold


class TestShannon:
    def test_known_value(self):
        """Test log₂(1 + 3) = 2 bits/s/Hz."""
        assert shannon_eta(1.0, 3.0, 1.0) == pytest.approx(2.0, rel=1e-15)
        assert shannon_c(2.0, 6.0, 1.0) == pytest.approx(4.0, rel=1e-15)

    def test_wideband_limit(self):
        """Test C → (P/N₀)·log₂e as W → ∞."""
        assert shannon_c(1e12, 1.0, 1.0) == pytest.approx(math.log2(math.e), rel=1e-9)

    def test_array_input(self):
        """Test evaluation over a power grid."""
        out = shannon_eta(1.0, np.array([0.0, 1.0, 3.0]), 1.0)
        np.testing.assert_allclose(out, [0.0, 1.0, 2.0])

    @pytest.mark.parametrize("w,p,n0", [(0.0, 1.0, 1.0), (1.0, -1.0, 1.0), (1.0, 1.0, 0.0)])
    def test_rejects_bad_arguments(self, w, p, n0):
        """Test validation of bandwidth, power and noise density."""
        with pytest.raises(DomainError):
            shannon_c(w, p, n0)


class TestUpperBounds:
    def test_small_power_limit(self, table_constants):
        """Test log₂(1 + Kz/(BN₀)) ≈ 11.65 bits/s/Hz for negligible launch power."""
        b, n0 = table_constants.params.b, table_constants.params.n0
        value = capacity_upper1(1e-9, b, table_constants)
        assert value == pytest.approx(math.log2(1 + (table_constants.kz + 1e-9) / (b * n0)), rel=1e-12)
        assert value == pytest.approx(11.65, abs=0.05)

    def test_received_power_is_linear_below_crossover(self, table_constants):
        """Test P̄_r = Kz + P at 1 W and the nonlinear bound at 100 W."""
        b = table_constants.params.b
        assert received_power_bound(1.0, b, table_constants) == table_constants.kz + 1.0
        assert received_power_bound(100.0, b, table_constants) < table_constants.kz + 100.0

    def test_large_power_half_bit_per_doubling(self, table_constants):
        """Test that P̄_r ∝ √P adds half a bit per doubling of P."""
        b = table_constants.params.b
        step = capacity_upper1(2e4, b, table_constants) - capacity_upper1(1e4, b, table_constants)
        assert step == pytest.approx(0.5, abs=0.02)

    def test_upper2_never_exceeds_upper1(self, table_constants):
        """Test the ordering on a power and bandwidth grid."""
        b = table_constants.params.b
        for w in (0.1 * b, 0.5 * b, b):
            for p in np.logspace(-6, 4, 21):
                assert capacity_upper2(float(p), w, table_constants) <= capacity_upper1(float(p), w, table_constants)

    def test_wide_receiver_rejected(self, table_constants):
        """Test that W > B raises for both bounds."""
        w = 2 * table_constants.params.b
        with pytest.raises(UnsupportedRegimeError):
            capacity_upper1(1.0, w, table_constants)
        with pytest.raises(UnsupportedRegimeError, match="W <= B"):
            capacity_upper2(1.0, w, table_constants)

    def test_eta_equals_upper1_below_threshold(self, table_constants):
        """Test η = upper1 while W_min ≤ W."""
        b = table_constants.params.b
        assert eta_bound(1.0, b, table_constants) == pytest.approx(capacity_upper1(1.0, b, table_constants), rel=1e-14)

    def test_eta_falls_beyond_threshold(self, table_constants):
        """Test η < upper1 at twice the power threshold."""
        b = table_constants.params.b
        p = 2.0 * power_threshold(table_constants)
        assert eta_bound(p, b, table_constants) < capacity_upper1(p, b, table_constants)

    def test_curves(self, table_constants):
        """Test the curve bundle over a power grid."""
        powers = np.logspace(-3, 3, 13)
        curves = capacity_curves(powers, table_constants.params.b, table_constants)
        assert curves.upper1.kind is CapacityKind.UPPER1
        assert curves.shannon.kind is CapacityKind.SHANNON
        assert curves.upper1.values.shape == (13,)
        assert np.all(curves.eta.values <= curves.upper1.values * (1 + 1e-12))
        assert np.all(curves.upper2.values <= curves.upper1.values)
        assert curves.threshold_w == pytest.approx(power_threshold(table_constants), rel=1e-12)
        assert watts_to_dbm(curves.threshold_w) == pytest.approx(42.7, abs=0.1)

    def test_curves_without_threshold(self, table_constants):
        """Test that an unbracketable threshold becomes NaN."""
        with patch("fiberacf.capacity.power_threshold", side_effect=RootBracketError("No sign change")):
            curves = capacity_curves([1.0, 10.0], table_constants.params.b, table_constants)
        assert math.isnan(curves.threshold_w)


class TestScaledBandwidth:
    def test_power_exponent(self, table_constants):
        """Test P̄_r ∝ P^(-1/4) when B grows as √P."""
        study = scaled_b_study(np.logspace(3, 7, 9), table_constants.params.b, table_constants)
        assert study.kappa_hat == pytest.approx(table_constants.kappa, rel=1e-12)
        assert study.power_exponent() == pytest.approx(-0.25, abs=0.03)
        assert np.all(np.diff(study.b) > 0)

    def test_bandwidth_unscaled_at_low_power(self, table_constants):
        """Test B = W below 512/κ̂."""
        w = table_constants.params.b
        study = scaled_b_study([1e-3, 1.0], w, table_constants)
        np.testing.assert_array_equal(study.b, [w, w])

    def test_curve(self, table_constants):
        """Test the SCALED_B curve view."""
        curve = scaled_b_curve([1.0, 100.0], table_constants.params.b, table_constants)
        assert curve.kind is CapacityKind.SCALED_B
        assert curve.values.shape == (2,)

    def test_exponent_needs_two_powers(self, table_constants):
        """Test that a fit needs at least two powers above p_min."""
        study = scaled_b_study([1.0, 10.0], table_constants.params.b, table_constants)
        with pytest.raises(DomainError, match="two grid powers"):
            study.power_exponent(p_min=5.0)


class TestInfiniteBandwidth:
    def test_plateau(self, table_constants):
        """Test that the bound stops growing at P = 1/κ."""
        t_s = table_constants.params.t_s
        peak = 1.0 / table_constants.kappa
        plateau = infinite_bandwidth_capacity_bound(peak, t_s, table_constants)
        assert infinite_bandwidth_capacity_bound(10 * peak, t_s, table_constants) == plateau
        assert infinite_bandwidth_capacity_bound(0.5 * peak, t_s, table_constants) < plateau
        just_below = infinite_bandwidth_capacity_bound(peak * (1 - 1e-9), t_s, table_constants)
        assert just_below == pytest.approx(plateau, rel=1e-9)

    def test_small_period_limit(self, table_constants):
        """Test the T_s → 0 value log₂e/(κeN₀)."""
        limit = infinite_bandwidth_capacity_limit(table_constants)
        assert infinite_bandwidth_capacity_bound(1.0, 1e-30, table_constants) == pytest.approx(limit, rel=1e-9)

    def test_rejects_negative_power(self, table_constants):
        """Test that P < 0 is rejected."""
        with pytest.raises(DomainError, match="non-negative"):
            infinite_bandwidth_capacity_bound(-1.0, 1e-11, table_constants)


class TestThreeSampleDemo:
    def test_identical_noise_is_exact(self, table_constants):
        """Test that identical noise at the three instants recovers x² exactly."""
        est = three_sample_demo(1e-6, 1e-13, table_constants, trials=200, seed=1, same_noise=True)
        assert est.mean.real == pytest.approx(1e-12, rel=1e-6)
        assert est.std_error <= 1e-6 * 1e-12

    def test_correlated_noise_is_unbiased(self, table_constants):
        """Test that the estimate is unbiased for sinc-correlated noise."""
        est = three_sample_demo(1e-6, 1e-13, table_constants, trials=4000, seed=2)
        assert est.agrees_with(1e-12)

    def test_requires_symbol_period(self):
        """Test that a record without T_s is rejected."""
        dc = derive_constants(FiberParams(gamma=0.0, z=1.0, n_a=1.0, b=1.0, n0=1.0))
        with pytest.raises(DomainError, match="symbol period"):
            three_sample_demo(1.0, 0.1, dc)

    def test_rejects_non_positive_spacing(self, table_constants):
        """Test that T ≤ 0 is rejected."""
        with pytest.raises(DomainError, match="t_small"):
            three_sample_demo(1.0, 0.0, table_constants)


class TestFsk:
    def test_orthogonal_pulses(self):
        """Test vanishing real inner products with Δ = 1/2 and T_s = 1."""
        demo = fsk_demo(4)
        np.testing.assert_allclose(demo.symbols, [4.5, 5.5, 6.5, 7.5])
        off = ~np.eye(4, dtype=bool)
        assert np.max(np.abs(demo.real_gram[off])) <= 1e-9
        np.testing.assert_allclose(np.diag(demo.real_gram), demo.symbols**2, rtol=1e-12)
        assert np.max(np.abs(demo.complex_gram[off].imag)) > 0.5

    def test_distance_and_error_bound(self):
        """Test d_min = √(x₁² + x₂²) and the union bound (M-1)·Q(d_min/√(2N₀))."""
        demo = fsk_demo(4)
        assert demo.d_min == pytest.approx(math.sqrt(4.5**2 + 5.5**2), rel=1e-9)
        assert demo.union_bound_pe == pytest.approx(3 * stats.norm.sf(demo.d_min / math.sqrt(2.0)), rel=1e-9)

    @pytest.mark.parametrize("m", [2, 4, 8, 16])
    def test_energy_and_rate(self, m):
        """Test the average energy (28M²-1)Δ²/3 and rate log₂M/T_s."""
        demo = fsk_demo(m)
        assert demo.energy == pytest.approx(float(np.mean(demo.symbols**2)), rel=1e-12)
        assert demo.rate == math.log2(m)

    @pytest.mark.parametrize("kwargs", [{"m": 1}, {"m": 4, "t_s": 1.5}, {"m": 4, "t_s": 0.0}])
    def test_rejects_bad_arguments(self, kwargs):
        """Test validation of alphabet size and pulse width."""
        with pytest.raises(DomainError):
            fsk_demo(**kwargs)

    def test_rate_grows_linearly(self):
        """Test that the rate gains (6/28)·log₂e·P/N₀ per unit T_s."""
        rate = fsk_rate(np.array([1e3, 2e3]), 1.0, 1.0, 1e-6)
        assert rate[1] - rate[0] == pytest.approx(6.0 / 28.0 * 1e3 * math.log2(math.e), rel=1e-12)

    def test_rate_log_log_slope(self):
        """Test the slope of log rate against log P/N₀ between 10³ and 10⁵."""
        powers = np.logspace(3, 5, 9)
        slope = np.polyfit(np.log(powers), np.log(fsk_rate(powers, 1.0, 1.0, 1e-6)), 1)[0]
        assert slope == pytest.approx(1.014, abs=0.02)

    def test_rate_rejects_bad_target(self):
        """Test that the target error probability must lie in (0, 1)."""
        with pytest.raises(DomainError, match="error probability"):
            fsk_rate(1.0, 1.0, 1.0, 1.5)
