import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fiberacf.exceptions import DomainError
from fiberacf.params import (
    BOLTZMANN,
    FiberParams,
    c_of_rho,
    dbm_to_watts,
    delta_of_rho,
    derive_constants,
    format_quantity,
    mixing_ratios,
    parse_quantity,
    rho,
    watts_to_dbm,
)


class TestFiberParams:
    def test_table_values(self, table_params):
        """Test the reference record."""
        assert table_params.gamma == 1.27e-3
        assert table_params.z == 2.0e6
        assert table_params.b == 5.0e11
        assert table_params.t_s == 10e-12

    def test_noise_per_unit_distance(self, table_params):
        """Test K = N_A·B."""
        assert table_params.k == pytest.approx(3.337e-12, rel=1e-12)

    def test_receiver_noise_matches_temperature(self, table_params):
        """Test N₀ ≈ k_B·T_e within 0.1%."""
        assert table_params.n0 == pytest.approx(BOLTZMANN * table_params.t_e, rel=1e-3)

    def test_copies(self, table_params):
        """Test the with_* helpers replace one field only."""
        wider = table_params.with_bandwidth(1e12)
        assert wider.b == 1e12
        assert wider.k == pytest.approx(2 * table_params.k)
        assert table_params.with_gamma(0.0).gamma == 0.0
        assert table_params.with_noise(0.0).k == 0.0
        assert table_params.with_gamma(0.0).z == table_params.z

    @pytest.mark.parametrize(
        "field,value,message",
        [
            ("z", 0.0, "z must be positive"),
            ("b", -1.0, "b must be positive"),
            ("n0", 0.0, "n0 must be positive"),
            ("gamma", -1e-3, "gamma must be non-negative"),
            ("n_a", -1.0, "n_a must be non-negative"),
            ("z", math.nan, "finite"),
            ("t_s", -1.0, "t_s must be positive"),
        ],
    )
    def test_invalid_fields(self, table_params, field, value, message):
        """Test that out-of-domain fields are rejected with the field name."""
        values = {**table_params.__dict__, field: value}
        with pytest.raises(DomainError, match=message) as exc_info:
            FiberParams(**values)
        assert exc_info.value.name == field

    def test_zero_gamma_and_noise_allowed(self):
        """Test that the linear and noise-free channels are valid records."""
        params = FiberParams(gamma=0.0, z=1.0, n_a=0.0, b=1.0, n0=1.0)
        assert params.k == 0.0


class TestDeriveConstants:
    def test_table_constants(self, table_constants):
        """Test Kz, κ, γKz² and δ for the reference record."""
        dc = table_constants
        assert dc.kz == pytest.approx(6.674e-6, rel=1e-10)
        assert dc.kappa == pytest.approx(28.6, rel=0.02)
        assert dc.kappa == pytest.approx(28.7, abs=0.05)
        assert dc.gkz2 == pytest.approx(0.016952, rel=1e-4)
        assert dc.gkz2_half == pytest.approx(0.0085, rel=0.01)
        assert dc.sqrt_gkz2 == pytest.approx(0.130, rel=0.02)
        assert dc.delta == pytest.approx(1.357e-3, rel=1e-3)
        assert dc.p_o == pytest.approx(2.55e-5, rel=0.01)

    def test_delta_definition(self, table_constants):
        """Test δ = √(3Kz/(4e)) and P_o = 3(Kz + δ²)."""
        dc = table_constants
        assert dc.delta**2 == pytest.approx(3 * dc.kz / (4 * math.e), rel=1e-14)
        assert dc.p_o == pytest.approx(3 * (dc.kz + dc.delta**2), rel=1e-14)

    def test_tail_attenuation(self, table_constants):
        """Test that c₁ and c₃ carry the e^(-√(γKz²)) factor and the flat variants do not."""
        dc = table_constants
        factor = math.exp(-dc.sqrt_gkz2)
        assert dc.tail_attenuation == pytest.approx(factor)
        assert dc.c1 == pytest.approx(dc.c1_flat * factor)
        assert dc.c3 == pytest.approx(dc.c3_flat * factor)
        assert dc.c1_for(True) == dc.c1
        assert dc.c1_for(False) == dc.c1_flat
        assert dc.c3_for(False) == dc.c3_flat

    def test_linear_channel_constants(self, linear_constants):
        """Test that γ = 0 gives κ = 0 and infinite nonlinear bound constants."""
        assert linear_constants.kappa == 0.0
        assert math.isinf(linear_constants.c1_flat)
        assert math.isinf(linear_constants.c2)
        assert math.isinf(linear_constants.c3_flat)

    def test_cached(self, table_params):
        """Test that equal records share one DerivedConstants instance."""
        assert derive_constants(table_params) is derive_constants(FiberParams.table())


class TestCorrelation:
    def test_rho_is_sinc(self):
        """Test ρ(τ) = sinc(Bτ) with exact zeros at multiples of 1/B."""
        assert rho(0.0, 5e11) == 1.0
        assert rho(1.0, 2.0) == 0.0
        np.testing.assert_allclose(rho(np.array([1e-12]), 5e11), [2 / math.pi], rtol=1e-14)

    def test_c_of_rho(self, table_constants):
        """Test c = -jγ(K/2)√(1-ρ²)."""
        dc = table_constants
        assert c_of_rho(dc, 1.0) == 0j
        expected = -dc.params.gamma * dc.k / 2 * math.sqrt(1 - 0.36)
        assert c_of_rho(dc, 0.6) == pytest.approx(complex(0.0, expected))

    def test_c_of_rho_rejects_out_of_range(self, table_constants):
        """Test that |ρ| > 1 raises."""
        with pytest.raises(DomainError, match=r"\|rho\| <= 1"):
            c_of_rho(table_constants, 1.5)

    def test_mixing_ratio_limits(self, table_constants):
        """Test that the ratios approach γ(K/2)z² and γKz³/3 as ρ → 1."""
        dc = table_constants
        exact = mixing_ratios(dc, 1.0)
        near = mixing_ratios(dc, 1.0 - 1e-6)
        assert bool(exact.limit[0])
        assert not bool(near.limit[0])
        assert exact.a_s[0] == pytest.approx(dc.gkz2_half)
        assert exact.a_t[0] == pytest.approx(dc.params.gamma * dc.k * dc.params.z**3 / 3)
        assert near.a_s[0] == pytest.approx(exact.a_s[0], rel=1e-3)
        assert near.a_t[0] == pytest.approx(exact.a_t[0], rel=1e-3)

    def test_delta_of_rho_never_exceeds_delta(self, table_constants):
        """Test δ(c) ≤ δ across correlation coefficients."""
        values = delta_of_rho(table_constants, np.linspace(-1.0, 1.0, 101))
        assert np.all(values <= table_constants.delta * (1 + 1e-9))


class TestUnits:
    @pytest.mark.parametrize(
        "text,dimension,expected",
        [
            ("2000 km", "length", 2.0e6),
            ("500 GHz", "frequency", 5.0e11),
            ("10 ps", "time", 1e-11),
            ("1.27 /W/km", "nonlinearity", 1.27e-3),
            ("100 mW", "power", 0.1),
            ("20 dBm", "power", 0.1),
            ("6.674e-24 W/Hz/m", "noise_psdd", 6.674e-24),
            ("300 K", None, 300.0),
        ],
    )
    def test_parse_quantity(self, text, dimension, expected):
        """Test parsing of prefixed units and dBm."""
        assert parse_quantity(text, dimension) == pytest.approx(expected, rel=1e-12)

    def test_parse_rejects_unknown_unit(self):
        """Test that an unknown unit is rejected."""
        with pytest.raises(DomainError, match="Unknown unit") as exc_info:
            parse_quantity("3 furlongs")
        assert exc_info.value.value == "furlongs"

    def test_parse_rejects_wrong_dimension(self):
        """Test that a unit of the wrong dimension is rejected."""
        with pytest.raises(DomainError, match="Expected a power quantity"):
            parse_quantity("5 GHz", "power")

    def test_parse_rejects_garbage(self):
        """Test that text without a number is rejected."""
        with pytest.raises(DomainError, match="Cannot parse"):
            parse_quantity("fast")

    def test_format_quantity(self):
        """Test formatting in a chosen unit."""
        assert format_quantity(5e11, "GHz") == "500 GHz"
        assert format_quantity(0.1, "dBm") == "20 dBm"

    def test_dbm_round_numbers(self):
        """Test 0 dBm = 1 mW and 0 W = -inf dBm."""
        assert dbm_to_watts(0.0) == pytest.approx(1e-3)
        assert watts_to_dbm(0.0) == -math.inf

    @given(st.floats(min_value=-100.0, max_value=100.0))
    def test_dbm_inverse(self, p_dbm):
        """Test that watts_to_dbm inverts dbm_to_watts."""
        assert watts_to_dbm(dbm_to_watts(p_dbm)) == pytest.approx(p_dbm, abs=1e-9)
