import pytest

from fiberacf.channel_mc import MonteCarloEngine
from fiberacf.config import AppConfig, FigureConfig, MonteCarloConfig, SpectrumConfig
from fiberacf.params import FiberParams, derive_constants


@pytest.fixture(scope="session")
def table_params() -> FiberParams:
    return FiberParams.table()


@pytest.fixture(scope="session")
def table_constants(table_params):
    return derive_constants(table_params)


@pytest.fixture(scope="session")
def linear_constants(table_params):
    return derive_constants(table_params.with_gamma(0.0))


@pytest.fixture(scope="session")
def small_params() -> FiberParams:
    """Unit-scale fiber for Monte Carlo tests: z = 1, N_A = 1, B = 1, γ = 0.5."""
    return FiberParams(gamma=0.5, z=1.0, n_a=1.0, b=1.0, n0=1.0, t_s=1.0)


@pytest.fixture(scope="session")
def small_constants(small_params):
    return derive_constants(small_params)


@pytest.fixture(scope="function")
def engine() -> MonteCarloEngine:
    return MonteCarloEngine()


@pytest.fixture(scope="session")
def quick_config() -> AppConfig:
    """Table fiber with a coarse power grid and few Monte Carlo trials."""
    return AppConfig(
        monte_carlo=MonteCarloConfig(trials=400, steps=64, seed=7),
        spectrum=SpectrumConfig(samples_per_inverse_b=16, span_b=4.0, window_inverse_b=16.0),
        figures=FigureConfig(p_dbm_start=0.0, p_dbm_stop=60.0, p_points=7),
    )
