"""TOML configuration for fiberacf runs.

A configuration file has up to five sections, all optional::

    [fiber]
    gamma = "1.27 /W/km"        # or gamma_per_w_km = 1.27
    length_km = 2000
    oa_noise_psdd_w_per_hz_m = 6.674e-24
    oa_bandwidth_ghz = 500
    rx_noise_psd_w_per_hz = 4.142e-21
    symbol_period_ps = 10
    temperature_k = 300

    [bounds]
    q = 0.99
    tail_attenuation = false

    [monte_carlo]
    trials = 10000
    steps = 512
    seed = 42
    threads = 1

    [spectrum]
    samples_per_inverse_b = 64
    span_b = 8.0
    window_inverse_b = 64.0

    [figures]
    tprime_ps = 5.1

Missing sections and keys take the reference fiber values.
"""

import dataclasses
import hashlib
import json
import math
import os
import tomllib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .exceptions import ConfigError, DomainError
from .params import BOLTZMANN, FiberParams, parse_quantity

SEED_ENV_VAR = "FIBERACF_SEED"

# Relative tolerance for N0 against k_B·T_e.
N0_TEMPERATURE_RTOL = 1e-3

# key -> (FiberParams field, SI scale)
_FIBER_NUMERIC: dict[str, tuple[str, float]] = {
    "gamma_per_w_km": ("gamma", 1e-3),
    "length_km": ("z", 1e3),
    "oa_noise_psdd_w_per_hz_m": ("n_a", 1.0),
    "oa_bandwidth_ghz": ("b", 1e9),
    "rx_noise_psd_w_per_hz": ("n0", 1.0),
    "symbol_period_ps": ("t_s", 1e-12),
    "temperature_k": ("t_e", 1.0),
}

# key -> (FiberParams field, dimension)
_FIBER_QUANTITY: dict[str, tuple[str, str]] = {
    "gamma": ("gamma", "nonlinearity"),
    "length": ("z", "length"),
    "oa_noise_psdd": ("n_a", "noise_psdd"),
    "oa_bandwidth": ("b", "frequency"),
    "rx_noise_psd": ("n0", "noise_psd"),
    "symbol_period": ("t_s", "time"),
    "temperature": ("t_e", "temperature"),
}


@dataclass(frozen=True)
class BoundsConfig:
    """Settings of the received-power and bandwidth bounds.

    Attributes:
        q: Fraction of the linear-channel power Kz+P that must fall in band.
        tail_attenuation: Keep the e^(-√(γKz²)) factor in c₁ and c₃. Off by default,
            which reproduces the 18.6 W (42.7 dBm) power threshold; on gives the tighter 18.2 W.
    """

    q: float = 0.99
    tail_attenuation: bool = False


@dataclass(frozen=True)
class MonteCarloConfig:
    """Trial counts, discretization and seeding of Monte Carlo runs."""

    trials: int = 10000
    steps: int = 512
    seed: int = 42
    threads: int = 1


@dataclass(frozen=True)
class SpectrumConfig:
    """Resolution of the cyclostationary PSD quadrature, in units of 1/B and B."""

    samples_per_inverse_b: int = 64
    span_b: float = 8.0
    window_inverse_b: float = 64.0


@dataclass(frozen=True)
class FigureConfig:
    """Operating points of the figure tables."""

    tprime_ps: float = 5.1
    acf_powers_mw: tuple[float, ...] = (10.0, 100.0, 200.0, 400.0)
    psd_powers_mw: tuple[float, ...] = (10.0, 50.0, 100.0, 500.0, 1000.0)
    mc_power_mw: float = 100.0
    p_dbm_start: float = -10.0
    p_dbm_stop: float = 70.0
    p_points: int = 161


@dataclass(frozen=True)
class AppConfig:
    """A complete run configuration."""

    fiber: FiberParams = field(default_factory=FiberParams.table)
    bounds: BoundsConfig = field(default_factory=BoundsConfig)
    monte_carlo: MonteCarloConfig = field(default_factory=MonteCarloConfig)
    spectrum: SpectrumConfig = field(default_factory=SpectrumConfig)
    figures: FigureConfig = field(default_factory=FigureConfig)
    source: str | None = None

    def as_dict(self) -> dict[str, Any]:
        """Canonical plain-data form, without the source path."""
        data = dataclasses.asdict(self)
        data.pop("source")
        return data

    def digest(self) -> str:
        """SHA-256 of the canonical JSON form."""
        payload = json.dumps(self.as_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def with_monte_carlo(self, **changes: Any) -> "AppConfig":
        """Copy with some Monte Carlo settings replaced; ``None`` values are ignored."""
        updates = {k: v for k, v in changes.items() if v is not None}
        return dataclasses.replace(self, monte_carlo=dataclasses.replace(self.monte_carlo, **updates))


def _fiber_from_table(table: dict[str, Any], path: str | None) -> FiberParams:
    values = dataclasses.asdict(FiberParams.table())
    seen: dict[str, str] = {}
    for key, raw in table.items():
        if key in _FIBER_NUMERIC:
            target, scale = _FIBER_NUMERIC[key]
            if not isinstance(raw, int | float) or isinstance(raw, bool):
                raise ConfigError(f"fiber.{key} must be a number", path=path, key=f"fiber.{key}")
            value = float(raw) * scale
        elif key in _FIBER_QUANTITY:
            target, dimension = _FIBER_QUANTITY[key]
            if not isinstance(raw, str):
                raise ConfigError(
                    f"fiber.{key} must be a quantity string such as '2000 km'", path=path, key=f"fiber.{key}"
                )
            try:
                value = parse_quantity(raw, dimension)
            except DomainError as e:
                raise ConfigError(f"fiber.{key}: {e}", path=path, key=f"fiber.{key}") from e
        else:
            raise ConfigError(f"Unknown key fiber.{key}", path=path, key=f"fiber.{key}")
        if target in seen:
            raise ConfigError(
                f"fiber.{key} and fiber.{seen[target]} set the same parameter", path=path, key=f"fiber.{key}"
            )
        seen[target] = key
        values[target] = value

    if "t_e" in seen:
        expected = BOLTZMANN * values["t_e"]
        if abs(values["n0"] - expected) > N0_TEMPERATURE_RTOL * values["n0"]:
            raise ConfigError(
                f"Receiver noise PSD {values['n0']:g} W/Hz does not match k_B*T_e = {expected:g} W/Hz",
                path=path,
                key="fiber.temperature_k",
            )
    try:
        return FiberParams(**values)
    except DomainError as e:
        raise ConfigError(f"Invalid fiber parameters: {e}", path=path, key=f"fiber.{e.name}") from e


def _section(cls: type, name: str, table: dict[str, Any], path: str | None) -> Any:
    known = {f.name: f for f in dataclasses.fields(cls)}
    kwargs: dict[str, Any] = {}
    for key, raw in table.items():
        if key not in known:
            raise ConfigError(f"Unknown key {name}.{key}", path=path, key=f"{name}.{key}")
        default = known[key].default
        if isinstance(default, tuple):
            if not isinstance(raw, list) or not all(isinstance(v, int | float) for v in raw):
                raise ConfigError(f"{name}.{key} must be a list of numbers", path=path, key=f"{name}.{key}")
            kwargs[key] = tuple(float(v) for v in raw)
        elif isinstance(default, bool):
            if not isinstance(raw, bool):
                raise ConfigError(f"{name}.{key} must be true or false", path=path, key=f"{name}.{key}")
            kwargs[key] = raw
        elif isinstance(default, int):
            if not isinstance(raw, int) or isinstance(raw, bool):
                raise ConfigError(f"{name}.{key} must be an integer", path=path, key=f"{name}.{key}")
            kwargs[key] = raw
        else:
            if not isinstance(raw, int | float) or isinstance(raw, bool) or not math.isfinite(raw):
                raise ConfigError(f"{name}.{key} must be a finite number", path=path, key=f"{name}.{key}")
            kwargs[key] = float(raw)
    return cls(**kwargs)


def _check_ranges(config: AppConfig, path: str | None) -> None:
    if not 0.5 < config.bounds.q < 1.0:
        raise ConfigError("bounds.q must lie in (0.5, 1)", path=path, key="bounds.q")
    mc = config.monte_carlo
    if mc.trials < 2:
        raise ConfigError("monte_carlo.trials must be at least 2", path=path, key="monte_carlo.trials")
    if mc.steps < 2:
        raise ConfigError("monte_carlo.steps must be at least 2", path=path, key="monte_carlo.steps")
    if mc.threads < 1:
        raise ConfigError("monte_carlo.threads must be at least 1", path=path, key="monte_carlo.threads")
    if mc.seed < 0:
        raise ConfigError("monte_carlo.seed must be non-negative", path=path, key="monte_carlo.seed")
    sp = config.spectrum
    if sp.samples_per_inverse_b < 4 or sp.span_b <= 0 or sp.window_inverse_b <= 0:
        raise ConfigError("spectrum resolution values must be positive", path=path, key="spectrum")


def config_from_mapping(data: dict[str, Any], path: str | None = None) -> AppConfig:
    """Build an AppConfig from already-parsed TOML data.

    Raises:
        ConfigError: On unknown sections or keys, wrong types, out-of-range
            values, or an N₀ inconsistent with the given temperature.
    """
    sections = {
        "bounds": BoundsConfig,
        "monte_carlo": MonteCarloConfig,
        "spectrum": SpectrumConfig,
        "figures": FigureConfig,
    }
    unknown = set(data) - set(sections) - {"fiber"}
    if unknown:
        name = sorted(unknown)[0]
        raise ConfigError(f"Unknown configuration section [{name}]", path=path, key=name)

    kwargs: dict[str, Any] = {"source": path}
    if "fiber" in data:
        kwargs["fiber"] = _fiber_from_table(data["fiber"], path)
    for name, cls in sections.items():
        if name in data:
            kwargs[name] = _section(cls, name, data[name], path)
    config = AppConfig(**kwargs)
    _check_ranges(config, path)
    return config


def load_config(path: str | os.PathLike[str] | None = None) -> AppConfig:
    """Load a TOML configuration file, or the defaults when ``path`` is None.

    Args:
        path: Path to the TOML file.

    Returns:
        The validated configuration.

    Raises:
        ConfigError: If the file cannot be read or parsed, or fails validation.
    """
    if path is None:
        return AppConfig()
    location = Path(path)
    try:
        with location.open("rb") as fh:
            data = tomllib.load(fh)
    except OSError as e:
        raise ConfigError(f"Cannot read configuration file: {e}", path=str(location)) from e
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"Invalid TOML: {e}", path=str(location)) from e
    return config_from_mapping(data, str(location))


def resolve_seed(cli_seed: int | None, config: AppConfig) -> int:
    """Pick the Monte Carlo seed: FIBERACF_SEED, then the command line, then the config.

    Raises:
        ConfigError: If FIBERACF_SEED is not a non-negative integer.
    """
    raw = os.getenv(SEED_ENV_VAR)
    if raw is not None and raw.strip():
        try:
            seed = int(raw.strip())
        except ValueError as e:
            raise ConfigError(f"{SEED_ENV_VAR} must be an integer, got '{raw}'", key=SEED_ENV_VAR) from e
        if seed < 0:
            raise ConfigError(f"{SEED_ENV_VAR} must be non-negative", key=SEED_ENV_VAR)
        return seed
    return cli_seed if cli_seed is not None else config.monte_carlo.seed
