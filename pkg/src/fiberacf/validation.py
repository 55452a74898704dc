"""Validation suites: closed forms against envelopes, identities and Monte Carlo.

Each suite returns a ValidationReport of named checks with signed margins;
a check passes when its margin is non-negative. Example::

    report = run_suite("special", load_config())
    report.raise_for_failures()
"""

import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from ._logger import Logger, create_logger
from .autocorrelation import acf_exact, acf_exact_array
from .capacity import (
    capacity_curves,
    capacity_upper1,
    eta_bound,
    fsk_demo,
    fsk_rate,
    infinite_bandwidth_capacity_bound,
    scaled_b_study,
    three_sample_demo,
)
from .channel_mc import (
    AGREEMENT_SIGMAS,
    CONVERGENCE_SIGMAS,
    McEstimate,
    MonteCarloEngine,
    mc_acf,
    mecozzi_identity_check,
    mecozzi_value,
)
from .config import AppConfig
from .exceptions import DomainError, FiberAcfError, ValidationFailure
from .params import DerivedConstants, dbm_to_watts, derive_constants, watts_to_dbm
from .power_bounds import (
    RegimeTag,
    avg_power_bound,
    dominance_margin,
    expected_scaling_exponents,
    power_threshold,
    random_constant_envelope_cases,
    received_power_crossover,
    scaling_exponents,
)
from .special_functions import (
    eval_hyperbolic,
    exponential_bound_margins,
    hyperbolic_bound_margins,
    sinc_bound_margins,
)
from .spectrum import PsdGrid, psd_ring_pam

SUITES = ("special", "mc-acf", "mecozzi", "bounds", "capacity", "demos")

MECOZZI_TRIALS = 100_000
MECOZZI_CASES = 20
DOMINANCE_CASES = 10_000
PUBLISHED_THRESHOLD_W = 18.6
PUBLISHED_THRESHOLD_DBM = 42.7
ENVELOPE_TOLERANCE = 1e-12
# B·T_s = 6.15 for the reference fiber.
OFFSET_SYMBOL_PERIOD = 12.3e-12


@dataclass(frozen=True)
class Check:
    """One named check. ``margin`` ≥ 0 means it passed."""

    name: str
    passed: bool
    margin: float
    detail: str = ""


@dataclass
class ValidationReport:
    """Outcome of one suite."""

    suite: str
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        """True when every check passed."""
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        """Checks that did not pass."""
        return [c for c in self.checks if not c.passed]

    def rows(self) -> list[tuple[str, str, bool, float, str]]:
        """CSV rows ``suite, check, passed, margin, detail``."""
        return [(self.suite, c.name, c.passed, c.margin, c.detail) for c in self.checks]

    def raise_for_failures(self) -> None:
        """Raise ValidationFailure listing the failed checks, if any.

        Raises:
            ValidationFailure: If at least one check failed.
        """
        failed = self.failures
        if failed:
            raise ValidationFailure(
                f"Suite '{self.suite}' failed {len(failed)} of {len(self.checks)} checks",
                suite=self.suite,
                failures=[f"{c.name}: {c.detail}" for c in failed],
            )


class _Recorder:
    def __init__(self, suite: str, logger: Logger):
        self.report = ValidationReport(suite)
        self._logger = logger

    def add(self, name: str, margin: float, detail: str = "") -> None:
        passed = bool(np.isfinite(margin) and margin >= 0.0)
        self.report.checks.append(Check(name=name, passed=passed, margin=float(margin), detail=detail))
        if passed:
            self._logger.info("[%s] %s ok (margin %.3g) %s", self.report.suite, name, margin, detail)
        else:
            self._logger.error("[%s] %s FAILED (margin %.3g) %s", self.report.suite, name, margin, detail)

    def within(self, name: str, actual: float, expected: float, rtol: float, unit: str = "") -> None:
        err = abs(actual - expected) / abs(expected)
        self.add(name, rtol - err, f"{actual:.6g}{unit} vs {expected:.6g}{unit} (rtol {rtol:g})")

    def agrees(self, name: str, est: McEstimate, value: complex, floor: float = 0.0) -> None:
        scale = max(est.std_error, floor)
        sigmas = abs(est.mean - value) / scale if scale > 0 else (0.0 if est.mean == value else math.inf)
        self.add(name, AGREEMENT_SIGMAS - sigmas, f"mc {est.mean:.6g} ± {est.std_error:.3g}, closed form {value:.6g}")

    def guarded(self, name: str, fn: Callable[[], None]) -> None:
        try:
            fn()
        except FiberAcfError as e:
            self.add(name, -math.inf, f"raised {type(e).__name__}: {e}")


def _special(config: AppConfig, rec: _Recorder) -> None:
    dc = derive_constants(config.fiber)
    rec.within("kappa", dc.kappa, 28.6, 0.02)
    rec.within("sqrt_gkz2", dc.sqrt_gkz2, 0.130, 0.02)
    rec.within("gkz2", dc.gkz2, 0.017, 0.05)
    rec.within("delta", dc.delta, 1.4e-3, 0.05)

    x = np.logspace(-6, 3, 10_000)
    for label, z in (("unit_length", 1.0), ("fiber_length", dc.params.z)):
        for name, margin in hyperbolic_bound_margins(x, z).items():
            rec.add(f"hyperbolic_{name}_{label}", float(np.min(margin)) + ENVELOPE_TOLERANCE)

    y = np.linspace(-8.0, 8.0, 16_001)
    for name, margin in sinc_bound_margins(y).items():
        rec.add(f"sinc_{name}", float(np.min(margin)) + ENVELOPE_TOLERANCE)
    for a in (0.1, 1.0, 10.0):
        for name, margin in exponential_bound_margins(np.logspace(-6, 3, 10_000), a).items():
            rec.add(f"exponential_{name}_a{a:g}", float(np.min(margin)) + ENVELOPE_TOLERANCE)

    worst = 0.0
    rng = np.random.default_rng(0)
    for xr, xi in zip(rng.uniform(-50.0, 50.0, 200), rng.uniform(-50.0, 50.0, 200), strict=True):
        c = complex(xr, xi)
        a, b = eval_hyperbolic(c, 1.0), eval_hyperbolic(c, 1.0, negate_root=True)
        worst = max(worst, abs(a.s - b.s) / max(abs(a.s), 1e-300), abs(a.t - b.t) / max(abs(a.t), 1e-300))
    rec.add("branch_invariance", 1e-14 - worst, f"max relative difference {worst:.3g}")


def _grid_powers() -> tuple[float, ...]:
    return (0.0, 10e-3, 100e-3, 200e-3, 400e-3)


def _identities(dc: DerivedConstants, rec: _Recorder) -> None:
    rng = np.random.default_rng(1)
    n = 10_000
    u0 = rng.normal(0.0, 0.3, n) + 1j * rng.normal(0.0, 0.3, n)
    u0p = rng.normal(0.0, 0.3, n) + 1j * rng.normal(0.0, 0.3, n)
    r = rng.uniform(-1.0, 1.0, n)

    same = acf_exact_array(u0, u0, np.ones(n), dc)
    expected = dc.kz + np.abs(u0) ** 2
    err = float(np.max(np.abs(same - expected) / expected))
    rec.add("power_preservation", 1e-12 - err, f"max relative error {err:.3g}")

    linear = derive_constants(dc.params.with_gamma(0.0))
    lin = acf_exact_array(u0, u0p, r, linear)
    lin_expected = linear.kz * r + u0 * np.conj(u0p)
    err = float(np.max(np.abs(lin - lin_expected) / (linear.kz + np.abs(u0) * np.abs(u0p))))
    rec.add("linear_reduction", 1e-12 - err, f"max relative error {err:.3g}")

    fwd = acf_exact_array(u0, u0p, r, dc)
    rev = acf_exact_array(u0p, u0, r, dc)
    err = float(np.max(np.abs(fwd - np.conj(rev)) / np.maximum(np.abs(fwd), dc.kz)))
    rec.add("hermitian_symmetry", 1e-13 - err, f"max relative error {err:.3g}")


def _spectrum(config: AppConfig, dc: DerivedConstants, rec: _Recorder) -> None:
    sp = config.spectrum
    wide = PsdGrid(
        samples_per_inverse_b=sp.samples_per_inverse_b,
        span_b=max(sp.span_b, 32.0),
        window_inverse_b=sp.window_inverse_b,
    )
    p = 0.1
    rec.within("psd_total_power", psd_ring_pam(p, dc, grid=wide).total_power(), dc.kz + p, 5e-3, " W")
    offset = psd_ring_pam(p, dc, t_s=OFFSET_SYMBOL_PERIOD, grid=wide)
    rec.within("psd_total_power_offset_symbol_period", offset.total_power(), dc.kz + p, 5e-3, " W")

    grid = PsdGrid(
        samples_per_inverse_b=sp.samples_per_inverse_b, span_b=sp.span_b, window_inverse_b=sp.window_inverse_b
    )
    f = dc.params.b / 2.0
    nonlinear = psd_ring_pam(p, dc, grid=grid)
    reference = psd_ring_pam(10e-3, derive_constants(dc.params.with_gamma(0.0)), grid=grid)
    at_f = float(np.interp(f, nonlinear.freqs, nonlinear.density))
    ratio_db = 10.0 * math.log10(at_f / float(np.interp(f, reference.freqs, reference.density)))
    rec.add("psd_broadening_at_half_b", ratio_db - 10.0, f"{ratio_db:.2f} dB above the linear 10 mW reference")


def _mc_acf(config: AppConfig, rec: _Recorder, engine: MonteCarloEngine, trials: int, seed: int) -> None:
    dc = derive_constants(config.fiber)
    steps = config.monte_carlo.steps
    _identities(dc, rec)
    rec.guarded("spectrum", lambda: _spectrum(config, dc, rec))
    for p in _grid_powers():
        for r in (0.0, 0.2, 0.5, 0.8, 0.99):
            u = math.sqrt(p)
            est = mc_acf(u, u, r, dc, trials, steps, seed, engine=engine)
            closed = acf_exact(u, u, r, dc).value
            rec.agrees(f"acf_p{p * 1e3:g}mw_rho{r:g}", est, closed, floor=1e-12 * (dc.kz + p))

    u = math.sqrt(0.1)
    coarse = mc_acf(u, u, 0.5, dc, trials, steps, seed, engine=engine)
    fine = mc_acf(u, u, 0.5, dc, trials, 2 * steps, seed, engine=engine)
    combined = math.hypot(coarse.std_error, fine.std_error)
    rec.add(
        "discretization_doubling",
        CONVERGENCE_SIGMAS - abs(coarse.mean - fine.mean) / combined,
        f"{steps} steps {coarse.mean:.6g}, {2 * steps} steps {fine.mean:.6g}",
    )


def _mecozzi(config: AppConfig, rec: _Recorder, engine: MonteCarloEngine, trials: int, seed: int) -> None:
    rng = np.random.default_rng(seed)
    z = 1.0
    for i in range(MECOZZI_CASES):
        a = complex(*rng.uniform(-0.5, 0.5, 2))
        b = complex(*rng.uniform(-0.5, 0.5, 2))
        c = complex(0.0, rng.uniform(-1.0, 1.0))
        est, analytic = mecozzi_identity_check(a, b, c, z, trials, 1000, seed + i, engine=engine)
        rec.agrees(f"mecozzi_case{i}", est, analytic)

    a, b = complex(0.3, -0.2), complex(-0.4, 0.1)
    limit = complex(np.exp(z / 2.0 * (a * a + a * b * z + b * b * z * z / 3.0)))
    for c in (0j, 1e-12j):
        err = abs(mecozzi_value(a, b, c, z) - limit) / abs(limit)
        rec.add(f"mecozzi_small_c_{abs(c):g}", 1e-10 - err, f"relative error {err:.3g}")


def _bounds(config: AppConfig, rec: _Recorder, seed: int) -> None:
    dc = derive_constants(config.fiber)
    q = config.bounds.q

    exact = power_threshold(dc, q, tail_attenuation=True)
    flat = power_threshold(dc, q, tail_attenuation=False)
    rec.add(
        "threshold_with_tail_attenuation",
        0.0 if math.isfinite(exact) else -math.inf,
        f"{exact:.4g} W ({watts_to_dbm(exact):.2f} dBm)",
    )
    rec.within("threshold_published", flat, PUBLISHED_THRESHOLD_W, 0.01, " W")
    flat_dbm = float(watts_to_dbm(flat))
    rec.add("threshold_published_dbm", 0.1 - abs(flat_dbm - PUBLISHED_THRESHOLD_DBM), f"{flat_dbm:.2f} dBm")

    crossover = received_power_crossover(dc.params.b, dc, tail_attenuation=config.bounds.tail_attenuation)
    rec.add("received_power_crossover", 0.0, f"{crossover:.4g} W")

    large_x = derive_constants(config.fiber.with_gamma(config.fiber.gamma * 200.0))
    for tag, consts in ((RegimeTag.LEMMA1, dc), (RegimeTag.LEMMA2, large_x), (RegimeTag.LEMMA3, dc)):
        cases = random_constant_envelope_cases(DOMINANCE_CASES, consts, tag, seed=seed)
        worst = min(dominance_margin(case, consts) for case in cases)
        rec.add(f"dominance_{tag.value}", worst, f"{len(cases)} cases, worst relative margin {worst:.3g}")

    # Beyond beta = 1 the grid needs Kz >> P, hence B = B0 at 1 mW.
    scaling_grids = (
        (0.0, np.logspace(4, 6, 9), None),
        (0.5, np.logspace(7, 9, 9), None),
        (1.0, np.logspace(7, 9, 9), None),
        (2.0, np.logspace(1, 3, 9), 1e-3),
    )
    for beta, p_grid, p_ref in scaling_grids:
        measured = scaling_exponents(beta, dc, p_grid, q, p_ref=p_ref)
        expected = expected_scaling_exponents(beta)
        worst = max(abs(m - e) for m, e in zip(measured, expected, strict=True))
        detail = f"measured {measured[0]:.3f}, {measured[1]:.3f}; expected {expected[0]:.3f}, {expected[1]:.3f}"
        rec.add(f"scaling_beta{beta:g}", 0.05 - worst, detail)

    powers = np.logspace(-4, 4, 200)
    ta = config.bounds.tail_attenuation
    values = np.array([avg_power_bound(float(p), dc.params.b, dc, tail_attenuation=ta).bound for p in powers])
    slopes = np.diff(values) / np.diff(powers)
    rise = float(np.max(np.diff(slopes)))
    scale = float(np.max(np.abs(slopes)))
    rec.add("concavity", 1e-12 * scale - rise, f"largest slope increase {rise:.3g}")
    rec.add("monotonicity", float(np.min(np.diff(values))), "smallest increment between grid powers")


def _capacity(config: AppConfig, rec: _Recorder) -> None:
    dc = derive_constants(config.fiber)
    w = dc.params.b
    ta = config.bounds.tail_attenuation
    small = capacity_upper1(1e-9, w, dc, tail_attenuation=ta)
    rec.add("upper1_small_power", 0.1 - abs(small - 11.7), f"{small:.3f} bits/s/Hz")

    large = np.logspace(3, 5, 9)
    u1 = np.array([capacity_upper1(float(p), w, dc, tail_attenuation=ta) for p in large])
    slope = float(np.polyfit(np.log2(large), u1, 1)[0])
    rec.within("upper1_large_power_slope", slope, 0.5, 0.05, " bits per doubling")

    fig = config.figures
    grid = np.asarray(dbm_to_watts(np.linspace(fig.p_dbm_start, fig.p_dbm_stop, fig.p_points)))
    curves = capacity_curves(grid, w, dc, config.bounds.q, tail_attenuation=ta)
    rec.add("eta_le_upper1", float(np.min(curves.upper1.values - curves.eta.values)) + 1e-12)
    rec.add("upper2_le_upper1", float(np.min(curves.upper1.values - curves.upper2.values)) + 1e-12)
    beyond = 2.0 * curves.threshold_w
    drop = capacity_upper1(beyond, w, dc, tail_attenuation=ta) - eta_bound(
        beyond, w, dc, config.bounds.q, tail_attenuation=ta
    )
    rec.add("eta_below_upper1_beyond_threshold", drop, f"gap {drop:.3g} bits/s/Hz at {beyond:.3g} W")

    study = scaled_b_study(np.logspace(3, 7, 17), w, dc)
    exponent = study.power_exponent()
    rec.add("scaled_b_exponent", 0.03 - abs(exponent + 0.25), f"{exponent:.4f}")
    rec.within("kappa_hat", study.kappa_hat, 28.6, 0.02)


def _demos(config: AppConfig, rec: _Recorder, engine: MonteCarloEngine, trials: int, seed: int) -> None:
    dc = derive_constants(config.fiber)
    for m in (2, 4, 8):
        demo = fsk_demo(m)
        off = float(np.max(np.abs(demo.real_gram[~np.eye(m, dtype=bool)])))
        rec.add(f"fsk_orthogonality_m{m}", 1e-9 - off, f"largest off-diagonal {off:.3g}")

    powers = np.logspace(3, 5, 9)
    rates = np.asarray(fsk_rate(powers, 1.0, 1.0, 1e-6))
    slope = float(np.polyfit(np.log(powers), np.log(rates), 1)[0])
    rec.within("fsk_rate_slope", slope, 1.0, 0.02)

    x2 = 1e-12
    est = three_sample_demo(math.sqrt(x2), 1e-3 / dc.params.b, dc, trials, seed, engine=engine)
    bias = abs(est.mean.real - x2) / x2
    rec.add("three_sample_bias", 0.01 - bias, f"estimate {est.mean.real:.6g} J for {x2:g} J")

    peak = 1.0 / dc.kappa
    plateau = infinite_bandwidth_capacity_bound(peak, dc.params.t_s or 1e-11, dc)
    beyond = infinite_bandwidth_capacity_bound(10.0 * peak, dc.params.t_s or 1e-11, dc)
    rec.add("infinite_bandwidth_plateau", 1e-12 * plateau - abs(plateau - beyond), f"P = 1/kappa = {peak:.4g} W")


def run_suite(
    name: str,
    config: AppConfig,
    trials: int | None = None,
    seed: int | None = None,
    threads: int | None = None,
    logger: Logger | None = None,
) -> ValidationReport:
    """Run one validation suite.

    Args:
        name: One of ``special``, ``mc-acf``, ``mecozzi``, ``bounds``, ``capacity``, ``demos``.
        config: Run configuration.
        trials: Monte Carlo trials; defaults to the configured count (1e5 for ``mecozzi``).
        seed: Root seed; defaults to the configured seed.
        threads: Worker threads; defaults to the configured count.
        logger: Logger for check outcomes.

    Returns:
        The ValidationReport. Checks that raise are recorded as failures.

    Raises:
        DomainError: If ``name`` is not a known suite.
    """
    if name not in SUITES:
        raise DomainError(f"Unknown suite '{name}'; expected one of {', '.join(SUITES)}", name="suite", value=name)
    log = create_logger(logger)
    mc = config.monte_carlo
    seed = mc.seed if seed is None else seed
    engine = MonteCarloEngine(threads=threads or mc.threads, logger=log)
    rec = _Recorder(name, log)

    if name == "special":
        rec.guarded(name, lambda: _special(config, rec))
    elif name == "mc-acf":
        rec.guarded(name, lambda: _mc_acf(config, rec, engine, trials or mc.trials, seed))
    elif name == "mecozzi":
        rec.guarded(name, lambda: _mecozzi(config, rec, engine, trials or MECOZZI_TRIALS, seed))
    elif name == "bounds":
        rec.guarded(name, lambda: _bounds(config, rec, seed))
    elif name == "capacity":
        rec.guarded(name, lambda: _capacity(config, rec))
    else:
        rec.guarded(name, lambda: _demos(config, rec, engine, trials or mc.trials, seed))

    report = rec.report
    log.info("Suite %s: %d checks, %d failed", name, len(report.checks), len(report.failures))
    return report
