"""Monte Carlo simulation of the dispersion-free fiber with jointly-Wiener noise.

The output at time t is

    u(z, t) = (u0 + √K w(z, t)) · exp(jγ ∫₀^z |u0 + √K w(z', t)|² dz')

where w(·, t) is a standard complex Wiener process in distance. Two time
instants see noise processes with correlation ρ = sinc(B(t - t')). The phase
integral is a left-endpoint sum over the sampled path.

Trials are grouped into fixed-size blocks. Block i draws from
``SeedSequence(seed, spawn_key=(i,))`` and block results are reduced in block
order, so estimates are bit-identical for any worker count.
"""

import math
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.typing import NDArray
from scipy import integrate

from ._logger import Logger, create_logger
from .exceptions import DomainError
from .params import DerivedConstants
from .special_functions import eval_hyperbolic, hyperbolic_differences

DEFAULT_STEPS = 512
DEFAULT_BLOCK_TRIALS = 256
AGREEMENT_SIGMAS = 5.0
CONVERGENCE_SIGMAS = 3.0

Kernel = Callable[[np.random.Generator, int], NDArray[np.complex128]]


@dataclass(frozen=True)
class McEstimate:
    """Sample mean of complex trials with its standard error (std / √trials)."""

    mean: complex
    std_error: float
    trials: int

    def agrees_with(self, value: complex, sigmas: float = AGREEMENT_SIGMAS, floor: float = 0.0) -> bool:
        """True when ``value`` lies within ``sigmas`` standard errors (plus ``floor``) of the mean."""
        return abs(self.mean - value) <= sigmas * self.std_error + floor


@dataclass(frozen=True)
class WienerPairPath:
    """Two correlated complex Wiener paths sampled on ``steps`` equal intervals.

    ``w_t`` and ``w_tp`` hold ``steps + 1`` points starting at 0.
    """

    steps: int
    dz: float
    w_t: NDArray[np.complex128]
    w_tp: NDArray[np.complex128]
    rho: float


class PhaseModel(Enum):
    """How launch phases are drawn per trial in :func:`mc_acf`."""

    FIXED = "fixed"
    SHARED = "shared"
    INDEPENDENT = "independent"

    @classmethod
    def is_random(cls, model: "PhaseModel") -> bool:
        """Check if the model rotates the launch samples by random phases."""
        return model in (cls.SHARED, cls.INDEPENDENT)


def _check_steps(steps: int) -> None:
    if steps < 2:
        raise DomainError(f"A path needs at least 2 steps, got {steps}", name="steps", value=steps)


def _check_rho(rho: float) -> None:
    if not abs(rho) <= 1.0:
        raise DomainError(f"Correlation coefficient must satisfy |rho| <= 1, got {rho}", name="rho", value=rho)


def _complex_increments(rng: np.random.Generator, shape: tuple[int, ...], dz: float) -> NDArray[np.complex128]:
    """Circular complex Gaussian increments with E|dW|² = dz."""
    scale = math.sqrt(dz / 2.0)
    return rng.normal(0.0, scale, shape) + 1j * rng.normal(0.0, scale, shape)


def _correlated_increments(
    rng: np.random.Generator, shape: tuple[int, ...], dz: float, rho: float
) -> tuple[NDArray[np.complex128], NDArray[np.complex128]]:
    dw = _complex_increments(rng, shape, dz)
    dv = _complex_increments(rng, shape, dz)
    return dw, rho * dw + math.sqrt(max(1.0 - rho * rho, 0.0)) * dv


def _propagate(u0: NDArray[np.complex128], dw: NDArray[np.complex128], dc: DerivedConstants) -> NDArray[np.complex128]:
    """Propagate a batch of launch samples through increments of shape (trials, steps)."""
    p = dc.params
    steps = dw.shape[-1]
    dz = p.z / steps
    sqrt_k = math.sqrt(dc.k)
    w = np.cumsum(dw, axis=-1)
    field = u0[:, None] + sqrt_k * w
    # Left endpoints z_0 = 0, ..., z_{L-1}.
    left = np.concatenate([np.abs(u0[:, None]) ** 2, np.abs(field[:, :-1]) ** 2], axis=-1)
    phase = p.gamma * dz * left.sum(axis=-1)
    return field[:, -1] * np.exp(1j * phase)


class MonteCarloEngine:
    """Runs Monte Carlo kernels in seeded blocks, optionally on a thread pool.

    Thread Safety:
        An engine holds no per-run state and can be shared between threads.

    Example:
        >>> engine = MonteCarloEngine(threads=8)
        >>> est = mc_acf(0.3, 0.3, 0.5, dc, trials=10000, engine=engine)
    """

    def __init__(self, threads: int = 1, block_trials: int = DEFAULT_BLOCK_TRIALS, logger: Logger | None = None):
        """Initialize the engine.

        Args:
            threads: Number of worker threads; 1 runs blocks inline.
            block_trials: Trials per seeded block. Changing it changes the random streams.
            logger: Optional custom Logger; defaults to the FIBERACF_LOG_LEVEL logger.

        Raises:
            DomainError: If ``threads`` or ``block_trials`` is below 1.
        """
        if threads < 1:
            raise DomainError(f"threads must be at least 1, got {threads}", name="threads", value=threads)
        if block_trials < 1:
            raise DomainError(
                f"block_trials must be at least 1, got {block_trials}", name="block_trials", value=block_trials
            )
        self._threads = threads
        self._block_trials = block_trials
        self._logger = create_logger(logger)

    @property
    def threads(self) -> int:
        """Number of worker threads."""
        return self._threads

    @property
    def logger(self) -> Logger:
        """Logger used for run progress and convergence warnings."""
        return self._logger

    def _run_block(self, kernel: Kernel, seed: int, block: int, size: int) -> tuple[complex, float, int]:
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(block,)))
        samples = np.asarray(kernel(rng, size), dtype=np.complex128)
        self._logger.trace("Block %d: %d trials", block, size)
        return complex(samples.sum()), float(np.sum(np.abs(samples) ** 2)), size

    def run(self, kernel: Kernel, trials: int, seed: int) -> McEstimate:
        """Estimate the mean of ``kernel`` samples over ``trials`` trials.

        Args:
            kernel: Callable ``(rng, n) -> n complex samples``.
            trials: Total number of trials, at least 2.
            seed: Non-negative root seed.

        Returns:
            The McEstimate.

        Raises:
            DomainError: If ``trials`` < 2 or ``seed`` < 0.
        """
        if trials < 2:
            raise DomainError(f"At least 2 trials are required, got {trials}", name="trials", value=trials)
        if seed < 0:
            raise DomainError(f"Seed must be non-negative, got {seed}", name="seed", value=seed)
        size = self._block_trials
        blocks = [(i, min(size, trials - i * size)) for i in range(math.ceil(trials / size))]
        self._logger.debug("Running %d trials in %d blocks on %d thread(s)", trials, len(blocks), self._threads)

        if self._threads == 1:
            results = [self._run_block(kernel, seed, i, n) for i, n in blocks]
        else:
            with ThreadPoolExecutor(max_workers=self._threads) as pool:
                results = list(pool.map(lambda b: self._run_block(kernel, seed, b[0], b[1]), blocks))

        total = complex(math.fsum(r[0].real for r in results), math.fsum(r[0].imag for r in results))
        sum_sq = math.fsum(r[1] for r in results)
        mean = total / trials
        variance = max(sum_sq / trials - abs(mean) ** 2, 0.0) * trials / (trials - 1)
        return McEstimate(mean=mean, std_error=math.sqrt(variance / trials), trials=trials)


_default_engine = MonteCarloEngine()


def sample_wiener_pair(rho: float, steps: int, z: float, seed: int) -> WienerPairPath:
    """Sample one pair of correlated complex Wiener paths on [0, z].

    The increments of ``w_tp`` are ρ·dW + √(1-ρ²)·dV with dV independent of dW.

    Raises:
        DomainError: If ``steps`` < 2, |ρ| > 1 or ``z`` is not positive.
    """
    _check_steps(steps)
    _check_rho(rho)
    if not z > 0:
        raise DomainError(f"Fiber length must be positive, got {z}", name="z", value=z)
    rng = np.random.default_rng(seed)
    dz = z / steps
    dw, dwp = _correlated_increments(rng, (steps,), dz, rho)
    zero = np.zeros(1, dtype=np.complex128)
    return WienerPairPath(
        steps=steps,
        dz=dz,
        w_t=np.concatenate([zero, np.cumsum(dw)]),
        w_tp=np.concatenate([zero, np.cumsum(dwp)]),
        rho=rho,
    )


def propagate_pair_sample(
    u0: complex, u0p: complex, path: WienerPairPath, dc: DerivedConstants
) -> tuple[complex, complex]:
    """Propagate one launch pair through a sampled noise pair.

    Raises:
        DomainError: If the path does not span the fiber length of ``dc``.
    """
    z = dc.params.z
    if not math.isclose(path.dz * path.steps, z, rel_tol=1e-9):
        raise DomainError(
            f"Path length {path.dz * path.steps:g} m does not match fiber length {z:g} m", name="path", value=path.steps
        )
    out = _propagate(
        np.array([u0, u0p], dtype=np.complex128),
        np.stack([np.diff(path.w_t), np.diff(path.w_tp)]),
        dc,
    )
    return complex(out[0]), complex(out[1])


def _launch_phases(
    rng: np.random.Generator, n: int, u0: complex, u0p: complex, phases: PhaseModel
) -> tuple[NDArray[np.complex128], NDArray[np.complex128]]:
    a = np.full(n, u0, dtype=np.complex128)
    b = np.full(n, u0p, dtype=np.complex128)
    if phases is PhaseModel.SHARED:
        rot = np.exp(2j * np.pi * rng.random(n))
        a, b = a * rot, b * rot
    elif phases is PhaseModel.INDEPENDENT:
        a = a * np.exp(2j * np.pi * rng.random(n))
        b = b * np.exp(2j * np.pi * rng.random(n))
    return a, b


def mc_acf(
    u0: complex,
    u0p: complex,
    rho: float,
    dc: DerivedConstants,
    trials: int = 10000,
    steps: int = DEFAULT_STEPS,
    seed: int = 42,
    *,
    phases: PhaseModel = PhaseModel.FIXED,
    engine: MonteCarloEngine | None = None,
) -> McEstimate:
    """Monte Carlo estimate of E[U(z,t)·U(z,t')* | u0, u0'].

    Args:
        u0: Launch sample at t, in √W.
        u0p: Launch sample at t', in √W.
        rho: Noise correlation coefficient between the two instants.
        dc: Derived constants of the fiber.
        trials: Number of trials, at least 100.
        steps: Spatial steps per path.
        seed: Root seed.
        phases: Random launch phase model; SHARED and INDEPENDENT simulate
            ring modulation within one symbol and across symbols.
        engine: Engine to run on; defaults to a single-threaded engine.

    Returns:
        The McEstimate.

    Raises:
        DomainError: If ``trials`` < 100, ``steps`` < 2 or |ρ| > 1.
    """
    if trials < 100:
        raise DomainError(f"mc_acf needs at least 100 trials, got {trials}", name="trials", value=trials)
    _check_steps(steps)
    _check_rho(rho)
    dz = dc.params.z / steps

    def kernel(rng: np.random.Generator, n: int) -> NDArray[np.complex128]:
        a, b = _launch_phases(rng, n, u0, u0p, phases)
        dw, dwp = _correlated_increments(rng, (n, steps), dz, rho)
        return _propagate(a, dw, dc) * np.conj(_propagate(b, dwp, dc))

    return (engine or _default_engine).run(kernel, trials, seed)


def mc_acf_converged(
    u0: complex,
    u0p: complex,
    rho: float,
    dc: DerivedConstants,
    trials: int = 10000,
    steps: int = DEFAULT_STEPS,
    seed: int = 42,
    *,
    max_doublings: int = 3,
    engine: MonteCarloEngine | None = None,
) -> tuple[McEstimate, int]:
    """Run :func:`mc_acf` at L and 2L steps, doubling L until the estimates agree.

    Agreement means a difference within 3 combined standard errors.

    Returns:
        The estimate at the finer discretization and the step count it used.
    """
    run = engine or _default_engine
    coarse = mc_acf(u0, u0p, rho, dc, trials, steps, seed, engine=run)
    for _ in range(max_doublings + 1):
        fine = mc_acf(u0, u0p, rho, dc, trials, 2 * steps, seed, engine=run)
        combined = math.hypot(coarse.std_error, fine.std_error)
        if abs(coarse.mean - fine.mean) <= CONVERGENCE_SIGMAS * combined:
            return fine, 2 * steps
        run.logger.debug("Steps %d and %d disagree; doubling", steps, 2 * steps)
        coarse, steps = fine, 2 * steps
    run.logger.warn("Discretization did not converge after %d doublings (steps=%d)", max_doublings, steps)
    return coarse, steps


def mc_moment(
    u0: complex,
    m: int,
    dc: DerivedConstants,
    trials: int = 10000,
    steps: int = DEFAULT_STEPS,
    seed: int = 42,
    *,
    engine: MonteCarloEngine | None = None,
) -> McEstimate:
    """Monte Carlo estimate of the one-sample moment E[U(z,t)^m | u0]."""
    if m < 1:
        raise DomainError(f"Moment order must be at least 1, got {m}", name="m", value=m)
    _check_steps(steps)
    dz = dc.params.z / steps

    def kernel(rng: np.random.Generator, n: int) -> NDArray[np.complex128]:
        dw = _complex_increments(rng, (n, steps), dz)
        return _propagate(np.full(n, u0, dtype=np.complex128), dw, dc) ** m

    return (engine or _default_engine).run(kernel, trials, seed)


def mc_power(
    u0: complex,
    dc: DerivedConstants,
    trials: int = 10000,
    steps: int = DEFAULT_STEPS,
    seed: int = 42,
    *,
    engine: MonteCarloEngine | None = None,
) -> McEstimate:
    """Monte Carlo estimate of the output power E|U(z,t)|², which should equal Kz + |u0|²."""
    _check_steps(steps)
    dz = dc.params.z / steps

    def kernel(rng: np.random.Generator, n: int) -> NDArray[np.complex128]:
        dw = _complex_increments(rng, (n, steps), dz)
        return np.abs(_propagate(np.full(n, u0, dtype=np.complex128), dw, dc)).astype(np.complex128) ** 2

    return (engine or _default_engine).run(kernel, trials, seed)


def analytic_moment(u0: complex, m: int, dc: DerivedConstants) -> complex:
    """Closed-form moment E[U^m] = u0^m·E_m(c)·S(c)^(m+1) with c = -jγmK/2.

    E_m(c) = exp(jγm|u0|²T(c)). For m = 1 the power of the mean,
    |E₁S²|²|u0|², is close to e^(-κ|u0|²)|u0|² when √(γKz²) is small.

    Raises:
        DomainError: If ``m`` < 1.
    """
    if m < 1:
        raise DomainError(f"Moment order must be at least 1, got {m}", name="m", value=m)
    p = dc.params
    pair = eval_hyperbolic(complex(0.0, -p.gamma * m * dc.k / 2.0), p.z)
    e_m = np.exp(1j * p.gamma * m * abs(u0) ** 2 * pair.t)
    return complex(u0**m * e_m * pair.s ** (m + 1))


def mecozzi_value(a: complex, b: complex, c: complex, z: float) -> complex:
    """Analytic E[exp(aW(z) + b∫W - c∫W²)] = √S(c)·exp(λ²β²) for a real Wiener path W.

    λ²β² = (a²/2)T - (b²/4)(T - z)/c + (ab/2)(1 - S)/c, which tends to
    (z/2)(a² + abz + b²z²/3) as c → 0.

    Raises:
        DomainError: If ``c`` has a non-zero real part or ``z`` is not positive.
    """
    c = complex(c)
    if c.real != 0.0:
        raise DomainError(f"c must be purely imaginary, got {c}", name="c", value=c)
    pair = eval_hyperbolic(c, z)
    one_minus_s, t_minus_z = hyperbolic_differences(c, z)
    exponent = a * a / 2.0 * pair.t - b * b / 4.0 * t_minus_z[0] + a * b / 2.0 * one_minus_s[0]
    # Principal square root; S stays in the right half-plane for moderate |c|z².
    return complex(np.sqrt(np.complex128(pair.s)) * np.exp(exponent))


def mecozzi_identity_check(
    a: complex,
    b: complex,
    c: complex,
    z: float,
    trials: int = 100000,
    steps: int = 1000,
    seed: int = 42,
    *,
    engine: MonteCarloEngine | None = None,
) -> tuple[McEstimate, complex]:
    """Monte Carlo estimate of E[exp(aW(z) + b∫W - c∫W²)] next to its analytic value.

    The real Wiener path uses N(0, dz) increments; both integrals use the
    trapezoid rule.

    Returns:
        (Monte Carlo estimate, analytic value).
    """
    analytic = mecozzi_value(a, b, c, z)
    if eval_hyperbolic(c, z).s.real <= 0:
        (engine or _default_engine).logger.warn(
            "Re S(c) <= 0 for c=%s; principal square root may be the wrong branch", c
        )
    _check_steps(steps)
    dz = z / steps

    def kernel(rng: np.random.Generator, n: int) -> NDArray[np.complex128]:
        w = np.concatenate([np.zeros((n, 1)), np.cumsum(rng.normal(0.0, math.sqrt(dz), (n, steps)), axis=-1)], axis=-1)
        int_w = integrate.trapezoid(w, dx=dz, axis=-1)
        int_w2 = integrate.trapezoid(w * w, dx=dz, axis=-1)
        return np.exp(a * w[:, -1] + b * int_w - c * int_w2)

    return (engine or _default_engine).run(kernel, trials, seed), analytic
