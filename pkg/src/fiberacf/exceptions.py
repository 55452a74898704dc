"""Exception hierarchy for fiberacf.

Every error raised deliberately by the library derives from FiberAcfError, so
callers can separate modelling mistakes (bad arguments, unsupported bound
regimes, broken contracts) from programming errors.
"""


class FiberAcfError(Exception):
    """Base exception for all fiberacf errors.

    Underlying causes (for example a TOML decode error or a SciPy failure)
    are preserved through exception chaining and are available as
    ``__cause__``.

    Example:
        >>> from fiberacf import FiberAcfError, FiberParams, derive_constants, power_threshold
        >>>
        >>> dc = derive_constants(FiberParams.table())
        >>> try:
        >>>     threshold = power_threshold(dc, q=0.99)
        >>> except FiberAcfError as e:
        >>>     print(f"Threshold unavailable: {e}")
        >>>     if e.__cause__:
        >>>         print(f"Underlying cause: {e.__cause__}")
    """

    pass


class DomainError(FiberAcfError):
    """Raised when an argument lies outside the domain of a formula.

    Typical cases are a correlation coefficient with |ρ| > 1, a non-positive
    fiber length, a Wiener path with fewer than two steps, or a receiver
    bandwidth wider than the frequency grid of a PSD.

    Attributes:
        name: Name of the offending argument.
        value: The rejected value.

    Example:
        >>> try:
        >>>     c_of_rho(dc, 1.5)
        >>> except DomainError as e:
        >>>     print(f"{e.name}={e.value} rejected")
    """

    def __init__(self, message: str, name: str | None = None, value: object = None):
        """Initialize DomainError.

        Args:
            message: The error message.
            name: Name of the offending argument.
            value: The rejected value.
        """
        super().__init__(message)
        self.name = name
        self.value = value


class ConfigError(FiberAcfError):
    """Raised when a configuration file cannot be used.

    Attributes:
        path: Path of the configuration file, if one was read.
        key: Dotted key (``section.name``) that caused the failure.
    """

    def __init__(self, message: str, path: str | None = None, key: str | None = None):
        """Initialize ConfigError.

        Args:
            message: The error message.
            path: Path of the configuration file.
            key: Offending dotted key.
        """
        super().__init__(message)
        self.path = path
        self.key = key


class UnsupportedRegimeError(FiberAcfError):
    """Raised when a bound is requested outside the regimes it was proven for.

    The received-power lemmas cover W ≤ B or γ(K/2)z² ≤ 1; the combination
    W ≥ B with γ(K/2)z² ≥ 1 has no bound, and the average-power bounds need
    W ≤ B.

    Attributes:
        regime: The BoundRegime (or its tag) that was rejected.

    Example:
        >>> try:
        >>>     inst_power_bound(1.0, BoundRegime.classify(2 * dc.b, dc), dc)
        >>> except UnsupportedRegimeError as e:
        >>>     print(f"No bound for {e.regime}")
    """

    def __init__(self, message: str, regime: object = None):
        """Initialize UnsupportedRegimeError.

        Args:
            message: The error message.
            regime: The rejected regime.
        """
        super().__init__(message)
        self.regime = regime


class ContractError(FiberAcfError):
    """Raised when a caller-supplied function violates its stated contract.

    Attributes:
        quantity: What was checked.
        expected: The value the contract requires.
        actual: The value observed.
    """

    def __init__(
        self,
        message: str,
        quantity: str | None = None,
        expected: float | None = None,
        actual: float | None = None,
    ):
        """Initialize ContractError.

        Args:
            message: The error message.
            quantity: What was checked.
            expected: Required value.
            actual: Observed value.
        """
        super().__init__(message)
        self.quantity = quantity
        self.expected = expected
        self.actual = actual


class RootBracketError(FiberAcfError):
    """Raised when a root search bracket holds no sign change.

    Attributes:
        lower: Lower end of the bracket.
        upper: Upper end of the bracket.
        f_lower: Function value at the lower end.
        f_upper: Function value at the upper end.
    """

    def __init__(
        self,
        message: str,
        lower: float | None = None,
        upper: float | None = None,
        f_lower: float | None = None,
        f_upper: float | None = None,
    ):
        """Initialize RootBracketError.

        Args:
            message: The error message.
            lower: Lower end of the bracket.
            upper: Upper end of the bracket.
            f_lower: Function value at ``lower``.
            f_upper: Function value at ``upper``.
        """
        super().__init__(message)
        self.lower = lower
        self.upper = upper
        self.f_lower = f_lower
        self.f_upper = f_upper


class ValidationFailure(FiberAcfError):
    """Raised when a validation suite has failing checks.

    Attributes:
        suite: Name of the suite.
        failures: Names of the failing checks.

    Example:
        >>> try:
        >>>     run_suite("special", config).raise_for_failures()
        >>> except ValidationFailure as e:
        >>>     for name in e.failures:
        >>>         print(f"  - {name}")
    """

    def __init__(self, message: str, suite: str | None = None, failures: list[str] | None = None):
        """Initialize ValidationFailure.

        Args:
            message: The error message.
            suite: Name of the suite.
            failures: Names of the failing checks.
        """
        super().__init__(message)
        self.suite = suite
        self.failures = failures or []
