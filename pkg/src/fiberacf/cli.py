"""Command-line front end.

Every command writes CSV, to ``--out DIR`` (one file per table plus
``manifest.json``) or to stdout. Exit codes: 0 success, 1 usage or domain
error, 2 configuration error, 3 validation failure.
"""

import os
import shutil
import sys
import time
from argparse import ArgumentParser, Namespace
from collections.abc import Sequence
from pathlib import Path

import numpy as np

from ._logger import ENV_VAR as LOG_LEVEL_ENV_VAR
from ._logger import LogLevel, create_logger
from .autocorrelation import AcfMode
from .channel_mc import MonteCarloEngine
from .config import AppConfig, load_config, resolve_seed
from .exceptions import ConfigError, FiberAcfError, ValidationFailure
from .figures import (
    FIGURE_IDS,
    FigureTable,
    acf_table,
    bounds_table,
    capacity_table,
    figure_table,
    fsk_table,
    infinite_bandwidth_table,
    psd_table,
    three_sample_table,
)
from .params import parse_quantity
from .reports import RunManifest, write_csv
from .validation import SUITES, ValidationReport, run_suite

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONFIG = 2
EXIT_VALIDATION = 3

DEMOS = ("three-sample", "fsk", "infinite-bandwidth")
VALIDATION_HEADER = ("suite", "check", "passed", "margin", "detail")

_logger = create_logger()


def build_parser() -> ArgumentParser:
    """The argument parser with all subcommands."""
    parser = ArgumentParser(
        prog="fiberacf",
        description="Autocorrelation, spectra, power bounds and capacity bounds of dispersion-free nonlinear fiber",
    )
    parser.add_argument("--config", help="TOML configuration file")
    parser.add_argument("--out", help="output directory; CSV goes to stdout when omitted")
    parser.add_argument("--seed", type=int, help="Monte Carlo root seed (FIBERACF_SEED takes precedence)")
    parser.add_argument("--threads", type=int, help="Monte Carlo worker threads")
    parser.add_argument("--trials", type=int, help="Monte Carlo trials")
    parser.add_argument("--log-level", choices=[level.value for level in LogLevel], help="log level on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    fig = sub.add_parser("fig", help="data table of one figure")
    fig.add_argument("id", type=int, choices=FIGURE_IDS)

    acf = sub.add_parser("acf", help="isolated rectangular-pulse autocorrelation on a (t, t') grid")
    acf.add_argument("--power", default="100 mW", help="pulse power, e.g. '100 mW' or '20 dBm'")
    acf.add_argument("--t-start", type=float, default=-15.0, help="first t in ps")
    acf.add_argument("--t-stop", type=float, default=15.0, help="last t in ps")
    acf.add_argument("--t-step", type=float, default=0.5, help="t step in ps")
    acf.add_argument("--tprime", type=float, nargs="+", default=[0.0, 5.1], help="t' values in ps")
    acf.add_argument("--mode", choices=[m.value for m in AcfMode], default=AcfMode.EXACT.value)

    psd = sub.add_parser("psd", help="ring-PAM power spectral density")
    psd.add_argument("--power", default="100 mW", help="launch power")

    bounds = sub.add_parser("bounds", help="received-power bounds over the configured power grid")
    bounds.add_argument("--bandwidth", help="receiver bandwidth W, e.g. '250 GHz'; defaults to B")
    bounds.add_argument("--kind", choices=("avg", "inst"), default="avg")

    capacity = sub.add_parser("capacity", help="capacity bounds over the configured power grid")
    capacity.add_argument("--bandwidth", help="receiver bandwidth W; defaults to B")
    capacity.add_argument("--overlay", help="CSV of an external curve to copy next to the output (not computed)")

    demo = sub.add_parser("demo", help="capacity demonstrations")
    demo.add_argument("name", choices=DEMOS)

    validate = sub.add_parser("validate", help="run a validation suite")
    validate.add_argument("suite", choices=(*SUITES, "all"))
    return parser


def _power_w(text: str) -> float:
    return parse_quantity(text, "power")


def _bandwidth_hz(text: str | None) -> float | None:
    return None if text is None else parse_quantity(text, "frequency")


def _tables(args: Namespace, config: AppConfig, engine: MonteCarloEngine) -> list[FigureTable]:
    if args.command == "fig":
        return [figure_table(args.id, config, engine)]
    if args.command == "acf":
        count = int(round((args.t_stop - args.t_start) / args.t_step)) + 1
        t_axis = np.linspace(args.t_start, args.t_start + (count - 1) * args.t_step, count)
        return [acf_table(config, _power_w(args.power) * 1e3, t_axis, args.tprime, AcfMode(args.mode))]
    if args.command == "psd":
        return [psd_table(config, _power_w(args.power) * 1e3)]
    if args.command == "bounds":
        return [bounds_table(config, _bandwidth_hz(args.bandwidth), args.kind)]
    if args.command == "capacity":
        return [capacity_table(config, _bandwidth_hz(args.bandwidth))]
    if args.name == "three-sample":
        return [three_sample_table(config, engine=engine)]
    if args.name == "fsk":
        return [fsk_table()]
    return [infinite_bandwidth_table(config)]


def _validate(args: Namespace, config: AppConfig) -> list[ValidationReport]:
    suites = SUITES if args.suite == "all" else (args.suite,)
    mc = config.monte_carlo
    return [run_suite(name, config, args.trials, mc.seed, mc.threads) for name in suites]


def _emit(tables: list[FigureTable], out: Path | None) -> list[str]:
    written = []
    for table in tables:
        path = None if out is None else out / f"{table.name}.csv"
        write_csv(path, table.header, table.rows)
        if path is not None:
            written.append(path.name)
    return written


def run(args: Namespace) -> int:
    """Execute parsed arguments; raises the library errors ``main`` maps to exit codes."""
    if args.log_level:
        os.environ[LOG_LEVEL_ENV_VAR] = args.log_level
    start = time.perf_counter()
    config = load_config(args.config)
    seed = resolve_seed(args.seed, config)
    config = config.with_monte_carlo(seed=seed, trials=args.trials, threads=args.threads)
    out = Path(args.out) if args.out else None
    engine = MonteCarloEngine(threads=config.monte_carlo.threads)

    status = EXIT_OK
    if args.command == "validate":
        reports = _validate(args, config)
        rows = [row for report in reports for row in report.rows()]
        tables = [FigureTable(f"validate_{args.suite}", VALIDATION_HEADER, rows)]
        failed = [report for report in reports if not report.passed]
    else:
        tables = _tables(args, config, engine)
        failed = []

    written = _emit(tables, out)
    if args.command == "capacity" and args.overlay and out is not None:
        target = out / f"overlay_{Path(args.overlay).name}"
        shutil.copyfile(args.overlay, target)
        written.append(target.name)
    elif args.command == "capacity" and args.overlay:
        _logger.warn("--overlay needs --out; %s not copied", args.overlay)

    if out is not None:
        manifest = RunManifest(
            command=["fiberacf", *sys.argv[1:]] if args.argv is None else ["fiberacf", *args.argv],
            config_digest=config.digest(),
            seed=seed,
            outputs=written,
            wall_time_s=time.perf_counter() - start,
        )
        manifest.write(out / "manifest.json")

    for report in failed:
        try:
            report.raise_for_failures()
        except ValidationFailure as e:
            for failure in e.failures:
                print(f"FAILED {report.suite}: {failure}", file=sys.stderr)
            status = EXIT_VALIDATION
    return status


def main(argv: Sequence[str] | None = None) -> int:
    """Console entry point.

    Returns:
        The process exit code.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    args.argv = None if argv is None else list(argv)
    try:
        return run(args)
    except ConfigError as e:
        print(f"fiberacf: configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except ValidationFailure as e:
        print(f"fiberacf: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except FiberAcfError as e:
        print(f"fiberacf: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"fiberacf: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
