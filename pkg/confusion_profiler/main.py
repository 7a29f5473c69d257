"""
Main entry point for the Confusion Profiler.

This module provides the command-line interface: argument parsing, input
resolution (files or built-in fixtures), dispatch to the profiling,
comparison, Monte Carlo and kappa commands, and exit-code handling.
"""

import argparse
import sys
from dataclasses import replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

from . import __version__
from .config.config_loader import (
    ComparatorConfig,
    ConfigLoader,
    McOptions,
    SolverOptions,
    parse_order,
)
from .core.coefficients import compute_coefficient, full_profile
from .core.comparator import compare
from .core.data_models import ValuationClass, WeightScheme
from .core.fixtures import FIXTURES, check_fixture
from .core.matrix_core import ConfusionMatrix, load_matrix
from .core.mc_oracle import mc_estimate
from .core.solver import sup_correlation
from .core.valuation import kappa_profile, weight_scheme, weighted_kappa
from .utils.error_handler import (
    ConfigurationError,
    DegenerateMatrixError,
    ErrorHandler,
    ExitCode,
)
from .utils.json_reporter import JSON_FORMAT, REPORT_FORMATS, JSONReporter
from .utils.logger import LogLevel, get_logger, set_log_level

MC_SLACK = 1e-6
TABLE_DIGITS = 4
KAPPA_CHOICES = ("all",) + tuple(scheme.value for scheme in WeightScheme)

Source = Tuple[str, str]


class _AppendFixture(argparse.Action):
    """Collects ``--fixture NAME`` into the shared ordered source list."""

    def __call__(self, parser, namespace, values, option_string=None):
        sources = list(getattr(namespace, self.dest, None) or [])
        sources.append(("fixture", values))
        setattr(namespace, self.dest, sources)


class _AppendFiles(argparse.Action):
    """Collects positional FILE arguments into the shared ordered source list."""

    def __call__(self, parser, namespace, values, option_string=None):
        sources = list(getattr(namespace, self.dest, None) or [])
        sources.extend(("file", path) for path in values)
        setattr(namespace, self.dest, sources)


class ConfusionProfilerApp:
    """
    Main application class for the Confusion Profiler.

    Handles option loading, input resolution and command dispatch.
    """

    def __init__(self):
        """Initialize the application."""
        self.logger = get_logger(__name__)
        self.error_handler = ErrorHandler(self.logger)

    def _load_options(self, args: argparse.Namespace) -> Tuple[SolverOptions, McOptions, ComparatorConfig]:
        """
        Load configuration and apply command-line overrides.

        Args:
            args: Parsed command line arguments

        Returns:
            Tuple of solver, Monte Carlo and comparator options
        """
        loader = ConfigLoader(args.config)
        solver = loader.load_solver_options()
        mc = loader.load_mc_options()
        comparator = loader.load_comparator_config()

        solver_overrides: Dict[str, Any] = {}
        mc_overrides: Dict[str, Any] = {}
        if args.restarts is not None:
            solver_overrides["restarts"] = args.restarts
        if args.seed is not None:
            solver_overrides["seed"] = args.seed
            mc_overrides["seed"] = args.seed
        if args.n_jobs is not None:
            solver_overrides["n_jobs"] = args.n_jobs
            mc_overrides["n_workers"] = max(args.n_jobs, 1)

        comparator_overrides: Dict[str, Any] = {}
        if getattr(args, "epsilon", None) is not None:
            comparator_overrides["epsilon"] = args.epsilon
        if getattr(args, "order", None) is not None:
            comparator_overrides["order"] = parse_order(args.order)

        if getattr(args, "samples", None) is not None:
            mc_overrides["accepted_samples"] = args.samples
            if args.samples > mc.max_draws and getattr(args, "max_draws", None) is None:
                mc_overrides["max_draws"] = args.samples
        if getattr(args, "max_draws", None) is not None:
            mc_overrides["max_draws"] = args.max_draws
        if getattr(args, "progress", False):
            mc_overrides["progress"] = True

        return (replace(solver, **solver_overrides),
                replace(mc, **mc_overrides),
                replace(comparator, **comparator_overrides))

    def _resolve_sources(self, sources: Optional[List[Source]], expected: int) -> List[Tuple[str, ConfusionMatrix]]:
        """
        Turn fixture names and file paths into matrices, in command-line order.

        Raises:
            ConfigurationError: If the number of inputs is not ``expected``
        """
        sources = sources or []
        if len(sources) != expected:
            raise ConfigurationError(
                f"Expected {expected} input(s) (--fixture NAME or FILE), got {len(sources)}")

        resolved = []
        for kind, value in sources:
            if kind == "fixture":
                fixture = FIXTURES.get(value)
                self.logger.debug(f"Using fixture {fixture.name}")
                resolved.append((fixture.name, fixture.matrix()))
            else:
                self.logger.debug(f"Reading matrix from {value}")
                resolved.append((value, load_matrix(value)))
        return resolved

    def _digits(self, args: argparse.Namespace, solver: SolverOptions) -> int:
        if args.digits is not None:
            if args.digits < 0:
                raise ConfigurationError("--digits must be >= 0", value=args.digits)
            return args.digits
        return solver.report_precision if args.format == JSON_FORMAT else TABLE_DIGITS

    def cmd_coeffs(self, args, solver: SolverOptions, reporter: JSONReporter) -> Tuple[Dict[str, Any], int]:
        """Profile one matrix; with --check, compare a fixture against its reference values."""
        [(source, matrix)] = self._resolve_sources(args.sources, 1)
        if args.check and args.sources[0][0] != "fixture":
            raise ConfigurationError("--check needs a built-in fixture (--fixture NAME)")
        if matrix.mass_deficit > 1e-9:
            self.logger.warning(f"{source} does not sum to 1; normalized",
                                mass_deficit=f"{matrix.mass_deficit:.6g}")

        self.logger.info(f"Computing coefficient profile of {source} (d={matrix.d})")
        profile = full_profile(matrix, solver)
        document = reporter.profile_document(profile, matrix, source, solver.seed, solver.restarts)

        if not args.check:
            return document, ExitCode.SUCCESS

        checks = check_fixture(source, solver)
        document["check"] = reporter.check_section(checks)
        matched = document["check"]["matched"]
        if matched is None:
            self.logger.error(f"{source} does not reproduce its reference values")
            return document, ExitCode.INVARIANT_VIOLATION
        self.logger.success(f"{source} reproduces its reference values "
                            f"(variant {matched}, {document['check']['matched_reference']} values)")
        return document, ExitCode.SUCCESS

    def cmd_compare(self, args, solver: SolverOptions, comparator: ComparatorConfig,
                    reporter: JSONReporter) -> Tuple[Dict[str, Any], int]:
        """Flowchart comparison of two matrices; Incomparable is a result, not an error."""
        (first_source, first), (second_source, second) = self._resolve_sources(args.sources, 2)
        self.logger.info(f"Comparing {first_source} with {second_source}")
        verdict = compare(first, second, comparator, solver)
        document = reporter.verdict_document(verdict, first_source, second_source,
                                             solver.seed, solver.restarts)
        return document, ExitCode.SUCCESS

    def cmd_mc_check(self, args, solver: SolverOptions, mc: McOptions,
                     reporter: JSONReporter) -> Tuple[Dict[str, Any], int]:
        """Monte Carlo lower bound against the exact coefficient."""
        [(source, matrix)] = self._resolve_sources(args.sources, 1)
        valuation_class = ValuationClass.parse(args.valuation_class)

        self.logger.info(f"Exact {valuation_class.value} of {source}")
        exact = compute_coefficient(matrix, valuation_class, solver).value
        self.logger.info(f"Sampling {mc.accepted_samples} accepted {valuation_class.value} pairs")
        estimate = mc_estimate(matrix, valuation_class, mc)

        violation = estimate.value > exact + MC_SLACK
        document = reporter.mc_document(estimate, exact, matrix, source, mc.seed, violation)
        if violation:
            self.logger.error(f"Monte Carlo estimate {estimate.value:.6f} exceeds exact value {exact:.6f}")
            return document, ExitCode.INVARIANT_VIOLATION
        return document, ExitCode.SUCCESS

    def cmd_kappa(self, args, reporter: JSONReporter) -> Tuple[Dict[str, Any], int]:
        """
        Weighted kappa for one or all weight schemes.

        The scores scheme uses the optimal SUP valuations, so its kappa
        equals the SUP coefficient.
        """
        [(source, matrix)] = self._resolve_sources(args.sources, 1)
        if args.weights == "all":
            kappas = {scheme.value: value for scheme, value in kappa_profile(matrix).items()}
            return reporter.kappa_document(kappas, matrix, source), ExitCode.SUCCESS

        scheme = WeightScheme(args.weights)
        if scheme == WeightScheme.SCORES:
            sup = sup_correlation(matrix)
            weights = weight_scheme(scheme, matrix.d, sup.f_opt, sup.g_opt)
        else:
            weights = weight_scheme(scheme, matrix.d)
        try:
            value: Optional[float] = weighted_kappa(matrix, weights)
        except DegenerateMatrixError as e:
            self.logger.warning(f"{scheme.value} kappa undefined for {source}: {e.message}")
            value = None
        return reporter.kappa_document({scheme.value: value}, matrix, source), ExitCode.SUCCESS

    def cmd_fixtures(self, reporter: JSONReporter) -> Tuple[Dict[str, Any], int]:
        return reporter.fixtures_document(FIXTURES), ExitCode.SUCCESS

    def run(self, args: argparse.Namespace) -> int:
        """
        Run one command.

        Args:
            args: Parsed command line arguments

        Returns:
            int: Exit code (0 success, 2 input error, 3 degenerate matrix,
                4 invariant violation)
        """
        try:
            solver, mc, comparator = self._load_options(args)
            reporter = JSONReporter(self._digits(args, solver))

            if args.command == "coeffs":
                document, exit_code = self.cmd_coeffs(args, solver, reporter)
            elif args.command == "compare":
                document, exit_code = self.cmd_compare(args, solver, comparator, reporter)
            elif args.command == "mc-check":
                document, exit_code = self.cmd_mc_check(args, solver, mc, reporter)
            elif args.command == "kappa":
                document, exit_code = self.cmd_kappa(args, reporter)
            else:
                document, exit_code = self.cmd_fixtures(reporter)

            reporter.write(reporter.render(document, args.format), args.output)
            return exit_code

        except KeyboardInterrupt:
            self.logger.warning("Interrupted by user")
            return 130
        except Exception as e:
            context = ErrorHandler.context_for(e, args.command, "ConfusionProfilerApp")
            return self.error_handler.handle_error(e, context)


def _add_common_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=REPORT_FORMATS, default=JSON_FORMAT,
                        help="Report format (default: json)")
    parser.add_argument("--digits", type=int,
                        help="Decimal places in the report (default: 6 for json, 4 for table)")
    parser.add_argument("--output", "-o", type=str,
                        help="Write the report to this file instead of stdout")
    parser.add_argument("--config", type=str,
                        help="YAML configuration file. Defaults to confusion_profiler/config/solver_config.yml")
    parser.add_argument("--restarts", type=int, help="Random restarts per alternating solve")
    parser.add_argument("--seed", type=int, help="Seed for restarts and sampling")
    parser.add_argument("--n-jobs", type=int, dest="n_jobs",
                        help="Parallel workers for restarts and sampling (-1 for all cores)")
    parser.add_argument("--verbose", "-v", action="store_true", help="Enable verbose logging output")


def _add_sources(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--fixture", action=_AppendFixture, dest="sources", metavar="NAME",
                        help="Built-in fixture (see the fixtures command); repeatable")
    parser.add_argument("sources", nargs="*", action=_AppendFiles, metavar="FILE",
                        help="CSV or JSON confusion matrix file")


def create_argument_parser() -> argparse.ArgumentParser:
    """
    Create and configure the command line argument parser.

    Returns:
        argparse.ArgumentParser: Configured argument parser
    """
    common = argparse.ArgumentParser(add_help=False)
    _add_common_arguments(common)

    parser = argparse.ArgumentParser(
        prog="confusion_profiler",
        description="Confusion Profiler - functional correlation coefficients and "
                    "flowchart comparison of confusion matrices",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python -m confusion_profiler coeffs --fixture CM0               # Seven coefficients + kappa
  python -m confusion_profiler coeffs --fixture CM3 --check       # Reproduce reference values
  python -m confusion_profiler compare --fixture CM10 --fixture CM11
  python -m confusion_profiler compare a.csv b.json --order CO,ANTI,II,ID --epsilon 1e-4
  python -m confusion_profiler mc-check --fixture CM0 --class SUP --samples 100000
  python -m confusion_profiler kappa matrix.csv --weights quadratic
  python -m confusion_profiler fixtures --format table
        """,
    )
    parser.add_argument("--version", action="version", version=f"Confusion Profiler {__version__}")
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    coeffs = subparsers.add_parser("coeffs", parents=[common], help="Profile one confusion matrix")
    _add_sources(coeffs)
    coeffs.add_argument("--check", action="store_true",
                        help="Compare a fixture against its reference values (exit 4 on mismatch)")

    compare = subparsers.add_parser("compare", parents=[common], help="Compare two confusion matrices")
    _add_sources(compare)
    compare.add_argument("--epsilon", type=float, help="Tie tolerance (default: 1e-4)")
    compare.add_argument("--order", type=str, help="Step order, e.g. CO,ANTI,II,ID")

    mc_check = subparsers.add_parser("mc-check", parents=[common],
                                     help="Check a coefficient against the Monte Carlo oracle")
    _add_sources(mc_check)
    mc_check.add_argument("--class", dest="valuation_class", default="SUP",
                          help="Valuation class: SUP, II, ID, MON, CO, ANTI or COANTI (default: SUP)")
    mc_check.add_argument("--samples", type=int, help="Accepted pairs to sample")
    mc_check.add_argument("--max-draws", type=int, dest="max_draws", help="Cap on drawn pairs")
    mc_check.add_argument("--progress", action="store_true", help="Show a progress bar")

    kappa = subparsers.add_parser("kappa", parents=[common], help="Weighted kappa of one matrix")
    _add_sources(kappa)
    kappa.add_argument("--weights", choices=KAPPA_CHOICES, default="all",
                       help="Weight scheme (default: all built-in schemes)")

    subparsers.add_parser("fixtures", parents=[common], help="List built-in fixtures")

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Main entry point for the Confusion Profiler.

    Args:
        argv: Arguments without the program name; defaults to sys.argv[1:]

    Returns:
        int: Exit code
    """
    parser = create_argument_parser()
    try:
        args, extras = parser.parse_known_args(argv)
        # FILE arguments given after a --fixture are left over by argparse
        unknown = [token for token in extras if token.startswith("-") and token != "-"]
        if unknown or (extras and not hasattr(args, "sources")):
            parser.error(f"unrecognized arguments: {' '.join(extras)}")
        if extras:
            args.sources = list(args.sources or []) + [("file", path) for path in extras]
    except SystemExit as e:
        # argparse exits 2 on usage errors and 0 for --help/--version
        return int(e.code or 0)

    if args.verbose:
        set_log_level(LogLevel.DEBUG)
    else:
        set_log_level(LogLevel.INFO)

    app = ConfusionProfilerApp()
    return app.run(args)


if __name__ == "__main__":
    sys.exit(main())
