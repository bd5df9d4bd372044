import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from app.cli.commands import COMMANDS
from app.cli.helpers import AUTO, DEFAULT_PRECISION, EXIT_OK, EXIT_USAGE, CliError, usage_error
from app.cli.output import FORMATS, TEXT, render, write_output
from app.qkd.base.channel import PROTOCOLS
from app.qkd.errors import KeyRateError
from app.qkd.lab.montecarlo import DEFAULT_SEED
from app.qkd.rates.formulas import FORMULAS, NO_OTP, NOISE_FORMULAS
from app.qkd.rates.noise import NO_OTP_VARIANT, VARIANT_FORMULAS
from app.qkd.search.thresholds import FAMILIES

LOG_LEVELS = (logging.WARNING, logging.INFO, logging.DEBUG)
LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"
DEFAULT_SCAN_CODES = ("rep:2..8", "spc:2..8")


class ArgumentParser(argparse.ArgumentParser):
    """Parser whose usage errors surface as CliError instead of exiting."""

    def error(self, message):
        raise usage_error(f"usage: {message}")


def _output_flags() -> ArgumentParser:
    parent = ArgumentParser(add_help=False)
    parent.add_argument("--format", choices=FORMATS, default=TEXT)
    parent.add_argument("--out", default=None, help="write the report here instead of stdout")
    parent.add_argument("--seed", type=int, default=DEFAULT_SEED)
    parent.add_argument("--precision", type=int, default=DEFAULT_PRECISION, help="digits after the decimal point")
    return parent


def _sweep_flags(parser: argparse.ArgumentParser, start: float, end: float, step: float) -> None:
    parser.add_argument("--start", type=float, default=start)
    parser.add_argument("--end", type=float, default=end)
    parser.add_argument("--step", type=float, default=step)


def build_parser() -> ArgumentParser:
    """Builds the command-line grammar, one subparser per subcommand."""
    parser = ArgumentParser(prog="keyrate", description="Advantage-distillation key rates for BB84 and six-state QKD.")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)
    parent = _output_flags()
    formulas = FORMULAS + NOISE_FORMULAS

    keyrate = subparsers.add_parser("keyrate", parents=[parent], help="key rate at one error rate")
    keyrate.add_argument("--protocol", choices=PROTOCOLS, required=True)
    keyrate.add_argument("--qber", type=float, required=True)
    keyrate.add_argument("--code", action="append", required=True)
    keyrate.add_argument("--formula", action="append", choices=formulas)
    keyrate.add_argument("--q11", default=AUTO)
    keyrate.add_argument("--noise-p", dest="noise_p", default=AUTO)

    scan = subparsers.add_parser("scan", parents=[parent], help="sweep the error rate")
    scan.add_argument("--protocol", choices=PROTOCOLS, required=True)
    _sweep_flags(scan, 0.0, 0.3, 0.01)
    scan.add_argument("--code", action="append")
    scan.add_argument("--formula", action="append", choices=formulas)
    scan.add_argument("--q11", default=AUTO)
    scan.add_argument("--noise-p", dest="noise_p", default=AUTO)

    threshold = subparsers.add_parser("threshold", parents=[parent], help="largest error rate with positive rate")
    threshold.add_argument("--protocol", choices=PROTOCOLS, required=True)
    threshold.add_argument("--family", choices=FAMILIES, required=True)
    threshold.add_argument("--formula", choices=FORMULAS, default=NO_OTP)
    threshold.add_argument("--max-n", dest="max_n", type=int, default=None)
    threshold.add_argument("--resolution", type=float, default=1e-4)
    threshold.add_argument("--closed-form", dest="closed_form", action="store_true")

    optimal = subparsers.add_parser("optimal-codes", parents=[parent], help="best code per error rate")
    optimal.add_argument("--protocol", choices=PROTOCOLS, required=True)
    optimal.add_argument("--formula", choices=FORMULAS, default=NO_OTP)
    optimal.add_argument("--code", action="append")
    _sweep_flags(optimal, 0.0, 0.3, 0.01)

    noise = subparsers.add_parser("noise", parents=[parent], help="adding-noise key rate")
    noise.add_argument("--protocol", choices=PROTOCOLS, required=True)
    noise.add_argument("--qber", type=float, required=True)
    noise.add_argument("--code", action="append", required=True)
    noise.add_argument("--variant", choices=tuple(VARIANT_FORMULAS), default=NO_OTP_VARIANT)
    noise.add_argument("--q11", default=AUTO)
    noise.add_argument("--noise-p", dest="noise_p", default=AUTO)

    simulate = subparsers.add_parser("simulate", parents=[parent], help="Monte Carlo syndrome statistics")
    simulate.add_argument("--protocol", choices=PROTOCOLS, required=True)
    simulate.add_argument("--qber", type=float, required=True)
    simulate.add_argument("--code", required=True)
    simulate.add_argument("--q11", default=AUTO)
    simulate.add_argument("--samples", type=int, default=100_000)
    simulate.add_argument("--shards", type=int, default=1)

    hash_lab = subparsers.add_parser("hash-lab", parents=[parent], help="random hash identification experiment")
    hash_lab.add_argument("--n", type=int, required=True)
    hash_lab.add_argument("--k", type=int, required=True)
    hash_lab.add_argument("--weight", type=int, default=1, help="use every pattern of weight <= this")
    hash_lab.add_argument("--patterns", default=None, help="comma-separated bit strings instead of --weight")
    hash_lab.add_argument("--trials", type=int, default=100_000)
    hash_lab.add_argument("--failure", type=float, default=None, help="report the tag length for this failure")
    return parser


def _apply_defaults(args: argparse.Namespace) -> None:
    if hasattr(args, "formula") and args.formula is None:
        args.formula = [NO_OTP]
    if args.command in ("scan", "optimal-codes") and args.code is None:
        args.code = list(DEFAULT_SCAN_CODES)


def configure_logging(verbosity: int) -> None:
    level = LOG_LEVELS[min(verbosity, len(LOG_LEVELS) - 1)]
    logging.basicConfig(stream=sys.stderr, level=level, format=LOG_FORMAT, force=True)


def dispatch(argv: Optional[List[str]] = None) -> int:
    """Runs one command line and returns its exit status.

    Parses the flags, runs the subcommand and writes the rendered report.

    Args:
        argv: Arguments without the program name; defaults to sys.argv.

    Returns:
        0 on success, 2 on a usage or domain error, 3 when the output
        cannot be written.
    """
    try:
        args = build_parser().parse_args(argv)
        configure_logging(args.verbose)
        _apply_defaults(args)
        run, emission = COMMANDS[args.command](args)
        write_output(render(run, emission), run.out)
    except CliError as exc:
        print(f"error: {exc.detail}", file=sys.stderr)
        return exc.status
    except KeyRateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValidationError as exc:
        print(f"error: invalid_run: {exc.errors()[0]['msg']}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        # --help
        return exc.code if isinstance(exc.code, int) else EXIT_OK
    return EXIT_OK


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
