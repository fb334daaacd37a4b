# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.
from __future__ import annotations

from argparse import ArgumentParser, Namespace
from importlib.metadata import PackageNotFoundError, version
from json import dumps
from logging import DEBUG, INFO, getLogger
from pathlib import Path
from typing import TYPE_CHECKING, Any

from .catalog import MAX_CATALOG_SIZE, enumerate_les, load_algebra
from .classifier import StrictOrder, classify_inequality
from .common import AlbaError, init_logging
from .engine import run
from .grammar import load_signature, parse_inequality
from .rules import Mode, RunConfig
from .selftest import selftest
from .syntax import Variance, default_signature
from .verify import check_equivalence, check_step_soundness

if TYPE_CHECKING:
    from .classifier import ClassReport
    from .engine import RunOutcome
    from .syntax import Inequality, Signature
    from .verify import EquivalenceReport

try:
    __version__ = version("mu-alba")
except PackageNotFoundError:  # pragma: no cover
    # package is not installed
    __version__ = "unknown"

LOG = getLogger(__name__)
LOG_LEVELS = {"DEBUG": DEBUG, "INFO": INFO}

EXIT_SUCCESS = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def parse_epsilon(text: str) -> tuple[tuple[str, Variance], ...]:
    """Parse an order-type assignment such as 'p=1,q=d'.

    Args:
        text: Comma separated letter=variance pairs.

    Returns:
        Pairs in the given order.
    """
    pairs = []
    for item in text.split(","):
        if not item.strip():
            continue
        name, _, value = item.partition("=")
        try:
            pairs.append((name.strip(), Variance(value.strip())))
        except ValueError:
            raise ValueError(f"invalid order-type entry '{item.strip()}'") from None
        if not name.strip():
            raise ValueError(f"invalid order-type entry '{item.strip()}'")
    return tuple(pairs)


def _emit(args: Namespace, data: dict[str, Any], lines: list[str]) -> None:
    if args.format == "json":
        print(dumps(data, indent=2))
    else:
        for line in lines:
            print(line)


def format_report(report: ClassReport) -> list[str]:
    lines = [f"{report.ineq}: {report.strongest}"]
    for cls, verdict in report.verdicts.items():
        if verdict.holds:
            lines.append(f"  {cls.value}: yes, {verdict.witnesses[0]}")
        else:
            reason = verdict.failures[0].reason if verdict.failures else "no witness"
            lines.append(f"  {cls.value}: no ({reason})")
    return lines


def format_outcome(outcome: RunOutcome, trace: bool) -> list[str]:
    lines = []
    if trace:
        for step in outcome.steps:
            after = " ; ".join(str(x) for x in step.after)
            lines.append(f"[{step.rule.value}] {step.before}  ~>  {after}")
    if outcome.success:
        lines.extend(str(x) for x in outcome.output)
    else:
        lines.append(f"ALBA failure: {outcome.reason}")
        lines.extend(f"  stuck: {x}" for x in outcome.stuck_systems)
    return lines


def format_equivalence(report: EquivalenceReport) -> list[str]:
    if report.equivalent:
        return [f"equivalent on all {report.checked} algebra(s)"]
    lines = [f"inequivalent on {len(report.discrepancies)} algebra(s)"]
    for item in report.discrepancies:
        where = "" if item.step is None else f" (step {item.step})"
        lines.append(
            f"  {item.algebra}{where}: input valid={item.input_valid}, "
            f"output valid={item.output_valid}, assignment {item.counterexample}"
        )
    return lines


def read_input(args: Namespace, sig: Signature) -> Inequality:
    text = args.input.read_text() if args.input else args.ineq
    return parse_inequality(text.strip(), sig)


def cmd_classify(args: Namespace, sig: Signature) -> int:
    report = classify_inequality(read_input(args, sig))
    _emit(args, report.to_json(), format_report(report))
    return EXIT_SUCCESS


def cmd_reduce(args: Namespace, sig: Signature) -> int:
    config = RunConfig(
        mode=Mode(args.mode),
        pivotal=args.pivotal,
        epsilon=args.epsilon,
        omega=args.omega,
    )
    outcome = run(read_input(args, sig), config)
    LOG.info("%d system(s) reduced", len(outcome.runs))
    _emit(args, outcome.to_json(), format_outcome(outcome, args.trace))
    return EXIT_SUCCESS if outcome.success else EXIT_FAILURE


def cmd_verify(args: Namespace, sig: Signature) -> int:
    ineq = read_input(args, sig)
    outcome = run(ineq, RunConfig(mode=Mode.PROPER))
    if not outcome.success:
        LOG.info("proper run failed (%s), trying tame", outcome.reason)
        outcome = run(ineq, RunConfig(mode=Mode.TAME))
    if not outcome.success:
        _emit(args, outcome.to_json(), format_outcome(outcome, args.trace))
        return EXIT_FAILURE
    if args.alg:
        algebras = [load_algebra(args.alg, sig)]
    else:
        algebras = list(enumerate_les(args.max_size, sig, args.budget))
    LOG.info("Checking %d algebra(s)...", len(algebras))
    report = check_equivalence(ineq, outcome.output, algebras)
    if args.steps:
        report.discrepancies.extend(
            check_step_soundness(outcome.steps, algebras).discrepancies
        )
    lines = format_outcome(outcome, args.trace) + format_equivalence(report)
    _emit(args, {"run": outcome.to_json(), "oracle": report.to_json()}, lines)
    return EXIT_SUCCESS if report.equivalent else EXIT_FAILURE


def cmd_selftest(args: Namespace) -> int:
    results = selftest(max_size=args.max_size, budget=args.budget)
    lines = [f"{'suite':<24} {'result':<6} {'checked':>8} {'time':>8}"]
    for item in results:
        lines.append(
            f"{item.name:<24} {'pass' if item.passed else 'FAIL':<6} "
            f"{item.checked:>8} {item.elapsed:>7.1f}s"
        )
        lines.extend(f"    {x}" for x in item.failures[:5])
    _emit(args, {"suites": [x.to_json() for x in results]}, lines)
    return EXIT_SUCCESS if all(x.passed for x in results) else EXIT_FAILURE


def parse_args(argv: list[str] | None = None) -> Namespace:
    """Argument parsing"""
    parser = ArgumentParser(
        description="Classify and reduce mu-calculus inequalities.", prog="alba"
    )
    parser.add_argument(
        "--log-level",
        choices=sorted(LOG_LEVELS),
        default="INFO",
        help="Configure console logging (default: %(default)s).",
    )
    parser.add_argument(
        "--version",
        "-V",
        action="version",
        version=f"%(prog)s {__version__}",
        help="Show version number.",
    )
    subparsers = parser.add_subparsers(
        dest="command", required=True, help="Command to run."
    )

    # shared by the commands reading an inequality
    source = ArgumentParser(add_help=False)
    source.add_argument("ineq", nargs="?", help="Inequality, e.g. 'f(p) <= g(p)'.")
    source.add_argument("-i", "--input", type=Path, help="Read the inequality from file.")
    source.add_argument("--sig", type=Path, help="Signature file (default: f and g).")
    output = ArgumentParser(add_help=False)
    output.add_argument(
        "--format",
        choices=["json", "text"],
        default="text",
        help="Output format (default: %(default)s).",
    )
    output.add_argument("--trace", action="store_true", help="Show derivation steps.")
    oracle = ArgumentParser(add_help=False)
    oracle.add_argument(
        "--max-size",
        default=MAX_CATALOG_SIZE,
        type=int,
        help="Largest lattice in the oracle corpus (default: %(default)s).",
    )
    oracle.add_argument(
        "--budget",
        default=20,
        type=int,
        help="Algebras per lattice (default: %(default)s).",
    )

    # classify args
    subparsers.add_parser("classify", parents=[source, output])
    # reduce args
    reduce = subparsers.add_parser("reduce", parents=[source, output])
    reduce.add_argument(
        "--mode",
        choices=[x.value for x in Mode],
        default=Mode.PROPER.value,
        help="Run regime (default: %(default)s).",
    )
    reduce.add_argument(
        "--pivotal",
        action="store_true",
        default=True,
        help="Only approximate at maximal skeleton nodes (default).",
    )
    reduce.add_argument(
        "--no-pivotal",
        action="store_false",
        dest="pivotal",
        help="Relax the maximality check of approximation.",
    )
    reduce.add_argument("--epsilon", help="Order-type, e.g. 'p=1,q=d'.")
    reduce.add_argument("--omega", help="Strict order, e.g. 'q<p,r<p'.")
    # verify args
    verify = subparsers.add_parser("verify", parents=[source, output, oracle])
    verify.add_argument("--alg", type=Path, help="Check a single algebra file.")
    verify.add_argument(
        "--steps", action="store_true", help="Also check every derivation step."
    )
    # selftest args
    subparsers.add_parser("selftest", parents=[output, oracle])

    args = parser.parse_args(argv)

    if args.command != "selftest":
        if (args.ineq is None) == (args.input is None):
            parser.error("Provide either an inequality or -i/--input")
        if args.input and not args.input.is_file():
            parser.error(f"Input file does not exist: '{args.input}'")
        if args.sig and not args.sig.is_file():
            parser.error(f"Signature file does not exist: '{args.sig}'")
    if args.command in ("verify", "selftest"):
        if not 1 <= args.max_size <= MAX_CATALOG_SIZE:
            parser.error(f"--max-size must be between 1 and {MAX_CATALOG_SIZE}")
        if args.budget < 1:
            parser.error("--budget must be positive")
    if args.command == "verify" and args.alg and not args.alg.is_file():
        parser.error(f"Algebra file does not exist: '{args.alg}'")
    if args.command == "reduce":
        try:
            if args.epsilon is not None:
                args.epsilon = parse_epsilon(args.epsilon)
            if args.omega is not None:
                args.omega = StrictOrder.parse(args.omega)
        except ValueError as exc:
            parser.error(str(exc))

    return args


def main(argv: list[str] | None = None) -> int:
    """Main function"""
    args = parse_args(argv)
    init_logging(LOG_LEVELS[args.log_level])

    try:
        if args.command == "selftest":
            return cmd_selftest(args)
        sig = load_signature(args.sig) if args.sig else default_signature()
        commands = {
            "classify": cmd_classify,
            "reduce": cmd_reduce,
            "verify": cmd_verify,
        }
        return commands[args.command](args, sig)
    except AlbaError as exc:
        LOG.error("error: %s", exc)
        return EXIT_USAGE
