import argparse
import os
import sys
from typing import Optional

from loguru import logger

from . import __version__
from .config import Settings
from .diagram import format_link, insert_r2, parse_link_file, validate
from .errors import (
    BoundaryError,
    DiagramSyntaxError,
    GroebnerTimeout,
    InvalidDiagramError,
    PolynomialSyntaxError,
    StateBudgetExceeded,
)
from .formatting import validation_table, verification_table
from .groebner import (
    PUBLISHED_BASIS_SIZES,
    basis_for_level,
    compare_ideals,
    load_basis,
    save_basis,
    verify_against_reference,
)
from .invariant import (
    bracket_specialize,
    check_published,
    compare,
    eta,
    kauffman_bracket_oracle,
)
from .poly import format as format_poly
from .poly import parse_expression
from .relations import generate_all_relations, load_reference_relations
from .statesum import check_state_budget, count_states, parse_level, state_sum
from .types import Level, LinkDiagram, PublishedCheck, level_name
from .utils import _load_file, load_reference, resolve_link_path

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3
EXIT_INTERNAL = 4

LOG_LEVELS = ("WARNING", "INFO", "DEBUG")


class UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _level(text: str) -> Level:
    try:
        return parse_level(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


def configure_logging(verbosity: int):
    logger.remove()
    logger.add(sys.stderr, level=LOG_LEVELS[min(verbosity, len(LOG_LEVELS) - 1)])


def load_link(name_or_path: str) -> LinkDiagram:
    return parse_link_file(resolve_link_path(name_or_path))


def _level_of(args) -> Level:
    return None if getattr(args, "full", False) else args.k


def _write_or_print(lines: list[str], out: Optional[str]):
    if out is None:
        for line in lines:
            print(line)
        return
    with open(out, "w", encoding="utf-8") as fout:
        fout.writelines(f"{line}\n" for line in lines)
    logger.info(f"Wrote {len(lines)} lines to {out}")


def _read_polynomials(name_or_path: str) -> list:
    if os.path.isfile(name_or_path):
        first = next((line for line in _load_file(name_or_path) if line.strip()), "")
        if first.startswith("vse-gb"):
            return list(load_basis(name_or_path).polynomials)
    return [parse_expression(text) for text in load_reference(name_or_path).values()]


def _warn_provisional(settings: Settings, level: Level):
    if basis_for_level(level, settings).provisional:
        logger.warning(
            f"The level {level_name(level)} basis is provisional: it was derived from "
            "transcribed data after the computation ran out of time"
        )


def run_statesum(args, settings: Settings) -> int:
    d = load_link(args.link)
    level = _level_of(args)
    check_state_budget(d, level, settings)
    print(format_poly(state_sum(d, level, workers=settings.workers)))
    return EXIT_OK


def run_eta(args, settings: Settings) -> int:
    d = load_link(args.link)
    level = _level_of(args)
    result = eta(d, level, settings)
    _warn_provisional(settings, level)
    print(format_poly(result.value))
    print(f"states: {result.state_count}")
    if args.expect:
        check = check_published(d, args.expect, level, settings, result=result)
        print(f"published: {check.value}")
        if check == PublishedCheck.mismatch:
            return EXIT_INPUT
    return EXIT_OK


def run_compare(args, settings: Settings) -> int:
    level = _level_of(args)
    comparison = compare(load_link(args.a), load_link(args.b), level, settings)
    print(comparison.verdict.value)
    print(f"a: {format_poly(comparison.first.value)}")
    print(f"b: {format_poly(comparison.second.value)}")
    return EXIT_OK


def run_relations(args, settings: Settings) -> int:
    relations = generate_all_relations(up_to_sign=args.up_to_sign)
    _write_or_print([format_poly(p) for p in relations.polynomials], args.out)
    if args.verify_reference:
        report = compare_ideals(
            relations.polynomials, load_reference_relations(), settings.gb_time_budget
        )
        print(verification_table(report))
        if not report.ok:
            return EXIT_INPUT
    return EXIT_OK


def run_gb(args, settings: Settings) -> int:
    level = _level_of(args)
    basis = basis_for_level(level, settings)
    if args.out:
        save_basis(basis, args.out)
    published = PUBLISHED_BASIS_SIZES.get(level, 15 if level is None else "-")
    print(f"level={level_name(level)} size={len(basis)} published={published}")
    _warn_provisional(settings, level)
    if args.verify_reference:
        report = verify_against_reference(basis, _read_polynomials(args.verify_reference))
        print(verification_table(report))
        if not report.ok:
            return EXIT_INPUT
    return EXIT_OK


def run_bracket(args, settings: Settings) -> int:
    d = load_link(args.link)
    check_state_budget(d, None, settings)
    bracket = bracket_specialize(state_sum(d, None, workers=settings.workers))
    print(format_poly(bracket))
    if args.oracle:
        oracle = kauffman_bracket_oracle(d, settings.oracle_max_crossings)
        if oracle != bracket:
            logger.error(f"Oracle disagrees: {format_poly(oracle)}")
            print("oracle: MISMATCH")
            return EXIT_INTERNAL
        print("oracle: MATCH")
    return EXIT_OK


def run_count(args, settings: Settings) -> int:
    if args.n < 0:
        raise UsageError("--n must be non-negative")
    print(count_states(args.n, args.k))
    return EXIT_OK


def run_validate(args, settings: Settings) -> int:
    report = validate(load_link(args.link))
    print(validation_table(report))
    return EXIT_OK if report.ok else EXIT_INPUT


def run_r2(args, settings: Settings) -> int:
    d = load_link(args.link)
    second = args.edges[1] if len(args.edges) > 1 else None
    pushed = insert_r2(d, args.edges[0], second, template=args.template)
    _write_or_print(format_link(pushed).splitlines(), args.out)
    return EXIT_OK


def _add_level(parser: argparse.ArgumentParser, allow_full: bool = True):
    group = parser.add_mutually_exclusive_group(required=True)
    # no default: "--k inf" parses to None and must still count as given
    group.add_argument(
        "--k",
        type=_level,
        default=argparse.SUPPRESS,
        help="Level: a non-negative integer or 'inf'",
    )
    if allow_full:
        group.add_argument(
            "--full", action="store_true", help="Unrestricted level (same as --k inf)"
        )


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="pyvse",
        description="Regular isotopy invariants of link diagrams from VSE state sums.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="More logging (-v, -vv)"
    )
    parser.add_argument(
        "--workers", type=int, default=None, help="Processes used for state sums"
    )
    parser.add_argument("--cache-dir", default=None, help="Groebner basis cache folder")
    parser.add_argument(
        "--no-cache", action="store_true", help="Neither read nor write the basis cache"
    )
    parser.add_argument(
        "--max-states", type=int, default=None, help="State budget (default 3^14)"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    statesum = commands.add_parser("statesum", help="Print the state sum")
    statesum.add_argument("--link", required=True, help="Link file or bundled name")
    _add_level(statesum)
    statesum.set_defaults(handler=run_statesum)

    invariant = commands.add_parser("eta", help="Print the invariant at a level")
    invariant.add_argument("--link", required=True, help="Link file or bundled name")
    _add_level(invariant)
    invariant.add_argument(
        "--expect", default=None, help="Compare with the published value of this link"
    )
    invariant.set_defaults(handler=run_eta)

    comparison = commands.add_parser("compare", help="Compare two links at a level")
    comparison.add_argument("--a", required=True, help="First link")
    comparison.add_argument("--b", required=True, help="Second link")
    _add_level(comparison)
    comparison.set_defaults(handler=run_compare)

    relations = commands.add_parser("relations", help="Print the ideal generators")
    relations.add_argument("--out", default=None, help="Write to this file")
    relations.add_argument(
        "--up-to-sign", action="store_true", help="Identify relations with their negatives"
    )
    relations.add_argument(
        "--verify-reference",
        action="store_true",
        help="Check ideal equality with the transcribed generators",
    )
    relations.set_defaults(handler=run_relations)

    gb = commands.add_parser("gb", help="Compute or load a Groebner basis")
    _add_level(gb, allow_full=False)
    gb.add_argument("--out", default=None, help="Also write the basis to this file")
    gb.add_argument(
        "--verify-reference",
        nargs="?",
        const="basis_inf",
        default=None,
        help="Reference polynomials (file or bundled name, default basis_inf)",
    )
    gb.set_defaults(handler=run_gb)

    bracket = commands.add_parser("bracket", help="Print the bracket specialization")
    bracket.add_argument("--link", required=True, help="Link file or bundled name")
    bracket.add_argument(
        "--oracle", action="store_true", help="Cross-check with the 2^n bracket"
    )
    bracket.set_defaults(handler=run_bracket)

    count = commands.add_parser("count", help="Number of states at a level")
    count.add_argument("--n", type=int, required=True, help="Crossing count")
    _add_level(count, allow_full=False)
    count.set_defaults(handler=run_count)

    validation = commands.add_parser("validate", help="Check a link file")
    validation.add_argument("--link", required=True, help="Link file or bundled name")
    validation.set_defaults(handler=run_validate)

    r2 = commands.add_parser("r2", help="Insert a move-2 crossing pair")
    r2.add_argument("--link", required=True, help="Link file or bundled name")
    r2.add_argument(
        "--edges", nargs="+", required=True, help="One edge (pushed over itself) or two"
    )
    r2.add_argument("--template", choices=("21", "22"), default="21")
    r2.add_argument("--out", default=None, help="Write the new link to this file")
    r2.set_defaults(handler=run_r2)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(str(e), file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:
        # --help and --version
        return e.code if isinstance(e.code, int) else EXIT_OK

    configure_logging(args.verbose)
    settings = Settings.from_env(
        cache_dir=args.cache_dir, max_states=args.max_states, workers=args.workers
    )
    if args.no_cache:
        settings = settings.model_copy(update={"cache_dir": None})

    try:
        return args.handler(args, settings)
    except UsageError as e:
        print(str(e), file=sys.stderr)
        return EXIT_USAGE
    except (StateBudgetExceeded, GroebnerTimeout) as e:
        logger.error(str(e))
        return EXIT_BUDGET
    except (
        FileNotFoundError,
        DiagramSyntaxError,
        InvalidDiagramError,
        PolynomialSyntaxError,
        BoundaryError,
        KeyError,
        ValueError,
    ) as e:
        logger.error(str(e))
        return EXIT_INPUT
    except Exception:
        logger.exception("Internal error")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
