# cli.py

import argparse
import json
import logging
import sys

from modules import settings
from modules.core_order import initial_segment, rank, unrank
from modules.errors import BudgetExceededError, RearrangeInvariantError, SegmentCapError
from modules.oracle import (
    LAMBDA_UNIQUENESS_INSTANCES,
    STABILITY_INSTANCES,
    brute_force_min,
    check_hz19,
    check_idt,
    check_lambda_laws,
    check_lambda_uniqueness,
    check_lemma_sub,
    check_lw_agm,
    check_non_closed_minimiser,
    check_stability,
    random_lower_bound_suite,
    reports_frame,
    restate_suite,
)
from modules.pointset_io import format_pointset, parse_pointset, read_pointset_file
from modules.projections import AXIS, HYPERPLANE, lambda_profile, lambda_segment, sigma_profile, sigma_segment
from modules.rearrange import rearrange_to_segment

logger = logging.getLogger(__name__)

__all__ = ["main", "run", "parse_pointset"]

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3

KINDS = {"sigma": HYPERPLANE, "lambda": AXIS}
SUITES = ["sub", "restate", "idt", "hz19", "lw", "stability", "lambda", "random"]


# =========================================================
# ARGUMENT TYPES
# =========================================================
def _positive(text: str) -> int:
    value = _non_negative(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _non_negative(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return value


def _box(text: str) -> tuple[int, ...]:
    return tuple(_positive(part) for part in text.split(","))


def _emit(args, payload, text: str):
    if args.json:
        print(json.dumps(payload))
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


# =========================================================
# COMMANDS
# =========================================================
def cmd_segment(args) -> int:
    A = initial_segment(args.n, args.m)
    payload = {"n": args.n, "m": args.m, "points": [list(p) for p in A.sorted_points()]}
    _emit(args, payload, format_pointset(A))
    return EXIT_OK


def cmd_rank(args) -> int:
    value = rank(args.coords)
    _emit(args, {"point": args.coords, "rank": value}, str(value))
    return EXIT_OK


def cmd_unrank(args) -> int:
    point = unrank(args.n, args.m)
    _emit(args, {"n": args.n, "m": args.m, "point": list(point)}, " ".join(map(str, point)))
    return EXIT_OK


def cmd_sigma(args) -> int:
    value = sigma_segment(args.n, args.m)
    _emit(args, {"n": args.n, "m": args.m, "sigma": value}, str(value))
    return EXIT_OK


def cmd_lambda(args) -> int:
    value = lambda_segment(args.n, args.m)
    _emit(args, {"n": args.n, "m": args.m, "lambda": value}, str(value))
    return EXIT_OK


def cmd_profile(args) -> int:
    A = read_pointset_file(args.file)
    profile = sigma_profile(A) if args.kind == "sigma" else lambda_profile(A)
    _emit(args, profile.to_dict(), profile.to_frame().to_string(index=False))
    return EXIT_OK


def cmd_minimise(args) -> int:
    A = read_pointset_file(args.file)
    try:
        trace = rearrange_to_segment(A)
    except (RearrangeInvariantError, SegmentCapError):
        raise
    except Exception as exc:
        raise RearrangeInvariantError(f"{type(exc).__name__} while rearranging: {exc}") from exc
    if not (args.trace or args.full_trace):
        payload = {"n": A.dim, "size": len(A), "sigma": trace.steps[-1].sigma,
                   "points": [list(p) for p in trace.final.sorted_points()]}
        _emit(args, payload, format_pointset(trace.final))
        return EXIT_OK

    records = trace.to_records(full=args.full_trace)
    _emit(args, records, trace.to_frame().to_string(index=False))
    return EXIT_OK


def cmd_oracle(args) -> int:
    if args.box is not None and len(args.box) != args.n:
        raise ValueError(f"--box needs {args.n} sides, got {len(args.box)}.")
    result = brute_force_min(
        KINDS[args.kind], args.n, args.m, box=args.box, budget=args.budget, threads=args.threads
    )
    _emit(args, result.to_dict(), result.to_frame().to_string(index=False))
    return EXIT_OK


def _pick(value, default):
    return default if value is None else value


def _run_suite(args) -> list:
    n = _pick(args.n, 2)
    if args.suite == "sub":
        return check_lemma_sub(n, _pick(args.mmax, 300))
    if args.suite == "idt":
        return [check_idt(n, _pick(args.mmax, 2000))]
    if args.suite == "hz19":
        return [check_hz19(n, _pick(args.mmax, 10_000))]
    if args.suite == "lw":
        return [check_lw_agm(n, _pick(args.mmax, 10_000))]
    if args.suite == "restate":
        return [restate_suite(_pick(args.trials, 1000), _pick(args.nmax, 4), _pick(args.smax, 5),
                              _pick(args.mmax, 50), seed=args.seed)]
    if args.suite == "lambda":
        reports = check_lambda_laws(n, _pick(args.mmax, 200), _pick(args.smax, 20))
        reports += [check_lambda_uniqueness(dim, K, i, box=box, budget=args.budget, threads=args.threads)
                    for dim, K, i, box in LAMBDA_UNIQUENESS_INSTANCES]
        return reports
    if args.suite == "stability":
        reports = [check_stability(dim, K, i, box=box, budget=args.budget, threads=args.threads)
                   for dim, K, i, box in STABILITY_INSTANCES]
        return reports + [check_non_closed_minimiser(3, 1)]
    return [random_lower_bound_suite(_pick(args.trials, 1000), _pick(args.nmax, 4), _pick(args.mmax, 40),
                                     _pick(args.coord_max, 15), seed=args.seed)]


def cmd_verify(args) -> int:
    reports = _run_suite(args)
    failed = any(not r.ok for r in reports)

    text = reports_frame(reports).to_string(index=False)
    for r in reports:
        for violation in r.violations[:5]:
            text += f"\n{r.law.value}: {violation}"
    _emit(args, [r.to_dict() for r in reports], text)
    return EXIT_VIOLATION if failed else EXIT_OK


# =========================================================
# PARSER
# =========================================================
def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="Emit JSON instead of text")
    common.add_argument("--verbose", action="store_true", help="Log at DEBUG level on stderr")
    common.add_argument("--budget", type=_positive, default=None,
                        help=f"Oracle budget in candidate subsets (default: {settings.ORACLE_BUDGET:,})")
    common.add_argument("--threads", type=_positive, default=1, help="Oracle worker processes")

    parser = argparse.ArgumentParser(
        prog="cube-order",
        description="Cube order, extremal projection sums and their verification",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    for verb, func, help_text in [
        ("segment", cmd_segment, "Print the initial segment I_n(m)"),
        ("unrank", cmd_unrank, "Print the point at position m in cube order"),
        ("sigma", cmd_sigma, "Print sigma_n(m)"),
        ("lambda", cmd_lambda, "Print lambda_n(m)"),
    ]:
        sub = subparsers.add_parser(verb, parents=[common], help=help_text)
        sub.add_argument("n", type=_positive)
        sub.add_argument("m", type=_non_negative)
        sub.set_defaults(func=func)

    rank_parser = subparsers.add_parser("rank", parents=[common], help="Print the cube-order position of a point")
    rank_parser.add_argument("coords", type=_non_negative, nargs="+")
    rank_parser.set_defaults(func=cmd_rank)

    profile_parser = subparsers.add_parser("profile", parents=[common], help="Projection profile of a point set")
    profile_parser.add_argument("--kind", choices=list(KINDS), default="sigma")
    profile_parser.add_argument("file", help="Point-set file, .xlsx sheet or - for stdin")
    profile_parser.set_defaults(func=cmd_profile)

    minimise_parser = subparsers.add_parser("minimise", parents=[common], help="Rearrange a set into I_n(|A|)")
    minimise_parser.add_argument("file", help="Point-set file, .xlsx sheet or - for stdin")
    minimise_parser.add_argument("--trace", action="store_true", help="Print every step")
    minimise_parser.add_argument("--full-trace", action="store_true", help="Keep the points of large steps")
    minimise_parser.set_defaults(func=cmd_minimise)

    oracle_parser = subparsers.add_parser("oracle", parents=[common], help="Brute-force minimum over a box")
    oracle_parser.add_argument("--kind", choices=list(KINDS), default="sigma")
    oracle_parser.add_argument("n", type=_positive)
    oracle_parser.add_argument("m", type=_positive)
    oracle_parser.add_argument("--box", type=_box, default=None, help="Comma-separated sides, e.g. 3,3,3")
    oracle_parser.set_defaults(func=cmd_oracle)

    verify_parser = subparsers.add_parser("verify", parents=[common], help="Run a law suite")
    verify_parser.add_argument("--suite", choices=SUITES, required=True)
    verify_parser.add_argument("--n", type=_positive, default=None)
    verify_parser.add_argument("--nmax", type=_positive, default=None)
    verify_parser.add_argument("--mmax", type=_positive, default=None)
    verify_parser.add_argument("--smax", type=_positive, default=None)
    verify_parser.add_argument("--trials", type=_positive, default=None)
    verify_parser.add_argument("--coord-max", type=_non_negative, default=None)
    verify_parser.add_argument("--seed", type=int, default=0, help="RNG seed (default: 0)")
    verify_parser.set_defaults(func=cmd_verify)

    return parser


def run(args: argparse.Namespace) -> int:
    """Dispatch a parsed command and map failures onto exit codes."""
    try:
        return args.func(args)
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except RearrangeInvariantError as exc:
        print(f"internal check failed: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else settings.LOG_LEVEL,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    return run(args)
