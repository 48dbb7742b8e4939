"""Command-line front end.

Subcommands: algebra, prolong, bracket, hamfield, hamcheck, verify.  Every
result is a single JSON document on standard output (verify emits one JSON
object per line); diagnostics go to standard error.  Exit codes: 0 success,
2 parse errors, 3 domain errors, 4 validation errors, 5 check failures.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

import numpy as np

from .bundle import BundleFunction, prolong_function
from .errors import (
    ArityError,
    DomainError,
    NotInvertible,
    ParseError,
    SingularRealPart,
    WeilError,
)
from .expression import parse_expr
from .harness import default_specs, run_suite, MUTATIONS
from .jsonio import (
    algebra_to_json,
    bundle_field_from_json,
    bundle_function_from_json,
    bundle_function_to_json,
    element_to_json,
    field_to_json,
    parse_algebra_spec,
    parse_poisson_spec,
    parse_symplectic_spec,
    point_from_json,
)
from .poisson import (
    ProlongedPoisson,
    check_global_witness_poisson,
    is_locally_hamiltonian_poisson,
    poisson_derivation,
    prolonged_bracket,
)
from .symplectic import (
    check_global_witness_symplectic,
    hamiltonian_field,
    is_locally_hamiltonian_symplectic,
    symplectic_bracket,
)

DEFAULT_TOL = 1e-9
DEFAULT_SAMPLES = 32
DEFAULT_SEED = 42


def _emit(payload) -> None:
    print(json.dumps(payload, sort_keys=True, separators=(",", ":")))


def _exit_code(exc: Exception) -> int:
    if isinstance(exc, (ParseError, ArityError)):
        return 2
    if isinstance(exc, (DomainError, NotInvertible, SingularRealPart)):
        return 3
    return 4


def _report_error(exc: Exception) -> int:
    code = _exit_code(exc)
    body = {"type": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, ParseError) and exc.offset is not None:
        body["offset"] = exc.offset
    _emit({"error": body})
    print(f"error: {exc}", file=sys.stderr)
    return code


def _sign_flag(text: str) -> int:
    if text in ("+1", "1"):
        return 1
    if text == "-1":
        return -1
    raise argparse.ArgumentTypeError("sign must be +1 or -1")


def _load_json_arg(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{what} is not valid JSON: {exc}") from None


def _read_function(text: str, algebra, arity: int) -> BundleFunction:
    """A function argument: an expression string, or a {"terms": ...} JSON
    object."""
    stripped = text.strip()
    if stripped.startswith("{"):
        return bundle_function_from_json(
            _load_json_arg(stripped, "function"), algebra, arity)
    return BundleFunction.from_expr(parse_expr(stripped, arity), algebra)


def _structure(args, algebra):
    """Build (mode, structure, prolonged-or-None) from --poisson/--symplectic."""
    if getattr(args, "poisson", None) is not None:
        base = parse_poisson_spec(args.poisson)
        return "poisson", base, ProlongedPoisson(base, algebra)
    base = parse_symplectic_spec(args.symplectic)
    return "symplectic", base, None


# -- subcommand handlers --------------------------------------------------------------

def cmd_algebra(args) -> int:
    algebra = parse_algebra_spec(args.algebra)
    payload = algebra_to_json(algebra)
    payload.update({
        "dim": algebra.dim,
        "height": algebra.height,
        "basis": list(algebra.basis_labels),
    })
    _emit(payload)
    return 0


def cmd_prolong(args) -> int:
    algebra = parse_algebra_spec(args.algebra) if args.algebra else None
    point = point_from_json(_load_json_arg(args.point, "near-point"), algebra)
    f = parse_expr(args.expr, point.arity)
    value = prolong_function(f, point.algebra).evaluate(point)
    _emit(element_to_json(value))
    return 0


def cmd_bracket(args) -> int:
    algebra = parse_algebra_spec(args.algebra)
    mode, base, prolonged = _structure(args, algebra)
    left = _read_function(args.left, algebra, base.arity)
    right = _read_function(args.right, algebra, base.arity)
    if mode == "poisson":
        result = prolonged_bracket(prolonged, left, right)
    else:
        result = symplectic_bracket(left, right, base, algebra)
    if args.point:
        point = point_from_json(_load_json_arg(args.point, "near-point"),
                                algebra)
        _emit(element_to_json(result.evaluate(point)))
    else:
        _emit(bundle_function_to_json(result))
    return 0


def cmd_hamfield(args) -> int:
    algebra = parse_algebra_spec(args.algebra)
    mode, base, prolonged = _structure(args, algebra)
    fn = _read_function(args.fn, algebra, base.arity)
    if mode == "poisson":
        field = poisson_derivation(prolonged, fn)
    else:
        field = hamiltonian_field(fn, base, algebra)
    if args.sign == -1:
        field = field.scaled(BundleFunction.constant(-1.0, algebra, base.arity))
    if args.point:
        point = point_from_json(_load_json_arg(args.point, "near-point"),
                                algebra)
        _emit({"components": [element_to_json(c.evaluate(point))
                              for c in field.components],
               "sign": args.sign})
    else:
        _emit(field_to_json(field))
    return 0


def cmd_hamcheck(args) -> int:
    algebra = parse_algebra_spec(args.algebra)
    mode, base, prolonged = _structure(args, algebra)
    field = bundle_field_from_json(_load_json_arg(args.field, "field"), algebra)
    if field.arity != base.arity:
        raise ArityError("field component count does not match the structure")
    witness = None
    if args.witness is not None:
        witness = _read_function(args.witness, algebra, base.arity)
    rng = np.random.default_rng(args.seed)
    if mode == "poisson":
        locally = is_locally_hamiltonian_poisson(
            field, prolonged, samples=args.samples, tol=args.tol, rng=rng)
        globally: bool | str = "unknown"
        if witness is not None:
            scaled = witness if args.sign == 1 else witness * -1.0
            globally = check_global_witness_poisson(
                field, scaled, prolonged,
                samples=args.samples, tol=args.tol, rng=rng)
    else:
        locally = is_locally_hamiltonian_symplectic(
            field, base, algebra, samples=args.samples, tol=args.tol, rng=rng)
        globally = "unknown"
        if witness is not None:
            verdict = check_global_witness_symplectic(
                field, witness, base, algebra, sigma=args.sign,
                samples=args.samples, tol=args.tol, rng=rng)
            globally = verdict.ok
    _emit({
        "locally": locally,
        "globally": globally,
        "witness_checked": witness is not None,
        "sign": args.sign,
    })
    return 0


def cmd_verify(args) -> int:
    specs = default_specs(seed=args.seed, name_filter=args.filter,
                          samples=args.samples)
    reports = run_suite(specs, mutation=args.mutate)
    for report in reports:
        print(report.json_line(include_timing=args.timings))
    passed = sum(1 for r in reports if r.passed)
    print(f"{passed}/{len(reports)} checks passed", file=sys.stderr)
    return 0 if passed == len(reports) else 5


# -- parser ---------------------------------------------------------------------------

def _add_structure_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--poisson",
                       help="Poisson spec: canonical:N, rotational, or JSON")
    group.add_argument("--symplectic",
                       help="symplectic spec: canonical:N or form JSON")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weiljet",
        description="jet calculus over Weil algebras: prolongation, brackets, "
                    "hamiltonian tests, and the verification suite")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("algebra", help="build and describe an algebra")
    p.add_argument("--algebra", required=True,
                   help="dual, truncated:K,H, or algebra JSON")
    p.set_defaults(handler=cmd_algebra)

    p = sub.add_parser("prolong", help="evaluate a lifted function at a "
                                       "near-point")
    p.add_argument("--algebra", help="algebra spec (optional if the point "
                                     "embeds one)")
    p.add_argument("--expr", required=True, help="expression to lift")
    p.add_argument("--point", required=True, help="near-point JSON")
    p.set_defaults(handler=cmd_prolong)

    p = sub.add_parser("bracket", help="bracket of two lifted functions")
    p.add_argument("--algebra", required=True)
    _add_structure_flags(p)
    p.add_argument("--left", "-f", required=True, dest="left",
                   help="first function (expression or terms JSON)")
    p.add_argument("--right", "-g", required=True, dest="right",
                   help="second function (expression or terms JSON)")
    p.add_argument("--point", help="optional near-point JSON to evaluate at")
    p.set_defaults(handler=cmd_bracket)

    p = sub.add_parser("hamfield", help="hamiltonian field of a function")
    p.add_argument("--algebra", required=True)
    _add_structure_flags(p)
    p.add_argument("--fn", required=True,
                   help="potential function (expression or terms JSON)")
    p.add_argument("--point", help="optional near-point JSON to evaluate at "
                                   "(required to print symplectic solves)")
    p.add_argument("--sign", type=_sign_flag, default=1,
                   help="orientation convention, +1 or -1 (default +1)")
    p.set_defaults(handler=cmd_hamfield)

    p = sub.add_parser("hamcheck", help="local/global hamiltonian tests")
    p.add_argument("--algebra", required=True)
    _add_structure_flags(p)
    p.add_argument("--field", required=True,
                   help='field JSON: ["expr",...] or per-component term lists')
    p.add_argument("--witness", help="candidate potential (expression or "
                                     "terms JSON); omit for locally-only")
    p.add_argument("--sign", type=_sign_flag, default=1,
                   help="orientation convention, +1 or -1 (default +1)")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL,
                   help=f"decision tolerance (default {DEFAULT_TOL})")
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES,
                   help=f"near-points per decision (default {DEFAULT_SAMPLES})")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED,
                   help=f"sampling seed (default {DEFAULT_SEED})")
    p.set_defaults(handler=cmd_hamcheck)

    p = sub.add_parser("verify", help="run the identity verification suite")
    p.add_argument("--filter", help="only run checks whose name contains this")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED,
                   help=f"suite seed (default {DEFAULT_SEED})")
    p.add_argument("--samples", type=int, default=None,
                   help="override per-check sample counts")
    p.add_argument("--timings", action="store_true",
                   help="include elapsed seconds in each report line")
    p.add_argument("--mutate", choices=sorted(MUTATIONS), default=None,
                   help="run with an intentionally broken operation "
                        "(the suite must fail)")
    p.set_defaults(handler=cmd_verify)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.handler(args)
    except (WeilError, ValueError) as exc:
        return _report_error(exc)


if __name__ == "__main__":
    sys.exit(main())
