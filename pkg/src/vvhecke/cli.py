"""Command-line front end.

Exit codes: 0 when the computation succeeded or every check passed, 1 when a
verification suite found a mismatch, 2 for usage, config or input errors.
Files given with ``--out`` are written atomically (temporary file, then
rename), so a failed run never leaves a partial artifact.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from fractions import Fraction
from pathlib import Path

from . import heckeops, weilaction
from .errors import VVHeckeError
from .qexpansion import VVExpansion, theta_series
from .quadmodule import FqModule
from .suites import (
    BUDGET_ENV,
    CASE_KEYS,
    SUITES,
    ConfigError,
    budget,
    default_config,
    load_config,
    parse_convention,
    parse_lattice,
    run_suite,
    validate_case,
)

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2

VERIFY_EPILOG = f"""\
suites:
  weil-closed-form    closed form of rho(beta) against the direct triple sum
  hecke-coefficients  b_s closed form against direct unit sums, plus support claims
  ramanujan           unit double sums against p^(sD) times Moebius sums
  relation            three-term recursion for H_(p^2l)
  multiplicativity    H_(m^2) H_(n^2) = H_(m^2 n^2) for coprime m, n
  pu-identity         P U proportional to the identity (constant recorded);
                      U P differs from the identity off L(n)
  classical           H_(n^2) on a unimodular theta series against classical T
  falsifier           the naive Gauss-sum shift identity, on a chosen lift pair
  all                 every case in the config (the default)

In the falsifier suite, and in the off-support U P check, finding a
counterexample is the expected outcome: status "witness-found" counts as a
pass, and the exit code is 1 only if no witness turns up.

Without --config the grid shipped with the package is used.  The environment
variable {BUDGET_ENV} overrides every enumeration budget (an integer).
"""


class UsageError(Exception):
    pass


def _write_atomic(path: str, text: str):
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent if str(target.parent) else ".", prefix=f".{target.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(args, text: str):
    if getattr(args, "out", None):
        _write_atomic(args.out, text)
    else:
        sys.stdout.write(text)


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _lattice(args):
    if args.gram:
        try:
            gram = json.loads(args.gram)
        except json.JSONDecodeError as exc:
            raise UsageError(f"--gram is not valid JSON: {exc.msg}") from None
        return parse_lattice({"gram": gram, "name": args.lattice or ""})
    return parse_lattice(args.lattice or "A1")


def _add_lattice_args(p):
    p.add_argument("--lattice", help='root lattice name such as A1, A2, E8 or "A1+A1" (default A1)')
    p.add_argument("--gram", help="Gram matrix as JSON, overrides the named lattice")
    p.add_argument("--scale", type=int, default=1, help="work over L(scale) (default 1)")


# -- subcommands -------------------------------------------------------------


def cmd_describe(args) -> int:
    L = _lattice(args)
    M = FqModule(L, args.scale)
    rows = [
        {"element": [str(c) for c in M.coords(y)], "q": str(M.q_value(y)), "smith": list(M.smith(y))}
        for y in M
    ]
    info = {
        "lattice": L.to_json(),
        "scale": M.n,
        "rank": M.rank,
        "det": L.det,
        "order": len(M),
        "invariant_factors": [d for d in M.divisors if d > 1],
        "level": M.level,
        "elements": rows,
    }
    if args.json:
        _emit(args, json.dumps(info, indent=1, sort_keys=True) + "\n")
        return EXIT_OK
    lines = [
        f"{L.name or 'lattice'}({M.n}): rank {M.rank}, det {L.det}, |L'/L| = {len(M)}, "
        f"invariant factors {info['invariant_factors']}, level {M.level}"
    ]
    lines += [f"  {'(' + ', '.join(r['element']) + ')':<30} q = {r['q']}" for r in rows]
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_theta(args) -> int:
    if args.precision is None:
        raise UsageError("theta needs --precision")
    th = theta_series(_lattice(args), args.precision, args.scale)
    _emit(args, th.dumps())
    return EXIT_OK


def cmd_weil(args) -> int:
    L = _lattice(args)
    params = weilaction.BetaParams(args.p, args.l, args.s, args.h)
    out = {"params": params.to_json()}
    closed = oracle = None
    if args.mode in ("closed", "both"):
        closed = weilaction.rho_beta_closed(L, params)
        out["closed"] = closed.to_json()
    if args.mode in ("oracle", "both"):
        oracle = weilaction.rho_beta_oracle(L, params)
        out["oracle"] = oracle.to_json()
    code = EXIT_OK
    if args.mode == "both":
        mism = closed.mismatches(oracle)
        out["mismatches"] = len(mism)
        code = EXIT_MISMATCH if mism else EXIT_OK
    _emit(args, json.dumps(out, indent=1, sort_keys=True) + "\n")
    return code


OP_KEYS = {
    "T": {"n"},
    "U": {"n"},
    "P": {"n"},
    "H": {"n"},
    "bs": {"p", "l", "s", "method"},
}


def _apply_one(F, desc: dict, args):
    if not isinstance(desc, dict) or desc.get("op") not in OP_KEYS:
        raise UsageError(f"operator descriptor needs op in {sorted(OP_KEYS)}: {desc!r}")
    op = desc["op"]
    extra = set(desc) - {"op", "convention"} - OP_KEYS[op]
    if extra:
        raise UsageError(f"unknown field(s) {sorted(extra)} for operator {op}")
    conv = parse_convention(desc.get("convention", args.convention))
    if op == "bs":
        method = desc.get("method", "closed")
        if method not in ("closed", "oracle"):
            raise UsageError("bs method must be 'closed' or 'oracle'")
        if not all(isinstance(desc.get(k), int) for k in ("p", "l", "s")):
            raise UsageError("bs needs integer p, l and s")
        fn = heckeops.bs_closed if method == "closed" else heckeops.bs_oracle
        return fn(F, desc["p"], desc["l"], desc["s"], args.precision)
    n = desc.get("n")
    if not isinstance(n, int) or n < 1:
        raise UsageError(f"operator {op} needs a positive integer n")
    fn = {"T": heckeops.op_T, "U": heckeops.op_U, "P": heckeops.op_P, "H": heckeops.op_H}[op]
    out = fn(F, n, conv).materialize()
    if args.precision is not None:
        out = out.truncate(min(args.precision, out.precision))
    return out


def cmd_apply(args) -> int:
    try:
        text = Path(args.input).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {args.input}: {exc}") from None
    F = VVExpansion.loads(text)
    raw = args.op
    if raw.startswith("@"):
        try:
            raw = Path(raw[1:]).read_text()
        except OSError as exc:
            raise UsageError(f"cannot read {raw[1:]}: {exc}") from None
    try:
        desc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise UsageError(f"operator descriptor is not valid JSON: {exc.msg}") from None
    for d in desc if isinstance(desc, list) else [desc]:
        F = _apply_one(F, d, args)
    _emit(args, F.dumps())
    return EXIT_OK


def _with_precision(case: dict, N: Fraction) -> dict:
    if "precision" not in CASE_KEYS[case["suite"]]:
        return case
    return validate_case({**case, "precision": str(N)})


def cmd_verify(args) -> int:
    if args.config:
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read {args.config}: {exc}") from None
        cases = load_config(text)
    else:
        cases = default_config()
    if args.precision is not None:
        cases = [_with_precision(c, args.precision) for c in cases]
    report = run_suite(args.suite, cases, jobs=args.jobs)
    text = report.dumps(timing=args.timing)
    if args.out:
        _write_atomic(args.out, text)
    sys.stdout.write(text if args.json else report.table())
    return EXIT_OK if report.ok else EXIT_MISMATCH


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vvhecke",
        description="Exact Weil-representation and Hecke-operator computations for even lattices.",
        epilog="Exit codes: 0 success, 1 verification mismatch, 2 usage or config error.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("describe-module", help="list the discriminant module of a lattice")
    _add_lattice_args(p)
    p.add_argument("--json", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_describe)

    p = sub.add_parser("theta", help="theta series as a vector-valued expansion file")
    _add_lattice_args(p)
    p.add_argument("--precision", type=_fraction, help="exponent bound N (exclusive)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_theta)

    p = sub.add_parser("weil-beta", help="matrix of rho(beta_{h,s}) by closed form and/or direct sum")
    _add_lattice_args(p)
    for name in ("p", "l", "s", "h"):
        p.add_argument(f"--{name}", type=int, required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--closed", dest="mode", action="store_const", const="closed")
    mode.add_argument("--oracle", dest="mode", action="store_const", const="oracle")
    mode.add_argument("--both", dest="mode", action="store_const", const="both")
    p.set_defaults(mode="both")
    p.add_argument("--out")
    p.add_argument("--json", action="store_true", help="accepted for symmetry; output is always JSON")
    p.set_defaults(func=cmd_weil)

    p = sub.add_parser(
        "apply",
        help="apply operators to an expansion file",
        description='Operator descriptors are JSON objects such as {"op": "H", "n": 2} or '
        '{"op": "bs", "p": 3, "l": 1, "s": 1, "method": "oracle"}; a list applies them in order. '
        "Prefix a file name with @ to read the descriptor from a file.",
    )
    p.add_argument("--input", required=True, help="expansion JSON file")
    p.add_argument("--op", required=True, help="operator descriptor (JSON or @file)")
    p.add_argument("--convention", default="default", help="default, modular or literal")
    p.add_argument("--precision", type=_fraction, help="output precision")
    p.add_argument("--out")
    p.add_argument("--json", action="store_true", help="accepted for symmetry; output is always JSON")
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser(
        "verify",
        help="run verification suites and emit a report",
        epilog=VERIFY_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p.add_argument("--suite", default="all", choices=SUITES + ("all",))
    p.add_argument("--config", help="JSON config with a list of cases")
    p.add_argument("--precision", type=_fraction, help="override the precision of every case that has one")
    p.add_argument("--out", help="write the JSON report here")
    p.add_argument("--json", action="store_true", help="print the JSON report instead of a table")
    p.add_argument("--timing", action="store_true", help="include wall-clock times in the JSON report")
    p.add_argument("--jobs", type=int, default=1, help="worker processes (results are ordered by case)")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with budget(None):
            return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"vvhecke: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except VVHeckeError as exc:
        print(f"vvhecke: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
