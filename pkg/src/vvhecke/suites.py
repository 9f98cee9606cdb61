"""Config-driven verification suites.

A config is a JSON object ``{"cases": [...]}``.  Every case names its suite
and a lattice (a name such as ``"A1+A1"`` or ``{"gram": [[...]]}``); the
remaining keys depend on the suite and are listed in ``CASE_KEYS``.  Unknown
keys are rejected so that a typo cannot silently turn a check off.
"""

from __future__ import annotations

import json
import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from fractions import Fraction
from importlib import resources

from . import heckeops, qexpansion, repnums, weilaction
from .errors import BudgetExceeded, VVHeckeError, WitnessNotFound
from .heckeops import Convention
from .qexpansion import VVExpansion, theta_series
from .quadmodule import EvenLattice, FqModule, named_lattice
from .reports import CaseReport, VerificationReport, mismatch_record
from .scalars import frac

__all__ = [
    "BUDGET_ENV",
    "CASE_KEYS",
    "ConfigError",
    "SUITES",
    "default_config",
    "load_config",
    "parse_convention",
    "parse_lattice",
    "run_case",
    "run_suite",
]

BUDGET_ENV = "VVHECKE_BUDGET"


class ConfigError(VVHeckeError):
    pass


COMMON = {"suite", "name", "lattice", "budget"}
CASE_KEYS = {
    "weil-closed-form": {"p", "l", "s", "h"},
    "hecke-coefficients": {"p", "l", "s", "precision"},
    "ramanujan": {"p", "l", "s"},
    "relation": {"p", "l", "precision", "convention", "input", "seed"},
    "multiplicativity": {"m", "n", "precision", "convention"},
    "pu-identity": {"n", "convention", "precision", "mode"},
    "classical": {"n", "precision", "convention"},
    "falsifier": {"p", "s", "lambda", "w"},
}
SUITES = tuple(CASE_KEYS)

NAMED_CONVENTIONS = {
    "default": heckeops.DEFAULT,
    "modular": heckeops.MODULAR,
    "literal": heckeops.LITERAL,
}


# -- parsing ---------------------------------------------------------------


def parse_lattice(spec) -> EvenLattice:
    try:
        if isinstance(spec, str):
            return named_lattice(spec)
        if isinstance(spec, dict) and set(spec) <= {"gram", "name"} and "gram" in spec:
            return EvenLattice.from_json(spec)
    except (KeyError, ValueError, TypeError, VVHeckeError) as exc:
        raise ConfigError(f"bad lattice {spec!r}: {exc}") from None
    raise ConfigError(f"bad lattice {spec!r}")


def parse_convention(spec) -> Convention:
    if spec is None:
        return heckeops.DEFAULT
    if isinstance(spec, str):
        if spec not in NAMED_CONVENTIONS:
            raise ConfigError(f"unknown convention {spec!r}")
        return NAMED_CONVENTIONS[spec]
    if isinstance(spec, dict) and set(spec) <= {"weight", "delta", "projection"}:
        try:
            return Convention(**spec)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    raise ConfigError(f"bad convention {spec!r}")


def _int(case, key, default=None, lo=None):
    v = case.get(key, default)
    if not isinstance(v, int) or isinstance(v, bool) or (lo is not None and v < lo):
        raise ConfigError(f"{key} must be an integer >= {lo}, got {v!r}")
    return v


def _int_list(case, key, allowed: list[int]) -> list[int]:
    v = case.get(key, "all")
    if v == "all":
        return allowed
    if isinstance(v, int) and not isinstance(v, bool):
        v = [v]
    if not isinstance(v, list) or not all(isinstance(x, int) and x in allowed for x in v):
        raise ConfigError(f"{key} must be 'all' or a subset of {allowed}, got {v!r}")
    return v


def _precision(case, default) -> Fraction:
    try:
        N = frac(case.get("precision", default))
    except (ValueError, TypeError, ZeroDivisionError):
        raise ConfigError(f"bad precision {case.get('precision')!r}") from None
    if N <= 0:
        raise ConfigError("precision must be positive")
    return N


def validate_case(case) -> dict:
    if not isinstance(case, dict):
        raise ConfigError(f"a case must be an object, got {case!r}")
    suite = case.get("suite")
    if suite not in CASE_KEYS:
        raise ConfigError(f"unknown suite {suite!r}")
    extra = set(case) - COMMON - CASE_KEYS[suite]
    if extra:
        raise ConfigError(f"unknown field(s) {sorted(extra)} in {suite} case")
    if "lattice" not in case:
        raise ConfigError(f"{suite} case without a lattice")
    parse_lattice(case["lattice"])
    parse_convention(case.get("convention"))
    budget = case.get("budget")
    if budget is not None and (not isinstance(budget, int) or budget < 1):
        raise ConfigError("budget must be a positive integer")
    if suite == "relation" and case.get("input", "theta") not in ("theta", "random"):
        raise ConfigError("relation input must be 'theta' or 'random'")
    if suite == "pu-identity" and case.get("mode", "pu") not in ("pu", "up-off-support"):
        raise ConfigError("pu-identity mode must be 'pu' or 'up-off-support'")
    # raises ConfigError on malformed parameters without doing any work
    _params(case)
    return case


def _params(case) -> dict:
    suite = case["suite"]
    out = {}
    if suite in ("weil-closed-form", "hecke-coefficients", "ramanujan"):
        out["p"] = _int(case, "p", lo=3)
        out["l"] = _int(case, "l", lo=1)
        out["s"] = _int_list(case, "s", list(range(1, 2 * out["l"])))
    if suite == "weil-closed-form":
        h = case.get("h", "all")
        if h != "all" and not (isinstance(h, list) and all(isinstance(x, int) for x in h)):
            raise ConfigError("h must be 'all' or a list of integers")
        out["h"] = h
    if suite == "hecke-coefficients":
        out["precision"] = _precision(case, 2)
    if suite == "relation":
        out["p"] = _int(case, "p", lo=2)
        out["l"] = _int(case, "l", lo=2)
        out["precision"] = _precision(case, 1)
        out["input"] = case.get("input", "theta")
        out["seed"] = _int(case, "seed", 0, lo=0)
    if suite == "multiplicativity":
        out["m"] = _int(case, "m", lo=1)
        out["n"] = _int(case, "n", lo=1)
        out["precision"] = _precision(case, 1)
    if suite == "pu-identity":
        out["n"] = _int(case, "n", lo=1)
        out["precision"] = _precision(case, 3)
        out["mode"] = case.get("mode", "pu")
    if suite == "classical":
        out["n"] = _int(case, "n", lo=1)
        out["precision"] = _precision(case, 3)
        if out["precision"].denominator != 1:
            raise ConfigError("classical precision must be an integer")
    if suite == "falsifier":
        out["p"] = _int(case, "p", lo=3)
        out["s"] = _int(case, "s", lo=1)
        try:
            out["lambda"] = [frac(x) for x in case.get("lambda", [])]
            out["w"] = [int(x) for x in case.get("w", [])]
        except (ValueError, TypeError, ZeroDivisionError):
            raise ConfigError("falsifier lambda/w must be lists of numbers") from None
    return out


def load_config(text: str) -> list[dict]:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON (line {exc.lineno}): {exc.msg}") from None
    if not isinstance(obj, dict) or set(obj) != {"cases"} or not isinstance(obj["cases"], list):
        raise ConfigError('config must be an object with the single field "cases" (a list)')
    return [validate_case(c) for c in obj["cases"]]


def default_config() -> list[dict]:
    text = resources.files("vvhecke").joinpath("data/default_grid.json").read_text()
    return load_config(text)


# -- budgets ---------------------------------------------------------------


@contextmanager
def budget(limit: int | None):
    """Temporarily replace the enumeration budgets of all modules."""
    if limit is None:
        env = os.environ.get(BUDGET_ENV)
        limit = int(env) if env else None
    if limit is None:
        yield
        return
    mods = [(weilaction, "ENUMERATION_BUDGET"), (repnums, "ENUMERATION_BUDGET"), (qexpansion, "THETA_BUDGET")]
    saved = [getattr(m, a) for m, a in mods]
    for m, a in mods:
        setattr(m, a, limit)
    try:
        yield
    finally:
        for (m, a), v in zip(mods, saved):
            setattr(m, a, v)


# -- runners ---------------------------------------------------------------


def _label(case, lattice) -> str:
    return case.get("name") or (lattice.name or "gram")


def _run_weil(case, L, P) -> list[CaseReport]:
    out = []
    p, l = P["p"], P["l"]
    for s in P["s"]:
        hs = weilaction.units(p**s) if P["h"] == "all" else P["h"]
        for h in hs:
            t0 = time.perf_counter()
            params = weilaction.BetaParams(p, l, s, h)
            closed = weilaction.rho_beta_closed(L, params)
            oracle = weilaction.rho_beta_oracle(L, params)
            M = closed.module
            mism = [
                {
                    "column": [str(c) for c in M.coords(lam)],
                    "row": [str(c) for c in M.coords(mu)],
                    "closed": x.to_json(),
                    "oracle": y.to_json(),
                }
                for lam, mu, x, y in closed.mismatches(oracle)
            ]
            sup = weilaction.support_check(oracle)
            rep = CaseReport(
                name=f"{_label(case, L)} rho(beta) p={p} l={l} s={s} h={h}",
                params={"lattice": L.to_json(), "p": p, "l": l, "s": s, "h": h},
                status="fail" if mism else "pass",
                mismatches=mism,
                compared=len(M) ** 2,
                constants={
                    "nonzero_columns": len(sup["support"]),
                    "columns_outside_multiples": len(sup["outside"]),
                },
            )
            if sup["outside"]:
                rep.notes.append("nonzero columns outside the multiples subgroup")
            rep.timing = time.perf_counter() - t0
            out.append(rep)
    return out


def _tag(conv: Convention) -> str:
    for name, c in NAMED_CONVENTIONS.items():
        if c == conv:
            return name
    return f"{conv.weight}/{conv.delta}/{conv.projection}"


def _theta_for(L, precision, scale=1) -> VVExpansion:
    return theta_series(L, precision, scale)


def _run_bs(case, L, P) -> list[CaseReport]:
    out = []
    p, l, N = P["p"], P["l"], P["precision"]
    need = max([N * p ** (2 * (s - l)) for s in P["s"] if s > l] + [N])
    theta = _theta_for(L, need)
    for s in P["s"]:
        t0 = time.perf_counter()
        closed = heckeops.bs_closed(theta, p, l, s, N)
        oracle = heckeops.bs_oracle(theta, p, l, s, N)
        rep = heckeops._compare_case(
            f"{_label(case, L)} b_s p={p} l={l} s={s}",
            {"lattice": L.to_json(), "p": p, "l": l, "s": s, "precision": N, "weight": theta.weight},
            closed,
            oracle,
        )
        sup = heckeops.bs_support_check(theta, p, l, s, N)
        rep.constants = {
            "nonzero_coefficients": sum(len(closed.component(x)) for x in closed.module),
            "support_checked": sup["checked"],
            "support_violations": sup["violations"],
        }
        if sup["violations"]:
            rep.status = "fail"
            rep.notes.append("nonzero coefficient outside the predicted support")
        rep.timing = time.perf_counter() - t0
        out.append(rep)
    return out


def _run_ramanujan(case, L, P) -> list[CaseReport]:
    out = []
    p, l = P["p"], P["l"]
    M = FqModule(L, 1)
    for s in P["s"]:
        t0 = time.perf_counter()
        mism = []
        compared = 0
        sieve_bad = 0
        for lam in M:
            q = M.q_value(lam)
            for j in range(p**s):
                n = q + j
                lhs, rhs = repnums.ramanujan_check(M, lam, n, p, s)
                compared += 1
                if lhs != rhs:
                    mism.append(mismatch_record(M, lam, n, lhs, rhs))
            if l < s < 2 * l:
                f = p ** (2 * (s - l))
                for j in range(p**s):
                    n = f * q + j
                    lhs, rhs = repnums.ramanujan_check_scaled(M, lam, n, p, s, l)
                    compared += 1
                    if lhs != rhs:
                        mism.append(mismatch_record(M, lam, n, lhs, rhs))
                    if not lhs.is_zero() and not repnums.support_sieve(M, p, s, l, lam, n):
                        sieve_bad += 1
        rep = CaseReport(
            name=f"{_label(case, L)} unit sums p={p} l={l} s={s}",
            params={"lattice": L.to_json(), "p": p, "l": l, "s": s},
            status="fail" if mism or sieve_bad else "pass",
            mismatches=mism,
            compared=compared,
            constants={"scaled_identity": l < s < 2 * l, "sieve_violations": sieve_bad},
        )
        rep.timing = time.perf_counter() - t0
        out.append(rep)
    return out


def random_expansion(L, precision, seed: int) -> VVExpansion:
    """Integer coefficients in [-5, 5] on every admissible exponent below ``precision``."""
    rng = random.Random(seed)
    M = FqModule(L, 1)
    coeffs = {}
    for lam in M:
        n = M.q_value(lam)
        series = {}
        while n < precision:
            series[n] = Fraction(rng.randint(-5, 5))
            n += 1
        coeffs[lam] = series
    return VVExpansion(M, Fraction(L.rank, 2), precision, coeffs)


def _run_relation(case, L, P) -> list[CaseReport]:
    conv = parse_convention(case.get("convention"))
    p, l, N = P["p"], P["l"], P["precision"]
    need = N * p ** (2 * l)
    F = _theta_for(L, need) if P["input"] == "theta" else random_expansion(L, need, P["seed"])
    rep = heckeops.check_relation(F, p, l, conv, precision=N)
    rep.name = f"{_label(case, L)} {P['input']} {rep.name} [{_tag(conv)}]"
    rep.params.update({"lattice": L.to_json(), "input": P["input"]})
    if P["input"] == "random":
        rep.params["seed"] = P["seed"]
    return [rep]


def _run_mult(case, L, P) -> list[CaseReport]:
    conv = parse_convention(case.get("convention"))
    m, n, N = P["m"], P["n"], P["precision"]
    F = _theta_for(L, N * (m * n) ** 2)
    rep = heckeops.check_multiplicative(F, m, n, conv, precision=N)
    rep.name = f"{_label(case, L)} {rep.name} [{_tag(conv)}]"
    rep.params["lattice"] = L.to_json()
    return [rep]


def _run_pu(case, L, P) -> list[CaseReport]:
    conv = parse_convention(case.get("convention"))
    n = P["n"]
    F = _theta_for(L, P["precision"] * n * n)
    if P["mode"] == "pu":
        rep = heckeops.check_PU(F, n, conv)
        rep.name = f"{_label(case, L)} {rep.name} [{_tag(conv)}]"
        rep.params["lattice"] = L.to_json()
        return [rep]
    # U P is the identity only on expansions supported on L(n); feed it the
    # theta series of L(n^2), which is supported on all of L(n^2)
    G = theta_series(L, F.precision / (n * n), n * n)
    rep = heckeops.check_UP(G, n, conv)
    rep.name = f"{_label(case, L)} {rep.name} off L(n) [{_tag(conv)}]"
    rep.params["lattice"] = L.to_json()
    # a difference is the expected outcome here
    rep.status = "witness-found" if rep.mismatches else "fail"
    if not rep.mismatches:
        rep.notes.append("U P agreed with the identity on an input not supported on L(n)")
    return [rep]


def _run_classical(case, L, P) -> list[CaseReport]:
    conv = parse_convention(case.get("convention", "modular"))
    n, N = P["n"], int(P["precision"])
    M = FqModule(L, 1)
    if len(M) != 1:
        raise ConfigError("the classical cross-check needs a unimodular lattice")
    t0 = time.perf_counter()
    F = _theta_for(L, N * n * n)
    k = F.weight
    if k.denominator != 1:
        raise ConfigError("the classical cross-check needs an integral weight")
    z = M.zero()
    scalar = {int(e): v.to_fraction() for e, v in F.component(z).items()}
    classical = heckeops.classical_hecke(scalar, int(k), n * n, N, input_precision=int(F.precision))
    H = heckeops.op_H(F, n, conv).materialize().truncate(N)
    expected = VVExpansion(M, k, N, {z: {Fraction(e): v for e, v in classical.items() if v}})
    rep = heckeops._compare_case(
        f"{_label(case, L)} H_{n * n} against classical T_{n * n} [{_tag(conv)}]",
        {"lattice": L.to_json(), "n": n, "precision": N, "convention": conv.to_json()},
        H,
        expected,
    )
    eig = Fraction(classical[0]) if classical.get(0) else None
    proportional = not heckeops.compare(H, F.truncate(N).scaled(eig)) if eig is not None else False
    rep.constants = {"eigenvalue": eig, "eigenvector": proportional}
    rep.timing = time.perf_counter() - t0
    return [rep]


def _run_falsifier(case, L, P) -> list[CaseReport]:
    t0 = time.perf_counter()
    p, s = P["p"], P["s"]
    params = {"lattice": L.to_json(), "p": p, "s": s, "lambda": P["lambda"], "w": P["w"]}
    try:
        wit = weilaction.falsify_naive_identity(L, p, s, P["lambda"], P["w"])
    except WitnessNotFound as exc:
        rep = CaseReport(f"{_label(case, L)} naive Gauss-sum shift", params, status="fail", notes=[str(exc)])
    else:
        record = wit.to_json()
        rep = CaseReport(
            f"{_label(case, L)} naive Gauss-sum shift",
            params,
            status="witness-found",
            mismatches=[record],
            compared=1,
            constants={"verdict": wit.verdict, "lhs_invariant": wit.lhs_invariant},
        )
    rep.timing = time.perf_counter() - t0
    return [rep]


RUNNERS = {
    "weil-closed-form": _run_weil,
    "hecke-coefficients": _run_bs,
    "ramanujan": _run_ramanujan,
    "relation": _run_relation,
    "multiplicativity": _run_mult,
    "pu-identity": _run_pu,
    "classical": _run_classical,
    "falsifier": _run_falsifier,
}


def run_case(case: dict) -> list[CaseReport]:
    """Run one validated case; budget overruns and errors become case statuses."""
    L = parse_lattice(case["lattice"])
    P = _params(case)
    t0 = time.perf_counter()
    try:
        with budget(case.get("budget")):
            return RUNNERS[case["suite"]](case, L, P)
    except BudgetExceeded as exc:
        status, note = "budget-exceeded", str(exc)
    except ConfigError:
        raise
    except VVHeckeError as exc:
        status, note = "error", f"{type(exc).__name__}: {exc}"
    rep = CaseReport(_label(case, L), {"lattice": L.to_json(), **P}, status=status, notes=[note])
    rep.timing = time.perf_counter() - t0
    return [rep]


def run_suite(suite: str, cases: list[dict], jobs: int = 1) -> VerificationReport:
    """Run the cases of ``suite`` (``"all"`` for every case); order follows the config."""
    if suite != "all" and suite not in CASE_KEYS:
        raise ConfigError(f"unknown suite {suite!r}")
    chosen = [c for c in cases if suite == "all" or c["suite"] == suite]
    if jobs > 1 and len(chosen) > 1:
        with ProcessPoolExecutor(jobs) as pool:
            results = list(pool.map(run_case, chosen))
    else:
        results = [run_case(c) for c in chosen]
    return VerificationReport(suite, [r for rs in results for r in rs])
