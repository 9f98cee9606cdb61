"""Truncated vector-valued q-expansions with rational exponents.

A :class:`VVExpansion` stores ``c(lam, n)`` for every component ``lam`` of a
finite quadratic module and every exponent ``n < precision``; absent entries
are zero.  Exponents satisfy ``n = q(lam) mod 1``.
"""

from __future__ import annotations

import json
from fractions import Fraction
from math import ceil, floor, gcd, sqrt

from .errors import (
    BudgetExceeded,
    ModuleMismatch,
    NotPositiveDefinite,
    PrecisionViolation,
    SchemaError,
    WeightMismatch,
)
from .quadmodule import EvenLattice, FqModule
from .scalars import Cyclotomic, RootSum, frac

__all__ = [
    "LazyExpansion",
    "VVExpansion",
    "check_compatible",
    "compare",
    "required_input_precision",
    "short_vector_counts",
    "substitute",
    "theta_series",
]

THETA_BUDGET = 5 * 10**6


def _fp_form(gram):
    """Square-completed form ``q(x) = sum_i a[i][i] (x_i + sum_{j>i} a[i][j] x_j)^2``."""
    D = len(gram)
    A = [[Fraction(gram[i][j], 2) for j in range(D)] for i in range(D)]
    a = [[Fraction(0)] * D for _ in range(D)]
    for i in range(D):
        a[i][i] = A[i][i] - sum(a[k][k] * a[k][i] ** 2 for k in range(i))
        if a[i][i] <= 0:
            raise NotPositiveDefinite("Gram matrix is not positive definite")
        for j in range(i + 1, D):
            a[i][j] = (A[i][j] - sum(a[k][k] * a[k][i] * a[k][j] for k in range(i))) / a[i][i]
    return a


def short_vector_counts(lattice: EvenLattice, shift, bound) -> dict[Fraction, int]:
    """``{n: #{x in shift + Z^D : q(x) = n}}`` for ``n < bound``.

    Fincke-Pohst recursion on the square-completed form.  Floats only prune
    the search (each interval is widened by a margin far above rounding
    error); every counted vector is accepted by an exact integer norm test.
    """
    G = lattice.gram
    D = lattice.rank
    a = [[float(c) for c in row] for row in _fp_form(G)]
    shift = [frac(c) for c in shift]
    den = 1
    for c in shift:
        den = den * c.denominator // gcd(den, c.denominator)
    sy = [int(c * den) for c in shift]  # x = (sy + den z) / den
    fshift = [float(c) for c in shift]
    bound = frac(bound)
    top = 2 * den * den * bound  # integer-scale bound on y^T G y
    eps = 1e-7 * (1 + float(bound))
    counts: dict[int, int] = {}
    x = [0.0] * D
    y = [0] * D
    visited = 0

    def z_range(i, R):
        c = -sum(a[i][j] * x[j] for j in range(i + 1, D))
        if R < -eps:
            return range(0), c
        w = sqrt(max(R, 0.0) / a[i][i]) + eps
        u = c - fshift[i]
        return range(floor(u - w), ceil(u + w) + 1), c

    def rec(i, R, tail):
        nonlocal visited
        zs, c = z_range(i, R)
        if i == 0:
            # y^T G y = G00 y0^2 + 2 y0 B + tail
            B = sum(G[0][j] * y[j] for j in range(1, D))
            g00 = G[0][0]
            for z in zs:
                y0 = sy[0] + den * z
                val = g00 * y0 * y0 + 2 * y0 * B + tail
                if val < top:
                    counts[val] = counts.get(val, 0) + 1
            visited += len(zs)
            if visited > THETA_BUDGET:
                raise BudgetExceeded("theta enumeration exceeds budget")
            return
        for z in zs:
            x[i] = fshift[i] + z
            y[i] = sy[i] + den * z
            cross = sum(G[i][j] * y[j] for j in range(i + 1, D))
            rec(i - 1, R - a[i][i] * (x[i] - c) ** 2, tail + G[i][i] * y[i] * y[i] + 2 * y[i] * cross)
        x[i] = 0.0
        y[i] = 0

    rec(D - 1, float(bound), 0)
    return {Fraction(v, 2 * den * den): c for v, c in sorted(counts.items())}


def required_input_precision(output_precision, n2: int) -> Fraction:
    """Input precision that makes every output exponent below ``output_precision`` exact."""
    return frac(output_precision) * n2


class VVExpansion:
    """A truncated expansion ``sum_lam sum_{n < N} c(lam, n) q^n e_lam``."""

    def __init__(self, module: FqModule, weight, precision, coeffs=None, *, check=True):
        self.module = module
        self.weight = frac(weight)
        self.precision = frac(precision)
        self.coeffs: dict[tuple, dict[Fraction, Cyclotomic]] = {}
        for lam, series in (coeffs or {}).items():
            clean = {}
            for n, v in series.items():
                v = Cyclotomic.coerce(v)
                if not v.is_zero():
                    clean[frac(n)] = v
            if clean:
                self.coeffs[lam] = clean
        if check:
            self.validate()

    def validate(self):
        M = self.module
        for lam, series in self.coeffs.items():
            q = M.q_value(lam)
            for n in series:
                if n < 0 or n >= self.precision:
                    raise PrecisionViolation(f"exponent {n} outside [0, {self.precision})")
                if (n - q).denominator != 1:
                    raise PrecisionViolation(f"exponent {n} is not congruent to q({lam}) = {q} mod 1")

    # -- access -----------------------------------------------------------
    def component(self, lam) -> dict[Fraction, Cyclotomic]:
        return self.coeffs.get(lam, {})

    def coefficient(self, lam, n) -> Cyclotomic:
        n = frac(n)
        if n >= self.precision:
            raise PrecisionViolation(f"coefficient at {n} beyond precision {self.precision}")
        return self.coeffs.get(lam, {}).get(n, Cyclotomic.zero())

    def support(self):
        return [lam for lam in self.module if lam in self.coeffs]

    def is_zero(self):
        return not self.coeffs

    def truncate(self, precision) -> VVExpansion:
        precision = frac(precision)
        if precision > self.precision:
            raise PrecisionViolation("cannot raise precision by truncation")
        return VVExpansion(
            self.module,
            self.weight,
            precision,
            {lam: {n: v for n, v in s.items() if n < precision} for lam, s in self.coeffs.items()},
            check=False,
        )

    # -- linear algebra ---------------------------------------------------
    def _check_compatible(self, other):
        check_compatible(self, other)

    def combine(self, other: VVExpansion, a=1, b=1) -> VVExpansion:
        """``a*self + b*other`` truncated to the smaller precision."""
        self._check_compatible(other)
        N = min(self.precision, other.precision)
        out: dict = {}
        for src, c in ((self, a), (other, b)):
            c = Cyclotomic.coerce(c)
            for lam, s in src.coeffs.items():
                tgt = out.setdefault(lam, {})
                for n, v in s.items():
                    if n < N:
                        tgt[n] = tgt.get(n, Cyclotomic.zero()) + c * v
        return VVExpansion(self.module, self.weight, N, out, check=False)

    def __add__(self, other):
        return self.combine(other)

    def __sub__(self, other):
        return self.combine(other, 1, -1)

    def scaled(self, c) -> VVExpansion:
        c = Cyclotomic.coerce(c)
        return VVExpansion(
            self.module,
            self.weight,
            self.precision,
            {lam: {n: c * v for n, v in s.items()} for lam, s in self.coeffs.items()},
            check=False,
        )

    __rmul__ = scaled

    def __eq__(self, other):
        if not isinstance(other, VVExpansion):
            return NotImplemented
        return (
            self.module == other.module
            and self.weight == other.weight
            and self.precision == other.precision
            and not compare(self, other)
        )

    __hash__ = None

    def __repr__(self):
        terms = sum(len(s) for s in self.coeffs.values())
        return f"VVExpansion({self.module!r}, k={self.weight}, N={self.precision}, {terms} terms)"

    # -- serialization ----------------------------------------------------
    def to_json(self) -> dict:
        M = self.module
        rows = []
        for lam in M:
            for n, v in sorted(self.coeffs.get(lam, {}).items()):
                rows.append(
                    {
                        "component": [f"{c.numerator}/{c.denominator}" for c in M.coords(lam)],
                        "n": f"{n.numerator}/{n.denominator}",
                        "value": v.to_json(),
                    }
                )
        return {
            "lattice": M.lattice.to_json(),
            "scale": M.n,
            "weight": str(self.weight),
            "precision": str(self.precision),
            "coefficients": rows,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, obj) -> VVExpansion:
        allowed = {"lattice", "scale", "weight", "precision", "coefficients"}
        if not isinstance(obj, dict):
            raise SchemaError("expansion must be a JSON object")
        unknown = set(obj) - allowed
        if unknown:
            raise SchemaError(f"unknown field(s): {sorted(unknown)}")
        for key in ("lattice", "weight", "precision", "coefficients"):
            if key not in obj:
                raise SchemaError(f"missing field {key!r}")
        try:
            lattice = EvenLattice.from_json(obj["lattice"])
            module = FqModule(lattice, int(obj.get("scale", 1)))
            weight, precision = Fraction(obj["weight"]), Fraction(obj["precision"])
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad header: {exc}") from exc
        coeffs: dict = {}
        for i, row in enumerate(obj["coefficients"]):
            if set(row) != {"component", "n", "value"}:
                raise SchemaError(f"coefficients[{i}]: expected fields component, n, value")
            try:
                lam = module.element([Fraction(c) for c in row["component"]])
                n = Fraction(row["n"])
                value = Cyclotomic.from_json(row["value"])
            except Exception as exc:
                raise SchemaError(f"coefficients[{i}]: {exc}") from exc
            coeffs.setdefault(lam, {})[n] = value
        try:
            return cls(module, weight, precision, coeffs)
        except PrecisionViolation as exc:
            raise SchemaError(f"invariant n = q(component) mod 1 violated: {exc}") from exc

    @classmethod
    def loads(cls, text: str) -> VVExpansion:
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"line {exc.lineno}: {exc.msg}") from exc
        return cls.from_json(obj)


def check_compatible(a, b):
    if a.module != b.module:
        raise ModuleMismatch(f"{a.module!r} vs {b.module!r}")
    if a.weight != b.weight:
        raise WeightMismatch(f"{a.weight} vs {b.weight}")


def compare(a, b):
    """Exact differences ``(component, n, a_value, b_value)`` below the common precision.

    Works for any pair of expansions exposing ``module``, ``weight``,
    ``precision`` and ``component``.
    """
    check_compatible(a, b)
    N = min(a.precision, b.precision)
    out = []
    M = a.module
    for lam in M:
        sa, sb = a.component(lam), b.component(lam)
        if not sa and not sb:
            continue
        for n in sorted(set(sa) | set(sb)):
            if n >= N:
                continue
            x = sa.get(n, Cyclotomic.zero())
            y = sb.get(n, Cyclotomic.zero())
            if x != y:
                out.append((lam, n, x, y))
    return out


def substitute(series: dict, r: int, t: int, s: int) -> dict:
    """Apply ``f(tau) -> f((r tau + t) / s)`` to a single-component series.

    ``c q^n`` becomes ``c e(n t / s) q^{n r / s}``.
    """
    out = {}
    for n, c in series.items():
        phase = Fraction(n * t, s)
        if phase.denominator == 1:
            v = c
        else:
            acc = RootSum()
            acc.add_value(c, phase)
            v = acc.value()
        out[n * r / s] = v
    return out


def theta_series(lattice: EvenLattice, precision, scale: int = 1) -> VVExpansion:
    """Vector-valued theta series of ``L(scale)`` over the module ``L(scale)``.

    ``c(mu, n) = #{x in mu + Z^D : scale * q(x) = n}``, weight D/2.
    """
    if not lattice.is_positive_definite():
        raise NotPositiveDefinite("theta series needs a positive definite lattice")
    M = FqModule(lattice, scale)
    form = lattice.scaled(scale) if scale != 1 else lattice
    precision = frac(precision)
    coeffs = {}
    for lam in M:
        counts = short_vector_counts(form, M.coords(lam), precision)
        if counts:
            coeffs[lam] = {n: Cyclotomic.rational(c) for n, c in counts.items()}
    return VVExpansion(M, Fraction(lattice.rank, 2), precision, coeffs)


class LazyExpansion:
    """An expansion whose components are computed on first request and cached.

    ``evaluated`` records every component that was actually computed, which
    lets callers assert that only a small part of a large module was touched.
    """

    def __init__(self, module: FqModule, weight, precision, compute, label: str = ""):
        self.module = module
        self.weight = frac(weight)
        self.precision = frac(precision)
        self._compute = compute
        self._cache: dict = {}
        self.evaluated: list = []
        self.label = label

    def component(self, lam) -> dict[Fraction, Cyclotomic]:
        try:
            return self._cache[lam]
        except KeyError:
            pass
        series = {n: v for n, v in self._compute(lam).items() if not v.is_zero()}
        self._cache[lam] = series
        self.evaluated.append(lam)
        return series

    def materialize(self, components=None) -> VVExpansion:
        """A concrete :class:`VVExpansion` (all components unless a subset is given)."""
        lams = self.module if components is None else components
        coeffs = {lam: self.component(lam) for lam in lams}
        return VVExpansion(self.module, self.weight, self.precision, coeffs)

    def __repr__(self):
        return (
            f"LazyExpansion({self.label or '?'}, {self.module!r}, N={self.precision}, "
            f"{len(self.evaluated)} evaluated)"
        )
