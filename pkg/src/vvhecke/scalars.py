"""Exact arithmetic in cyclotomic fields Q(zeta_M).

A :class:`Cyclotomic` is stored in the power basis ``1, z, ..., z^(phi(M)-1)``
with ``z = exp(2 pi i / M)``, reduced modulo the M-th cyclotomic polynomial,
so equality of two values of the same order is equality of coefficient maps.
Values of different orders are embedded into the lcm order before combining.

Sums of roots of unity are best accumulated in a :class:`RootSum` (a formal
linear combination of ``e(x)``) and reduced once at the end.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm

from .errors import DivisionByZero, IncompatibleOrder, UnsupportedExponent

__all__ = [
    "Cyclotomic",
    "CycloContext",
    "RootSum",
    "cyclotomic_polynomial",
    "e_of",
    "frac",
    "power_half",
    "sqrt_prime",
]


def frac(x) -> Fraction:
    """Coerce ints, Fractions and ``"a/b"`` strings to a Fraction."""
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


def _poly_divexact(num: list[int], den: list[int]) -> list[int]:
    # coefficient lists, lowest degree first; den monic
    num = list(num)
    dn = len(den) - 1
    out = [0] * (len(num) - dn)
    for i in range(len(num) - 1, dn - 1, -1):
        c = num[i]
        if c:
            out[i - dn] = c
            for j, d in enumerate(den):
                num[i - dn + j] -= c * d
    assert not any(num), "inexact cyclotomic division"
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(m: int) -> tuple[int, ...]:
    """Coefficients (lowest degree first) of the m-th cyclotomic polynomial.

    Obtained from ``x^m - 1`` by dividing out every ``Phi_d`` with ``d | m``,
    ``d < m``.
    """
    if m < 1:
        raise ValueError("cyclotomic order must be positive")
    poly = [-1] + [0] * (m - 1) + [1]
    for d in range(1, m):
        if m % d == 0:
            poly = _poly_divexact(poly, list(cyclotomic_polynomial(d)))
    return tuple(poly)


@lru_cache(maxsize=64)
def _power_table(m: int) -> tuple[tuple[tuple[int, int], ...], ...]:
    """Sparse rows: row i is ``z^i`` reduced modulo ``Phi_m``, for ``0 <= i < m``."""
    phi = cyclotomic_polynomial(m)
    deg = len(phi) - 1
    rows = []
    cur = [0] * deg
    cur[0] = 1
    for i in range(m):
        rows.append(tuple((j, c) for j, c in enumerate(cur) if c))
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            for j in range(deg):
                cur[j] -= top * phi[j]
    return tuple(rows)


def _reduce(m: int, terms: dict[int, Fraction]) -> dict[int, Fraction]:
    """Reduce ``sum a_i z^i`` (any integer i) to canonical form at order m."""
    if not terms:
        return {}
    table = _power_table(m)
    folded: dict[int, Fraction] = {}
    for i, a in terms.items():
        if a:
            k = i % m
            folded[k] = folded.get(k, 0) + a
    den = 1
    for a in folded.values():
        den = lcm(den, Fraction(a).denominator)
    acc: dict[int, int] = {}
    for i, a in folded.items():
        a = Fraction(a)
        num = a.numerator * (den // a.denominator)
        if not num:
            continue
        for j, c in table[i]:
            acc[j] = acc.get(j, 0) + num * c
    return {j: Fraction(v, den) for j, v in sorted(acc.items()) if v}


class Cyclotomic:
    """An element of Q(zeta_M) in canonical reduced form.  Immutable."""

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs: dict[int, Fraction] | None = None, *, reduced=False):
        if order < 1:
            raise ValueError("order must be positive")
        object.__setattr__(self, "order", order)
        if coeffs is None:
            coeffs = {}
        if not reduced:
            coeffs = _reduce(order, {i: frac(a) for i, a in coeffs.items()})
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, name, value):
        raise AttributeError("Cyclotomic values are immutable")

    def __reduce__(self):
        return (_rebuild, (self.order, dict(self.coeffs)))

    # -- constructors -----------------------------------------------------
    @classmethod
    def rational(cls, x) -> Cyclotomic:
        x = frac(x)
        return cls(1, {0: x} if x else {}, reduced=True)

    @classmethod
    def zero(cls) -> Cyclotomic:
        return cls(1, {}, reduced=True)

    @classmethod
    def one(cls) -> Cyclotomic:
        return cls(1, {0: Fraction(1)}, reduced=True)

    @staticmethod
    def coerce(x) -> Cyclotomic:
        if isinstance(x, Cyclotomic):
            return x
        if isinstance(x, (int, Fraction)):
            return Cyclotomic.rational(x)
        return NotImplemented

    # -- queries ----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.coeffs

    def is_rational(self) -> bool:
        return all(i == 0 for i in self.coeffs)

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self!r} is not rational")
        return self.coeffs.get(0, Fraction(0))

    def terms(self):
        """Yield ``(exponent, coefficient)`` with ``self = sum c * e(exponent)``."""
        for i, a in self.coeffs.items():
            yield Fraction(i, self.order), a

    def lift(self, order: int) -> Cyclotomic:
        """Embed into Q(zeta_order); requires ``self.order | order``."""
        if order == self.order:
            return self
        if order % self.order:
            raise IncompatibleOrder(f"cannot embed order {self.order} into {order}")
        step = order // self.order
        return Cyclotomic(order, {i * step: a for i, a in self.coeffs.items()})

    def minimal(self) -> Cyclotomic:
        """Re-express in the smallest Q(zeta_d) containing this value.

        The result is canonical: equal values give identical (order, coeffs).
        """
        if not self.coeffs:
            return Cyclotomic.zero()
        m = self.order
        for d in range(1, m):
            if m % d == 0:
                coeffs = _solve_in_subfield(m, d, self.coeffs)
                if coeffs is not None:
                    return Cyclotomic(d, coeffs, reduced=True)
        return self

    # -- arithmetic -------------------------------------------------------
    def _common(self, other):
        other = Cyclotomic.coerce(other)
        if other is NotImplemented:
            return NotImplemented, NotImplemented, 0
        m = lcm(self.order, other.order)
        return self.lift(m), other.lift(m), m

    def __add__(self, other):
        a, b, m = self._common(other)
        if a is NotImplemented:
            return NotImplemented
        out = dict(a.coeffs)
        for i, c in b.coeffs.items():
            v = out.get(i, 0) + c
            if v:
                out[i] = v
            else:
                out.pop(i, None)
        return Cyclotomic(m, out, reduced=True)

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.order, {i: -a for i, a in self.coeffs.items()}, reduced=True)

    def __sub__(self, other):
        other = Cyclotomic.coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return Cyclotomic.zero()
            return Cyclotomic(self.order, {i: a * other for i, a in self.coeffs.items()}, reduced=True)
        a, b, m = self._common(other)
        if a is NotImplemented:
            return NotImplemented
        if a.is_rational() or b.is_rational():
            r, o = (a, b) if a.is_rational() else (b, a)
            return o * r.to_fraction()
        prod: dict[int, Fraction] = {}
        for i, x in a.coeffs.items():
            for j, y in b.coeffs.items():
                prod[i + j] = prod.get(i + j, 0) + x * y
        return Cyclotomic(m, prod)

    __rmul__ = __mul__

    def conjugate(self) -> Cyclotomic:
        return Cyclotomic(self.order, {-i: a for i, a in self.coeffs.items()})

    def inverse(self) -> Cyclotomic:
        if not self.coeffs:
            raise DivisionByZero("inverse of zero")
        if self.is_rational():
            return Cyclotomic.rational(1 / self.to_fraction())
        m = self.order
        inv = _poly_inverse_mod(
            [self.coeffs.get(i, Fraction(0)) for i in range(max(self.coeffs) + 1)],
            [Fraction(c) for c in cyclotomic_polynomial(m)],
        )
        return Cyclotomic(m, {i: c for i, c in enumerate(inv) if c})

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                raise DivisionByZero("division by zero")
            return self * (1 / Fraction(other))
        other = Cyclotomic.coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return Cyclotomic.coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = Cyclotomic.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        a, b, _ = self._common(other)
        if a is NotImplemented:
            return NotImplemented
        return a.coeffs == b.coeffs

    __hash__ = None

    def __bool__(self):
        return bool(self.coeffs)

    def __repr__(self):
        if self.is_rational():
            return f"Cyclotomic({self.to_fraction()})"
        body = " + ".join(f"({a})*z^{i}" for i, a in self.coeffs.items())
        return f"Cyclotomic[{self.order}]({body})"

    # -- serialization ----------------------------------------------------
    def to_json(self) -> dict:
        c = self.minimal()
        return {
            "order": c.order,
            "terms": [[i, f"{a.numerator}/{a.denominator}"] for i, a in sorted(c.coeffs.items())],
        }

    @classmethod
    def from_json(cls, obj: dict) -> Cyclotomic:
        order = int(obj["order"])
        terms = {int(i): Fraction(a) for i, a in obj["terms"]}
        return cls(order, terms)


def _solve_in_subfield(m: int, d: int, target: dict[int, Fraction]) -> dict[int, Fraction] | None:
    """Coefficients of ``target`` (order m) in the power basis of order d, if it lies there."""
    step = m // d
    cols = [_reduce(m, {j * step: Fraction(1)}) for j in range(len(cyclotomic_polynomial(d)) - 1)]
    rows = sorted(set(target).union(*cols))
    # augmented matrix, one row per power of zeta_m
    mat = [[col.get(r, Fraction(0)) for col in cols] + [Fraction(target.get(r, 0))] for r in rows]
    n = len(cols)
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(mat)) if mat[i][c]), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = 1 / mat[r][c]
        mat[r] = [v * inv for v in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
    if any(row[n] for row in mat[r:]):
        return None
    return {c: mat[i][n] for i, c in enumerate(pivots) if mat[i][n]}


def _rebuild(order, coeffs):
    return Cyclotomic(order, coeffs, reduced=True)


def _poly_trim(p):
    while p and not p[-1]:
        p.pop()
    return p


def _poly_divmod(a, b):
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    lead = b[-1]
    while len(_poly_trim(a)) >= len(b):
        c = a[-1] / lead
        k = len(a) - len(b)
        q[k] = c
        for j, bj in enumerate(b):
            a[k + j] -= c * bj
    return _poly_trim(q), a


def _poly_mul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _poly_trim(out)


def _poly_sub(a, b):
    n = max(len(a), len(b))
    out = [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)]
    return _poly_trim([Fraction(x) for x in out])


def _poly_inverse_mod(a, m):
    """Inverse of a modulo the irreducible m, by the extended Euclidean algorithm."""
    r0, r1 = _poly_trim(list(m)), _poly_trim(list(a))
    s0, s1 = [], [Fraction(1)]
    while len(r1) > 1:
        q, r = _poly_divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
    if not r1:
        raise DivisionByZero("element is not invertible")
    c = r1[0]
    return [x / c for x in s1]


class RootSum:
    """Formal sum ``sum_x w_x * e(x)`` keyed by ``x mod 1``.

    Accumulation is a dictionary update; :meth:`value` reduces once.
    """

    __slots__ = ("terms",)

    def __init__(self):
        self.terms: dict[Fraction, Fraction | int] = {}

    def add(self, x: Fraction, weight=1):
        if not weight:
            return
        if not isinstance(x, Fraction):
            x = Fraction(x)
        x = x - (x.numerator // x.denominator)
        self.terms[x] = self.terms.get(x, 0) + weight

    def add_value(self, value: Cyclotomic, shift: Fraction = Fraction(0), weight=1):
        """Add ``weight * value * e(shift)``."""
        for x, a in value.terms():
            self.add(x + shift, a * weight)

    def order(self) -> int:
        m = 1
        for x, w in self.terms.items():
            if w:
                m = lcm(m, x.denominator)
        return m

    def value(self) -> Cyclotomic:
        m = self.order()
        return Cyclotomic(m, {x.numerator * (m // x.denominator): w for x, w in self.terms.items() if w})


def e_of(x, order: int | None = None) -> Cyclotomic:
    """``exp(2 pi i x)`` for rational x, exactly.

    With ``order`` given, the value is expressed at that order and the
    denominator of x must divide it.
    """
    x = frac(x)
    x = x - (x.numerator // x.denominator)
    if order is None:
        order = x.denominator
    elif order % x.denominator:
        raise IncompatibleOrder(f"denominator of {x} does not divide {order}")
    return Cyclotomic(order, {x.numerator * (order // x.denominator): Fraction(1)})


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


@lru_cache(maxsize=None)
def sqrt_prime(p: int) -> Cyclotomic:
    """Positive square root of the prime p as an element of Q(zeta_{4p}) (zeta_8 for p = 2).

    Odd p uses the quadratic Gauss sum ``g = sum_a e(a^2/p)``, which equals
    ``sqrt(p)`` for ``p = 1 mod 4`` and ``i sqrt(p)`` for ``p = 3 mod 4``.
    """
    if not _is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p == 2:
        return e_of(Fraction(1, 8), 8) + e_of(Fraction(-1, 8), 8)
    acc = RootSum()
    for a in range(p):
        acc.add(Fraction(a * a, p))
    g = acc.value().lift(4 * p)
    if p % 4 == 3:
        g = g * e_of(Fraction(-1, 4), 4 * p)
    return g


def _factor(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def power_half(base, exponent) -> Cyclotomic:
    """``base ** exponent`` for a positive rational base and exponent in (1/2)Z.

    Square roots of primes come from :func:`sqrt_prime`, so the result is exact.
    """
    exponent = frac(exponent)
    base = frac(base)
    if exponent.denominator not in (1, 2):
        raise UnsupportedExponent(f"exponent {exponent} is not half-integral")
    if base <= 0:
        raise UnsupportedExponent("base must be positive")
    if base.denominator != 1:
        return power_half(base.numerator, exponent) * power_half(base.denominator, -exponent)
    out = Cyclotomic.one()
    for p, a in sorted(_factor(base.numerator).items()):
        e = a * exponent
        if e.denominator == 1:
            out = out * Cyclotomic.rational(Fraction(p) ** int(e))
        else:
            whole = (e.numerator - 1) // 2
            out = out * sqrt_prime(p) * (Fraction(p) ** whole)
    return out


class CycloContext:
    """A fixed working order M shared by one computation."""

    def __init__(self, order: int):
        if order < 1:
            raise ValueError("order must be positive")
        self.order = order

    @classmethod
    def for_session(cls, level: int = 1, prime_powers=(), sqrt_primes=()) -> CycloContext:
        m = lcm(8, level)
        for q in prime_powers:
            m = lcm(m, q)
        for p in sqrt_primes:
            m = lcm(m, 8 if p == 2 else 4 * p)
        return cls(m)

    def e(self, x) -> Cyclotomic:
        return e_of(x, self.order)

    def embed(self, value: Cyclotomic) -> Cyclotomic:
        return value.lift(self.order)

    def sqrt_prime(self, p: int) -> Cyclotomic:
        need = 8 if p == 2 else 4 * p
        if self.order % need:
            raise IncompatibleOrder(f"sqrt({p}) needs order divisible by {need}")
        return sqrt_prime(p).lift(self.order)

    def __repr__(self):
        return f"CycloContext({self.order})"
