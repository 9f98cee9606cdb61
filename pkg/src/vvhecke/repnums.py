"""Representation numbers modulo prime powers and their Moebius-weighted sums.

Elements are those of a :class:`FqModule` (usually scale 1).  Congruences
between rationals are read as: the difference is an integer, and that
integer is divisible by the modulus.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from math import gcd

from .errors import BudgetExceeded, PNotOdd, PrecisionViolation, RangeError
from .quadmodule import FqModule
from .scalars import Cyclotomic, RootSum, frac

__all__ = [
    "ENUMERATION_BUDGET",
    "moebius_prime_power",
    "moebius_sum",
    "moebius_sum_scaled",
    "ramanujan_check",
    "ramanujan_check_scaled",
    "ramanujan_sum",
    "rep_number",
    "rep_number_scaled",
    "support_sieve",
]

ENUMERATION_BUDGET = 10**7


def _cosets(D: int, a: int):
    if a**D > ENUMERATION_BUDGET:
        raise BudgetExceeded(f"{a}^{D} cosets exceed the enumeration budget")
    return product(range(a), repeat=D)


def _integral(x: Fraction, what: str) -> int:
    if x.denominator != 1:
        raise PrecisionViolation(f"{what} = {x} is not an integer")
    return x.numerator


def moebius_prime_power(p: int, e: int) -> int:
    """``mu(p^e)``."""
    if e < 0:
        raise RangeError("negative exponent")
    return (1, -1)[e] if e < 2 else 0


def rep_number(module: FqModule, nu, m, a: int) -> int:
    """``N_{nu,m}(a) = #{v in L/aL : q(v + nu) = m mod a}``."""
    m = frac(m)
    _integral(module.q_lift(nu) - m, "q(nu) - m")
    count = 0
    for v in _cosets(module.rank, a):
        if _integral(module.q_lift_shifted(nu, v) - m, "q(v+nu) - m") % a == 0:
            count += 1
    return count


def _check_scaled_well_defined(p: int, scale_exp: int, cap: int, a: int):
    # translating v by cap*w moves p^e q(v + rho) by p^e (cap b(v+rho, w) + cap^2 q(w)),
    # an integer multiple of p^e cap; the count is well defined iff a divides it
    if (p**scale_exp * cap) % a:
        raise PrecisionViolation(
            f"summand depends on the representative: {a} does not divide {p}^{scale_exp}*{cap}"
        )


def rep_number_scaled(module: FqModule, rho, r, a: int, p: int, l: int, scale_exp: int) -> int:
    """``#{v in L/(a, p^l)L : p^scale_exp q(v + rho) = r mod a}``."""
    if scale_exp < 0:
        raise RangeError("scaling exponent must be nonnegative")
    r = frac(r)
    f = p**scale_exp
    cap = gcd(a, p**l)
    _check_scaled_well_defined(p, scale_exp, cap, a)
    _integral(f * module.q_lift(rho) - r, "p^e q(rho) - r")
    count = 0
    for v in _cosets(module.rank, cap):
        if _integral(f * module.q_lift_shifted(rho, v) - r, "p^e q(v+rho) - r") % a == 0:
            count += 1
    return count


def moebius_sum(module: FqModule, nu, m, p: int, s: int) -> Fraction:
    """``G_{nu,m}(s) = sum_{a | p^s} mu(p^s/a) a^{1-D} N_{nu,m}(a)``."""
    if s < 1:
        raise RangeError("s must be positive")
    D = module.rank
    total = Fraction(0)
    for j in (s - 1, s):  # mu(p^{s-j}) vanishes for the other divisors
        a = p**j
        total += moebius_prime_power(p, s - j) * Fraction(a) ** (1 - D) * rep_number(module, nu, m, a)
    return total


def moebius_sum_scaled(module: FqModule, rho, r, p: int, s: int, l: int, scale_exp: int | None = None) -> Fraction:
    """``G~_{rho,r}(s) = sum_{a | p^s} mu(p^s/a) a (a, p^l)^{-D} N~_{rho,r}(a)``.

    ``scale_exp`` defaults to ``2(s - l)``.
    """
    if s < 1:
        raise RangeError("s must be positive")
    if scale_exp is None:
        scale_exp = 2 * (s - l)
    D = module.rank
    total = Fraction(0)
    for j in (s - 1, s):
        a = p**j
        cap = gcd(a, p**l)
        total += (
            moebius_prime_power(p, s - j)
            * Fraction(a, cap**D)
            * rep_number_scaled(module, rho, r, a, p, l, scale_exp)
        )
    return total


def ramanujan_sum(x: int, m: int) -> Cyclotomic:
    """``sum_{h in (Z/m)^x} e(h x / m)`` by direct summation."""
    acc = RootSum()
    for h in range(m):
        if gcd(h, m) == 1:
            acc.add(Fraction(h * x, m))
    return acc.value()


def _require_odd(p: int):
    if p % 2 == 0:
        raise PNotOdd(f"p = {p}: the identity is stated for odd primes")


def ramanujan_check(module: FqModule, lam, n, p: int, s: int) -> tuple[Cyclotomic, Cyclotomic]:
    """Direct double sum over ``v in L/p^sL`` and units ``h`` versus ``p^{sD} G_{lam,n}(s)``."""
    _require_odd(p)
    n = frac(n)
    ps = p**s
    acc = RootSum()
    for v in _cosets(module.rank, ps):
        x = _integral(module.q_lift_shifted(lam, v) - n, "q(v+lam) - n")
        for h in range(ps):
            if h % p:
                acc.add(Fraction(h * x, ps))
    lhs = acc.value()
    rhs = Cyclotomic.rational(Fraction(ps) ** module.rank * moebius_sum(module, lam, n, p, s))
    return lhs, rhs


def ramanujan_check_scaled(module: FqModule, rho, n, p: int, s: int, l: int) -> tuple[Cyclotomic, Cyclotomic]:
    """Direct double sum over ``v in L/p^lL`` and units ``h`` versus ``p^{lD} G~_{rho,n}(s)``.

    Needs ``l < s < 2l``.
    """
    _require_odd(p)
    if not l < s < 2 * l:
        raise RangeError(f"need l < s < 2l, got l={l}, s={s}")
    n = frac(n)
    ps = p**s
    f = p ** (2 * (s - l))
    acc = RootSum()
    for v in _cosets(module.rank, p**l):
        # q(p^{s-l} v + p^{s-l} rho) = p^{2(s-l)} q(v + rho)
        x = _integral(f * module.q_lift_shifted(rho, v) - n, "p^e q(v+rho) - n")
        for h in range(ps):
            if h % p:
                acc.add(Fraction(h * x, ps))
    lhs = acc.value()
    rhs = Cyclotomic.rational(Fraction(p**l) ** module.rank * moebius_sum_scaled(module, rho, n, p, s, l))
    return lhs, rhs


def support_sieve(module: FqModule, p: int, s: int, l: int, rho, n) -> bool:
    """Does ``p^{s-1}`` divide ``p^{2(s-l)} q(v + rho) - n`` for some ``v in L/p^lL``?

    Only such ``n`` can carry a nonzero unit sum in the ``s > l`` branch.
    """
    if s <= l:
        raise RangeError("the sieve concerns s > l")
    n = frac(n)
    f = p ** (2 * (s - l))
    mod = p ** (s - 1)
    for v in _cosets(module.rank, p**l):
        x = f * module.q_lift_shifted(rho, v) - n
        if x.denominator == 1 and x.numerator % mod == 0:
            return True
    return False
