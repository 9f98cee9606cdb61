"""Independent brute-force evaluations used to freeze expected values.

Nothing here calls into the package's reduction or enumeration code: values
are produced by floating-point complex arithmetic or by plain loops over
integer boxes with exact Fractions.
"""

import cmath
import math
from fractions import Fraction
from itertools import product


def numeric(c) -> complex:
    """Complex value of a Cyclotomic from its power-basis coefficients."""
    return sum(float(a) * cmath.exp(2j * math.pi * float(x)) for x, a in c.terms())


def close(c, z, tol=1e-9) -> bool:
    return abs(numeric(c) - z) < tol


def e(x) -> complex:
    return cmath.exp(2j * math.pi * float(x))


def qform(gram, x) -> Fraction:
    D = len(gram)
    return sum(Fraction(x[i]) * gram[i][j] * Fraction(x[j]) for i in range(D) for j in range(D)) / 2


def box_theta(gram, shift, bound, radius):
    """``{q: count}`` over ``shift + Z^D`` restricted to a coordinate box."""
    out = {}
    for v in product(range(-radius, radius + 1), repeat=len(gram)):
        q = qform(gram, [Fraction(a) + b for a, b in zip(shift, v)])
        if q < bound:
            out[q] = out.get(q, 0) + 1
    return out


def rep_count(gram, nu, m, a) -> int:
    """``#{v in (Z/a)^D : q(v + nu) - m = 0 mod a}``."""
    count = 0
    for v in product(range(a), repeat=len(gram)):
        x = qform(gram, [Fraction(c) + b for c, b in zip(nu, v)]) - Fraction(m)
        assert x.denominator == 1
        count += x.numerator % a == 0
    return count


def gauss(gram, coef, a) -> complex:
    return sum(e(coef * qform(gram, v)) for v in product(range(a), repeat=len(gram)))


def sigma(k, n) -> int:
    return sum(d**k for d in range(1, n + 1) if n % d == 0)
