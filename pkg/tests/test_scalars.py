import json
import math
import pickle
from fractions import Fraction

import pytest

from oracles import close, numeric
from vvhecke.errors import DivisionByZero, IncompatibleOrder, UnsupportedExponent
from vvhecke.scalars import (
    CycloContext,
    Cyclotomic,
    RootSum,
    cyclotomic_polynomial,
    e_of,
    frac,
    power_half,
    sqrt_prime,
)


def test_cyclotomic_polynomials():
    assert cyclotomic_polynomial(1) == (-1, 1)
    assert cyclotomic_polynomial(4) == (1, 0, 1)
    assert cyclotomic_polynomial(12) == (1, 0, -1, 0, 1)
    assert cyclotomic_polynomial(8) == (1, 0, 0, 0, 1)


def test_e_of_basics():
    assert e_of(Fraction(1, 2)) == -1
    assert e_of(Fraction(5, 4)) == e_of(Fraction(1, 4))
    assert e_of(Fraction(1, 3)) + e_of(Fraction(2, 3)) == -1
    assert e_of(0) == 1


def test_products_and_inverses():
    w, w2 = e_of(Fraction(1, 3)), e_of(Fraction(2, 3))
    assert (1 + w) * (1 + w2) == 1
    assert e_of(Fraction(1, 5)).conjugate() == e_of(Fraction(4, 5))
    assert e_of(Fraction(1, 3)).inverse() == e_of(Fraction(2, 3))
    x = 3 + 2 * e_of(Fraction(1, 12)) - e_of(Fraction(5, 12))
    assert x * x.inverse() == 1
    assert x / x == 1


def test_mixed_orders_are_embedded():
    x = e_of(Fraction(1, 4)) + e_of(Fraction(1, 6))
    assert close(x, 1j + complex(math.cos(math.pi / 3), math.sin(math.pi / 3)))
    assert e_of(Fraction(1, 4)) ** 2 == e_of(Fraction(1, 2))


def test_sqrt_prime_values():
    assert sqrt_prime(3) ** 2 == 3
    assert sqrt_prime(2) == e_of(Fraction(1, 8)) + e_of(Fraction(-1, 8))
    assert sqrt_prime(3) == e_of(Fraction(1, 12)) + e_of(Fraction(-1, 12))
    for p in (2, 3, 5, 7, 11, 13):
        assert close(sqrt_prime(p), math.sqrt(p))
    with pytest.raises(ValueError):
        sqrt_prime(9)


def test_power_half():
    assert power_half(3, 2) == 9
    assert power_half(9, Fraction(1, 2)) == 3
    assert power_half(3, Fraction(-1, 2)) == sqrt_prime(3) / 3
    assert power_half(6, Fraction(1, 2)) ** 2 == 6
    assert power_half(Fraction(3, 4), Fraction(1, 2)) ** 2 == Fraction(3, 4)
    assert close(power_half(12, Fraction(3, 2)), 12**1.5)
    with pytest.raises(UnsupportedExponent):
        power_half(3, Fraction(1, 3))
    with pytest.raises(UnsupportedExponent):
        power_half(-3, 1)


def test_division_by_zero():
    with pytest.raises(DivisionByZero):
        Cyclotomic.zero().inverse()
    with pytest.raises(ZeroDivisionError):
        e_of(Fraction(1, 3)) / 0


def test_rootsum_reduces_once():
    acc = RootSum()
    for h in range(1, 9):
        if h % 3:
            acc.add(Fraction(3 * h, 9))
    assert acc.value() == -3
    acc = RootSum()
    acc.add_value(sqrt_prime(3), Fraction(1, 2))
    assert acc.value() == -sqrt_prime(3)


def test_context_orders():
    ctx = CycloContext.for_session(level=4, prime_powers=(9,), sqrt_primes=(3,))
    assert ctx.order % 36 == 0
    assert ctx.sqrt_prime(3) == sqrt_prime(3)
    assert ctx.e(Fraction(1, 9)).order == ctx.order
    with pytest.raises(IncompatibleOrder):
        CycloContext(4).sqrt_prime(3)
    with pytest.raises(IncompatibleOrder):
        e_of(Fraction(1, 3), 4)


def test_serialization_roundtrips():
    x = Fraction(2, 7) + 5 * e_of(Fraction(1, 12)) - sqrt_prime(3)
    assert Cyclotomic.from_json(json.loads(json.dumps(x.to_json()))) == x
    assert pickle.loads(pickle.dumps(x)) == x
    assert frac("3/4") == Fraction(3, 4)


def test_numeric_agreement_of_gauss_sum():
    # quadratic Gauss sum mod 7 against floating point
    acc = RootSum()
    for a in range(7):
        acc.add(Fraction(a * a, 7))
    assert abs(numeric(acc.value()) - 1j * math.sqrt(7)) < 1e-9
