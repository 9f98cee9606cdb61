from fractions import Fraction

import pytest

from oracles import rep_count
from vvhecke.errors import BudgetExceeded, PNotOdd, PrecisionViolation, RangeError
from vvhecke import repnums
from vvhecke.quadmodule import FqModule, named_lattice
from vvhecke.repnums import (
    moebius_prime_power,
    moebius_sum,
    moebius_sum_scaled,
    ramanujan_check,
    ramanujan_check_scaled,
    ramanujan_sum,
    rep_number,
    rep_number_scaled,
    support_sieve,
)

A1 = named_lattice("A1")
A1A1 = named_lattice("A1+A1")
A2 = named_lattice("A2")


def test_rep_numbers_against_brute_force():
    M = FqModule(A1A1)
    z = M.zero()
    assert rep_number(M, z, 0, 1) == 1
    assert rep_number(M, z, 0, 3) == 1 == rep_count(A1A1.gram, (0, 0), 0, 3)
    A = FqModule(A1)
    g = A.element([Fraction(1, 2)])
    assert rep_number(A, g, Fraction(1, 4), 3) == 2 == rep_count(A1.gram, (Fraction(1, 2),), Fraction(1, 4), 3)
    N = FqModule(A2)
    h = N.element([Fraction(2, 3), Fraction(1, 3)])
    for a in (1, 3, 9):
        for j in range(a):
            m = Fraction(1, 3) + j
            assert rep_number(N, h, m, a) == rep_count(A2.gram, N.coords(h), m, a)


def test_scaled_rep_numbers():
    M = FqModule(A1A1)
    z = M.zero()
    assert rep_number_scaled(M, z, 0, 3, 3, 2, 2) == 9
    # cosets capped at L/9L; 9 q(v) = 0 mod 27 iff q(v) = 0 mod 3
    assert rep_number_scaled(M, z, 0, 27, 3, 2, 2) == 9 * rep_count(A1A1.gram, (0, 0), 0, 3) == 9
    with pytest.raises(PrecisionViolation):
        rep_number_scaled(M, z, 0, 27, 3, 2, 0)


def test_moebius():
    assert [moebius_prime_power(3, e) for e in range(4)] == [1, -1, 0, 0]
    M = FqModule(A1A1)
    assert moebius_sum(M, M.zero(), 0, 3, 1) == Fraction(-2, 3)
    # with l >= s the scaled sum has the unscaled shape
    for s in (1, 2):
        for n in range(3):
            assert moebius_sum_scaled(M, M.zero(), n, 3, s, 2, scale_exp=0) == moebius_sum(M, M.zero(), n, 3, s)


def test_ramanujan_sums():
    assert ramanujan_sum(9, 9) == 6
    assert ramanujan_sum(3, 9) == -3
    assert ramanujan_sum(1, 9) == 0


def test_sieve():
    M = FqModule(A1A1)
    assert support_sieve(M, 3, 3, 2, M.zero(), 1) is False
    assert support_sieve(M, 3, 3, 2, M.zero(), 9) is True
    with pytest.raises(RangeError):
        support_sieve(M, 3, 2, 2, M.zero(), 0)


def test_identities_on_a_few_classes():
    M = FqModule(A2)
    for lam in M:
        for s in (1, 2):
            for j in range(3**s):
                lhs, rhs = ramanujan_check(M, lam, M.q_value(lam) + j, 3, s)
                assert lhs == rhs
        for j in range(27):
            lhs, rhs = ramanujan_check_scaled(M, lam, 9 * M.q_value(lam) + j, 3, 3, 2)
            assert lhs == rhs


def test_guards():
    M = FqModule(A1)
    with pytest.raises(PNotOdd):
        ramanujan_check(M, M.zero(), 0, 2, 1)
    with pytest.raises(RangeError):
        ramanujan_check_scaled(M, M.zero(), 0, 3, 2, 2)
    with pytest.raises(PrecisionViolation):
        rep_number(M, M.zero(), Fraction(1, 4), 3)


def test_budget(monkeypatch):
    monkeypatch.setattr(repnums, "ENUMERATION_BUDGET", 10)
    M = FqModule(A1A1)
    with pytest.raises(BudgetExceeded):
        rep_number(M, M.zero(), 0, 9)
