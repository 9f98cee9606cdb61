import json
from fractions import Fraction

import pytest

from oracles import box_theta, sigma
from vvhecke.errors import ModuleMismatch, NotPositiveDefinite, PrecisionViolation, SchemaError, WeightMismatch
from vvhecke.qexpansion import (
    LazyExpansion,
    VVExpansion,
    check_compatible,
    compare,
    required_input_precision,
    short_vector_counts,
    substitute,
    theta_series,
)
from vvhecke.quadmodule import EvenLattice, FqModule, named_lattice
from vvhecke.scalars import Cyclotomic, e_of

A1 = named_lattice("A1")
A2 = named_lattice("A2")
A1A1 = named_lattice("A1+A1")


def _plain(series):
    return {n: v.to_fraction() for n, v in series.items()}


def test_theta_a1():
    th = theta_series(A1, 2)
    M = th.module
    assert _plain(th.component(M.zero())) == {0: 1, 1: 2}
    assert _plain(th.component(M.element([Fraction(1, 2)]))) == {Fraction(1, 4): 2}


def test_theta_a1a1_and_a2_against_box_enumeration():
    th = theta_series(A1A1, 1)
    M = th.module
    g = M.element([Fraction(1, 2), Fraction(1, 2)])
    assert th.coefficient(M.zero(), 0) == 1
    assert th.coefficient(g, Fraction(1, 2)) == 4
    for lat, N in ((A1A1, 6), (A2, 6)):
        th = theta_series(lat, N)
        M = th.module
        for lam in M:
            expect = box_theta(lat.gram, M.coords(lam), N, 6)
            assert _plain(th.component(lam)) == expect


def test_theta_e8_is_the_weight_four_eisenstein_series():
    th = theta_series(named_lattice("E8"), 4)
    z = th.module.zero()
    assert _plain(th.component(z)) == {0: 1, **{n: 240 * sigma(3, n) for n in (1, 2, 3)}}


def test_theta_of_a_rescaled_lattice():
    th = theta_series(A1, 3, 2)  # over L(2) = (4)^{-1}Z/Z with q(x) = 2x^2
    M = th.module
    assert len(M) == 4
    assert _plain(th.component(M.zero())) == {0: 1, 2: 2}
    assert _plain(th.component(M.element([Fraction(1, 4)]))) == {Fraction(1, 8): 1, Fraction(9, 8): 1}


def test_short_vectors_reject_indefinite():
    with pytest.raises(NotPositiveDefinite):
        short_vector_counts(EvenLattice(((2, 3), (3, 2))), (0, 0), 3)


def test_substitute_rules():
    s = {Fraction(1): Cyclotomic.one()}
    assert substitute(s, 1, 0, 1) == s
    assert substitute(s, 1, 1, 3) == {Fraction(1, 3): e_of(Fraction(1, 3))}
    assert substitute({Fraction(1, 4): Cyclotomic.one()}, 4, 0, 1) == {Fraction(1): Cyclotomic.one()}


def test_required_precision():
    assert required_input_precision(2, 4) == 8
    assert required_input_precision(1, 1) == 1
    assert required_input_precision(3, 9) == 27


def test_arithmetic_and_compare():
    f = theta_series(A1, 3)
    zero = VVExpansion(f.module, f.weight, f.precision, {})
    assert f + zero == f
    assert compare(f, f) == []
    diff = compare(f, f.scaled(2))
    nonzero = sum(len(f.component(x)) for x in f.module)
    assert len(diff) == nonzero
    assert (f - f).is_zero()
    assert 2 * f == f + f


def test_compatibility_checks():
    f = theta_series(A1, 2)
    with pytest.raises(ModuleMismatch):
        check_compatible(f, theta_series(A2, 2))
    g = VVExpansion(f.module, 3, f.precision, {})
    with pytest.raises(WeightMismatch):
        check_compatible(f, g)


def test_validation_of_exponents():
    M = FqModule(A1)
    g = M.element([Fraction(1, 2)])
    with pytest.raises(PrecisionViolation):
        VVExpansion(M, Fraction(1, 2), 2, {g: {Fraction(1): Cyclotomic.one()}})
    with pytest.raises(PrecisionViolation):
        VVExpansion(M, Fraction(1, 2), 2, {M.zero(): {Fraction(2): Cyclotomic.one()}})


def test_truncate():
    f = theta_series(A1, 5)
    assert f.truncate(2) == theta_series(A1, 2)
    with pytest.raises(PrecisionViolation):
        f.truncate(6)


def test_canonical_roundtrip():
    text = theta_series(A1, 2).dumps()
    again = VVExpansion.loads(text)
    assert again.dumps() == text
    assert again == theta_series(A1, 2)


def test_schema_errors():
    obj = json.loads(theta_series(A1, 2).dumps())
    bad = dict(obj, extra=1)
    with pytest.raises(SchemaError, match="unknown field"):
        VVExpansion.from_json(bad)
    bad = {k: v for k, v in obj.items() if k != "weight"}
    with pytest.raises(SchemaError, match="missing field"):
        VVExpansion.from_json(bad)
    bad = json.loads(json.dumps(obj))
    bad["coefficients"][0]["n"] = "1/3"
    with pytest.raises(SchemaError, match="invariant"):
        VVExpansion.from_json(bad)
    with pytest.raises(SchemaError, match="line"):
        VVExpansion.loads('{\n "lattice": [\n')


def test_lazy_expansion_caches_and_records():
    calls = []
    M = FqModule(A1)

    def compute(lam):
        calls.append(lam)
        return {M.q_value(lam): Cyclotomic.one()}

    lazy = LazyExpansion(M, 1, 2, compute)
    lazy.component(M.zero())
    lazy.component(M.zero())
    assert calls == [M.zero()]
    assert lazy.evaluated == [M.zero()]
    full = lazy.materialize()
    assert len(calls) == 2 and full.coefficient(M.zero(), 0) == 1
