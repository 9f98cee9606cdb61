from fractions import Fraction

import pytest

from oracles import gauss, numeric
from vvhecke.errors import PNotOdd, RangeError, WitnessNotFound
from vvhecke.quadmodule import FqModule, named_lattice
from vvhecke.scalars import e_of
from vvhecke.weilaction import (
    BetaParams,
    bezout,
    falsify_naive_identity,
    rho_beta_closed,
    rho_beta_oracle,
    support_check,
    units,
)

A1 = named_lattice("A1")
A1A1 = named_lattice("A1+A1")
A2 = named_lattice("A2")


def test_bezout():
    for ps in (3, 9, 27):
        for h in units(ps):
            r, t = bezout(h, ps)
            assert r * ps - h * t == 1 and 0 <= t < ps


def test_params_validation():
    with pytest.raises(PNotOdd):
        BetaParams(2, 1, 1, 1)
    with pytest.raises(RangeError):
        BetaParams(3, 1, 2, 1)
    with pytest.raises(ValueError):
        BetaParams(3, 1, 1, 3)


def test_closed_form_a1a1_zero_column():
    m = rho_beta_closed(A1A1, BetaParams(3, 1, 1, 1))
    M = m.module
    # 9-term Gauss sum over (Z/3)^2 equals -3, scaled by 1/3
    assert abs(gauss(A1A1.gram, Fraction(-1, 3), 3) - (-3)) < 1e-9
    assert m.entry(M.zero(), M.zero()) == -1


def test_e8_is_identity():
    for h in (1, 2):
        m = rho_beta_closed(named_lattice("E8"), BetaParams(3, 1, 1, h))
        z = m.module.zero()
        assert m.entry(z, z) == 1


@pytest.mark.parametrize("lat,l,s,h", [(A1A1, 1, 1, 1), (A1A1, 1, 1, 2), (A2, 2, 3, 1), (A2, 2, 1, 2), (A1, 2, 3, 5)])
def test_closed_equals_oracle(lat, l, s, h):
    params = BetaParams(3, l, s, h)
    assert rho_beta_closed(lat, params) == rho_beta_oracle(lat, params)


def test_oracle_bezout_invariance():
    params = BetaParams(3, 2, 3, 2)
    assert rho_beta_oracle(A2, params) == rho_beta_oracle(A2, params.shifted_bezout(1))
    assert rho_beta_oracle(A2, params) == rho_beta_oracle(A2, params.shifted_bezout(-2))


def test_support():
    m = rho_beta_oracle(A2, BetaParams(3, 1, 1, 1))
    res = support_check(m)
    assert res["ok"]
    assert res["predicted"] == [m.module.zero()]
    res = support_check(rho_beta_oracle(A1A1, BetaParams(3, 1, 1, 1)))
    assert res["ok"] and len(res["predicted"]) == 4


def test_falsifier_witness_values():
    wit = falsify_naive_identity(A1, 3, 1, [Fraction(1, 2)], [1])
    assert wit.q_lift == Fraction(1, 4) and wit.q_lift_shifted == Fraction(9, 4)
    assert wit.phase == e_of(Fraction(1, 12))
    assert wit.phase_shifted == e_of(Fraction(3, 4))
    assert wit.lhs == wit.lhs_shifted
    assert wit.verdict == "identity falsified"
    # independent evaluation of the v-sum
    direct = sum(numeric(e_of(Fraction((2 * v + 1) ** 2, 12))) for v in range(3))
    assert abs(numeric(wit.lhs) - direct) < 1e-9
    with pytest.raises(WitnessNotFound):
        falsify_naive_identity(A1, 3, 1, [0], [0])


def test_vsum_invariance_on_a2():
    import random

    rng = random.Random(5)
    M = FqModule(A2)
    elems = list(M)
    for _ in range(20):
        lam = M.coords(rng.choice(elems))
        w = [rng.randint(-4, 4), rng.randint(-4, 4)]
        try:
            wit = falsify_naive_identity(A2, 3, 2, lam, w)
        except WitnessNotFound as exc:
            assert "does not falsify" in str(exc)
            continue
        assert wit.lhs_invariant
