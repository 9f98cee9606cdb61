from fractions import Fraction

import pytest

from vvhecke.errors import DegenerateLattice, MembershipViolation, NonDivisible, NotEven
from vvhecke.quadmodule import EvenLattice, FqModule, build_module, named_lattice, smith_normal_form

A1 = named_lattice("A1")
A2 = named_lattice("A2")
A1A1 = named_lattice("A1+A1")


def _diag(m):
    return [m[i][i] for i in range(len(m))]


def test_smith_normal_form_invariants():
    U, D, V = smith_normal_form([[2, -1], [-1, 2]])
    assert _diag(D) == [1, 3]
    U, D, V = smith_normal_form([[2, 4], [6, 8]])
    assert _diag(D) == [2, 4]
    # U A V = D
    A = [[4, 6, 2], [2, 8, 0], [6, 2, 10]]
    U, D, V = smith_normal_form(A)
    n = len(A)
    UAV = [[sum(U[i][a] * A[a][b] * V[b][j] for a in range(n) for b in range(n)) for j in range(n)] for i in range(n)]
    assert UAV == D
    d = _diag(D)
    assert all(d[i + 1] % d[i] == 0 for i in range(n - 1) if d[i])


def test_build_module_orders():
    assert len(build_module(EvenLattice(((2,),)), 1)) == 2
    assert len(build_module(EvenLattice(((2, 1), (1, 2))), 1)) == 3
    assert len(build_module(EvenLattice(((2,),)), 3)) == 6
    assert len(FqModule(A1, 9)) == 18
    assert len(FqModule(A1A1)) == 4
    assert len(FqModule(named_lattice("E8"))) == 1


def test_lattice_validation():
    with pytest.raises(NotEven):
        EvenLattice(((1,),))
    with pytest.raises(DegenerateLattice):
        EvenLattice(((2, 2), (2, 2)))
    assert not EvenLattice(((2, 3), (3, 2))).is_positive_definite()
    assert named_lattice("D4").det == 4


def test_quadratic_values():
    M = FqModule(A1)
    g = M.element([Fraction(1, 2)])
    assert M.q_value(g) == Fraction(1, 4)
    assert M.q_value(M.zero()) == 0
    assert M.b_value(g, g) == Fraction(1, 2)
    assert M.b_value(g, M.zero()) == 0
    N = FqModule(A2)
    h = N.element([Fraction(2, 3), Fraction(1, 3)])
    assert N.q_value(h) == Fraction(1, 3)
    assert N.b_value(h, h) == Fraction(2, 3)


def test_a2_dual_vector_quoted_in_some_references_is_not_in_the_dual():
    # (2/3, -1/3): G x = (5/3, -4/3) is not integral, so it is not in L'
    assert not FqModule(A2).is_member([Fraction(2, 3), Fraction(-1, 3)])
    with pytest.raises(MembershipViolation):
        FqModule(A2).element([Fraction(2, 3), Fraction(-1, 3)])


def test_subgroups():
    M = FqModule(A1A1)
    assert len(M.torsion_subgroup(2)) == 4
    assert len(M.multiples_subgroup(3)) == 4
    assert M.multiples_subgroup(2) == [M.zero()]
    N = FqModule(A1, 9)  # Z/18
    assert len(N.multiples_subgroup(3)) == 6
    assert len(N.torsion_subgroup(3)) == 3
    assert set(N.multiples_subgroup(3)) == {N.scale(x, 3) for x in N}


def test_preimages_inside_scaled_module():
    L = FqModule(A1)
    L2 = FqModule(A1, 2)
    pre = L2.preimages(L.zero(), 2, L)
    assert sorted(L2.coords(x)[0] for x in pre) == [0, Fraction(1, 2)]
    g = L.element([Fraction(1, 2)])
    pre = L2.preimages(g, 2, L)
    assert sorted(L2.coords(x)[0] for x in pre) == [Fraction(1, 4), Fraction(3, 4)]
    with pytest.raises(NonDivisible):
        L.divide(g, 2)


def test_enumeration_is_deterministic_and_complete():
    M = FqModule(A1, 9)
    elems = list(M)
    assert len(set(elems)) == 18
    assert [M.index(x) for x in elems] == list(range(18))
    assert elems == list(FqModule(A1, 9))


def test_char_sums():
    N = FqModule(A2)
    h = N.element([Fraction(2, 3), Fraction(1, 3)])
    assert N.char_sum(N.zero()) == 3
    assert N.char_sum(h) == 0
    M = FqModule(A1)
    assert M.char_sum(M.element([Fraction(1, 2)])) == 0


def test_element_json():
    M = FqModule(A1, 3)
    y = M.element([Fraction(1, 6)])
    assert M.element_from_json(M.element_to_json(y)) == y
    with pytest.raises(MembershipViolation):
        FqModule(A1).element_from_json(M.element_to_json(y))


def test_lattice_json():
    assert EvenLattice.from_json(A2.to_json()) == A2
