"""Even lattices and their finite quadratic modules.

For an even lattice ``L = Z^D`` with Gram matrix ``G`` the scaled discriminant
module ``L(n)`` is ``(nG)^{-1} Z^D / Z^D`` with quadratic form
``q_n(x) = n x^T G x / 2 (mod 1)``.  All scales live in the same rational
coordinates, so ``L(l)`` is literally a subset of ``L(r)`` whenever ``l | r``.

An element of a module is a tuple of integers ``y`` (``0 <= y_i < den``)
standing for the coordinate vector ``x = y / den``, where ``den`` is the
exponent of the group.  Structural questions (subgroups, preimages,
enumeration order) are answered in Smith coordinates ``k`` with
``x = V diag(1/d) k``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product
from math import gcd, lcm, prod

from .errors import (
    DegenerateLattice,
    MembershipViolation,
    NonDivisible,
    NotEven,
)
from .scalars import Cyclotomic, RootSum

__all__ = [
    "EvenLattice",
    "FqModule",
    "build_module",
    "enumerate_cosets",
    "named_lattice",
    "smith_normal_form",
]


def smith_normal_form(a):
    """Return ``(U, D, V)`` with ``U a V = D`` diagonal, ``d_1 | d_2 | ...``, ``d_i >= 0``.

    Integer row/column reduction, pivoting on the smallest nonzero absolute
    value.  ``U`` and ``V`` are unimodular.
    """
    A = [list(map(int, row)) for row in a]
    n = len(A)
    m = len(A[0]) if n else 0
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    V = [[int(i == j) for j in range(m)] for i in range(m)]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, c):
        A[dst] = [x + c * y for x, y in zip(A[dst], A[src])]
        U[dst] = [x + c * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, c):
        for row in A:
            row[dst] += c * row[src]
        for row in V:
            row[dst] += c * row[src]

    for t in range(min(n, m)):
        while True:
            best = None
            for i in range(t, n):
                for j in range(t, m):
                    if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                break
            swap_rows(t, best[0])
            swap_cols(t, best[1])
            piv = A[t][t]
            dirty = False
            for i in range(t + 1, n):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // piv))
                    dirty |= A[i][t] != 0
            for j in range(t + 1, m):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // piv))
                    dirty |= A[t][j] != 0
            if dirty:
                continue
            bad = next(
                (i for i in range(t + 1, n) for j in range(t + 1, m) if A[i][j] % piv),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
    return U, A, V


def _det(mat) -> int:
    # Bareiss fraction-free elimination
    M = [list(map(int, r)) for r in mat]
    n = len(M)
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k]:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[-1][-1] if n else 1


def _int_inverse(mat):
    """Inverse of a unimodular integer matrix."""
    n = len(mat)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(mat)]
    for c in range(n):
        p = next(r for r in range(c, n) if aug[r][c])
        aug[c], aug[p] = aug[p], aug[c]
        pv = aug[c][c]
        aug[c] = [x / pv for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c]:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    out = [[row[n + j] for j in range(n)] for row in aug]
    assert all(x.denominator == 1 for row in out for x in row)
    return [[int(x) for x in row] for row in out]


@dataclass(frozen=True)
class EvenLattice:
    """Z^D with an even symmetric nondegenerate Gram matrix."""

    gram: tuple[tuple[int, ...], ...]
    name: str = ""

    def __post_init__(self):
        g = tuple(tuple(int(x) for x in row) for row in self.gram)
        object.__setattr__(self, "gram", g)
        D = len(g)
        if D == 0 or any(len(row) != D for row in g):
            raise ValueError("Gram matrix must be square and nonempty")
        if any(g[i][j] != g[j][i] for i in range(D) for j in range(D)):
            raise ValueError("Gram matrix must be symmetric")
        if any(g[i][i] % 2 for i in range(D)):
            raise NotEven("diagonal entries of the Gram matrix must be even")
        if _det(g) == 0:
            raise DegenerateLattice("Gram matrix is singular")

    @property
    def rank(self) -> int:
        return len(self.gram)

    @cached_property
    def det(self) -> int:
        return _det(self.gram)

    def scaled(self, n: int) -> EvenLattice:
        name = f"{self.name}({n})" if self.name else ""
        return EvenLattice(tuple(tuple(n * x for x in row) for row in self.gram), name)

    def norm(self, v) -> Fraction:
        """``q(v) = v^T G v / 2`` for a rational vector v."""
        g = self.gram
        D = len(g)
        return Fraction(sum(Fraction(v[i]) * g[i][j] * v[j] for i in range(D) for j in range(D))) / 2

    def is_positive_definite(self) -> bool:
        D = self.rank
        return all(_det([row[:k] for row in self.gram[:k]]) > 0 for k in range(1, D + 1))

    def to_json(self) -> dict:
        return {"gram": [list(r) for r in self.gram], "name": self.name}

    @classmethod
    def from_json(cls, obj) -> EvenLattice:
        return cls(tuple(tuple(r) for r in obj["gram"]), obj.get("name", ""))


_CARTAN = {
    "A1": ((2,),),
    "A2": ((2, -1), (-1, 2)),
    "D4": ((2, -1, 0, 0), (-1, 2, -1, -1), (0, -1, 2, 0), (0, -1, 0, 2)),
    "E8": (
        (2, -1, 0, 0, 0, 0, 0, 0),
        (-1, 2, -1, 0, 0, 0, 0, 0),
        (0, -1, 2, -1, 0, 0, 0, -1),
        (0, 0, -1, 2, -1, 0, 0, 0),
        (0, 0, 0, -1, 2, -1, 0, 0),
        (0, 0, 0, 0, -1, 2, -1, 0),
        (0, 0, 0, 0, 0, -1, 2, 0),
        (0, 0, -1, 0, 0, 0, 0, 2),
    ),
}


def named_lattice(name: str) -> EvenLattice:
    """Root lattices by name; ``"A1+A1"`` denotes an orthogonal sum."""
    parts = [p.strip() for p in name.split("+")]
    blocks = []
    for p in parts:
        if p not in _CARTAN:
            raise KeyError(f"unknown lattice {p!r}")
        blocks.append(_CARTAN[p])
    D = sum(len(b) for b in blocks)
    g = [[0] * D for _ in range(D)]
    off = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, x in enumerate(row):
                g[off + i][off + j] = x
        off += len(b)
    return EvenLattice(tuple(map(tuple, g)), name)


def enumerate_cosets(lattice: EvenLattice, a: int):
    """Representatives of L/aL: integer vectors with entries in ``range(a)``."""
    return product(range(a), repeat=lattice.rank)


class FqModule:
    """The finite quadratic module L(n) = (nG)^{-1} Z^D / Z^D."""

    def __init__(self, lattice: EvenLattice, n: int = 1):
        if n < 1:
            raise ValueError("scale must be positive")
        self.lattice = lattice
        self.n = n
        D = lattice.rank
        U, Dm, V = smith_normal_form([[n * x for x in row] for row in lattice.gram])
        self.divisors = tuple(Dm[i][i] for i in range(D))
        self.den = self.divisors[-1]
        self._V = V
        self._Vinv = _int_inverse(V)
        # column i of V scaled by den/d_i: element numerators of the i-th generator
        self._gen = tuple(
            tuple(V[r][i] * (self.den // self.divisors[i]) for r in range(D)) for i in range(D)
        )
        self._G = lattice.gram

    # -- basic data -------------------------------------------------------
    @property
    def rank(self) -> int:
        return self.lattice.rank

    @property
    def order(self) -> int:
        return prod(self.divisors)

    def __len__(self):
        return self.order

    def __repr__(self):
        name = self.lattice.name or "L"
        return f"FqModule({name}, n={self.n}, invariants={[d for d in self.divisors if d > 1]})"

    def __eq__(self, other):
        return isinstance(other, FqModule) and self.lattice == other.lattice and self.n == other.n

    def __hash__(self):
        return hash((self.lattice, self.n))

    @cached_property
    def level(self) -> int:
        """Smallest N with N q_n(x) in Z for all x."""
        N = 1
        gens = self._gen
        for i, g in enumerate(gens):
            N = lcm(N, self.q_lift(g).denominator)
            for h in gens[i + 1 :]:
                N = lcm(N, self.b_lift(g, h).denominator)
        return N

    def zero(self):
        return (0,) * self.rank

    # -- coordinates ------------------------------------------------------
    def is_member(self, coords) -> bool:
        x = [Fraction(c) for c in coords]
        G = self._G
        return all(
            (self.n * sum(G[i][j] * x[j] for j in range(self.rank))).denominator == 1
            for i in range(self.rank)
        )

    def element(self, coords):
        """Canonical element for a rational coordinate vector."""
        x = [Fraction(c) for c in coords]
        if len(x) != self.rank or not self.is_member(x):
            raise MembershipViolation(f"{[str(c) for c in x]} is not in {self!r}")
        y = [c * self.den for c in x]
        assert all(c.denominator == 1 for c in y)
        return tuple(int(c) % self.den for c in y)

    def coords(self, y) -> tuple[Fraction, ...]:
        return tuple(Fraction(c, self.den) for c in y)

    def from_module(self, y, other: FqModule):
        """Re-express an element of ``other`` (same coordinates) in this module."""
        if other.den == self.den:
            return tuple(y)
        if self.den % other.den == 0:
            f = self.den // other.den
            return tuple(c * f % self.den for c in y)
        return self.element(other.coords(y))

    def reduce(self, y):
        return tuple(c % self.den for c in y)

    # -- group law --------------------------------------------------------
    def add(self, x, y):
        d = self.den
        return tuple((a + b) % d for a, b in zip(x, y))

    def sub(self, x, y):
        d = self.den
        return tuple((a - b) % d for a, b in zip(x, y))

    def neg(self, x):
        d = self.den
        return tuple(-a % d for a in x)

    def scale(self, x, m: int):
        d = self.den
        return tuple(a * m % d for a in x)

    # -- forms ------------------------------------------------------------
    def _gram_num(self, y, z) -> int:
        G = self._G
        D = len(y)
        return sum(y[i] * G[i][j] * z[j] for i in range(D) for j in range(D) if G[i][j])

    def q_lift(self, y) -> Fraction:
        """``q_n`` of the representative with numerators ``y`` (no reduction)."""
        return Fraction(self.n * self._gram_num(y, y), 2 * self.den * self.den)

    def q_value(self, y) -> Fraction:
        q = self.q_lift(self.reduce(y))
        return q - (q.numerator // q.denominator)

    def b_lift(self, y, z) -> Fraction:
        return Fraction(self.n * self._gram_num(y, z), self.den * self.den)

    def b_value(self, y, z) -> Fraction:
        b = self.b_lift(y, z)
        return b - (b.numerator // b.denominator)

    def q_lift_shifted(self, y, v) -> Fraction:
        """``q_n(x + v)`` for the canonical representative x of y and an integer vector v."""
        w = tuple(a + self.den * b for a, b in zip(y, v))
        return self.q_lift(w)

    # -- Smith coordinates -------------------------------------------------
    def smith(self, y) -> tuple[int, ...]:
        """Coordinates k with ``x = V diag(1/d) k`` (mod d_i)."""
        Vi = self._Vinv
        D = self.rank
        out = []
        for i in range(D):
            s = sum(Vi[i][j] * y[j] for j in range(D))
            d = self.divisors[i]
            # s/den * d must be an integer
            num = s * d
            assert num % self.den == 0, "element not in module"
            out.append(num // self.den % d)
        return tuple(out)

    def from_smith(self, k):
        d = self.den
        D = self.rank
        gens = self._gen
        return tuple(sum(gens[i][r] * k[i] for i in range(D)) % d for r in range(D))

    def index(self, y) -> int:
        k = self.smith(y)
        idx = 0
        for ki, d in zip(k, self.divisors):
            idx = idx * d + ki
        return idx

    def __iter__(self):
        """Each element exactly once, in lexicographic Smith order."""
        for k in product(*(range(d) for d in self.divisors)):
            yield self.from_smith(k)

    enumerate = __iter__

    def elements(self) -> list:
        return list(self)

    def __contains__(self, y):
        try:
            self.smith(y)
        except AssertionError:
            return False
        return True

    # -- subgroups ---------------------------------------------------------
    def _smith_subgroup(self, steps):
        for k in product(*(range(0, d, st) for d, st in zip(self.divisors, steps))):
            yield self.from_smith(k)

    def multiples_subgroup(self, m: int) -> list:
        """``{m x : x in module}`` in enumeration order."""
        return list(self._smith_subgroup([gcd(m, d) for d in self.divisors]))

    def torsion_subgroup(self, m: int) -> list:
        """``{x : m x = 0}`` in enumeration order."""
        return list(self._smith_subgroup([d // gcd(m, d) for d in self.divisors]))

    def is_multiple(self, y, m: int) -> bool:
        return all(ki % gcd(m, d) == 0 for ki, d in zip(self.smith(y), self.divisors))

    def preimages(self, lam, m: int, target: FqModule | None = None) -> list:
        """All x in this module with ``m x = lam``, lam an element of ``target``.

        ``target`` defaults to this module; it may be any module whose
        elements are coordinates of the same lattice (e.g. L inside L(n)).
        """
        target = target or self
        x_lam = target.coords(lam)
        D = self.rank
        Vi = self._Vinv
        c = [sum(Vi[i][j] * x_lam[j] for j in range(D)) for i in range(D)]
        choices = []
        for ci, d in zip(c, self.divisors):
            a = ci * d
            if a.denominator != 1:
                return []
            a = int(a) % d
            g = gcd(m, d)
            if a % g:
                return []
            dd = d // g
            if dd == 1:
                k0 = 0
            else:
                k0 = (a // g) * pow(m // g, -1, dd) % dd
            choices.append(range(k0, d, dd))
        return [self.from_smith(k) for k in product(*choices)]

    def divide(self, lam, m: int, target: FqModule | None = None):
        """The enumeration-first preimage of ``lam`` under multiplication by m."""
        pre = self.preimages(lam, m, target)
        if not pre:
            raise NonDivisible(f"{lam} is not divisible by {m} in {self!r}")
        return min(pre, key=self.index)

    def contains_scale(self, y, other: FqModule) -> bool:
        """Is the element y of this module a member of the submodule ``other``?"""
        return other.is_member(self.coords(y))

    # -- characters --------------------------------------------------------
    def char_sum(self, x) -> Cyclotomic:
        """``sum_{nu} e(b(nu, x))``; equals ``|module|`` at 0 and vanishes elsewhere."""
        acc = RootSum()
        for nu in self:
            acc.add(self.b_value(nu, x))
        return acc.value()

    # -- serialization -----------------------------------------------------
    def element_to_json(self, y) -> dict:
        return {"coords": [f"{c.numerator}/{c.denominator}" for c in self.coords(y)], "scale": self.n}

    def element_from_json(self, obj):
        if int(obj.get("scale", 1)) != self.n:
            raise MembershipViolation("element scale does not match module")
        return self.element([Fraction(c) for c in obj["coords"]])


def build_module(lattice: EvenLattice, n: int = 1) -> FqModule:
    return FqModule(lattice, n)
