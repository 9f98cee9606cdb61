"""The Weil action of the matrices beta_{h,s} on C[L'/L].

Two independent evaluators are provided:

* :func:`rho_beta_closed` -- the corrected closed form, a Gauss-type sum over
  ``L/p^s L`` (``l >= s``) or over ``L/p^l L`` on the preimages of lambda
  (``l < s``);
* :func:`rho_beta_oracle` -- the unsimplified triple sum over ``rho, nu`` in
  the discriminant module and ``delta`` in the scaled module ``L(p^s)``,
  including the Bezout pair ``r p^s - h t = 1``.

:func:`falsify_naive_identity` exhibits the failure of the shortcut that pulls
``e(q(lambda)/p^s)`` out of the shifted Gauss sum.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .errors import BudgetExceeded, PNotOdd, RangeError, WitnessNotFound
from .quadmodule import EvenLattice, FqModule, enumerate_cosets
from .scalars import Cyclotomic, RootSum, power_half

__all__ = [
    "BetaParams",
    "WeilMatrix",
    "bezout",
    "falsify_naive_identity",
    "rho_beta_closed",
    "rho_beta_oracle",
    "support_check",
]

ENUMERATION_BUDGET = 10**7


def _is_odd_prime(p):
    return p > 2 and all(p % d for d in range(2, int(p**0.5) + 1))


def bezout(h: int, ps: int) -> tuple[int, int]:
    """``(r, t)`` with ``r*ps - h*t == 1`` and ``0 <= t < ps``."""
    t = -pow(h, -1, ps) % ps
    r, rem = divmod(1 + h * t, ps)
    assert rem == 0
    return r, t


@dataclass(frozen=True)
class BetaParams:
    p: int
    l: int
    s: int
    h: int
    r: int = None
    t: int = None

    def __post_init__(self):
        if not _is_odd_prime(self.p):
            raise PNotOdd(f"p = {self.p} must be an odd prime")
        if self.l < 1 or not 1 <= self.s <= 2 * self.l - 1:
            raise RangeError(f"need 1 <= s <= 2l-1, got l={self.l}, s={self.s}")
        if gcd(self.h, self.p) != 1:
            raise ValueError(f"h = {self.h} is not a unit mod {self.p}")
        if self.r is None or self.t is None:
            r, t = bezout(self.h, self.p**self.s)
            object.__setattr__(self, "r", r)
            object.__setattr__(self, "t", t)
        if self.r * self.p**self.s - self.h * self.t != 1:
            raise ValueError("Bezout relation r p^s - h t = 1 violated")

    def shifted_bezout(self, k: int = 1) -> BetaParams:
        """The same matrix with the Bezout pair ``(r + k h, t + k p^s)``."""
        return BetaParams(self.p, self.l, self.s, self.h, self.r + k * self.h, self.t + k * self.p**self.s)

    def to_json(self):
        return {"p": self.p, "l": self.l, "s": self.s, "h": self.h}


def units(m: int):
    return [h for h in range(1, m) if gcd(h, m) == 1]


class WeilMatrix:
    """Column-sparse matrix over Q(zeta) indexed by module elements.

    ``columns[lam][mu]`` is the coefficient of ``e_mu`` in ``e_lam | beta``.
    """

    def __init__(self, module: FqModule, params: BetaParams, columns=None):
        self.module = module
        self.params = params
        self.columns: dict[tuple, dict[tuple, Cyclotomic]] = {}
        for lam, col in (columns or {}).items():
            self.set_column(lam, col)

    def set_column(self, lam, col):
        self.columns[lam] = {mu: v for mu, v in col.items() if not v.is_zero()}

    def entry(self, mu, lam) -> Cyclotomic:
        return self.columns.get(lam, {}).get(mu, Cyclotomic.zero())

    def nonzero_columns(self):
        return [lam for lam in self.module if self.columns.get(lam)]

    def __eq__(self, other):
        if not isinstance(other, WeilMatrix) or other.module != self.module:
            return NotImplemented
        return not self.mismatches(other)

    def mismatches(self, other: WeilMatrix):
        out = []
        for lam in self.module:
            a = self.columns.get(lam, {})
            b = other.columns.get(lam, {})
            for mu in sorted(set(a) | set(b), key=self.module.index):
                x = a.get(mu, Cyclotomic.zero())
                y = b.get(mu, Cyclotomic.zero())
                if x != y:
                    out.append((lam, mu, x, y))
        return out

    def to_json(self) -> dict:
        M = self.module
        return {
            "module": {"lattice": M.lattice.to_json(), "scale": M.n},
            "params": self.params.to_json(),
            "columns": [
                {
                    "lambda": M.element_to_json(lam),
                    "rows": [
                        {"mu": M.element_to_json(mu), "value": v.to_json()}
                        for mu, v in sorted(self.columns[lam].items(), key=lambda kv: M.index(kv[0]))
                    ],
                }
                for lam in M
                if self.columns.get(lam)
            ],
        }


def _check_budget(count):
    if count > ENUMERATION_BUDGET:
        raise BudgetExceeded(f"enumeration of {count} terms exceeds budget {ENUMERATION_BUDGET}")


def _gauss_shift(module: FqModule, y, a: int, coef: Fraction) -> Cyclotomic:
    """``sum_{v in L/aL} e(coef * q(v + y))`` with y the canonical lift."""
    acc = RootSum()
    for v in enumerate_cosets(module.lattice, a):
        acc.add(coef * module.q_lift_shifted(y, v))
    return acc.value()


def rho_beta_closed(lattice: EvenLattice, params: BetaParams) -> WeilMatrix:
    """Closed-form ``rho_L(beta_{h,s})``."""
    L = FqModule(lattice, 1)
    p, l, s, h = params.p, params.l, params.s, params.h
    D = lattice.rank
    pref = power_half(p, Fraction(-s * D, 2))
    mat = WeilMatrix(L, params)
    if l >= s:
        _check_budget(p ** (s * D) * L.order)
        for lam in L:
            g = _gauss_shift(L, lam, p**s, Fraction(-h, p**s))
            mat.set_column(lam, {L.scale(lam, p ** (l - s)): pref * g})
    else:
        _check_budget(p ** (l * D) * L.order)
        for lam in L:
            col = {}
            for mu in L.preimages(lam, p ** (s - l)):
                col[mu] = pref * _gauss_shift(L, mu, p**l, Fraction(-h * p ** (s - l), p**l))
            mat.set_column(lam, col)
    return mat


def rho_beta_oracle(lattice: EvenLattice, params: BetaParams, *, lift_shift=None) -> WeilMatrix:
    """``rho_L(beta_{h,s})`` from the unsimplified expression.

    ``e(h r q(lam)) / (sqrt|L| sqrt|L(p^s)|) * sum_{rho, nu} e(-p^{2l-s} t q(nu) + b(nu, -rho))
    * sum_{delta in L(p^s), p^s delta = h lam - p^l nu} e(p^s t q(delta) + p^s b(delta, -r lam)) e_rho``

    Every q and b is evaluated on explicit rational lifts.  ``lift_shift`` (a
    callable ``element -> integer vector``) replaces each canonical lift of
    lam, nu and delta by a shifted one; the result must not change.
    """
    L = FqModule(lattice, 1)
    p, l, s, h, r, t = params.p, params.l, params.s, params.h, params.r, params.t
    ps = p**s
    Ls = FqModule(lattice, ps)
    D = lattice.rank
    _check_budget(L.order**2 * Ls.order)
    shift = lift_shift or (lambda y: (0,) * D)

    def lift(module, y):
        v = shift(y)
        return tuple(a + module.den * b for a, b in zip(y, v))

    # 1 / (sqrt|L| sqrt|L(p^s)|) = 1 / (|L| p^{sD/2})
    pref = power_half(p, Fraction(-s * D, 2)) * Fraction(1, L.order)
    elems = L.elements()
    f = Ls.den // L.den
    mat = WeilMatrix(L, params)
    for lam in elems:
        lam_l = lift(L, lam)
        lam_s = tuple(c * f for c in lam_l)  # the same rational vector over Ls.den
        head = h * r * L.q_lift(lam_l)
        inner = {}
        for nu in elems:
            nu_l = lift(L, nu)
            target = L.sub(L.scale(lam, h), L.scale(nu, p**l))
            acc = RootSum()
            for delta in Ls.preimages(target, ps, L):
                d_l = lift(Ls, delta)
                acc.add(t * Ls.q_lift(d_l) - r * Ls.b_lift(d_l, lam_s))
            inner[nu] = (acc, -(p ** (2 * l - s)) * t * L.q_lift(nu_l))
        col = {}
        for rho in elems:
            total = RootSum()
            for nu in elems:
                acc, phase = inner[nu]
                base = head + phase - L.b_lift(nu, rho)
                for x, w in acc.terms.items():
                    total.add(base + x, w)
            col[rho] = pref * total.value()
        mat.set_column(lam, col)
    return mat


def support_check(matrix: WeilMatrix, params: BetaParams | None = None) -> dict:
    """Compare the nonzero columns with the subgroup ``p^s L``.

    Returns ``{"ok": bool, "support": [...], "outside": [...]}``; ``ok`` is
    True iff every nonzero column lies in the multiples subgroup.
    """
    params = params or matrix.params
    M = matrix.module
    allowed = set(M.multiples_subgroup(params.p**params.s))
    nz = matrix.nonzero_columns()
    outside = [lam for lam in nz if lam not in allowed]
    return {"ok": not outside, "support": nz, "outside": outside, "predicted": sorted(allowed, key=M.index)}


@dataclass
class FalsifierWitness:
    lam: tuple
    w: tuple
    p: int
    s: int
    lhs: Cyclotomic
    lhs_shifted: Cyclotomic
    phase: Cyclotomic
    phase_shifted: Cyclotomic
    gauss: Cyclotomic
    q_lift: Fraction
    q_lift_shifted: Fraction

    @property
    def lhs_invariant(self) -> bool:
        return self.lhs == self.lhs_shifted

    @property
    def phases_differ(self) -> bool:
        return self.phase != self.phase_shifted

    @property
    def falsified(self) -> bool:
        rhs = self.phase * self.gauss
        rhs_shifted = self.phase_shifted * self.gauss
        return self.lhs != rhs or self.lhs_shifted != rhs_shifted

    @property
    def verdict(self) -> str:
        return "identity falsified" if self.falsified and self.phases_differ else "no witness"

    def to_json(self) -> dict:
        return {
            "lambda": [str(c) for c in self.lam],
            "w": list(self.w),
            "p": self.p,
            "s": self.s,
            "q_lift": str(self.q_lift),
            "q_lift_shifted": str(self.q_lift_shifted),
            "lhs": self.lhs.to_json(),
            "lhs_shifted": self.lhs_shifted.to_json(),
            "phase": self.phase.to_json(),
            "phase_shifted": self.phase_shifted.to_json(),
            "gauss_sum": self.gauss.to_json(),
            "verdict": self.verdict,
        }


def _e(x: Fraction) -> Cyclotomic:
    acc = RootSum()
    acc.add(x)
    return acc.value()


def falsify_naive_identity(lattice: EvenLattice, p: int, s: int, lam_coords, w) -> FalsifierWitness:
    """Test ``sum_v e(q(v+lam)/p^s) = e(q(lam)/p^s) sum_v e(q(v)/p^s)`` on two lifts of lam.

    The left side does not depend on the lift ``lam`` versus ``lam + w``; the
    phase on the right does.  Raises :class:`WitnessNotFound` when the pair
    ``(lam, w)`` does not exhibit the failure.
    """
    L = FqModule(lattice, 1)
    lam = L.element(lam_coords)  # membership check
    x = [Fraction(c) for c in lam_coords]
    xw = [a + b for a, b in zip(x, w)]
    ps = p**s

    def vsum(vec):
        acc = RootSum()
        for v in enumerate_cosets(lattice, ps):
            acc.add(lattice.norm([a + b for a, b in zip(vec, v)]) / ps)
        return acc.value()

    q0, q1 = lattice.norm(x), lattice.norm(xw)
    wit = FalsifierWitness(
        lam=tuple(x),
        w=tuple(w),
        p=p,
        s=s,
        lhs=vsum(x),
        lhs_shifted=vsum(xw),
        phase=_e(q0 / ps),
        phase_shifted=_e(q1 / ps),
        gauss=vsum([0] * lattice.rank),
        q_lift=q0,
        q_lift_shifted=q1,
    )
    if wit.verdict != "identity falsified":
        raise WitnessNotFound(f"lambda={lam_coords}, w={w} does not falsify the identity")
    return wit
