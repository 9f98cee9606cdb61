"""Show that shifting the lift of lambda changes the naive Gauss-sum identity.

The v-sum on the left is the same for both lifts, but the phase e(q(lift)/p^s)
on the right is not, so the identity cannot hold for both.

    python demos/falsifier.py
"""

from fractions import Fraction

from vvhecke.quadmodule import named_lattice
from vvhecke.reports import short
from vvhecke.weilaction import falsify_naive_identity


def main():
    wit = falsify_naive_identity(named_lattice("A1"), 3, 1, [Fraction(1, 2)], [1])
    print("lattice A1, p = 3, s = 1, lambda = 1/2, shift w = 1")
    print(f"  q(lift)         = {wit.q_lift}    q(lift + w) = {wit.q_lift_shifted}")
    print(f"  phase           = {short(wit.phase)}")
    print(f"  shifted phase   = {short(wit.phase_shifted)}")
    print(f"  v-sum unchanged : {wit.lhs_invariant}")
    print(f"  verdict         : {wit.verdict}")


if __name__ == "__main__":
    main()
