"""Print the b_s pieces of the Hecke operator on theta of A1+A1 and A2.

Each piece is computed twice, once from the closed form through
representation numbers and once by summing the Weil action over units, and
the two are compared exactly.

    python demos/hecke_coefficients.py
"""

from vvhecke import heckeops as H
from vvhecke.qexpansion import compare, theta_series
from vvhecke.quadmodule import named_lattice
from vvhecke.reports import short


def main():
    for name in ("A1+A1", "A2"):
        theta = theta_series(named_lattice(name), 18)
        M = theta.module
        for l in (1, 2):
            for s in range(1, 2 * l):
                closed = H.bs_closed(theta, 3, l, s, 2)
                agree = not compare(closed, H.bs_oracle(theta, 3, l, s, 2))
                print(f"{name} l={l} s={s}: closed form {'matches' if agree else 'DIFFERS FROM'} the oracle")
                for lam in M:
                    for n, v in sorted(closed.component(lam).items()):
                        print(f"    component {[str(c) for c in M.coords(lam)]} q^{n}: {short(v)}")


if __name__ == "__main__":
    main()
