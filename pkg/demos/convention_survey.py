"""Compare the operator conventions on the identities they are meant to satisfy.

For each convention this prints the constant c in P U = c id (on theta of A1,
n = 2), whether the three-term recursion for p = 3, l = 2 holds on theta of
A1, and the constant term of H_4 applied to theta of E8 (73 means theta_E8 is
an eigenvector with the classical eigenvalue sigma_3(4)).

    python demos/convention_survey.py
"""

from vvhecke import heckeops as H
from vvhecke.qexpansion import theta_series
from vvhecke.quadmodule import named_lattice
from vvhecke.reports import short

CONVENTIONS = {
    "default": H.DEFAULT,
    "modular": H.MODULAR,
    "literal": H.LITERAL,
    "jacobi": H.Convention("jacobi"),
}


def main():
    a1 = theta_series(named_lattice("A1"), 81)
    e8 = theta_series(named_lattice("E8"), 8)
    z = e8.module.zero()
    print(f"{'convention':<10} {'P U = c id':>11} {'recursion':>10} {'H_4 theta_E8 at q^0':>20}")
    for name, conv in CONVENTIONS.items():
        pu = H.check_PU(a1.truncate(3), 2, conv)
        c = short(pu.constants["c"]) if pu.status == "pass" else "-"
        rec = H.check_relation(a1, 3, 2, conv, precision=1).status
        h = H.op_H(e8, 2, conv).component(z).get(0)
        print(f"{name:<10} {c:>11} {rec:>10} {short(h):>20}")


if __name__ == "__main__":
    main()
