"""Exact Weil-representation and Hecke-operator computations for even lattices."""

from .errors import VVHeckeError
from .heckeops import (
    DEFAULT,
    LITERAL,
    MODULAR,
    Convention,
    bs_closed,
    bs_oracle,
    check_multiplicative,
    check_PU,
    check_relation,
    op_H,
    op_P,
    op_T,
    op_U,
)
from .qexpansion import LazyExpansion, VVExpansion, theta_series
from .quadmodule import EvenLattice, FqModule, named_lattice
from .repnums import moebius_sum, moebius_sum_scaled, rep_number, rep_number_scaled
from .scalars import Cyclotomic, e_of, power_half, sqrt_prime
from .weilaction import BetaParams, falsify_naive_identity, rho_beta_closed, rho_beta_oracle

__version__ = "0.1.0"

__all__ = [
    "BetaParams",
    "Convention",
    "Cyclotomic",
    "DEFAULT",
    "EvenLattice",
    "FqModule",
    "LITERAL",
    "LazyExpansion",
    "MODULAR",
    "VVExpansion",
    "VVHeckeError",
    "bs_closed",
    "bs_oracle",
    "check_PU",
    "check_multiplicative",
    "check_relation",
    "e_of",
    "falsify_naive_identity",
    "moebius_sum",
    "moebius_sum_scaled",
    "named_lattice",
    "op_H",
    "op_P",
    "op_T",
    "op_U",
    "power_half",
    "rep_number",
    "rep_number_scaled",
    "rho_beta_closed",
    "rho_beta_oracle",
    "sqrt_prime",
    "theta_series",
]
