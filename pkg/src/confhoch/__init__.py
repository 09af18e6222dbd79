"""Hochschild cochain calculus for finite-rank associative conformal algebras."""

from .polyring import DEL, D, L, ONE, ZERO, Poly, Var, lam
from .confalg import (
    ConformalAlgebra,
    ConformalBimodule,
    check_associativity,
    check_bimodule,
    cur,
    lambda_product,
    left_action,
    regular_bimodule,
    right_action,
)
from .report import Report, Witness
from .cochain import Cochain, differential, evaluate, graft, random_cochain

__version__ = "0.1.0"

__all__ = [
    "DEL", "D", "L", "ONE", "ZERO", "Poly", "Var", "lam",
    "ConformalAlgebra", "ConformalBimodule", "check_associativity", "check_bimodule", "cur",
    "lambda_product", "left_action", "regular_bimodule", "right_action",
    "Report", "Witness",
    "Cochain", "differential", "evaluate", "graft", "random_cochain",
]
