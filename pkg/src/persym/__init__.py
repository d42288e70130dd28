"""Exact rank census of n-times persymmetric 2n x k matrices over F2."""

from .closed_forms import (
    RankPolynomial,
    check_moment_identities,
    gamma_closed,
    gamma_poly,
    moment,
    r_formula,
)
from .engine import ParameterTuple, RankDistribution, build_matrix, census, exp_sum_value
from .errors import BudgetExceeded, ConsistencyError, NoClosedForm, StructuralError
from .exact_fit import fit_rank_polynomial, solve_exact, solve_moment_system
from .gf2 import BitMatrix, Poly2, kernel_dim, poly_mul, rank
from .oracle import SystemInstance, count_kernel, count_naive

__all__ = [
    "BitMatrix",
    "BudgetExceeded",
    "ConsistencyError",
    "NoClosedForm",
    "ParameterTuple",
    "Poly2",
    "RankDistribution",
    "RankPolynomial",
    "StructuralError",
    "SystemInstance",
    "build_matrix",
    "census",
    "check_moment_identities",
    "count_kernel",
    "count_naive",
    "exp_sum_value",
    "fit_rank_polynomial",
    "gamma_closed",
    "gamma_poly",
    "kernel_dim",
    "moment",
    "poly_mul",
    "r_formula",
    "rank",
    "solve_exact",
    "solve_moment_system",
]
