"""Fractional Chelyshkov collocation for fractional Fredholm integro-differential equations."""
from .analysis import (
    ErrorReport, SweepTable, best_approx_bound, convergence_sweep, gram_error_bounds, l2_error,
    max_error_at, operational_errors,
)
from .basis import Basis, BasisConfig, build_basis, collocation_nodes, eval_one, eval_vector, project
from .benchmarks import BENCHMARKS, get_benchmark
from .estimators import FractionalChelyshkovFeatures, FractionalFredholmSolver
from .exceptions import (
    ChelyshkovError, CoefficientOverflow, DimensionMismatch, DomainError, IllConditionedGram,
    NonConvergence, NonFiniteValue, RootFindingFailure, SingularJacobian,
)
from .expr import parse_expression
from .operators import caputo_fracpoly, frac_integral_exact, operational_matrix, xi_table
from .problem_file import load_problem
from .quadrature import QuadratureRule, gauss_legendre_01, weighted_integral
from .solver import ProblemSpec, Solution, SolveResult, solve

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
