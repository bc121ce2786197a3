"""scikit-learn style wrappers around the basis and the solver."""
import warnings

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import ConvergenceWarning
from sklearn.utils.validation import check_is_fitted

from ._validation import check_points
from .basis import build_basis, eval_vector
from .solver import assemble, newton_solve


def _as_points(X):
    """Accept a 1-d array or an ``(n, 1)`` column of abscissae."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 2:
        if X.shape[1] != 1:
            raise ValueError(f"expected a single feature column, got shape {X.shape}")
        X = X[:, 0]
    elif X.ndim != 1:
        raise ValueError(f"expected 1-d points, got shape {X.shape}")
    return check_points(X)


class FractionalChelyshkovFeatures(TransformerMixin, BaseEstimator):
    """Map abscissae in [0, 1] to the ``N + 1`` fractional Chelyshkov features.

    >>> FractionalChelyshkovFeatures(N=2, nu=0.5).fit_transform([[0.0], [1.0]]).shape
    (2, 3)
    """

    def __init__(self, N=4, nu=0.5):
        self.N = N
        self.nu = nu

    def fit(self, X=None, y=None):
        self.basis_ = build_basis(self.N, self.nu)
        self.n_features_out_ = self.basis_.size
        return self

    def transform(self, X):
        check_is_fitted(self, "basis_")
        return eval_vector(self.basis_, _as_points(X))

    def get_feature_names_out(self, input_features=None):
        return np.array([f"C{self.N}_{n}" for n in range(self.N + 1)], dtype=object)


class FractionalFredholmSolver(BaseEstimator):
    """Collocation solver for one fractional Fredholm integro-differential equation.

    ``fit`` takes a :class:`~chelyshkov_ide.solver.ProblemSpec` in place of
    training data; ``predict`` evaluates the approximate solution.

    Attributes set by ``fit``: ``coef_`` (solution coefficients), ``W_``,
    ``n_iter_``, ``residual_norm_``, ``converged_``, ``history_``,
    ``basis_``, ``operational_matrix_``.
    """

    def __init__(self, N=4, nu=None, tol=1e-12, max_iter=50, quad_order=None, quad_rule="mapped",
                 oversample=1, collocation="mapped"):
        self.N = N
        self.nu = nu
        self.tol = tol
        self.max_iter = max_iter
        self.quad_order = quad_order
        self.quad_rule = quad_rule
        self.oversample = oversample
        self.collocation = collocation

    def fit(self, problem, y=None):
        system = assemble(problem, self.N, self.nu, quad_order=self.quad_order, quad_rule=self.quad_rule,
                          oversample=self.oversample, collocation=self.collocation)
        result = newton_solve(system, problem, tol=self.tol, max_iter=self.max_iter)
        self.result_ = result
        self.solution_ = result.solution
        self.coef_ = result.solution.coeffs
        self.W_ = result.W
        self.n_iter_ = result.iterations
        self.residual_norm_ = result.residual_norm
        self.converged_ = result.converged
        self.history_ = list(result.history)
        self.basis_ = system.basis
        self.operational_matrix_ = system.P
        if not result.converged:
            warnings.warn(
                f"Newton stopped after {result.iterations} iterations with residual "
                f"{result.residual_norm:.3e} > tol={self.tol:g}",
                ConvergenceWarning,
                stacklevel=2,
            )
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        return self.solution_(_as_points(X))
