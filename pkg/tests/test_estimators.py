import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import ConvergenceWarning, NotFittedError
from sklearn.pipeline import make_pipeline
from sklearn.linear_model import LinearRegression

from chelyshkov_ide.basis import build_basis, eval_vector
from chelyshkov_ide.benchmarks import get_benchmark
from chelyshkov_ide.estimators import FractionalChelyshkovFeatures, FractionalFredholmSolver
from chelyshkov_ide.exceptions import DomainError


def test_features_transform():
    X = np.linspace(0, 1, 9)[:, None]
    feats = FractionalChelyshkovFeatures(N=3, nu=0.5).fit(X)
    np.testing.assert_array_equal(feats.transform(X), eval_vector(build_basis(3, 0.5), X[:, 0]))
    assert feats.get_feature_names_out().tolist() == ["C3_0", "C3_1", "C3_2", "C3_3"]
    assert feats.get_params() == {"N": 3, "nu": 0.5}


def test_features_validation():
    with pytest.raises(NotFittedError):
        FractionalChelyshkovFeatures().transform([[0.5]])
    with pytest.raises(ValueError):
        FractionalChelyshkovFeatures().fit().transform(np.zeros((3, 2)))
    with pytest.raises(DomainError):
        FractionalChelyshkovFeatures().fit().transform([[1.5]])


def test_features_in_pipeline_fit_sqrt_exactly():
    X = np.linspace(0, 1, 30)[:, None]
    y = np.sqrt(X[:, 0]) + X[:, 0] ** 1.5
    model = make_pipeline(FractionalChelyshkovFeatures(N=3, nu=0.5), LinearRegression()).fit(X, y)
    assert np.abs(model.predict(X) - y).max() < 1e-10


def test_solver_fit_predict():
    e = get_benchmark(2)
    est = FractionalFredholmSolver(N=4, nu=0.5).fit(e.problem())
    x = np.linspace(0, 1, 11)
    np.testing.assert_allclose(est.predict(x), e.exact(x), atol=1e-13)
    np.testing.assert_allclose(est.predict(x[:, None]), e.exact(x), atol=1e-13)
    assert est.converged_ and est.n_iter_ == 1
    assert est.coef_.shape == (5,) and est.basis_.N == 4
    assert np.asarray(est.operational_matrix_).shape == (5, 5)


def test_solver_params_and_clone():
    est = FractionalFredholmSolver(N=6, tol=1e-10, quad_rule="plain")
    params = clone(est).get_params()
    assert params["N"] == 6 and params["tol"] == 1e-10 and params["quad_rule"] == "plain"
    assert set(params) == {"N", "nu", "tol", "max_iter", "quad_order", "quad_rule", "oversample", "collocation"}


def test_solver_not_fitted():
    with pytest.raises(NotFittedError):
        FractionalFredholmSolver().predict([0.5])


def test_solver_convergence_warning():
    with pytest.warns(ConvergenceWarning):
        est = FractionalFredholmSolver(N=1, nu=0.5, max_iter=1).fit(get_benchmark(1).problem())
    assert not est.converged_
