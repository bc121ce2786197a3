import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import roots_jacobi

from chelyshkov_ide.basis import (
    MAX_EXACT_N, BasisConfig, build_basis, collocation_nodes, eval_monomial, eval_one, eval_recurrence,
    eval_vector, gram_matrix, inner_product, project, recurrence_coefficients,
)
from chelyshkov_ide.analysis import best_approx_bound
from chelyshkov_ide.exceptions import CoefficientOverflow, DomainError

NUS = (0.25, 0.5, 0.75, 1.0)


def test_n5_listing_rows():
    b = build_basis(5, 0.5)
    assert b.coeffs[4][4:] == (10, -11)
    assert b.coeffs[5] == (0, 0, 0, 0, 0, 1)
    assert b.coeffs[0][:3] == (6, -105, 560)


def test_trivial_basis():
    b = build_basis(0, 0.3)
    assert b.coeffs == ((1,),)
    np.testing.assert_array_equal(eval_vector(b, np.array([0.0, 0.4, 1.0])), [[1.0], [1.0], [1.0]])


@pytest.mark.parametrize("N", [0, 1, 7, 20, MAX_EXACT_N])
def test_coefficient_table_structure(N):
    C = build_basis(N, 1.0).coeffs
    assert C[N][N] == 1
    assert C[0][0] == N + 1
    for n in range(N + 1):
        nonzero = [j for j in range(N + 1) if C[n][j] != 0]
        assert nonzero == list(range(n, N + 1))
        assert C[n][N] == (-1) ** (N - n) * math.comb(2 * N + 1, N - n)
        assert all((C[n][j] > 0) == ((j - n) % 2 == 0) for j in nonzero)


def test_coefficient_overflow_detected():
    build_basis(MAX_EXACT_N, 0.5)
    with pytest.raises(CoefficientOverflow):
        build_basis(MAX_EXACT_N + 1, 0.5)


def test_config_validation():
    with pytest.raises(DomainError):
        BasisConfig(-1, 0.5)
    with pytest.raises(DomainError):
        BasisConfig(2, 0.0)
    with pytest.raises(DomainError):
        BasisConfig(2, 1.5)


def test_eval_one_examples():
    b = build_basis(5, 0.5)
    assert eval_one(b, 0, 0.0) == 6
    assert eval_one(b, 5, 0.25) == pytest.approx(0.03125, rel=1e-15)
    assert all(eval_one(b, n, 0.0) == 0.0 for n in range(1, 6))
    with pytest.raises(DomainError):
        eval_one(b, 6, 0.5)
    with pytest.raises(DomainError):
        eval_one(b, 0, 1.5)


def test_example_basis_vector():
    b = build_basis(1, 0.5)
    x = np.linspace(0, 1, 11)
    np.testing.assert_allclose(eval_vector(b, x), np.column_stack([2 - 3 * np.sqrt(x), np.sqrt(x)]), atol=1e-15)
    np.testing.assert_allclose(eval_vector(b, 1.0), [-1.0, 1.0], atol=1e-15)


@pytest.mark.parametrize("N", [1, 5, 12, 20])
def test_jacobi_form_matches_exact_rational_evaluation(N):
    from fractions import Fraction

    b = build_basis(N, 1.0)
    for x in (0.03, 0.5, 0.97, 1.0):
        fx = Fraction(x)
        exact = [float(sum(c * fx**j for j, c in enumerate(row))) for row in b.coeffs]
        scale = max(1.0, max(abs(v) for v in exact))
        np.testing.assert_allclose(eval_vector(b, x), exact, atol=1e-12 * scale)


def test_horner_form_agrees_at_small_n():
    b = build_basis(6, 0.5)
    x = np.linspace(0, 1, 23)
    np.testing.assert_allclose(eval_monomial(b, x), eval_vector(b, x), atol=1e-10)


def test_recurrence_coefficient_example():
    assert recurrence_coefficients(5, 1)[0] == 70


def test_recurrence_examples():
    np.testing.assert_allclose(eval_recurrence(build_basis(5, 1.0), 0.5), eval_vector(build_basis(5, 1.0), 0.5),
                               rtol=1e-10, atol=1e-12)
    b = build_basis(1, 0.5)
    np.testing.assert_array_equal(eval_recurrence(b, 0.3), eval_vector(b, 0.3))
    with pytest.raises(DomainError):
        eval_recurrence(b, 0.0)


@settings(max_examples=80, deadline=None)
@given(N=st.integers(1, 20), nu=st.sampled_from(NUS), x=st.floats(0.01, 1.0))
def test_recurrence_agreement_property(N, nu, x):
    b = build_basis(N, nu)
    ref = eval_vector(b, x)
    rec = eval_recurrence(b, x)
    np.testing.assert_allclose(rec, ref, rtol=1e-10, atol=1e-10 * np.abs(ref).max())


@settings(max_examples=80, deadline=None)
@given(N=st.integers(0, 20), nu=st.floats(0.05, 1.0), x=st.floats(1e-6, 1.0))
def test_exponent_substitution_property(N, nu, x):
    b, b1 = build_basis(N, nu), build_basis(N, 1.0)
    for n in range(N + 1):
        ref = eval_one(b1, n, x**nu)
        assert eval_one(b, n, x) == pytest.approx(ref, rel=1e-12, abs=1e-300)


@pytest.mark.parametrize("nu", NUS)
def test_orthogonality(nu):
    for N in range(13):
        G = gram_matrix(build_basis(N, nu))
        expected = np.diag(1 / (nu * (2 * np.arange(N + 1) + 1)))
        assert np.abs(G - expected).max() <= 1e-10


def test_inner_product_examples():
    b = build_basis(0, 1.0)
    one = lambda x: np.ones_like(x)  # noqa: E731
    assert inner_product(b, one, one) == pytest.approx(1.0, abs=1e-15)
    b = build_basis(4, 0.75)
    for n in range(5):
        assert inner_product(b, lambda x, n=n: eval_one(b, n, x), one) == pytest.approx(1 / (0.75 * 5), rel=1e-12)


def test_nodes_examples():
    s6 = math.sqrt(6) / 10
    np.testing.assert_allclose(collocation_nodes(1, 0.5), [(0.6 - s6) ** 2, (0.6 + s6) ** 2], rtol=1e-14)
    np.testing.assert_allclose(collocation_nodes(1, 0.5, mapped=False), [0.6 - s6, 0.6 + s6], rtol=1e-14)
    np.testing.assert_allclose(collocation_nodes(0, 1.0), [2 / 3], rtol=1e-15)


@settings(max_examples=60, deadline=None)
@given(N=st.integers(0, 30), nu=st.sampled_from(NUS + (0.1, 0.9)))
def test_node_correctness_property(N, nu):
    x = collocation_nodes(N, nu)
    assert x.shape == (N + 1,)
    assert np.all(x > 0) and np.all(x < 1) and np.all(np.diff(x) > 0)
    b = build_basis(N + 1, nu)
    values = np.array([eval_one(b, 0, xi) for xi in x])
    assert np.abs(values).max() <= 1e-10 * (N + 2) ** 2
    t = x**nu
    raw = build_basis(N + 1, 1.0)
    assert max(abs(eval_one(raw, 0, ti)) for ti in t) <= 1e-12 * (N + 2) ** 2


def test_nodes_match_independent_jacobi_roots():
    for N in (3, 10, 25):
        z, _ = roots_jacobi(N + 1, 0, 1)
        np.testing.assert_allclose(collocation_nodes(N, 1.0), np.sort((z + 1) / 2), atol=1e-14)


@pytest.mark.parametrize("m", [0, 3, 6])
def test_project_basis_function_gives_unit_vector(m):
    b = build_basis(6, 0.5)
    a = project(b, lambda x: eval_one(b, m, x))
    np.testing.assert_allclose(a, np.eye(7)[m], atol=1e-12)


@pytest.mark.parametrize("nu", NUS)
def test_project_monomials_in_span(nu):
    N = 6
    b = build_basis(N, nu)
    x = np.linspace(0, 1, 41)
    for j in range(N + 1):
        a = project(b, lambda s, j=j: s ** (j * nu))
        assert np.abs(eval_vector(b, x) @ a - x ** (j * nu)).max() <= 1e-12


@pytest.mark.parametrize("N, nu", [(2, 0.5), (4, 0.5), (3, 1.0), (5, 0.25)])
def test_projection_error_below_best_approximation_bound(N, nu):
    b = build_basis(N, nu)
    p = (N + 1) * nu
    u = lambda x: x**p  # noqa: E731
    a = project(b, u)
    diff = lambda x: u(x) - eval_vector(b, x) @ a  # noqa: E731
    err = math.sqrt(inner_product(b, diff, diff, quad_order=200))
    assert err <= best_approx_bound(nu, N, math.gamma(p + 1))
