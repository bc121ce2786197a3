"""Fractional Chelyshkov polynomials.

The basis of degree index ``N`` and exponent ``nu`` consists of

    C(N, n, nu)(x) = sum_{j=n}^{N} (-1)**(j-n) * binom(N-n, j-n)
                     * binom(N+j+1, N-n) * x**(j*nu),   n = 0..N,

which are orthogonal on [0, 1] under the weight x**(nu - 1) with squared
norms ``1 / (nu * (2n + 1))``.

Numerics
--------
The integer coefficients grow like 1e14 at N = 20, so summing the monomial
form in floating point cancels catastrophically for x near 1. Values are
instead computed from the equivalent Jacobi form

    C(N, n, nu)(x) = (-1)**(N-n) * t**n * P_{N-n}^{(0, 2n+1)}(2t - 1),  t = x**nu,

with the standard three-term Jacobi recurrence. The monomial sum and the
downward Chelyshkov recurrence are kept as independent cross-checks.
"""
from dataclasses import dataclass
from functools import cached_property
from math import comb

import numpy as np

from ._validation import check_degree, check_exponent, check_points
from .exceptions import CoefficientOverflow, DomainError, RootFindingFailure
from .quadrature import gauss_legendre_01

#: Coefficients must fit a signed 128-bit integer.
COEFFICIENT_BITS = 127
#: Largest index N whose coefficient table fits the 128-bit width.
MAX_EXACT_N = 52


def default_quad_order(N):
    """Gauss points used for projections when the caller does not choose."""
    return max(64, 2 * N + 16)


@dataclass(frozen=True)
class BasisConfig:
    N: int
    nu: float

    def __post_init__(self):
        object.__setattr__(self, "N", check_degree(self.N))
        object.__setattr__(self, "nu", check_exponent(self.nu))

    @property
    def size(self):
        return self.N + 1


@dataclass(frozen=True, eq=False)
class Basis:
    """Immutable fractional Chelyshkov basis with its exact coefficient table.

    ``coeffs[n][j]`` is the integer multiplying ``x**(j*nu)`` in the ``n``-th
    function (zero for ``j < n``).
    """

    config: BasisConfig
    coeffs: tuple

    @property
    def N(self):
        return self.config.N

    @property
    def nu(self):
        return self.config.nu

    @property
    def size(self):
        return self.config.N + 1

    @cached_property
    def coeff_matrix(self):
        """Coefficient table as a float array (rounded beyond 2**53)."""
        return np.array(self.coeffs, dtype=float)

    def __call__(self, x):
        return eval_vector(self, x)

    def __repr__(self):
        return f"Basis(N={self.N}, nu={self.nu})"


def _coefficient(N, n, j):
    return (-1) ** (j - n) * comb(N - n, j - n) * comb(N + j + 1, N - n)


def build_basis(config, nu=None):
    """Build the coefficient table for ``config`` (or for ``N=config, nu=nu``).

    Raises
    ------
    CoefficientOverflow
        If some coefficient needs more than 128 signed bits, which first
        happens at N = 53.
    """
    if not isinstance(config, BasisConfig):
        config = BasisConfig(config, nu)
    N = config.N
    limit = 1 << COEFFICIENT_BITS
    rows = []
    for n in range(N + 1):
        row = [0] * (N + 1)
        for j in range(n, N + 1):
            c = _coefficient(N, n, j)
            if not -limit <= c < limit:
                raise CoefficientOverflow(
                    f"coefficient c[{n}][{j}] of the N={N} basis exceeds "
                    f"{COEFFICIENT_BITS + 1}-bit signed range (max safe N is {MAX_EXACT_N})"
                )
            row[j] = c
        rows.append(tuple(row))
    return Basis(config=config, coeffs=tuple(rows))


def jacobi(m, a, b, z):
    """Jacobi polynomial ``P_m^{(a,b)}(z)`` by the upward recurrence."""
    z = np.asarray(z, dtype=float)
    p0 = np.ones_like(z)
    if m == 0:
        return p0
    p1 = 0.5 * (a - b) + 0.5 * (a + b + 2) * z
    for k in range(2, m + 1):
        s = 2 * k + a + b
        c1 = 2 * k * (k + a + b) * (s - 2)
        c2 = (s - 1) * (s * (s - 2) * z + a * a - b * b)
        c3 = 2 * (k + a - 1) * (k + b - 1) * s
        p0, p1 = p1, (c2 * p1 - c3 * p0) / c1
    return p1


def _phi_t(N, t):
    """Basis values as functions of ``t = x**nu``; shape ``t.shape + (N+1,)``."""
    t = np.asarray(t, dtype=float)
    z = 2.0 * t - 1.0
    out = np.empty(t.shape + (N + 1,))
    for n in range(N + 1):
        sign = -1.0 if (N - n) % 2 else 1.0
        out[..., n] = sign * t**n * jacobi(N - n, 0, 2 * n + 1, z)
    return out


def eval_vector(basis, x):
    """Evaluate all basis functions at ``x``.

    Returns an array of shape ``np.shape(x) + (N + 1,)``; for a scalar ``x``
    this is the vector ``[C(N,0,nu)(x), ..., C(N,N,nu)(x)]``.
    """
    x = check_points(x)
    return _phi_t(basis.N, x**basis.nu)


def eval_one(basis, n, x):
    """Value of the ``n``-th basis function at ``x``."""
    if not 0 <= n <= basis.N:
        raise DomainError(f"index n={n} outside 0..{basis.N}")
    x = check_points(x)
    t = x**basis.nu
    sign = -1.0 if (basis.N - n) % 2 else 1.0
    val = sign * t**n * jacobi(basis.N - n, 0, 2 * n + 1, 2.0 * t - 1.0)
    return float(val) if val.ndim == 0 else val


def eval_monomial(basis, x):
    """Evaluate the monomial form by Horner's rule in ``t = x**nu``.

    Exactly the defining sum, but unstable for large N; intended for
    verification at small N.
    """
    t = check_points(x) ** basis.nu
    c = basis.coeff_matrix
    out = np.zeros(t.shape + (basis.size,))
    for j in range(basis.N, -1, -1):
        out = out * t[..., None] + c[:, j]
    return out


def eval_recurrence(basis, x):
    """Evaluate the basis by the downward three-term Chelyshkov recurrence.

    Starts from ``C(N,N)`` and ``C(N,N-1)`` and steps down to ``C(N,0)``.
    Undefined at ``x = 0`` because of the ``x**(-nu)`` factor.
    """
    x = check_points(x)
    if np.any(x == 0.0):
        raise DomainError("the recurrence needs x > 0")
    N = basis.N
    t = x**basis.nu
    out = np.empty(t.shape + (N + 1,))
    out[..., N] = t**N
    if N == 0:
        return out
    out[..., N - 1] = 2 * N * t ** (N - 1) - (2 * N + 1) * t**N
    for k in range(N - 1, 0, -1):
        a = (k + 1) * (N - k + 1) * (N + k + 1)
        b = k * (2 * k + 1) * (2 * k + 2)
        c = (2 * k + 1) * ((N + 1) ** 2 + k * k + k)
        d = k * (N - k) * (N + k + 2)
        out[..., k - 1] = ((b / t - c) * out[..., k] - d * out[..., k + 1]) / a
    return out


def recurrence_coefficients(N, k):
    """The integers ``(a, b, c, d)`` of the downward recurrence at step ``k``."""
    return (
        (k + 1) * (N - k + 1) * (N + k + 1),
        k * (2 * k + 1) * (2 * k + 2),
        (2 * k + 1) * ((N + 1) ** 2 + k * k + k),
        k * (N - k) * (N + k + 2),
    )


def _first_function_roots(M):
    """Roots in (0, 1) of the integer-order polynomial C(M, 0, 1).

    C(M,0,1)(t) = (-1)**M P_M^{(0,1)}(2t - 1), so the roots are the
    eigenvalues of the symmetric tridiagonal Jacobi matrix of the (0, 1)
    Jacobi family, which plays the role of a companion matrix in the
    orthogonal basis. Each eigenvalue is then polished by Newton steps.
    """
    k = np.arange(M)
    diag = 1.0 / ((2 * k + 1) * (2 * k + 3))
    kk = np.arange(1, M)
    off = np.sqrt(kk * (kk + 1.0)) / (2 * kk + 1)
    A = np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)
    z = np.linalg.eigvalsh(A)
    for _ in range(3):
        p = jacobi(M, 0, 1, z)
        dp = 0.5 * (M + 2) * jacobi(M - 1, 1, 2, z)
        z = z - p / dp
    t = 0.5 * (z + 1.0)
    if not (np.all(np.isfinite(t)) and np.all(np.diff(t) > 0) and t[0] > 0 and t[-1] < 1):
        raise RootFindingFailure(f"could not isolate the {M} roots of C({M},0,1)")
    resid = jacobi(M, 0, 1, z)
    scale = np.abs(0.5 * (M + 2) * jacobi(M - 1, 1, 2, z))
    if np.any(np.abs(resid) > 1e-12 * np.maximum(1.0, scale)):
        raise RootFindingFailure(f"root polishing for C({M},0,1) did not converge")
    return t


def collocation_nodes(N, nu, *, mapped=True):
    """Collocation points for an ``N + 1`` function basis.

    Returns the ascending roots ``t_i`` of ``C(N+1, 0, 1)`` raised to the
    power ``1/nu``, i.e. the zeros of ``C(N+1, 0, nu)``. With
    ``mapped=False`` the raw integer-order roots are returned.
    """
    N = check_degree(N)
    nu = check_exponent(nu)
    t = _first_function_roots(N + 1)
    return t ** (1.0 / nu) if mapped else t


def inner_product(basis, u, v, quad_order=None):
    """Weighted inner product ``<u, v>`` with weight ``x**(nu - 1)`` on [0, 1]."""
    n = default_quad_order(basis.N) if quad_order is None else int(quad_order)
    rule = gauss_legendre_01(n)
    x = rule.nodes ** (1.0 / basis.nu)
    vals = np.asarray(u(x), dtype=float) * np.asarray(v(x), dtype=float)
    return float(np.dot(rule.weights, vals) / basis.nu)


def gram_matrix(basis, quad_order=None):
    """All pairwise weighted inner products of the basis functions."""
    n = default_quad_order(basis.N) if quad_order is None else int(quad_order)
    rule = gauss_legendre_01(n)
    phi = _phi_t(basis.N, rule.nodes)
    return (phi.T * rule.weights) @ phi / basis.nu


def project(basis, u, quad_order=None):
    """Coefficients of the best weighted-L2 approximation of ``u`` in the span.

    ``a_n = nu * (2n + 1) * <u, C(N,n,nu)>``.
    """
    n = default_quad_order(basis.N) if quad_order is None else int(quad_order)
    rule = gauss_legendre_01(n)
    phi = _phi_t(basis.N, rule.nodes)
    vals = np.asarray(u(rule.nodes ** (1.0 / basis.nu)), dtype=float)
    norms = basis.nu * (2 * np.arange(basis.size) + 1)
    return norms * ((rule.weights * vals) @ phi) / basis.nu


def expand(basis, coeffs, x):
    """Evaluate ``sum_n coeffs[n] * C(N,n,nu)(x)``."""
    return eval_vector(basis, x) @ np.asarray(coeffs, dtype=float)
