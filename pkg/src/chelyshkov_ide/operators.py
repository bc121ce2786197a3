"""Fractional integration of fractional polynomials and the operational matrix.

The operational matrix ``P`` maps a row of expansion coefficients ``W`` to
the coefficients of the order-``alpha`` integral

    int_0^x (x - s)**(alpha - 1) * (W @ Phi)(s) ds  ~  (W @ P) @ Phi(x).

Note the kernel carries no ``1/Gamma(alpha)`` factor.

Its closed form is an alternating sum of huge binomial products that cancel
down to O(1) results; in double precision the error reaches 1e-4 at N = 10.
The sums are therefore carried out in a private mpmath context whose working
precision grows with the coefficient size, and only the final entries are
rounded to float.
"""
from dataclasses import dataclass
import math

import mpmath
import numpy as np
from scipy import special

from ._validation import check_coefficients, check_order, check_points
from .exceptions import DomainError


def gamma(x):
    """Gamma function; scalar in, scalar out."""
    if np.ndim(x) == 0:
        return math.gamma(float(x))
    return special.gamma(np.asarray(x, dtype=float))


def beta(a, b):
    """Euler Beta function for positive arguments."""
    if np.any(np.asarray(a) <= 0) or np.any(np.asarray(b) <= 0):
        raise DomainError(f"beta needs positive arguments, got ({a}, {b})")
    out = special.beta(a, b)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class XiTable:
    """``entries[k, j]``: coefficient of C(N,k,nu) in the projection of x**(j*nu + alpha)."""

    entries: np.ndarray
    alpha: float


@dataclass(frozen=True)
class OperationalMatrix:
    alpha: float
    entries: np.ndarray
    basis_config: object

    @property
    def shape(self):
        return self.entries.shape

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)


def _context(basis):
    # guard digits on top of the cancellation depth of the largest products
    digits = int(math.log10(max(2, int(np.abs(basis.coeff_matrix).max())))) + 1
    ctx = mpmath.MPContext()
    ctx.dps = 25 + 2 * digits
    return ctx


def _xi_mp(ctx, basis, alpha):
    N = basis.N
    nu = ctx.mpf(basis.nu)
    al = ctx.mpf(alpha)
    C = basis.coeffs
    xi = [[None] * (N + 1) for _ in range(N + 1)]
    for k in range(N + 1):
        for j in range(N + 1):
            acc = ctx.fsum(C[k][l] / ((j + l + 1) * nu + al) for l in range(k, N + 1))
            xi[k][j] = nu * (2 * k + 1) * acc
    return xi


#: largest estimated absolute cancellation loss accepted on the float path
AUTO_DOUBLE_LOSS = 1e-14


def _resolve_precision(basis, precision):
    if precision == "auto":
        # alternating sums of products of two coefficient rows lose about max|c|^2 * eps
        cmax = float(np.abs(basis.coeff_matrix).max())
        loss = cmax * cmax * np.finfo(float).eps * basis.size
        return "double" if loss <= AUTO_DOUBLE_LOSS else "extended"
    if precision not in ("double", "extended"):
        raise ValueError(f"unknown precision {precision!r}")
    return precision


def _readonly(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def xi_table(basis, alpha, *, precision="auto"):
    """Closed-form projection coefficients of the shifted monomials.

    ``xi[k, j] = nu (2k+1) sum_{l=k}^{N} c[k][l] / ((j + l + 1) nu + alpha)``.

    ``precision="double"`` evaluates the same sums in float64 (for studying
    the cancellation loss); ``"auto"`` picks it only when the estimated loss
    is below ``AUTO_DOUBLE_LOSS``.
    """
    alpha = check_order(alpha)
    if _resolve_precision(basis, precision) == "double":
        c = basis.coeff_matrix
        N = basis.N
        j = np.arange(N + 1)
        H = 1.0 / ((j[:, None] + j[None, :] + 1) * basis.nu + alpha)  # H[j, l]
        xi = (c @ H.T) * (basis.nu * (2 * j + 1))[:, None]
        return XiTable(entries=_readonly(xi), alpha=alpha)
    ctx = _context(basis)
    xi = _xi_mp(ctx, basis, alpha)
    return XiTable(entries=_readonly([[float(v) for v in row] for row in xi]), alpha=alpha)


def operational_matrix(basis, alpha, *, precision="auto"):
    """Fractional integration operational matrix with entries ``Theta(n, k)``.

    ``Theta(n, k) = sum_{j=n}^{N} c[n][j] * B(alpha, j nu + 1) * xi[k, j]``.
    ``precision`` works as in :func:`xi_table`.
    """
    alpha = check_order(alpha)
    N = basis.N
    precision = _resolve_precision(basis, precision)
    if precision == "double":
        xi = xi_table(basis, alpha, precision="double").entries
        B = beta(alpha, np.arange(N + 1) * basis.nu + 1.0)
        entries = (basis.coeff_matrix * B) @ xi.T
        return OperationalMatrix(alpha=alpha, entries=_readonly(entries), basis_config=basis.config)
    ctx = _context(basis)
    xi = _xi_mp(ctx, basis, alpha)
    nu = ctx.mpf(basis.nu)
    al = ctx.mpf(alpha)
    B = [ctx.beta(al, j * nu + 1) for j in range(N + 1)]
    C = basis.coeffs
    entries = [
        [float(ctx.fsum(C[n][j] * B[j] * xi[k][j] for j in range(n, N + 1))) for k in range(N + 1)]
        for n in range(N + 1)
    ]
    return OperationalMatrix(alpha=alpha, entries=_readonly(entries), basis_config=basis.config)


def apply_matrix(W, P):
    """Row-vector product ``W @ P``."""
    E = np.asarray(P, dtype=float)
    W = check_coefficients(W, E.shape[0])
    return W @ E


def frac_integral_exact(coeff_row, basis, alpha, x):
    """Exact ``int_0^x (x-s)**(alpha-1) * sum_j coeff_row[j] s**(j nu) ds``.

    Term by term this is ``coeff_row[j] * B(alpha, j nu + 1) * x**(j nu + alpha)``.
    Accurate while the monomial coefficients stay moderate (N up to ~8).
    """
    alpha = check_order(alpha)
    x = check_points(x)
    c = np.asarray(coeff_row, dtype=float)
    p = np.arange(c.shape[0]) * basis.nu
    B = beta(alpha, p + 1.0)
    return (x[..., None] ** (p + alpha)) @ (c * B)


def monomial_coefficients(basis, coeffs):
    """Exact-in-extended-precision conversion of a Chelyshkov expansion to powers of x**nu.

    Returns a list of ``mpmath.mpf`` together with the context that owns them.
    """
    ctx = _context(basis)
    s = [ctx.mpf(float(v)) for v in coeffs]
    C = basis.coeffs
    m = [ctx.fsum(s[n] * C[n][j] for n in range(j + 1)) for j in range(basis.size)]
    return ctx, m


def caputo_fracpoly(coeff_row, nu, alpha, x, *, ctx=None):
    """Caputo derivative of order ``alpha`` of ``sum_j coeff_row[j] x**(j nu)``.

    Uses ``D x**p = Gamma(p+1)/Gamma(p+1-alpha) x**(p-alpha)`` with constants
    mapping to zero. The sum is evaluated in extended precision so that
    expansions with large alternating monomial coefficients stay accurate.

    Raises
    ------
    DomainError
        If some nonzero coefficient has ``0 < j nu < alpha``, or ``x <= 0``.
    """
    alpha = check_order(alpha)
    x = check_points(x)
    if np.any(x <= 0.0):
        raise DomainError("the Caputo derivative is evaluated at x > 0 only")
    if ctx is None:
        ctx = mpmath.MPContext()
        ctx.dps = 40
    m = [c if isinstance(c, ctx.mpf) else ctx.mpf(float(c)) for c in coeff_row]
    nu_m = ctx.mpf(nu)
    al = ctx.mpf(alpha)
    factors = []
    for j, cj in enumerate(m):
        if j == 0 or cj == 0:
            factors.append(None)
            continue
        p = j * nu_m
        if p < al:
            raise DomainError(
                f"term x**{float(p)} has order below alpha={alpha}; its derivative is not of fractional-polynomial form"
            )
        factors.append((cj * ctx.gamma(p + 1) / ctx.gamma(p + 1 - al), p - al))
    flat = np.atleast_1d(x).ravel()
    out = np.empty(flat.shape)
    for i, xv in enumerate(flat):
        xm = ctx.mpf(float(xv))
        out[i] = float(ctx.fsum(f * xm**e for f_e in factors if f_e is not None for f, e in [f_e]))
    return float(out[0]) if np.ndim(x) == 0 else out.reshape(np.shape(x))
