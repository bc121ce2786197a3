"""Error metrics, a-priori bounds and convergence sweeps."""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import math
import time

import numpy as np

from ._validation import check_degree, check_exponent, check_order
from .basis import _phi_t, build_basis, default_quad_order
from .exceptions import ChelyshkovError, IllConditionedGram
from .operators import _context, _xi_mp, beta, frac_integral_exact, operational_matrix
from .quadrature import gauss_legendre_01


@dataclass
class ErrorReport:
    l2_error: float
    max_error: float
    point_errors: list
    N: int
    nu: float
    alpha: float


def uniform_grid(n=101):
    return np.linspace(0.0, 1.0, n)


def table_grid(N):
    """The points ``l/N``, ``l = 1..N`` used for the published L2 tables."""
    N = max(1, int(N))
    return np.arange(1, N + 1) / N


def l2_error(sol, exact, sample_points=None):
    """Root-mean-square of ``|exact - sol|`` over the sample (101 uniform points by default)."""
    x = uniform_grid() if sample_points is None else np.asarray(sample_points, dtype=float)
    if x.size == 0:
        raise ValueError("sample must be nonempty")
    err = np.asarray(exact(x), dtype=float) - sol(x)
    return float(np.sqrt(np.mean(err * err)))


def max_error_at(sol, exact, xs):
    """Absolute errors at ``xs`` with their RMS and maximum."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    err = np.abs(np.asarray(exact(xs), dtype=float) - sol(xs))
    return ErrorReport(
        l2_error=float(np.sqrt(np.mean(err * err))),
        max_error=float(err.max()),
        point_errors=[(float(x), float(e)) for x, e in zip(xs, err)],
        N=sol.basis.N, nu=sol.basis.nu, alpha=sol.alpha,
    )


def best_approx_bound(nu, N, M_nu):
    """Upper bound on the weighted L2 best-approximation error in the span.

    ``M_nu / (Gamma((N+1) nu + 1) * sqrt((2N + 3) nu))``, where ``M_nu``
    bounds the order-``(N+1) nu`` Caputo derivative of the target.
    """
    nu = check_exponent(nu)
    N = check_degree(N)
    if M_nu < 0:
        raise ValueError("M_nu must be nonnegative")
    return M_nu / (math.gamma((N + 1) * nu + 1) * math.sqrt((2 * N + 3) * nu))


def _pivoted_cholesky_pivots(G):
    """Diagonal pivots of a symmetric-pivoting Cholesky factorisation of ``G``."""
    A = np.array(G, dtype=float)
    n = A.shape[0]
    piv = np.empty(n)
    for i in range(n):
        p = i + int(np.argmax(np.diag(A)[i:]))
        if p != i:
            A[[i, p]] = A[[p, i]]
            A[:, [i, p]] = A[:, [p, i]]
        d = A[i, i]
        piv[i] = d
        if d <= 0:
            piv[i + 1:] = np.diag(A)[i + 1:]
            break
        l = A[i + 1:, i] / math.sqrt(d)
        A[i + 1:, i + 1:] -= np.outer(l, l)
    return piv


def gram_ratio(basis, u, quad_order=None):
    """``Psi(u, C_0..C_N) / Psi(C_0..C_N)``: the squared best-approximation error of ``u``.

    Determinants are formed as products of pivoted-Cholesky pivots and
    divided in log space.
    """
    n = max(64, default_quad_order(basis.N)) if quad_order is None else int(quad_order)
    rule = gauss_legendre_01(n)
    phi = _phi_t(basis.N, rule.nodes)
    uv = np.asarray(u(rule.nodes ** (1.0 / basis.nu)), dtype=float)
    F = np.column_stack([uv, phi])
    G_ext = (F.T * rule.weights) @ F / basis.nu
    G = G_ext[1:, 1:]
    d_ext = _pivoted_cholesky_pivots(G_ext)
    d = _pivoted_cholesky_pivots(G)
    if np.any(d <= 0):
        raise IllConditionedGram("basis Gram matrix is not numerically positive definite")
    floor = 64 * np.finfo(float).eps * G_ext[0, 0] * basis.size
    if np.any(d_ext[:-1] <= 0):
        raise IllConditionedGram("extended Gram matrix lost definiteness before the last pivot")
    last = np.min(d_ext)
    if last < -floor:
        raise IllConditionedGram(f"Gram determinant ratio {last:.3e} is negative beyond rounding")
    if last <= floor:
        # u lies in the span to working precision
        return 0.0
    ratio = math.exp(np.sum(np.log(d_ext)) - np.sum(np.log(d)))
    return ratio


def _exact_parts(basis, alpha):
    """Extended-precision inner products against ``x**(j nu + alpha)``.

    With ``p_j = j nu + alpha`` the weighted products are closed-form:
    ``<x^p_i, x^p_j> = 1/(p_i + p_j + nu)`` and ``<x^p_j, C_k> = xi[k][j] / (nu (2k+1))``.
    """
    ctx = _context(basis)
    xi = _xi_mp(ctx, basis, alpha)
    nu = ctx.mpf(basis.nu)
    p = [j * nu + ctx.mpf(alpha) for j in range(basis.size)]
    return ctx, xi, nu, p


def _exact_ratios(basis, alpha):
    # Psi(u, Phi) / Psi(Phi) is the Schur complement of the Gram block, and the
    # basis block is diagonal with entries 1 / (nu (2k+1))
    ctx, xi, nu, p = _exact_parts(basis, alpha)
    out = []
    for j in range(basis.size):
        uu = 1 / (2 * p[j] + nu)
        r = uu - ctx.fsum(xi[k][j] ** 2 / (nu * (2 * k + 1)) for k in range(basis.size))
        floor = uu * ctx.mpf(10) ** (-(ctx.dps - 10))
        if r < -floor:
            raise IllConditionedGram(f"Gram ratio for x^{float(p[j])} is negative ({float(r):.3e})")
        out.append(ctx.sqrt(r) if r > floor else ctx.zero)
    return ctx, out


def gram_error_bounds(basis, alpha, quad_order=None, *, riemann_liouville=False, method="exact"):
    """Bounds on ``||e_n||_2``, the operational-matrix error of each basis function.

    ``||e_n|| <= sum_j |c[n][j]| B(alpha, j nu + 1) sqrt(ratio_j)`` with
    ``ratio_j`` the Gram ratio of ``x**(j nu + alpha)``.

    The ratios fall to ~1e-15 of ``<u, u>`` as N grows, below what double
    precision resolves, so ``method="exact"`` forms them from the closed-form
    inner products in extended precision. ``method="quadrature"`` uses
    :func:`gram_ratio` (Gauss rule plus pivoted Cholesky) and is accurate
    only while ``alpha / nu`` is an integer and N is small.

    With ``riemann_liouville=True`` the bounds refer to the normalised
    integral ``J^alpha`` and carry an extra ``1/Gamma(alpha)``.
    """
    alpha = check_order(alpha)
    N, nu = basis.N, basis.nu
    if method == "exact":
        ctx, roots = _exact_ratios(basis, alpha)
        B = [ctx.beta(ctx.mpf(alpha), j * ctx.mpf(nu) + 1) for j in range(N + 1)]
        C = basis.coeffs
        bounds = np.array([float(ctx.fsum(abs(C[n][j]) * B[j] * roots[j] for j in range(n, N + 1)))
                           for n in range(N + 1)])
    elif method == "quadrature":
        roots = np.array([math.sqrt(gram_ratio(basis, lambda x, p=j * nu + alpha: x**p, quad_order))
                          for j in range(N + 1)])
        B = beta(alpha, np.arange(N + 1) * nu + 1.0)
        bounds = np.abs(basis.coeff_matrix) @ (B * roots)
    else:
        raise ValueError(f"unknown method {method!r}")
    return bounds / math.gamma(alpha) if riemann_liouville else bounds


def operational_errors(basis, alpha, P=None, quad_order=None, *, method="exact"):
    """Measured ``||int_0^x (x-s)^(alpha-1) C_n(s) ds - (P Phi)_n(x)||_2`` for every ``n``.

    The exact integral is the Beta-function closed form
    ``sum_j c[n][j] B(alpha, j nu + 1) x**(j nu + alpha)``. ``method="exact"``
    expands the squared norm into closed-form inner products evaluated in
    extended precision, which keeps the large alternating coefficients
    harmless; ``method="quadrature"`` samples both sides in double
    precision on a Gauss rule (fine for N up to ~6 with ``alpha / nu`` integral).
    """
    alpha = check_order(alpha)
    if P is None:
        P = operational_matrix(basis, alpha)
    Pm = np.asarray(P, dtype=float)
    size = basis.size
    if method == "quadrature":
        n = max(64, default_quad_order(basis.N)) if quad_order is None else int(quad_order)
        rule = gauss_legendre_01(n)
        x = rule.nodes ** (1.0 / basis.nu)
        phi = _phi_t(basis.N, rule.nodes)
        out = np.empty(size)
        for row in range(size):
            exact = frac_integral_exact(basis.coeff_matrix[row], basis, alpha, x)
            diff = exact - phi @ Pm[row]
            out[row] = math.sqrt(np.dot(rule.weights, diff * diff) / basis.nu)
        return out
    if method != "exact":
        raise ValueError(f"unknown method {method!r}")
    ctx, xi, nu, p = _exact_parts(basis, alpha)
    al = ctx.mpf(alpha)
    B = [ctx.beta(al, j * nu + 1) for j in range(size)]
    C = basis.coeffs
    M = [[1 / (p[i] + p[j] + nu) for j in range(size)] for i in range(size)]
    V = [[xi[k][j] / (nu * (2 * k + 1)) for k in range(size)] for j in range(size)]
    out = np.empty(size)
    for n in range(size):
        a = [C[n][j] * B[j] for j in range(size)]
        q = [ctx.mpf(float(v)) for v in Pm[n]]
        aa = ctx.fsum(a[i] * a[j] * M[i][j] for i in range(size) for j in range(size))
        aq = ctx.fsum(a[j] * V[j][k] * q[k] for j in range(size) for k in range(size))
        qq = ctx.fsum(q[k] ** 2 / (nu * (2 * k + 1)) for k in range(size))
        sq = aa - 2 * aq + qq
        out[n] = float(ctx.sqrt(sq)) if sq > 0 else 0.0
    return out


@dataclass
class SweepRow:
    N: int
    nu: float
    l2_error: float
    iterations: int
    seconds: float
    converged: bool
    error: str = ""


@dataclass
class SweepTable:
    rows: list = field(default_factory=list)

    def get(self, N, nu):
        for r in self.rows:
            if r.N == N and r.nu == nu:
                return r
        raise KeyError((N, nu))

    def grid(self, nu):
        return {r.N: r.l2_error for r in self.rows if r.nu == nu}


def _sample_for(sample, N):
    if isinstance(sample, str):
        if sample == "table":
            return table_grid(N)
        if sample == "uniform":
            return uniform_grid()
        raise ValueError(f"unknown sample {sample!r}")
    return np.asarray(sample, dtype=float)


def convergence_sweep(problem, exact, Ns, nus, *, sample="table", max_workers=None, **solve_opts):
    """Solve on every ``(N, nu)`` cell and tabulate the L2 errors.

    ``sample="table"`` uses the grid ``l/N``, ``l = 1..N`` behind the
    published tables; ``"uniform"`` uses 101 points; an array is used as is.
    Failed cells are recorded with ``nan`` error and the message.
    Rows come back ordered by ``(nu, N)`` regardless of completion order.
    """
    from .solver import solve

    cells = [(float(nu), int(N)) for nu in nus for N in Ns]

    def run(cell):
        nu, N = cell
        t0 = time.perf_counter()
        try:
            res = solve(problem, N, nu, **solve_opts)
            err = l2_error(res.solution, exact, _sample_for(sample, N))
            return SweepRow(N=N, nu=nu, l2_error=err, iterations=res.iterations,
                            seconds=time.perf_counter() - t0, converged=res.converged)
        except ChelyshkovError as exc:
            return SweepRow(N=N, nu=nu, l2_error=float("nan"), iterations=0,
                            seconds=time.perf_counter() - t0, converged=False, error=str(exc))

    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            rows = list(pool.map(run, cells))
    else:
        rows = [run(c) for c in cells]
    rows.sort(key=lambda r: (r.nu, r.N))
    return SweepTable(rows=rows)
