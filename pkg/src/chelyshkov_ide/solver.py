"""Implicit spectral collocation for fractional Fredholm integro-differential equations.

The problem

    D^alpha y(x) = g(x) + int_0^1 k(x, t) f(t, y(t)) dt,   y(0) = c,

is rewritten through the unknown ``w(x) = (1/Gamma(alpha)) int_0^1 k(x,z) f(z, y(z)) dz``
so that ``y = g~ + int_0^x (x-t)**(alpha-1) w(t) dt`` with
``g~ = c + J^alpha g``. Expanding ``w = W @ Phi`` and collocating at the
zeros of ``C(N+1, 0, nu)`` yields the nonlinear system ``F(W) = 0``:

    F_i(W) = W @ Phi(x_i) - sum_l omega_l k(x_i, z_l) H(z_l),
    H(z)   = f(z, (Cvec + Gvec + W @ P) @ Phi(z)) / Gamma(alpha),

solved by Newton's method from ``W0 = -Gtilde``. The ``1/Gamma(alpha)``
factor is folded into ``H``.
"""
from dataclasses import dataclass, field
from typing import Callable, Optional
import math
import warnings

import numpy as np

from ._validation import check_coefficients, check_degree, check_exponent, check_order, check_points
from .basis import _phi_t, build_basis, collocation_nodes, default_quad_order, eval_vector, project
from .exceptions import DomainError, NonFiniteValue, SingularJacobian
from .operators import caputo_fracpoly, monomial_coefficients, operational_matrix
from .quadrature import gauss_legendre_01, mapped_rule


class SolvabilityWarning(UserWarning):
    """The contraction condition ``L_f * M_k < Gamma(alpha + 1)`` does not hold."""


@dataclass(frozen=True)
class ProblemSpec:
    """Data of ``D^alpha y = g(x) + int_0^1 k(x,t) f(t, y(t)) dt``, ``y(0) = c``.

    ``g(x)``, ``k(x, t)``, ``f(t, y)`` and ``f_y(t, y)`` must accept numpy
    arrays and broadcast. Without ``f_y`` the Jacobian falls back to central
    differences.
    """

    alpha: float
    c: float
    g: Callable
    k: Callable
    f: Callable
    f_y: Optional[Callable] = None
    L_f: Optional[float] = None
    M_k: Optional[float] = None
    exact: Optional[Callable] = None
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "alpha", check_order(self.alpha))
        c = float(self.c)
        if not math.isfinite(c):
            raise DomainError(f"initial value must be finite, got {self.c}")
        object.__setattr__(self, "c", c)


@dataclass(frozen=True)
class Solution:
    """The approximate solution ``y_N = coeffs @ Phi``."""

    basis: object
    coeffs: np.ndarray
    alpha: float

    def __call__(self, x):
        return eval_vector(self.basis, x) @ self.coeffs


@dataclass
class SolveResult:
    W: np.ndarray
    iterations: int
    residual_norm: float
    converged: bool
    solution: Solution
    history: list = field(default_factory=list)
    iterates: list = field(default_factory=list)

    @property
    def solution_coeffs(self):
        return self.solution.coeffs


@dataclass(frozen=True, eq=False)
class AssembledSystem:
    """Everything the Newton iteration needs, precomputed once per problem."""

    basis: object
    P: object
    Cvec: np.ndarray
    Gtilde: np.ndarray
    Gvec: np.ndarray
    nodes: np.ndarray
    quad: object
    phi_nodes: np.ndarray  # [i, j] = C_j(x_i)
    phi_quad: np.ndarray  # [l, j] = C_j(z_l)
    pphi_quad: np.ndarray  # [l, j] = (P @ Phi(z_l))_j
    base_quad: np.ndarray  # (Cvec + Gvec) @ Phi(z_l)
    kernel: np.ndarray  # [i, l] = k(x_i, z_l)
    gamma_alpha: float

    @property
    def size(self):
        return self.basis.size


def solvability_check(L_f, M_k, alpha):
    """True iff ``L_f * M_k < Gamma(alpha + 1)`` (unique continuous solution)."""
    if L_f < 0 or M_k < 0:
        raise DomainError("Lipschitz and kernel bounds must be nonnegative")
    return L_f * M_k < math.gamma(check_order(alpha) + 1.0)


def build_g_tilde(problem, basis, P, quad_order=None):
    """Return ``(Cvec, Gtilde, Gvec)``.

    ``Cvec`` expands the constant ``c``; ``Gtilde`` projects ``g / Gamma(alpha)``;
    ``Gvec = Gtilde @ P`` so that ``(Cvec + Gvec) @ Phi ~ c + J^alpha g``.
    """
    N = basis.N
    Cvec = problem.c * (2 * np.arange(N + 1) + 1) / (N + 1)
    Gtilde = project(basis, problem.g, quad_order) / math.gamma(problem.alpha)
    Gvec = Gtilde @ np.asarray(P, dtype=float)
    return Cvec, Gtilde, Gvec


def fredholm_rule(N, nu, *, quad_order=None, quad_rule="mapped", oversample=1):
    """Quadrature for the Fredholm integral over [0, 1].

    ``quad_rule="mapped"`` applies Gauss-Legendre in ``s = z**nu`` (exact
    for fractional polynomials when ``1/nu`` is an integer) with a default
    of ``max(64, 2N + 16)`` points. ``quad_rule="plain"`` is the
    ordinary rule in ``z`` with a default of ``N + 1`` points.
    """
    if quad_rule not in ("mapped", "plain"):
        raise ValueError(f"quad_rule must be 'mapped' or 'plain', got {quad_rule!r}")
    if quad_order is None:
        quad_order = default_quad_order(N) if quad_rule == "mapped" else N + 1
    n = int(quad_order) * int(oversample)
    if n < 1:
        raise DomainError("quadrature order must be positive")
    return mapped_rule(nu, n) if quad_rule == "mapped" else gauss_legendre_01(n)


def assemble(problem, N, nu=None, *, quad_order=None, quad_rule="mapped", oversample=1,
             projection_order=None, collocation="mapped"):
    """Build the collocation system for ``problem`` with ``N + 1`` basis functions.

    ``collocation="raw"`` uses the integer-order roots without the
    ``1/nu`` power map.
    """
    N = check_degree(N)
    nu = problem.alpha if nu is None else check_exponent(nu)
    basis = build_basis(N, nu)
    P = operational_matrix(basis, problem.alpha)
    Pm = P.entries
    Cvec, Gtilde, Gvec = build_g_tilde(problem, basis, Pm, projection_order)
    if collocation not in ("mapped", "raw"):
        raise ValueError(f"collocation must be 'mapped' or 'raw', got {collocation!r}")
    nodes = collocation_nodes(N, nu, mapped=(collocation == "mapped"))
    quad = fredholm_rule(N, nu, quad_order=quad_order, quad_rule=quad_rule, oversample=oversample)
    phi_nodes = eval_vector(basis, nodes)
    phi_quad = eval_vector(basis, quad.nodes)
    pphi_quad = phi_quad @ Pm.T
    base_quad = phi_quad @ (Cvec + Gvec)
    kernel = np.broadcast_to(
        np.asarray(problem.k(nodes[:, None], quad.nodes[None, :]), dtype=float),
        (N + 1, quad.order),
    ).copy()
    if not np.all(np.isfinite(kernel)):
        raise NonFiniteValue("kernel is not finite at some collocation/quadrature pair")
    for a in (Cvec, Gtilde, Gvec, phi_nodes, phi_quad, pphi_quad, base_quad, kernel):
        a.setflags(write=False)
    return AssembledSystem(
        basis=basis, P=P, Cvec=Cvec, Gtilde=Gtilde, Gvec=Gvec, nodes=nodes, quad=quad,
        phi_nodes=phi_nodes, phi_quad=phi_quad, pphi_quad=pphi_quad, base_quad=base_quad,
        kernel=kernel, gamma_alpha=math.gamma(problem.alpha),
    )


def _f_values(problem, z, u):
    vals = np.broadcast_to(np.asarray(problem.f(z, u), dtype=float), z.shape)
    if not np.all(np.isfinite(vals)):
        raise NonFiniteValue("f returned a non-finite value at a quadrature node")
    return vals


def _f_y_values(problem, z, u):
    if problem.f_y is not None:
        vals = np.broadcast_to(np.asarray(problem.f_y(z, u), dtype=float), z.shape)
    else:
        h = 1e-7 * (1.0 + np.abs(u))
        vals = (np.asarray(problem.f(z, u + h), dtype=float) - np.asarray(problem.f(z, u - h), dtype=float)) / (2 * h)
    if not np.all(np.isfinite(vals)):
        raise NonFiniteValue("f_y returned a non-finite value at a quadrature node")
    return vals


def residual(W, sys, problem):
    """The collocation residual ``F(W)``, one entry per node."""
    W = check_coefficients(W, sys.size)
    u = sys.base_quad + sys.pphi_quad @ W
    H = _f_values(problem, sys.quad.nodes, u) / sys.gamma_alpha
    return sys.phi_nodes @ W - sys.kernel @ (sys.quad.weights * H)


def jacobian(W, sys, problem):
    """``J[i, j] = C_j(x_i) - sum_l omega_l k(x_i, z_l) f_y(z_l, u(z_l)) (P Phi(z_l))_j / Gamma(alpha)``."""
    W = check_coefficients(W, sys.size)
    u = sys.base_quad + sys.pphi_quad @ W
    d = sys.quad.weights * _f_y_values(problem, sys.quad.nodes, u) / sys.gamma_alpha
    return sys.phi_nodes - (sys.kernel * d) @ sys.pphi_quad


def _newton_step(J, F):
    try:
        step = np.linalg.solve(J, -F)
    except np.linalg.LinAlgError as exc:
        raise SingularJacobian(f"Jacobian is singular: {exc}", condition=float(np.linalg.cond(J))) from None
    if not np.all(np.isfinite(step)):
        raise SingularJacobian("Newton step is not finite", condition=float(np.linalg.cond(J)))
    return step


def newton_solve(sys, problem, *, tol=1e-12, max_iter=50, W0=None):
    """Newton iteration on ``F(W) = 0`` starting from ``-Gtilde``.

    A step that inflates the residual max-norm by more than 10x is halved
    up to 8 times. The iteration stops when ``||F||_inf <= tol``, after
    ``max_iter`` steps, or when damping cannot recover; in the last two
    cases the best iterate is returned with ``converged=False``.
    """
    W = -np.array(sys.Gtilde, dtype=float) if W0 is None else check_coefficients(W0, sys.size).copy()
    F = residual(W, sys, problem)
    norm = float(np.max(np.abs(F)))
    history = [norm]
    iterates = [W.copy()]
    best = (norm, W.copy())
    it = 0
    while norm > tol and it < max_iter:
        J = jacobian(W, sys, problem)
        step = _newton_step(J, F)
        lam = 1.0
        for _ in range(9):
            W_new = W + lam * step
            F_new = residual(W_new, sys, problem)
            new_norm = float(np.max(np.abs(F_new)))
            if new_norm <= 10.0 * norm:
                break
            lam *= 0.5
        else:
            break
        it += 1
        stalled = new_norm >= norm and np.max(np.abs(W_new - W)) <= 4 * np.finfo(float).eps * (1 + np.max(np.abs(W)))
        W, F, norm = W_new, F_new, new_norm
        history.append(norm)
        iterates.append(W.copy())
        if norm < best[0]:
            best = (norm, W.copy())
        if stalled:
            break
    if norm > best[0]:
        norm, W = best
    converged = norm <= tol
    coeffs = sys.Cvec + sys.Gvec + W @ sys.P.entries
    coeffs.setflags(write=False)
    return SolveResult(
        W=W, iterations=it, residual_norm=norm, converged=converged,
        solution=Solution(basis=sys.basis, coeffs=coeffs, alpha=problem.alpha),
        history=history, iterates=iterates,
    )


def solve(problem, N=4, nu=None, *, tol=1e-12, max_iter=50, quad_order=None, quad_rule="mapped",
          oversample=1, collocation="mapped"):
    """Solve ``problem`` end to end and return a :class:`SolveResult`."""
    if problem.L_f is not None and problem.M_k is not None:
        if not solvability_check(problem.L_f, problem.M_k, problem.alpha):
            warnings.warn(
                f"L_f * M_k = {problem.L_f * problem.M_k:.4g} is not below Gamma(alpha+1) = "
                f"{math.gamma(problem.alpha + 1):.4g}; uniqueness is not guaranteed",
                SolvabilityWarning,
                stacklevel=2,
            )
    sys = assemble(problem, N, nu, quad_order=quad_order, quad_rule=quad_rule,
                   oversample=oversample, collocation=collocation)
    return newton_solve(sys, problem, tol=tol, max_iter=max_iter)


def ide_residual(sol, problem, x, quad_order=64):
    """Pointwise defect ``D^alpha y_N(x) - g(x) - int_0^1 k(x,t) f(t, y_N(t)) dt``.

    The Caputo derivative is taken term by term on the monomial form of
    ``y_N``; the integral uses a mapped Gauss rule.
    """
    x = check_points(x)
    ctx, m = monomial_coefficients(sol.basis, sol.coeffs)
    D = caputo_fracpoly(m, sol.basis.nu, problem.alpha, x, ctx=ctx)
    rule = mapped_rule(sol.basis.nu, quad_order)
    t = rule.nodes
    yt = sol(t)
    xs = np.atleast_1d(x)
    kv = np.broadcast_to(np.asarray(problem.k(xs[:, None], t[None, :]), dtype=float), (xs.size, t.size))
    integral = kv @ (rule.weights * _f_values(problem, t, yt))
    out = np.atleast_1d(D) - np.broadcast_to(np.asarray(problem.g(xs), dtype=float), xs.shape) - integral
    return float(out[0]) if np.ndim(x) == 0 else out
