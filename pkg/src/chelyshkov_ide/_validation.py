"""Argument checks shared by the public functions and estimators."""
import numbers

import numpy as np

from .exceptions import DomainError


def check_degree(N, name="N"):
    if isinstance(N, bool) or not isinstance(N, numbers.Integral):
        raise DomainError(f"{name} must be an integer, got {N!r}")
    if N < 0:
        raise DomainError(f"{name} must be nonnegative, got {N}")
    return int(N)


def check_exponent(nu, name="nu"):
    nu = float(nu)
    if not (0.0 < nu <= 1.0):
        raise DomainError(f"{name} must lie in (0, 1], got {nu}")
    return nu


def check_order(alpha):
    return check_exponent(alpha, name="alpha")


def check_points(x, *, allow_zero=True):
    """Return ``x`` as a float ndarray with entries in [0, 1].

    Scalars are accepted and come back as 0-d arrays.
    """
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError("points must be finite")
    lo = 0.0 if allow_zero else np.finfo(float).tiny
    if x.size and (x.min() < lo or x.max() > 1.0):
        raise DomainError("points must lie in [0, 1]" if allow_zero else "points must lie in (0, 1]")
    return x


def check_coefficients(W, size, name="W"):
    from .exceptions import DimensionMismatch

    W = np.asarray(W, dtype=float)
    if W.ndim != 1 or W.shape[0] != size:
        raise DimensionMismatch(f"{name} must have length {size}, got shape {W.shape}")
    return W
