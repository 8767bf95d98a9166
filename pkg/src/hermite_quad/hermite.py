"""Normalized probabilists' Hermite polynomials.

``H_k = He_k / sqrt(k!)`` is orthonormal with respect to the standard
Gaussian density.  Evaluation uses the normalized three-term recurrence

    H_0 = 1,  H_1(x) = x,
    H_{k+1}(x) = (x H_k(x) - sqrt(k) H_{k-1}(x)) / sqrt(k + 1),

which follows from ``He_{k+1} = x He_k - k He_{k-1}``.
"""

import math

import numpy as np
from scipy.special import gammaln

from .errors import ValidationError

#: sqrt(2 pi) ** (1/2); Cramer's bound is |H_k(x)| <= CRAMER_CONST * exp(x^2 / 4).
CRAMER_CONST = (2.0 * math.pi) ** 0.25


def _check_order(k):
    if int(k) != k or k < 0:
        raise ValidationError(f"Hermite order must be a non-negative integer, got {k!r}")
    return int(k)


def hermite_eval_all(k_max, x):
    """Evaluate H_0, ..., H_{k_max} at ``x``.

    Parameters
    ----------
    k_max : int
        Highest order.
    x : float or array_like
        Evaluation point(s).

    Returns
    -------
    numpy.ndarray
        Array of shape ``(k_max + 1,) + np.shape(x)``; row ``j`` holds H_j(x).
    """
    k_max = _check_order(k_max)
    x = np.asarray(x, dtype=float)
    out = np.empty((k_max + 1,) + x.shape)
    out[0] = 1.0
    if k_max == 0:
        return out
    out[1] = x
    for k in range(1, k_max):
        out[k + 1] = (x * out[k] - math.sqrt(k) * out[k - 1]) / math.sqrt(k + 1)
    return out


def hermite_eval(k, x):
    """Evaluate H_k(x); returns a float for scalar ``x``, an array otherwise."""
    k = _check_order(k)
    x = np.asarray(x, dtype=float)
    hm = np.ones_like(x)
    if k == 0:
        val = hm
    else:
        val = x.copy()
        # same operation sequence as hermite_eval_all, so results agree bit-for-bit
        for j in range(1, k):
            hm, val = val, (x * val - math.sqrt(j) * hm) / math.sqrt(j + 1)
    return float(val) if val.ndim == 0 else val


def hermite_eval_multi(k, x):
    """Tensor-product Hermite polynomial prod_j H_{k_j}(x_j)."""
    k = tuple(k)
    x = np.asarray(x, dtype=float)
    if len(k) == 0 or x.ndim != 1 or len(k) != x.shape[0]:
        raise ValidationError(
            f"multi-index of length {len(k)} does not match point of shape {x.shape}"
        )
    val = 1.0
    for kj, xj in zip(k, x):
        val *= hermite_eval(kj, xj)
    return float(val)


def hermite_derivative(k, x):
    """d/dx H_k(x) = sqrt(k) H_{k-1}(x)."""
    k = _check_order(k)
    if k == 0:
        x = np.asarray(x, dtype=float)
        val = np.zeros_like(x)
        return float(val) if val.ndim == 0 else val
    return math.sqrt(k) * hermite_eval(k - 1, x)


def cramer_bound(x):
    """Uniform bound on |H_k(x)| valid for every order k."""
    return CRAMER_CONST * np.exp(np.asarray(x, dtype=float) ** 2 / 4.0)


def triple_product_integral(k, l, m):
    """Integral of H_k H_l H_m against the standard Gaussian density.

    Nonzero only when ``k + l + m = 2 sigma`` is even and each index is at
    most ``sigma``; then it equals
    ``sqrt(k! l! m!) / ((sigma-k)! (sigma-l)! (sigma-m)!)``.
    Factorials are handled in log space so orders up to a few hundred are safe.
    """
    # sorted so that every permutation takes the same floating-point path
    k, l, m = sorted(_check_order(v) for v in (k, l, m))
    total = k + l + m
    if total % 2:
        return 0.0
    sigma = total // 2
    if max(k, l, m) > sigma:
        return 0.0
    log_val = 0.5 * (gammaln(k + 1) + gammaln(l + 1) + gammaln(m + 1)) - (
        gammaln(sigma - k + 1) + gammaln(sigma - l + 1) + gammaln(sigma - m + 1)
    )
    return float(math.exp(log_val))
