"""Test functions with known Hermite coefficients and exact integrals.

The workhorse is the exponential ridge function

    f(x) = exp(s^(-1/2) * sum_j x_j),

whose coefficients follow from the generating function of the Hermite
polynomials, ``exp(t x - t^2/2) = sum_k t^k / sqrt(k!) H_k(x)``:

    f_hat(k) = sqrt(e) * prod_j 1 / sqrt(k_j! s^(k_j)).

Its exact Gaussian integral is ``f_hat(0) = sqrt(e)``.  In a space with all
``b_j = 1`` the squared norm has the closed form
``exp(1 + (1/s) sum_j omega^(-a_j))``.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.special import gammaln

from .errors import ValidationError
from .hermite import hermite_eval_multi
from .hermite_space import HermiteSeries, WeightedSpace, load_series, series_eval, series_integral

SQRT_E = math.exp(0.5)


@dataclass(frozen=True)
class TestFunction:
    """Integrand with an exact integral and, when available, its coefficients."""

    __test__ = False  # keep pytest from collecting this class

    kind: str
    s: int
    params: dict
    exact_integral: float
    evaluate: Callable = field(repr=False)
    coefficient: Optional[Callable] = field(default=None, repr=False)
    series: Optional[HermiteSeries] = field(default=None, repr=False)

    def __call__(self, x):
        return self.evaluate(x)


def _check_s(s):
    if int(s) != s or s < 1:
        raise ValidationError(f"dimension must be a positive integer, got {s!r}")
    return int(s)


def appendixB_log_coefficient(s, k):
    s = _check_s(s)
    k = np.asarray(k)
    if k.shape[-1:] != (s,) or np.any(k < 0):
        raise ValidationError(f"multi-index must have {s} non-negative entries")
    k = k.astype(float)
    return 0.5 - 0.5 * np.sum(gammaln(k + 1.0) + k * math.log(s), axis=-1)


def appendixB_coefficient(s: int, k) -> float:
    """Hermite coefficient sqrt(e) prod_j (k_j! s^k_j)^(-1/2) of the ridge function.

    ``k`` may also be an ``(N, s)`` array, giving N coefficients.
    """
    val = np.exp(appendixB_log_coefficient(s, k))
    return float(val) if np.ndim(val) == 0 else val


def appendixB_eval(s: int, x):
    """exp(s^(-1/2) sum_j x_j); ``x`` of shape (s,) or (N, s)."""
    s = _check_s(s)
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (s,):
        raise ValidationError(f"point must have trailing dimension {s}, got shape {x.shape}")
    val = np.exp(np.sum(x, axis=-1) / math.sqrt(s))
    return float(val) if np.ndim(val) == 0 else val


def appendixB_norm_squared(space: WeightedSpace) -> float:
    """Closed-form squared norm exp(1 + (1/s) sum_j omega^(-a_j)).

    Only valid when every b_j equals 1; other spaces raise ValidationError.
    """
    if any(b != 1 for b in space.b):
        raise ValidationError("the closed-form norm of the ridge function requires b_j = 1 for all j")
    return math.exp(1.0 + math.fsum(space.omega ** (-a) for a in space.a) / space.s)


def appendixB_series(s: int, k_max: int) -> HermiteSeries:
    """Truncation of the ridge function to the box 0 <= k_j <= k_max."""
    s = _check_s(s)
    if int(k_max) != k_max or k_max < 0:
        raise ValidationError(f"k_max must be a non-negative integer, got {k_max!r}")
    axes = [np.arange(int(k_max) + 1)] * s
    idx = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, s)
    return HermiteSeries(s, idx, appendixB_coefficient(s, idx))


def appendixB_norm_squared_truncated(space: WeightedSpace, k_max: int) -> float:
    """Box-truncated squared norm; it factorizes over coordinates.

    Each factor is sum_{k<=k_max} (omega^(-a_j) / s)^k / k!, so the result is
    e * prod_j of those partial sums (and tends to the closed form when b = 1).
    """
    s = space.s
    ks = np.arange(int(k_max) + 1, dtype=float)
    log_total = 1.0
    for a, b in zip(space.a, space.b):
        logs = -a * ks**b * math.log(space.omega) - ks * math.log(s) - gammaln(ks + 1.0)
        log_total += math.log(math.fsum(np.exp(logs)))
    return math.exp(log_total)


def appendixB(s: int) -> TestFunction:
    s = _check_s(s)
    return TestFunction(
        kind="appendixB",
        s=s,
        params={},
        exact_integral=SQRT_E,
        evaluate=lambda x: appendixB_eval(s, x),
        coefficient=lambda k: appendixB_coefficient(s, k),
    )


def _from_series(kind, params, series):
    return TestFunction(
        kind=kind,
        s=series.s,
        params=params,
        exact_integral=series_integral(series),
        evaluate=lambda x: _eval_rows(series, x),
        coefficient=series.coefficient,
        series=series,
    )


def _eval_rows(series, x):
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        return series_eval(series, x)
    return np.array([series_eval(series, row) for row in x])


def single_hermite(s: int, k) -> TestFunction:
    """The tensor Hermite polynomial H_k; integral 1 at k = 0 and 0 otherwise."""
    s = _check_s(s)
    k = tuple(int(v) for v in k)
    if len(k) != s or any(v < 0 for v in k):
        raise ValidationError(f"multi-index {k} must have {s} non-negative entries")
    series = HermiteSeries.from_terms(s, {k: 1.0})
    tf = _from_series("single_hermite", {"k": list(k)}, series)
    # direct product evaluation is cheaper than the generic series path
    return TestFunction(
        tf.kind, s, tf.params, tf.exact_integral,
        evaluate=lambda x: _eval_product(k, x),
        coefficient=tf.coefficient, series=series,
    )


def _eval_product(k, x):
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        return hermite_eval_multi(k, x)
    return np.array([hermite_eval_multi(k, row) for row in x])


def monomial_coefficients(d: int) -> dict:
    """Coefficients of x^d in the normalized Hermite basis.

    x^d = sum_{i <= d/2} d! / (2^i i! (d - 2i)!) He_{d-2i}(x), and
    He_l = sqrt(l!) H_l.
    """
    if int(d) != d or d < 0:
        raise ValidationError(f"degree must be a non-negative integer, got {d!r}")
    d = int(d)
    out = {}
    for i in range(d // 2 + 1):
        l = d - 2 * i
        c = math.factorial(d) / (2**i * math.factorial(i) * math.factorial(l))
        out[l] = c * math.sqrt(math.factorial(l))
    return out


def monomial(d: int) -> TestFunction:
    """One-dimensional x^d with exact integral (d-1)!! for even d."""
    coefs = monomial_coefficients(d)
    series = HermiteSeries.from_terms(1, {(l,): c for l, c in coefs.items()})
    tf = _from_series("polynomial", {"degree": int(d)}, series)
    d = int(d)
    return TestFunction(
        tf.kind, 1, tf.params, tf.exact_integral,
        evaluate=lambda x: _eval_power(d, x),
        coefficient=tf.coefficient, series=series,
    )


def _eval_power(d, x):
    x = np.asarray(x, dtype=float)
    val = x[..., 0] ** d
    return float(val) if np.ndim(val) == 0 else val


def from_series(series: HermiteSeries) -> TestFunction:
    return _from_series("series", {}, series)


def by_name(name: str, s: int) -> TestFunction:
    """Resolve a function name.

    ``"appendixB"``, ``"hermite:k"`` (``k`` a single order for the first
    coordinate or a comma-separated multi-index), ``"monomial:d"`` (s = 1) or
    ``"series:path"`` (a JSON coefficient file).
    """
    s = _check_s(s)
    kind, _, arg = name.partition(":")
    try:
        if kind == "appendixB" and not arg:
            return appendixB(s)
        if kind == "hermite" and arg:
            parts = [int(v) for v in arg.split(",")]
            k = parts + [0] * (s - 1) if len(parts) == 1 else parts
            return single_hermite(s, k)
        if kind == "monomial" and arg:
            if s != 1:
                raise ValidationError("monomial test functions are one-dimensional")
            return monomial(int(arg))
        if kind == "series" and arg:
            series = load_series(arg, s)
            return from_series(series)
    except ValueError as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"bad argument in function name {name!r}: {exc}") from exc
    raise ValidationError(
        f"unknown function {name!r}; use appendixB, hermite:k, monomial:d or series:path"
    )
