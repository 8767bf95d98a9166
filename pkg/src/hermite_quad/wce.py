"""Worst-case errors of linear rules in weighted Hermite spaces.

Three routes are provided:

* :func:`general_wce` for arbitrary nodes and weights, through the kernel
  Gram form ``(sum(alpha) - 1)^2 + sum_{i,i'} alpha_i alpha_i' (K(x_i, x_i') - 1)``;
* :func:`one_dim_gh_wce`, the error series of a single Gauss-Hermite rule,
  ``sum_{k >= 2n, k even} omega^(a k^b) err(H_k)^2``;
* :func:`product_gh_wce`, the exact factorization
  ``e^2 = -1 + prod_j (1 + e_j^2)`` for Cartesian products.

Every report carries ``tail_bound``, a certified bound on the truncation
remainder, so ``e_squared <= true e^2 <= e_squared + tail_bound`` up to
floating-point rounding.
"""

import functools
import json
import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .errors import ConvergenceError, ValidationError
from .gauss_hermite import gh_rule, product_rule
from .hermite import hermite_eval_all
from .hermite_space import WeightedSpace, univariate_kernel_matrix, weight_term

#: |err(H_k)| <= (8 pi)^(1/4) for every Gauss-Hermite rule, hence err^2 <= sqrt(8 pi)
SQRT_8PI = math.sqrt(8.0 * math.pi)
ODD_TERM_TOL = 1e-12


@dataclass(frozen=True)
class ErrorReport:
    """Squared worst-case error with its truncation certificate."""

    e_squared: float
    tail_bound: float
    per_dimension_e_squared: Optional[tuple] = None
    analytic_upper_e_squared: Optional[float] = None
    method: str = ""
    clamped: bool = False
    negative_residue: float = 0.0
    log_e_squared_upper: Optional[float] = None

    @property
    def e(self):
        return math.sqrt(self.e_squared)

    @property
    def e_upper(self):
        """Certified upper bound on the worst-case error."""
        return math.sqrt(self.e_squared + self.tail_bound)

    def to_dict(self):
        d = asdict(self)
        if d["per_dimension_e_squared"] is not None:
            d["per_dimension_e_squared"] = list(d["per_dimension_e_squared"])
        d["e"] = self.e
        d["e_upper"] = self.e_upper
        return d

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)


def _check_tol(tol):
    if not (tol > 0 and math.isfinite(tol)):
        raise ValidationError(f"tolerance must be a positive finite number, got {tol!r}")


def log_one_dim_bound(a, b, omega, n):
    """Logarithm of :func:`one_dim_bound`, finite even where the bound underflows."""
    return a * math.exp(b * math.log(2.0 * n)) * math.log(omega) + math.log(SQRT_8PI / (1.0 - omega**2))


def one_dim_bound(a, b, omega, n):
    """Closed-form bound omega^(a (2n)^b) sqrt(8 pi) / (1 - omega^2) on e^2 of an order-n rule."""
    return weight_term(a, b, omega, 2 * n) * SQRT_8PI / (1.0 - omega**2)


def product_bound(space, m):
    """Closed-form bound -1 + prod_j (1 + one_dim_bound_j) for a product rule."""
    terms = [one_dim_bound(a, b, space.omega, mj) for (a, b), mj in zip(zip(space.a, space.b), m)]
    return math.expm1(math.fsum(math.log1p(t) for t in terms))


def _log_weight(a, b, omega, k):
    return a * np.exp(b * np.log(np.asarray(k, dtype=float))) * math.log(omega)


@functools.lru_cache(maxsize=4096)
def _one_dim_cached(a, b, omega, n, log_tol):
    """Error series of the order-n rule, scaled by its leading weight.

    Returns ``(log_w0, S, T)`` with e^2 = exp(log_w0) * S and tail bound
    exp(log_w0) * T, where w0 = omega^(a (2n)^b).  Working relative to w0
    keeps S and T representable when e^2 itself underflows.
    """
    rule = gh_rule(n)
    log_w0 = float(_log_weight(a, b, omega, 2 * n))
    # keep terms l = n..L of even orders k = 2l; tail over l > L bounded via
    # (2l)^b - (2L+2)^b >= 2(l-L-1) and err(H_2l)^2 <= sqrt(8 pi)
    log_c = math.log(SQRT_8PI / (1.0 - omega ** (2.0 * a)))

    def log_tail(L):
        return log_c + float(_log_weight(a, b, omega, 2 * L + 2))

    L = n
    while log_tail(L) > log_tol:
        L += 1
        if L > 50_000:
            raise ConvergenceError(f"error series for order {n} needs more than 1e5 terms")

    H = hermite_eval_all(2 * L + 1, rule.nodes)
    err = -(H @ rule.weights)
    odd = np.abs(err[2 * n + 1 :: 2])
    if odd.size and odd.max() > ODD_TERM_TOL:
        raise ConvergenceError(
            f"order-{n} rule leaves odd-order error {odd.max():.3e}; node set is not symmetric"
        )
    ks = np.arange(2 * n, 2 * L + 1, 2)
    terms = np.exp(_log_weight(a, b, omega, ks) - log_w0) * err[ks] ** 2
    return log_w0, math.fsum(terms), math.exp(log_tail(L) - log_w0)


def one_dim_gh_wce(
    a: float, b: float, omega: float, n: int, tol: float = 1e-14, rel_tol: Optional[float] = None
) -> ErrorReport:
    """Squared worst-case error of the order-``n`` Gauss-Hermite rule in one dimension.

    Parameters
    ----------
    a, b : float
        Weight parameters of the univariate space (both >= 1).
    omega : float
        Base in (0, 1).
    n : int
        Rule order.
    tol : float
        Absolute bound on the dropped tail of the error series.
    rel_tol : float, optional
        If given, replaces ``tol`` by ``rel_tol`` times the closed-form bound;
        useful when that bound lies below the double range.

    Returns
    -------
    ErrorReport
        With ``analytic_upper_e_squared`` set to the closed-form bound and
        ``log_e_squared_upper`` = log(e^2 + tail), finite even when both
        underflow.
    """
    if a < 1 or b < 1:
        raise ValidationError(f"need a >= 1 and b >= 1, got a={a}, b={b}")
    if int(n) != n or n < 1:
        raise ValidationError(f"rule order must be a positive integer, got {n!r}")
    if rel_tol is None:
        _check_tol(tol)
        log_tol = math.log(tol)
    else:
        _check_tol(rel_tol)
        log_tol = math.log(rel_tol) + log_one_dim_bound(a, b, omega, n)
    log_w0, S, T = _one_dim_cached(float(a), float(b), float(omega), int(n), log_tol)
    e2 = math.exp(log_w0) * S
    return ErrorReport(
        e_squared=e2,
        tail_bound=math.exp(log_w0) * T,
        per_dimension_e_squared=(e2,),
        analytic_upper_e_squared=one_dim_bound(a, b, omega, n),
        method="one_dim_gh",
        log_e_squared_upper=log_w0 + math.log(S + T),
    )


def _check_orders(space, m):
    m = tuple(int(v) for v in m)
    if len(m) != space.s:
        raise ValidationError(f"order vector has length {len(m)}, space dimension is {space.s}")
    if any(v < 1 for v in m):
        raise ValidationError(f"orders must be >= 1, got {m}")
    return m


def product_gh_wce(space: WeightedSpace, m, tol: float = 1e-14) -> ErrorReport:
    """Squared worst-case error of the Cartesian product of Gauss-Hermite rules of orders ``m``."""
    _check_tol(tol)
    m = _check_orders(space, m)
    tau = tol / (3 * space.s)
    for _ in range(40):
        parts = [
            one_dim_gh_wce(a, b, space.omega, mj, tau)
            for (a, b), mj in zip(zip(space.a, space.b), m)
        ]
        e2s = [p.e_squared for p in parts]
        log_p = math.fsum(math.log1p(v) for v in e2s)
        log_pt = math.fsum(math.log1p(v + p.tail_bound) for v, p in zip(e2s, parts))
        tail = math.exp(log_p) * math.expm1(log_pt - log_p)
        if tail <= tol:
            break
        tau /= 4.0
    else:
        raise ConvergenceError("could not meet the tolerance for the product error")
    return ErrorReport(
        e_squared=math.expm1(log_p),
        tail_bound=tail,
        per_dimension_e_squared=tuple(e2s),
        analytic_upper_e_squared=product_bound(space, m),
        method="product_gh",
    )


def product_gh_wce_relative(space: WeightedSpace, m, rel: float = 1e-6) -> ErrorReport:
    """:func:`product_gh_wce` with a tail budget relative to the error itself.

    Starts from ``rel`` times the closed-form bound and tightens to ``rel``
    times the computed e^2 until the certified tail is at most that, so
    ``e_upper`` tracks ``e`` even when e^2 lies far below the bound.
    """
    if not 0.0 < rel < 1.0:
        raise ValidationError(f"relative tolerance must lie in (0, 1), got {rel!r}")
    m = _check_orders(space, m)
    tol = max(product_bound(space, m) * rel, 1e-300)
    for _ in range(8):
        report = product_gh_wce(space, m, tol=tol)
        target = report.e_squared * rel
        if report.tail_bound <= target or target < 1e-300:
            return report
        tol = target
    raise ConvergenceError(f"relative tail budget {rel} not reached for orders {m}")


def general_wce(space: WeightedSpace, nodes, weights, tol: float = 1e-12) -> ErrorReport:
    """Squared worst-case error of an arbitrary linear rule.

    Parameters
    ----------
    nodes : array_like, shape (n, s)
    weights : array_like, shape (n,)
    tol : float
        Bound on the aggregated kernel truncation error.
    """
    _check_tol(tol)
    weights = np.asarray(weights, dtype=float).reshape(-1)
    n = weights.shape[0]
    if n == 0:
        return ErrorReport(1.0, 0.0, method="general")
    nodes = np.asarray(nodes, dtype=float).reshape(n, -1)
    if nodes.shape[1] != space.s:
        raise ValidationError(f"nodes have dimension {nodes.shape[1]}, space dimension is {space.s}")
    if not (np.all(np.isfinite(nodes)) and np.all(np.isfinite(weights))):
        raise ValidationError("nodes and weights must be finite")

    ww = np.outer(weights, weights)
    abs_ww = np.abs(ww)
    tau = tol / (n * n * max(float(np.max(weights**2)), 1.0 / (n * n)))
    for _ in range(40):
        vals, bnds = [], []
        for j in range(space.s):
            uniq, inv = np.unique(nodes[:, j], return_inverse=True)
            v, bd = univariate_kernel_matrix(space.a[j], space.b[j], space.omega, uniq, uniq, tau)
            vals.append(v[np.ix_(inv, inv)])
            bnds.append(bd[np.ix_(inv, inv)])
        vals, bnds = np.array(vals), np.array(bnds)
        pair_err = np.prod(np.abs(vals) + bnds, axis=0) - np.prod(np.abs(vals), axis=0)
        tail = float(np.sum(abs_ww * pair_err))
        if tail <= tol:
            break
        tau /= 4.0
    else:
        raise ConvergenceError("could not meet the tolerance for the kernel sums")

    K = np.prod(vals, axis=0)
    first = (math.fsum(weights) - 1.0) ** 2
    e2 = first + math.fsum((ww * (K - 1.0)).ravel())
    scale = first + float(np.sum(abs_ww * np.abs(K)))
    rounding = 16 * np.finfo(float).eps * (n + 1) * max(1.0, scale)
    clamped, residue = False, 0.0
    if e2 < 0:
        if e2 < -rounding:
            raise ConvergenceError(f"negative squared error {e2:.3e} beyond rounding level {rounding:.1e}")
        clamped, residue, e2 = True, e2, 0.0
    return ErrorReport(
        e_squared=e2,
        tail_bound=tail,
        method="general",
        clamped=clamped,
        negative_residue=residue,
    )


def product_rule_general_wce(space, m, tol=1e-12):
    """:func:`general_wce` evaluated on the explicit grid of a product rule."""
    m = _check_orders(space, m)
    nodes, weights = product_rule(m).grid()
    return general_wce(space, nodes, weights, tol)


def function_error_bound(e: float, norm: float) -> float:
    """|I(f) - A(f)| <= e(A) * ||f||."""
    if e < 0 or norm < 0:
        raise ValidationError("worst-case error and norm must be non-negative")
    return e * norm
