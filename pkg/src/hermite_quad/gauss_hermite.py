"""One-dimensional Gauss-Hermite rules for the standard Gaussian weight and
their Cartesian products.

Nodes are the zeros of H_n: eigenvalues of the symmetric Jacobi matrix
(zero diagonal, off-diagonal sqrt(1), ..., sqrt(n-1)) polished by Newton's
method on the recurrence.  Weights use the closed form
``alpha_i = 1 / (n H_{n-1}(x_i)^2)``, so the unit-mass identity
``sum(alpha) == 1`` is an independent check rather than a normalization.
"""

import functools
import itertools
import json
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal

from .errors import ConvergenceError, ValidationError
from .hermite import hermite_eval_all

MAX_ORDER = 200
NEWTON_MAX_STEPS = 50
NEWTON_TOL = 1e-10
WEIGHT_SUM_TOL = 1e-12


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Hermite rule of a given order; nodes increasing, weights positive."""

    order: int
    nodes: np.ndarray
    weights: np.ndarray

    def __len__(self):
        return self.order

    def to_dict(self):
        return {
            "order": self.order,
            "nodes": [float(v) for v in self.nodes],
            "weights": [float(v) for v in self.weights],
        }

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data):
        nodes = _frozen(data["nodes"])
        weights = _frozen(data["weights"])
        if len(nodes) != data["order"] or len(weights) != data["order"]:
            raise ValidationError("rule arrays do not match the declared order")
        return cls(int(data["order"]), nodes, weights)


@dataclass(frozen=True)
class ProductRule:
    """Cartesian product of one-dimensional Gauss-Hermite rules."""

    per_dimension: tuple

    @property
    def s(self):
        return len(self.per_dimension)

    @property
    def orders(self):
        return tuple(r.order for r in self.per_dimension)

    @property
    def total_points(self):
        return math.prod(self.orders)

    def grid(self):
        """All nodes and weights in lexicographic index order.

        Returns
        -------
        nodes : numpy.ndarray, shape (total_points, s)
        weights : numpy.ndarray, shape (total_points,)
        """
        axes = [r.nodes for r in self.per_dimension]
        wax = [r.weights for r in self.per_dimension]
        nodes = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, self.s)
        weights = np.ones(self.total_points)
        for w in np.meshgrid(*wax, indexing="ij"):
            weights *= w.reshape(-1)
        return nodes, weights


def _frozen(values):
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


def _newton_step(x, n):
    hm = np.ones_like(x)
    h = x.copy()
    for k in range(1, n):
        hm, h = h, (x * h - math.sqrt(k) * hm) / math.sqrt(k + 1)
    return h / (math.sqrt(n) * hm)


def _newton_polish(x, n):
    """Refine approximate zeros of H_n.

    Convergence is judged on the Newton step ``H_n / H_n'``; the raw residual
    |H_n(x)| scales with |H_{n-1}(x)|, which reaches 1e66 at the outer nodes
    of large rules, so it cannot serve as an absolute criterion.
    """
    for _ in range(NEWTON_MAX_STEPS):
        step = _newton_step(x, n)
        x = x - step
        if np.all(np.abs(step) <= 4 * np.finfo(float).eps * np.maximum(1.0, np.abs(x))):
            break
    step = np.abs(_newton_step(x, n))
    if not np.all(step <= NEWTON_TOL):
        bad = int(np.argmax(step))
        raise ConvergenceError(
            f"Newton refinement of node {bad} of order {n} stalled (residual step {step[bad]:.3e})"
        )
    return x


def newton_residual(rule):
    """Scaled residual |H_n(x_i)| / |H_n'(x_i)| at each node (the Newton step)."""
    n = rule.order
    vals = hermite_eval_all(n, rule.nodes)
    return np.abs(vals[n]) / (math.sqrt(n) * np.abs(vals[n - 1]))


@functools.lru_cache(maxsize=None)
def gh_rule(n: int) -> QuadratureRule:
    """Gauss-Hermite rule of order ``n`` for the standard Gaussian density.

    Raises
    ------
    ValidationError
        If ``n`` is not an integer in [1, 200].
    ConvergenceError
        If a node fails to converge or the weights do not sum to one.
    """
    if int(n) != n or not 1 <= n <= MAX_ORDER:
        raise ValidationError(f"Gauss-Hermite order must be an integer in [1, {MAX_ORDER}], got {n!r}")
    n = int(n)
    if n == 1:
        return QuadratureRule(1, _frozen([0.0]), _frozen([1.0]))

    x = eigvalsh_tridiagonal(np.zeros(n), np.sqrt(np.arange(1.0, n)))
    x = np.sort(_newton_polish(x, n))

    # exact mirror symmetry; middle node of an odd rule pinned to zero
    half = n // 2
    lo = 0.5 * (x[:half] - x[::-1][:half])
    x[:half] = lo
    x[n - half:] = -lo[::-1]
    if n % 2:
        x[half] = 0.0

    hm = np.ones_like(x)
    h = x.copy()
    for k in range(1, n - 1):
        hm, h = h, (x * h - math.sqrt(k) * hm) / math.sqrt(k + 1)
    w = 1.0 / (n * h**2)
    wl = 0.5 * (w[:half] + w[::-1][:half])
    w[:half] = wl
    w[n - half:] = wl[::-1]

    if np.any(np.diff(x) <= 0) or np.any(w <= 0):
        raise ConvergenceError(f"order {n}: nodes not strictly increasing or weights not positive")
    total = math.fsum(w)
    if abs(total - 1.0) > WEIGHT_SUM_TOL:
        raise ConvergenceError(f"order {n}: weights sum to {total!r}, not 1")
    return QuadratureRule(n, _frozen(x), _frozen(w))


def apply_rule(rule: QuadratureRule, f: Callable[[float], float]) -> float:
    """Sum of alpha_i f(x_i) over the nodes in ascending order.

    The terms are added with ``math.fsum`` (correctly rounded), so mirrored
    terms of an odd integrand cancel exactly instead of leaving a rounding
    residue of the size of the largest term.
    """
    return math.fsum(float(wi) * f(float(xi)) for xi, wi in zip(rule.nodes, rule.weights))


def product_rule(orders: Sequence[int]) -> ProductRule:
    """Cartesian product of ``gh_rule(m_j)`` for each entry of ``orders``."""
    orders = tuple(orders)
    if not orders:
        raise ValidationError("product rule needs at least one dimension")
    return ProductRule(tuple(gh_rule(m) for m in orders))


def apply_product_rule(rule: ProductRule, f, vectorized=False):
    """Apply a product rule to ``f``.

    With ``vectorized=False`` (default) ``f`` maps one point (a length-s
    array) to a float, and points are visited in lexicographic index order.
    With ``vectorized=True`` ``f`` receives the full ``(N, s)`` node array and
    returns ``N`` values.  Either way the weighted sum is formed with
    ``math.fsum``, so both paths give the same correctly rounded result.
    """
    if vectorized:
        nodes, weights = rule.grid()
        vals = np.asarray(f(nodes), dtype=float)
        return math.fsum(weights * vals)
    terms = []
    for idx in itertools.product(*(range(r.order) for r in rule.per_dimension)):
        w = 1.0
        x = np.empty(rule.s)
        for j, (r, i) in enumerate(zip(rule.per_dimension, idx)):
            w *= r.weights[i]
            x[j] = r.nodes[i]
        terms.append(w * f(x))
    return math.fsum(terms)


def gaussian_moment(k: int) -> float:
    """E[X^k] for X ~ N(0, 1): 0 for odd k, (k-1)!! for even k."""
    if int(k) != k or not 0 <= k <= 60:
        raise ValidationError(f"moment order must be an integer in [0, 60], got {k!r}")
    k = int(k)
    if k % 2:
        return 0.0
    return float(math.prod(range(k - 1, 0, -2)))
