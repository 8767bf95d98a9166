"""Weighted Hermite spaces with exponentially decaying coefficient weights.

A space is fixed by the dimension ``s``, a base ``omega`` in (0, 1) and two
non-decreasing weight sequences ``a``, ``b`` with entries >= 1.  The Hermite
coefficient at multi-index ``k`` is weighted by ``omega ** |k|_{a,b}`` where
``|k|_{a,b} = sum_j a_j k_j ** b_j``.

Truncated series throughout rely on one tail lemma: for ``b >= 1``

    sum_{k > K} omega**(a k**b) <= omega**(a (K+1)**b) / (1 - omega**a),

since ``k**b - (K+1)**b >= k - (K+1)`` for ``k >= K+1 >= 1``.
"""

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import ConvergenceError, ValidationError
from .hermite import CRAMER_CONST, hermite_eval_all

OMEGA_MIN = 1e-6
OMEGA_MAX = 1.0 - 1e-6
MAX_SERIES_TERMS = 100_000
LOG2 = math.log(2.0)


@dataclass(frozen=True)
class WeightSequence:
    """A weight sequence indexed from j = 1.

    ``kind="explicit"`` stores a finite list of values; ``kind="power"``
    generates ``alpha * j ** gamma`` for every j.
    """

    kind: str
    values: tuple = ()
    alpha: float = 1.0
    gamma: float = 0.0

    def __post_init__(self):
        if self.kind == "explicit":
            object.__setattr__(self, "values", tuple(float(v) for v in self.values))
            if not self.values:
                raise ValidationError("explicit weight sequence is empty")
        elif self.kind == "power":
            if self.alpha < 1.0 or self.gamma < 0.0:
                raise ValidationError(
                    f"power sequence alpha*j^gamma needs alpha >= 1 and gamma >= 0, "
                    f"got alpha={self.alpha}, gamma={self.gamma}"
                )
        else:
            raise ValidationError(f"unknown weight sequence kind {self.kind!r}")

    @classmethod
    def explicit(cls, values):
        return cls("explicit", tuple(values))

    @classmethod
    def power(cls, alpha, gamma):
        return cls("power", alpha=float(alpha), gamma=float(gamma))

    @classmethod
    def constant(cls, value):
        return cls.power(value, 0.0)

    @property
    def is_generator(self):
        return self.kind == "power"

    def value(self, j):
        if j < 1:
            raise ValidationError(f"weight index starts at 1, got {j}")
        if self.kind == "explicit":
            if j > len(self.values):
                raise ValidationError(
                    f"explicit weight list has {len(self.values)} entries; index {j} is undefined"
                )
            return self.values[j - 1]
        return self.alpha * float(j) ** self.gamma

    def prefix(self, s):
        return tuple(self.value(j) for j in range(1, s + 1))

    def is_bounded(self):
        """True/False for generators, None for explicit lists."""
        if self.kind == "explicit":
            return None
        return self.gamma == 0.0

    def to_dict(self):
        if self.kind == "explicit":
            return {"kind": "explicit", "values": list(self.values)}
        return {"kind": "power", "alpha": self.alpha, "gamma": self.gamma}

    @classmethod
    def from_dict(cls, data):
        if isinstance(data, (list, tuple)):
            return cls.explicit(data)
        kind = data.get("kind")
        if kind == "explicit":
            return cls.explicit(data["values"])
        if kind == "power":
            return cls.power(data["alpha"], data["gamma"])
        raise ValidationError(f"unknown weight sequence kind {kind!r}")


def _as_sequence(obj):
    if isinstance(obj, WeightSequence):
        return obj
    if isinstance(obj, dict):
        return WeightSequence.from_dict(obj)
    if isinstance(obj, (int, float)):
        return WeightSequence.constant(obj)
    return WeightSequence.explicit(obj)


@dataclass(frozen=True)
class WeightedSpace:
    """The space H(K_{s,a,b,omega}); immutable once built."""

    s: int
    omega: float
    a_seq: WeightSequence
    b_seq: WeightSequence
    a: tuple = field(init=False)
    b: tuple = field(init=False)

    def __post_init__(self):
        if int(self.s) != self.s or self.s < 1:
            raise ValidationError(f"dimension must be a positive integer, got {self.s!r}")
        if not OMEGA_MIN <= self.omega <= OMEGA_MAX or not math.isfinite(self.omega):
            raise ValidationError(f"omega must lie in [{OMEGA_MIN}, {OMEGA_MAX}], got {self.omega!r}")
        a = self.a_seq.prefix(self.s)
        b = self.b_seq.prefix(self.s)
        for name, seq in (("a", a), ("b", b)):
            if seq[0] < 1.0 or any(y < x for x, y in zip(seq, seq[1:])):
                raise ValidationError(f"weights {name} must be non-decreasing and >= 1, got {seq}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def a_at(self, j):
        return self.a_seq.value(j)

    def b_at(self, j):
        return self.b_seq.value(j)

    def with_dimension(self, s):
        """The same weight sequences restricted to the first ``s`` coordinates."""
        return WeightedSpace(s, self.omega, self.a_seq, self.b_seq)

    def coordinate(self, j):
        """(a_j, b_j) for 1-based coordinate ``j``."""
        return self.a[j - 1], self.b[j - 1]

    def to_dict(self):
        return {"s": self.s, "omega": self.omega, "a": self.a_seq.to_dict(), "b": self.b_seq.to_dict()}

    @classmethod
    def from_dict(cls, data):
        try:
            return cls(
                int(data["s"]),
                float(data["omega"]),
                _as_sequence(data["a"]),
                _as_sequence(data["b"]),
            )
        except KeyError as exc:
            raise ValidationError(f"space config is missing key {exc}") from None


def make_space(a, b, omega, s=None):
    """Convenience constructor.

    ``a`` and ``b`` may be numbers (constant sequences), lists (explicit),
    dicts (config form) or :class:`WeightSequence` objects.  ``s`` defaults to the length of the
    explicit list(s).
    """
    a_seq, b_seq = _as_sequence(a), _as_sequence(b)
    if s is None:
        lengths = [len(q.values) for q in (a_seq, b_seq) if q.kind == "explicit"]
        if not lengths:
            raise ValidationError("dimension s is required when both sequences are generators")
        s = min(lengths)
    return WeightedSpace(int(s), float(omega), a_seq, b_seq)


def load_space(path):
    with open(path) as fh:
        return WeightedSpace.from_dict(json.load(fh))


# ---------------------------------------------------------------------------
# multi-indices and series


def _as_index_array(k, s=None):
    arr = np.asarray(k)
    if arr.size and not np.issubdtype(arr.dtype, np.integer):
        if not np.all(arr == np.round(arr)):
            raise ValidationError("multi-index entries must be integers")
        arr = arr.astype(np.int64)
    if np.any(arr < 0):
        raise ValidationError("multi-index entries must be non-negative")
    if s is not None and (arr.ndim == 0 or arr.shape[-1] != s):
        raise ValidationError(f"multi-index length does not match dimension {s}")
    return arr


def exponent_weight(space: WeightedSpace, k) -> float:
    """|k|_{a,b} = sum_j a_j k_j ** b_j.

    ``k`` may be a single multi-index or an ``(N, s)`` array, in which case an
    array of N values is returned.
    """
    arr = _as_index_array(k, space.s).astype(float)
    a = np.array(space.a)
    b = np.array(space.b)
    val = np.sum(a * arr**b, axis=-1)
    return float(val) if np.ndim(val) == 0 else val


def coefficient_weight(space, k):
    """r(k) = omega ** |k|_{a,b}."""
    return space.omega ** exponent_weight(space, k)


@dataclass(frozen=True)
class HermiteSeries:
    """Finite Hermite expansion stored as a sparse coordinate list."""

    s: int
    indices: np.ndarray
    coefs: np.ndarray

    def __post_init__(self):
        idx = _as_index_array(self.indices).astype(np.int64).reshape(-1, self.s)
        coefs = np.asarray(self.coefs, dtype=float).reshape(-1)
        if idx.shape[0] != coefs.shape[0]:
            raise ValidationError("series indices and coefficients differ in length")
        if idx.shape[0] and np.unique(idx, axis=0).shape[0] != idx.shape[0]:
            raise ValidationError("series contains a repeated multi-index")
        idx.setflags(write=False)
        coefs.setflags(write=False)
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "coefs", coefs)

    @classmethod
    def from_terms(cls, s, terms):
        """Build from a mapping ``{k: coef}`` or an iterable of ``(k, coef)``."""
        items = list(terms.items()) if isinstance(terms, dict) else list(terms)
        for k, _ in items:
            if len(tuple(k)) != s:
                raise ValidationError(f"multi-index {tuple(k)} does not have length {s}")
        idx = np.array([tuple(k) for k, _ in items], dtype=np.int64).reshape(-1, s)
        return cls(s, idx, np.array([c for _, c in items], dtype=float))

    def __len__(self):
        return self.coefs.shape[0]

    def coefficient(self, k):
        hit = np.all(self.indices == np.asarray(k), axis=1)
        return float(self.coefs[hit][0]) if hit.any() else 0.0

    def to_list(self):
        return [{"k": [int(v) for v in k], "coef": float(c)} for k, c in zip(self.indices, self.coefs)]

    @classmethod
    def from_list(cls, items, s=None):
        if not items:
            raise ValidationError("series file holds no terms")
        s = len(items[0]["k"]) if s is None else s
        return cls.from_terms(s, [(tuple(t["k"]), float(t["coef"])) for t in items])


def load_series(path, s=None):
    with open(path) as fh:
        return HermiteSeries.from_list(json.load(fh), s)


def dump_series(series, path):
    with open(path, "w") as fh:
        json.dump(series.to_list(), fh)


def _check_series(space, f):
    if f.s != space.s:
        raise ValidationError(f"series dimension {f.s} does not match space dimension {space.s}")


def series_norm_squared(space, f):
    _check_series(space, f)
    if len(f) == 0:
        return 0.0
    expo = exponent_weight(space, f.indices)
    # coef^2 * omega^(-|k|) in log space to avoid overflow of omega^(-|k|)
    with np.errstate(divide="ignore"):
        logs = 2.0 * np.log(np.abs(f.coefs)) - expo * math.log(space.omega)
    return math.fsum(np.exp(logs[np.isfinite(logs)]))


def series_norm(space: WeightedSpace, f: HermiteSeries) -> float:
    """Norm of a finite series: sqrt(sum_k coef_k^2 omega^(-|k|_{a,b}))."""
    return math.sqrt(series_norm_squared(space, f))


def series_inner(space, f, g):
    """Inner product sum_k f_k g_k / r(k) over the common support."""
    _check_series(space, f)
    _check_series(space, g)
    g_map = {tuple(k): c for k, c in zip(g.indices.tolist(), g.coefs)}
    acc = 0.0
    for k, c in zip(f.indices.tolist(), f.coefs):
        other = g_map.get(tuple(k))
        if other is not None:
            acc += c * other / coefficient_weight(space, k)
    return acc


def series_eval(f: HermiteSeries, x) -> float:
    """Pointwise value sum_k coef_k H_k(x)."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != f.s:
        raise ValidationError(f"point of length {x.shape[0]} for a series in dimension {f.s}")
    if len(f) == 0:
        return 0.0
    prod = f.coefs.copy()
    for j in range(f.s):
        col = f.indices[:, j]
        table = hermite_eval_all(int(col.max()), x[j])
        prod = prod * table[col]
    return math.fsum(prod)


def series_integral(f: HermiteSeries) -> float:
    """Gaussian integral of the series, i.e. its coefficient at k = 0."""
    return f.coefficient(np.zeros(f.s, dtype=np.int64))


# ---------------------------------------------------------------------------
# kernel


def weight_term(a, b, omega, k):
    """omega ** (a k ** b); underflows to 0 instead of raising for huge exponents."""
    with np.errstate(over="ignore", under="ignore"):
        val = np.exp(a * np.power(np.asarray(k, dtype=float), b) * math.log(omega))
    return float(val) if val.ndim == 0 else val


def tail_sum_bound(a, b, omega, K):
    """Upper bound on sum_{k > K} omega**(a k**b) (the geometric tail lemma)."""
    return weight_term(a, b, omega, K + 1) / (1.0 - omega**a)


def truncation_index(a, b, omega, tau, scale=1.0):
    """Smallest K >= 0 with scale * tail_sum_bound(a, b, omega, K) <= tau."""
    if tau <= 0:
        raise ValidationError(f"tolerance must be positive, got {tau!r}")
    target = math.log(tau * (1.0 - omega**a) / scale)
    if target >= 0:
        return 0
    # need a (K+1)^b log(omega) <= target
    K = max(0, math.ceil((target / (a * math.log(omega))) ** (1.0 / b)) - 1)
    while scale * tail_sum_bound(a, b, omega, K) > tau:
        K += 1
    if K > MAX_SERIES_TERMS:
        raise ConvergenceError(f"kernel series needs {K} terms; omega too close to 1 for tolerance {tau:g}")
    return K


def univariate_kernel_matrix(a, b, omega, x, y, tau):
    """Truncated one-dimensional kernel between point sets ``x`` and ``y``.

    Returns ``(values, bounds)`` where ``bounds[i, i']`` certifies the
    absolute truncation error of ``values[i, i']``; every bound is <= ``tau``.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    y = np.asarray(y, dtype=float).reshape(-1)
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValidationError("kernel arguments must be finite")
    cx = CRAMER_CONST * np.exp(x**2 / 4.0)
    cy = CRAMER_CONST * np.exp(y**2 / 4.0)
    K = truncation_index(a, b, omega, tau, scale=float(cx.max() * cy.max()))
    w = weight_term(a, b, omega, np.arange(K + 1))
    hx = hermite_eval_all(K, x)
    hy = hermite_eval_all(K, y)
    values = (hx * w[:, None]).T @ hy
    bounds = np.outer(cx, cy) * tail_sum_bound(a, b, omega, K)
    return values, bounds


def _product_error(values, bounds):
    """Bound on |prod(v_j + e_j) - prod(v_j)| given |e_j| <= bounds_j (along axis 0)."""
    return np.prod(np.abs(values) + bounds, axis=0) - np.prod(np.abs(values), axis=0)


def kernel_eval(space: WeightedSpace, x, y, tol: float = 1e-12, return_bound: bool = False):
    """Reproducing kernel K_{s,a,b,omega}(x, y) with absolute error <= ``tol``.

    The kernel factorizes over coordinates; each univariate series is cut
    where Cramer's bound on |H_k(x_j) H_k(y_j)| times the geometric tail
    lemma falls below the per-dimension budget, and the budget is tightened
    until the certified error of the product is at most ``tol``.
    """
    if not tol > 0:
        raise ValidationError(f"tolerance must be positive, got {tol!r}")
    x = np.asarray(x, dtype=float).reshape(-1)
    y = np.asarray(y, dtype=float).reshape(-1)
    if x.shape[0] != space.s or y.shape[0] != space.s:
        raise ValidationError(f"kernel arguments must have length {space.s}")
    tau = tol / space.s
    for _ in range(60):
        vals, errs = [], []
        for j in range(space.s):
            v, e = univariate_kernel_matrix(space.a[j], space.b[j], space.omega, x[j], y[j], tau)
            vals.append(v[0, 0])
            errs.append(e[0, 0])
        bound = float(_product_error(np.array(vals), np.array(errs)))
        if bound <= tol:
            value = float(math.prod(vals))
            return (value, bound) if return_bound else value
        tau /= 4.0
    raise ConvergenceError("kernel tolerance could not be met")


# ---------------------------------------------------------------------------
# regime diagnostics


@dataclass(frozen=True)
class RegimeSummary:
    """Finite-prefix quantities governing convergence rates and tractability.

    ``growth`` holds a_j 2^{b_j} for j <= s (possibly ``inf`` for huge b_j).
    """

    B_s: float
    A_s: float
    p_star_s: float
    growth: tuple
    running_min_growth: tuple
    growth_condition_prefix: Optional[bool] = None
    growth_condition_all_j: Optional[bool] = None

    def to_dict(self):
        return {
            "B_s": self.B_s,
            "A_s": self.A_s,
            "p_star_s": self.p_star_s,
            "growth": list(self.growth),
            "running_min_growth": list(self.running_min_growth),
            "growth_condition_prefix": self.growth_condition_prefix,
            "growth_condition_all_j": self.growth_condition_all_j,
        }


def log_growth(a, b):
    """log(a 2^b), safe for large b."""
    return math.log(a) + b * LOG2


def growth_condition_prefix(space, beta, eta):
    """Whether a_j 2^{b_j} >= beta j^{1+eta} holds for every j <= s."""
    _check_beta_eta(beta, eta)
    return all(
        log_growth(a, b) >= math.log(beta) + (1.0 + eta) * math.log(j)
        for j, (a, b) in enumerate(zip(space.a, space.b), start=1)
    )


def _check_beta_eta(beta, eta):
    if not (beta > 0 and eta > 0):
        raise ValidationError(f"growth condition needs beta > 0 and eta > 0, got beta={beta}, eta={eta}")


def growth_condition_all(space, beta, eta):
    """Decide a_j 2^{b_j} >= beta j^{1+eta} for *all* j >= 1.

    Only decidable when both sequences are power generators; returns None for
    explicit lists.  With ``u = log j`` the log-margin

        g(u) = log(alpha_a) + gamma_a u + log(2) alpha_b e^{gamma_b u} - log(beta) - (1+eta) u

    is convex in ``u``, so its minimum over integers j sits next to the
    stationary point and a handful of evaluations settle the question.
    """
    _check_beta_eta(beta, eta)
    if not (space.a_seq.is_generator and space.b_seq.is_generator):
        return None
    al, ga = space.a_seq.alpha, space.a_seq.gamma
    bl, gb = space.b_seq.alpha, space.b_seq.gamma

    def g(u):
        return math.log(al) + ga * u + LOG2 * bl * math.exp(gb * u) - math.log(beta) - (1.0 + eta) * u

    slope0 = ga - (1.0 + eta)
    if gb == 0.0:
        if slope0 < 0:
            return False
        return g(0.0) >= 0
    ratio = -slope0 / (LOG2 * bl * gb)
    if ratio <= 1.0:
        # g is non-decreasing for u >= 0
        return g(0.0) >= 0
    u0 = math.log(ratio) / gb
    if u0 > 700:
        return g(u0) >= 0
    j_lo = max(1, math.floor(math.exp(u0)))
    return min(g(math.log(j_lo)), g(math.log(j_lo + 1))) >= 0


def regime_summary(space: WeightedSpace, beta=None, eta=None) -> RegimeSummary:
    """B(s), p*(s) = 1/B(s), A_s = sum 1/(a_j 2^{b_j}) and growth diagnostics."""
    B = math.fsum(1.0 / b for b in space.b)
    logs = [log_growth(a, b) for a, b in zip(space.a, space.b)]
    A = math.fsum(math.exp(-v) for v in logs)
    growth = tuple(math.exp(v) if v < 709 else math.inf for v in logs)
    running = tuple(np.minimum.accumulate(growth).tolist())
    prefix = all_j = None
    if beta is not None and eta is not None:
        prefix = growth_condition_prefix(space, beta, eta)
        all_j = growth_condition_all(space, beta, eta)
    return RegimeSummary(B, A, 1.0 / B, growth, running, prefix, all_j)
