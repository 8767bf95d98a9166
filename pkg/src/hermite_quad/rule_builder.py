"""Order schedules for product Gauss-Hermite rules with a guaranteed error.

Three constructive schedules pick the per-coordinate orders m_j so that the
closed-form product bound certifies ``e <= epsilon``:

``uexp``
    one global level m from the largest coordinate requirement, spread as
    m_j = floor(m ** (1 / (B(s) b_j))) with B(s) = sum_{j<=s} 1/b_j.
``ecspt``
    per-coordinate budgets proportional to 6 / (pi^2 j^2).
``ecwt``
    per-coordinate budgets proportional to 1 / (A a_j 2^{b_j}) with
    A = sum_j 1 / (a_j 2^{b_j}).

A greedy search over order vectors gives a measured upper bound on the
information complexity, and :func:`rate_estimate` fits e ~ C q^(n^p).
"""

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import curve_fit

from ._parallel import pmap
from .errors import BudgetError, CertificationError, ValidationError
from .hermite_space import WeightedSpace, growth_condition_all, log_growth, regime_summary
from .wce import SQRT_8PI, log_one_dim_bound, product_bound, product_gh_wce

SCHEMES = ("uexp", "ecspt", "ecwt")
#: relative distance below which a float is treated as the integer it rounds to
SNAP = 1e-9


@dataclass(frozen=True)
class SchedulePlan:
    """Order vector with the bound that certifies it."""

    scheme: str
    epsilon: float
    m: tuple
    guaranteed_e: float
    n_total: int
    measured_e: Optional[float] = None
    inputs: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "scheme": self.scheme,
            "epsilon": self.epsilon,
            "m": list(self.m),
            "n_total": self.n_total,
            "guaranteed_e": self.guaranteed_e,
            "measured_e": self.measured_e,
            "inputs": self.inputs,
        }

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)


def snapped_floor(x):
    r = round(x)
    return int(r) if abs(x - r) <= SNAP * max(1.0, abs(x)) else math.floor(x)


def snapped_ceil(x):
    r = round(x)
    return int(r) if abs(x - r) <= SNAP * max(1.0, abs(x)) else math.ceil(x)


def _check_eps(epsilon):
    if not 0.0 < epsilon < 1.0:
        raise ValidationError(f"epsilon must lie in (0, 1), got {epsilon!r}")


def _constant(omega):
    return SQRT_8PI / (1.0 - omega**2)


def measure(space, m, epsilon):
    """Certified measured error sqrt(e^2 + tail) with tail budget epsilon^2 / 100."""
    return product_gh_wce(space, m, tol=epsilon**2 / 100.0).e_upper


def _finish(space, scheme, epsilon, m, inputs, with_measure):
    m = tuple(int(v) for v in m)
    bound = product_bound(space, m)
    guaranteed = math.sqrt(bound)
    if guaranteed > epsilon * (1.0 + 1e-12):
        raise CertificationError(
            f"{scheme} plan {m} only guarantees e <= {guaranteed:.6g} > epsilon = {epsilon:g}"
        )
    measured = measure(space, m, epsilon) if with_measure else None
    return SchedulePlan(scheme, epsilon, m, guaranteed, math.prod(m), measured, inputs)


def uexp_orders(space, epsilon):
    """Orders of the uniform-exponential schedule; returns (m_vector, global_m, B_s)."""
    s, omega = space.s, space.omega
    B = regime_summary(space).B_s
    inner = math.log(_constant(omega) * s / math.log1p(epsilon**2)) / math.log(1.0 / omega)
    m = max(snapped_ceil((inner / a) ** B) for a in space.a)
    m = max(m, 1)
    mj = [max(1, snapped_floor(m ** (1.0 / (B * b)))) for b in space.b]
    return mj, m, B


def build_uexp(space: WeightedSpace, epsilon: float, measure_error: bool = True) -> SchedulePlan:
    """Schedule m = max_j ceil((log(C s / log(1+eps^2)) / (a_j log(1/omega)))^B(s)),
    m_j = floor(m^(1/(B(s) b_j))), with C = sqrt(8 pi) / (1 - omega^2)."""
    _check_eps(epsilon)
    mj, m, B = uexp_orders(space, epsilon)
    return _finish(space, "uexp", epsilon, mj, {"m": m, "B_s": B}, measure_error)


def _per_coordinate_order(a, b, omega, log_target):
    """ceil((log_target / (a 2^b log(1/omega)))^(1/b)), clamped to >= 1.

    ``log_target`` is the log of C / budget_j; a non-positive value means the
    order-1 rule already meets the budget.
    """
    if log_target <= 0:
        return 1
    log_base = math.log(log_target) - log_growth(a, b) - math.log(math.log(1.0 / omega))
    return max(1, snapped_ceil(math.exp(log_base / b)))


def _check_budgets(space, mj, log_budgets):
    for j, ((a, b), m, lb) in enumerate(zip(zip(space.a, space.b), mj, log_budgets), start=1):
        if log_one_dim_bound(a, b, space.omega, m) > lb + 1e-12:
            raise CertificationError(f"coordinate {j}: order {m} misses its budget exp({lb:.6g})")


def ecspt_orders(space, epsilon):
    omega = space.omega
    c = _constant(omega) * (math.pi**2 / 6.0) / math.log1p(epsilon**2)
    return [
        _per_coordinate_order(a, b, omega, math.log(c * j * j))
        for j, (a, b) in enumerate(zip(space.a, space.b), start=1)
    ]


def build_ecspt(space: WeightedSpace, epsilon: float, measure_error: bool = True) -> SchedulePlan:
    """Schedule with per-coordinate budgets (6 / pi^2) log(1+eps^2) / j^2."""
    _check_eps(epsilon)
    mj = ecspt_orders(space, epsilon)
    # per-coordinate certificate, then the product bound in _finish
    lg = math.log(6.0 / math.pi**2 * math.log1p(epsilon**2))
    _check_budgets(space, mj, [lg - 2.0 * math.log(j) for j in range(1, space.s + 1)])
    return _finish(space, "ecspt", epsilon, mj, {}, measure_error)


def ecwt_constant(space: WeightedSpace, beta: float, eta: float) -> float:
    """A = sum_{j>=1} 1/(a_j 2^{b_j}) bounded by prefix sum + integral tail.

    Requires generator sequences for which a_j 2^{b_j} >= beta j^(1+eta)
    holds for every j; then sum_{j>s} <= int_s^inf dt / (beta t^(1+eta))
    = s^(-eta) / (beta eta).
    """
    holds = growth_condition_all(space, beta, eta)
    if holds is None:
        raise ValidationError("A cannot be derived for explicit weight lists; supply it")
    if not holds:
        raise ValidationError(
            f"a_j 2^b_j >= {beta} j^(1+{eta}) fails for some j; A cannot be bounded this way"
        )
    prefix = regime_summary(space).A_s
    return prefix + space.s ** (-eta) / (beta * eta)


def ecwt_orders(space, epsilon, A):
    omega = space.omega
    c = _constant(omega) * A / math.log1p(epsilon**2)
    return [
        _per_coordinate_order(a, b, omega, math.log(c) + log_growth(a, b))
        for a, b in zip(space.a, space.b)
    ]


def build_ecwt(
    space: WeightedSpace,
    epsilon: float,
    A: Optional[float] = None,
    beta: Optional[float] = None,
    eta: Optional[float] = None,
    measure_error: bool = True,
) -> SchedulePlan:
    """Schedule with per-coordinate budgets log(1+eps^2) / (A a_j 2^{b_j}).

    ``A`` may be given directly; otherwise it is derived from ``beta`` and
    ``eta`` via :func:`ecwt_constant` (generator sequences only).
    """
    _check_eps(epsilon)
    if A is None:
        if beta is None or eta is None:
            raise ValidationError("build_ecwt needs A, or beta and eta to derive it")
        A = ecwt_constant(space, beta, eta)
        source = "derived"
    else:
        source = "supplied"
    if not A > 0:
        raise ValidationError(f"A must be positive, got {A!r}")
    mj = ecwt_orders(space, epsilon, A)
    lg = math.log(math.log1p(epsilon**2) / A)
    _check_budgets(space, mj, [lg - log_growth(a, b) for a, b in zip(space.a, space.b)])
    return _finish(space, "ecwt", epsilon, mj, {"A": A, "A_source": source}, measure_error)


def build_plan(space, scheme, epsilon, **kwargs):
    if scheme == "uexp":
        return build_uexp(space, epsilon)
    if scheme == "ecspt":
        return build_ecspt(space, epsilon)
    if scheme == "ecwt":
        return build_ecwt(space, epsilon, **kwargs)
    raise ValidationError(f"unknown scheme {scheme!r}; choose from {SCHEMES}")


# ---------------------------------------------------------------------------
# greedy search


def information_complexity_upper(space: WeightedSpace, epsilon: float, search_budget: int = 10_000):
    """Greedy search for a small product rule with measured error <= epsilon.

    Starting from all-ones, each step tries ``m + e_j`` for every j and keeps
    the candidate with the largest drop in log error per unit of log point
    count (ties go to the lowest j).  Errors are certified via
    :func:`measure`.

    Returns
    -------
    (n, m) : tuple of int and tuple

    Raises
    ------
    BudgetError
        When ``search_budget`` candidate evaluations are used up; ``best``
        holds the current ``(n, m, e)``.
    """
    _check_eps(epsilon)
    m = [1] * space.s
    e = measure(space, m, epsilon)
    used = 1
    while e > epsilon:
        if used + space.s > search_budget:
            raise BudgetError(
                f"budget of {search_budget} evaluations exhausted at m={tuple(m)}, e={e:.3e}",
                best=(math.prod(m), tuple(m), e),
            )
        cands = [tuple(m[:j] + [m[j] + 1] + m[j + 1 :]) for j in range(space.s)]
        errs = pmap(lambda c: measure(space, c, epsilon), cands)
        used += space.s
        best_j, best_score = 0, -math.inf
        for j, ce in enumerate(errs):
            gain = math.inf if ce == 0 else math.log(e) - math.log(ce)
            score = gain / math.log((m[j] + 1) / m[j])
            if score > best_score:
                best_j, best_score = j, score
        m[best_j] += 1
        e = errs[best_j]
    return math.prod(m), tuple(m)


# ---------------------------------------------------------------------------
# rate fitting


def rate_estimate(errors):
    """Fit e ~ C q^(n^p) to ``(n, e)`` pairs; diagnostic only.

    The model is linear after a double log, ``log log(C/e) = p log n + c``.
    The fit uses the tail half of the data: a least-squares fit of
    ``log e = log C - exp(c) n^p`` started from the ``C = 1`` linearization.

    Returns
    -------
    (p_hat, q_hat, C_hat)
    """
    pts = sorted((float(n), float(e)) for n, e in errors)
    if len(pts) < 4:
        raise ValidationError("rate_estimate needs at least 4 points")
    ns = np.array([p[0] for p in pts])
    es = np.array([p[1] for p in pts])
    if np.any(es <= 0) or np.any(np.diff(es) >= 0) or np.any(np.diff(ns) <= 0):
        raise ValidationError("errors must be positive and strictly decreasing in n")
    tail = slice(len(pts) // 2, None)
    ln, le = np.log(ns[tail]), np.log(es[tail])

    if np.any(le >= 0):
        # C = 1 linearization needs e < 1; shift C above the data
        log_c0 = float(le.max()) + 1.0
    else:
        log_c0 = 0.0
    p0, c0 = np.polyfit(ln, np.log(log_c0 - le), 1)
    log_c, p, c = log_c0, p0, c0
    if len(ln) >= 3:
        def model(x, lc, pp, cc):
            return lc - np.exp(pp * x + cc)

        try:
            with np.errstate(over="ignore", invalid="ignore"):
                fit, _ = curve_fit(model, ln, le, p0=(log_c0, p0, c0), maxfev=20_000)
            # keep the linearization when the refinement wanders off
            if np.all(np.isfinite(fit)) and abs(fit[0]) < 700 and abs(fit[2]) < 700:
                log_c, p, c = fit
        except RuntimeError:
            pass
    q = math.exp(-math.exp(c))
    return float(p), q, math.exp(log_c)
