"""Lower bounds on the n-th minimal worst-case error.

For any t in N^s and any linear rule with n < prod_j (t_j + 1) points,

    e(n, s) >= omega^(sum_j a_j (2 t_j)^b_j) / prod_j (4^t_j * 2 * (t_j + 1)^2).

The bound underflows quickly, so it is carried in log space.
"""

import itertools
import math
from dataclasses import asdict, dataclass
from typing import Optional

from .errors import ValidationError
from .hermite_space import WeightedSpace, log_growth

LOG4 = math.log(4.0)
LOG2 = math.log(2.0)


@dataclass(frozen=True)
class LowerBoundResult:
    t: tuple
    log_bound: float
    valid_for_n_below: int

    @property
    def bound(self):
        """The bound itself; may underflow to 0.0 even though it is positive."""
        return math.exp(self.log_bound)

    def to_dict(self):
        d = asdict(self)
        d["t"] = list(self.t)
        d["bound"] = self.bound
        return d


def _log_bound(space, t):
    log_omega = math.log(space.omega)
    acc = []
    for (a, b), tj in zip(zip(space.a, space.b), t):
        acc.append(a * math.exp(b * math.log(2.0 * tj)) * log_omega)
        acc.append(-(tj * LOG4 + LOG2 + 2.0 * math.log(tj + 1.0)))
    return math.fsum(acc)


def lower_bound(space: WeightedSpace, t) -> LowerBoundResult:
    """Lower bound on e(n, s) valid for every n < prod_j (t_j + 1)."""
    t = tuple(t)
    if len(t) != space.s:
        raise ValidationError(f"t has length {len(t)}, space dimension is {space.s}")
    if any(int(v) != v or v < 1 for v in t):
        raise ValidationError(f"every t_j must be a positive integer, got {t}")
    t = tuple(int(v) for v in t)
    return LowerBoundResult(t, _log_bound(space, t), math.prod(v + 1 for v in t))


def best_lower_bound(space: WeightedSpace, n: int, t_cap: int = 16) -> LowerBoundResult:
    """Largest lower bound over t with prod(t_j + 1) > n and t_j <= t_cap.

    The bound strictly decreases in every t_j, so a maximizer has its last
    coordinate as small as feasibility allows; enumerating the first s-1
    coordinates and completing the last one minimally visits every
    maximizer.  Ties go to the lexicographically smallest t.
    """
    if int(n) != n or n < 1:
        raise ValidationError(f"n must be a positive integer, got {n!r}")
    if int(t_cap) != t_cap or t_cap < 1:
        raise ValidationError(f"t_cap must be a positive integer, got {t_cap!r}")
    best: Optional[LowerBoundResult] = None
    for head in itertools.product(range(1, t_cap + 1), repeat=space.s - 1):
        prod_head = math.prod(v + 1 for v in head)
        last = max(1, n // prod_head)  # smallest t with prod_head * (t + 1) > n
        if last > t_cap:
            continue
        res = lower_bound(space, head + (last,))
        if best is None or res.log_bound > best.log_bound or (
            res.log_bound == best.log_bound and res.t < best.t
        ):
            best = res
    if best is None:
        raise ValidationError(f"no t with entries <= {t_cap} satisfies prod(t_j + 1) > {n}")
    return best


def ecwt_necessity_diagnostic(space: WeightedSpace, declared_bounded: Optional[bool] = None) -> dict:
    """Report whether a_j 2^{b_j} is bounded and the resulting obstruction.

    When bounded by A, the all-ones choice of t gives e(n, s) >= eta^s for
    n < 2^s with eta = omega^A / 64, so n(eta^s / 2, s) >= 2^s.  A is taken
    as the maximum over the first s coordinates.  Boundedness is read off the
    generators; explicit lists report "unknown" unless ``declared_bounded``
    is given.
    """
    a_b, b_b = space.a_seq.is_bounded(), space.b_seq.is_bounded()
    if declared_bounded is not None:
        bounded = bool(declared_bounded)
    elif a_b is None or b_b is None:
        bounded = None
    else:
        bounded = a_b and b_b
    report = {"bounded": {True: "yes", False: "no", None: "unknown"}[bounded], "A": None, "eta": None, "obstruction": None}
    if bounded:
        log_A = max(log_growth(a, b) for a, b in zip(space.a, space.b))
        A = math.exp(log_A) if log_A < 709 else math.inf
        eta = math.exp(A * math.log(space.omega)) / 64.0
        report.update(
            A=A,
            eta=eta,
            obstruction={
                "epsilon": eta**space.s / 2.0,
                "n_min": 2**space.s,
                "statement": f"n(eta^s/2, s) >= 2^s = {2 ** space.s}",
            },
        )
    return report
