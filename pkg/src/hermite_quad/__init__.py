"""Gauss-Hermite product rules and their worst-case errors in Hermite spaces
of analytic functions."""

from .errors import (
    BudgetError,
    CertificationError,
    ConvergenceError,
    HermiteQuadError,
    ValidationError,
)
from .gauss_hermite import (
    ProductRule,
    QuadratureRule,
    apply_product_rule,
    apply_rule,
    gaussian_moment,
    gh_rule,
    product_rule,
)
from .hermite import hermite_eval, hermite_eval_all, hermite_eval_multi, triple_product_integral
from .hermite_space import (
    HermiteSeries,
    WeightedSpace,
    WeightSequence,
    kernel_eval,
    load_space,
    make_space,
    regime_summary,
    series_norm,
)
from .lower_bounds import LowerBoundResult, best_lower_bound, ecwt_necessity_diagnostic, lower_bound
from .rule_builder import (
    SchedulePlan,
    build_ecspt,
    build_ecwt,
    build_uexp,
    information_complexity_upper,
    rate_estimate,
)
from .wce import ErrorReport, general_wce, one_dim_gh_wce, product_gh_wce

__version__ = "0.1.0"
