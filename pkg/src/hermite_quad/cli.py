"""Command-line front end.

Every subcommand writes JSON (or CSV for ``sweep``) to stdout or ``--out``.
Exit codes: 0 on success, 2 for invalid input, 3 when a numerical procedure
fails to converge, certify or finish within its budget.
"""

import argparse
import csv
import io
import json
import math
import sys

from . import rule_builder
from .errors import HermiteQuadError, ValidationError
from .gauss_hermite import apply_product_rule, gh_rule, product_rule
from .hermite_space import WeightedSpace, load_space, regime_summary, series_norm
from .lower_bounds import best_lower_bound, ecwt_necessity_diagnostic, lower_bound
from .testfns import appendixB_norm_squared, by_name
from .wce import general_wce, product_bound, product_gh_wce, product_gh_wce_relative

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ValidationError(message)


def fmt(x):
    """Shortest text that re-parses to the same double (17 significant digits)."""
    return format(x, ".17g")


def _parse_space(value):
    if value.lstrip().startswith("{"):
        try:
            return WeightedSpace.from_dict(json.loads(value))
        except json.JSONDecodeError as exc:
            raise ValidationError(f"inline space is not valid JSON: {exc}") from None
    try:
        return load_space(value)
    except OSError as exc:
        raise ValidationError(f"cannot read space file {value!r}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"space file {value!r} is not valid JSON: {exc}") from None


def _int_list(text):
    try:
        out = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ValidationError(f"expected comma-separated integers, got {text!r}") from None
    if not out:
        raise ValidationError("empty integer list")
    return out


def _float_list(text):
    try:
        out = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ValidationError(f"expected comma-separated numbers, got {text!r}") from None
    if not out:
        raise ValidationError("empty grid")
    return out


def _orders(space, text):
    m = _int_list(text)
    if len(m) == 1 and space.s > 1:
        m = m * space.s
    return tuple(m)


def _emit(args, text):
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(args, obj):
    _emit(args, json.dumps(obj, indent=2) + "\n")


def _plan(args, space, eps):
    kwargs = {}
    if args.scheme == "ecwt":
        kwargs = {"A": args.A, "beta": args.beta, "eta": args.eta}
    return rule_builder.build_plan(space, args.scheme, eps, **kwargs)


# ---------------------------------------------------------------------------
# subcommands


def cmd_nodes(args):
    rule = gh_rule(args.n)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["node", "weight"])
        for x, a in zip(rule.nodes, rule.weights):
            w.writerow([fmt(float(x)), fmt(float(a))])
        _emit(args, buf.getvalue())
    else:
        _emit_json(args, rule.to_dict())


def cmd_wce(args):
    space = _parse_space(args.space)
    m = _orders(space, args.m)
    if args.method == "general":
        report = general_wce(space, *product_rule(m).grid(), tol=args.tol)
    else:
        report = product_gh_wce(space, m, tol=args.tol)
    out = report.to_dict()
    out["m"] = list(m)
    out["n_total"] = math.prod(m)
    _emit_json(args, out)


def cmd_plan(args):
    space = _parse_space(args.space)
    eps = _float_list(args.eps)
    if len(eps) != 1:
        raise ValidationError("plan takes a single epsilon; use sweep for grids")
    _emit_json(args, _plan(args, space, eps[0]).to_dict())


def _check_grid(grid, increasing):
    if not grid:
        raise ValidationError("empty grid")
    pairs = list(zip(grid, grid[1:]))
    if increasing and any(y <= x for x, y in pairs):
        raise ValidationError("n grid must be strictly increasing")
    if not increasing and any(y >= x for x, y in pairs):
        raise ValidationError("epsilon grid must be strictly decreasing")


def _lower(space, n):
    # cap large enough that prod(t_j + 1) > n is reachable
    cap = max(16, math.ceil(n ** (1.0 / space.s)))
    return best_lower_bound(space, n, cap).bound


def sweep_rows(space, scheme_args, eps_grid=None, n_grid=None, tol=1e-6):
    """Rows of a convergence sweep as dictionaries of floats and ints.

    On an n grid ``tol`` is the tail budget relative to e^2.
    """
    rows = []
    if n_grid is not None:
        _check_grid(n_grid, increasing=True)
        for g in n_grid:
            m = (int(g),) * space.s
            # tail budget relative to e^2 so small errors stay resolved
            rep = product_gh_wce_relative(space, m, rel=min(tol, 1e-6))
            rows.append(
                {"epsilon_or_n": int(g), "m": m, "e_measured": rep.e_upper,
                 "e_bound": math.sqrt(product_bound(space, m))}
            )
    else:
        _check_grid(eps_grid, increasing=False)
        for eps in eps_grid:
            plan = _plan(scheme_args, space, eps)
            rows.append(
                {"epsilon_or_n": eps, "m": plan.m, "e_measured": plan.measured_e,
                 "e_bound": plan.guaranteed_e}
            )
    for r in rows:
        r["s"] = space.s
        r["n_total"] = math.prod(r["m"])
        r["lower_bound"] = _lower(space, r["n_total"])
    try:
        p_hat = rule_builder.rate_estimate([(r["n_total"], r["e_measured"]) for r in rows])[0]
    except ValidationError:
        p_hat = None
    for r in rows:
        r["p_hat"] = p_hat
    return rows


def sweep_csv(rows, s):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["s", "epsilon_or_n"] + [f"m{j}" for j in range(1, s + 1)]
               + ["n_total", "e_measured", "e_bound", "lower_bound", "p_hat"])
    for r in rows:
        eps = r["epsilon_or_n"]
        w.writerow(
            [r["s"], eps if isinstance(eps, int) else fmt(eps)]
            + list(r["m"])
            + [r["n_total"], fmt(r["e_measured"]), fmt(r["e_bound"]), fmt(r["lower_bound"]),
               "" if r["p_hat"] is None else fmt(r["p_hat"])]
        )
    return buf.getvalue()


def cmd_sweep(args):
    space = _parse_space(args.space)
    if (args.eps is None) == (args.n is None):
        raise ValidationError("sweep needs exactly one of --eps or --n")
    if args.n is not None:
        rows = sweep_rows(space, args, n_grid=_int_list(args.n), tol=args.tol)
    else:
        rows = sweep_rows(space, args, eps_grid=_float_list(args.eps))
    if args.format == "json":
        for r in rows:
            r["m"] = list(r["m"])
        _emit_json(args, rows)
    else:
        _emit(args, sweep_csv(rows, space.s))


def _norm(space, f):
    if f.kind == "appendixB":
        try:
            return math.sqrt(appendixB_norm_squared(space))
        except ValidationError:
            return None
    if f.series is not None:
        return series_norm(space, f.series)
    return None


def cmd_integrate(args):
    space = _parse_space(args.space)
    if args.m is not None:
        m = _orders(space, args.m)
        e = product_gh_wce(space, m, tol=args.tol).e_upper
    elif args.eps is not None:
        plan = _plan(args, space, _float_list(args.eps)[0])
        m, e = plan.m, plan.measured_e
    else:
        raise ValidationError("integrate needs --m or --scheme/--eps")
    f = by_name(args.function, space.s)
    value = apply_product_rule(product_rule(m), f.evaluate, vectorized=True)
    norm = _norm(space, f)
    _emit_json(
        args,
        {
            "function": args.function,
            "m": list(m),
            "n_total": math.prod(m),
            "value": value,
            "exact": f.exact_integral,
            "error": abs(value - f.exact_integral),
            "worst_case_error": e,
            "norm": norm,
            "certified_bound": None if norm is None else e * norm,
        },
    )


def cmd_lower_bound(args):
    space = _parse_space(args.space)
    if args.t is not None:
        res = lower_bound(space, _int_list(args.t))
    elif args.n is not None:
        res = best_lower_bound(space, args.n, args.t_cap)
    else:
        raise ValidationError("lower-bound needs --n or --t")
    _emit_json(args, res.to_dict())


def cmd_regime(args):
    space = _parse_space(args.space)
    out = regime_summary(space, args.beta, args.eta).to_dict()
    out["ecwt_necessity"] = ecwt_necessity_diagnostic(space)
    _emit_json(args, out)


# ---------------------------------------------------------------------------


def build_parser():
    p = _Parser(prog="hermite-quad", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, space=True):
        if space:
            sp.add_argument("--space", required=True, help="space JSON file or inline JSON object")
        sp.add_argument("--out", help="write output here instead of stdout")
        sp.add_argument("--tol", type=float, default=1e-14, help="truncation tolerance")

    def scheme_opts(sp, required):
        sp.add_argument("--scheme", choices=rule_builder.SCHEMES, required=required, default=None)
        sp.add_argument("--A", type=float, help="ecwt: supplied constant A")
        sp.add_argument("--beta", type=float)
        sp.add_argument("--eta", type=float)

    sp = sub.add_parser("nodes", help="print a Gauss-Hermite rule")
    sp.add_argument("n", type=int)
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    common(sp, space=False)
    sp.set_defaults(func=cmd_nodes)

    sp = sub.add_parser("wce", help="worst-case error of a product rule")
    common(sp)
    sp.add_argument("--m", required=True, help="orders m_1,...,m_s (one value is broadcast)")
    sp.add_argument("--method", choices=("product", "general"), default="product")
    sp.set_defaults(func=cmd_wce)

    sp = sub.add_parser("plan", help="order schedule for a target error")
    common(sp)
    scheme_opts(sp, required=True)
    sp.add_argument("--eps", required=True)
    sp.set_defaults(func=cmd_plan)

    sp = sub.add_parser("sweep", help="convergence table over an epsilon or n grid")
    common(sp)
    scheme_opts(sp, required=False)
    sp.add_argument("--eps", help="comma-separated decreasing epsilons (needs --scheme)")
    sp.add_argument("--n", help="comma-separated increasing orders g, rule m = (g,...,g)")
    sp.add_argument("--format", choices=("json", "csv"), default="csv")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("integrate", help="apply a product rule to a test function")
    common(sp)
    scheme_opts(sp, required=False)
    sp.add_argument("--m")
    sp.add_argument("--eps")
    sp.add_argument("--function", required=True, help="appendixB, hermite:k, monomial:d or series:path")
    sp.set_defaults(func=cmd_integrate)

    sp = sub.add_parser("lower-bound", help="lower bound on the n-th minimal error")
    common(sp)
    sp.add_argument("--n", type=int)
    sp.add_argument("--t", help="explicit t_1,...,t_s")
    sp.add_argument("--t-cap", type=int, default=16)
    sp.set_defaults(func=cmd_lower_bound)

    sp = sub.add_parser("regime", help="rate and tractability diagnostics of a space")
    common(sp)
    sp.add_argument("--beta", type=float)
    sp.add_argument("--eta", type=float)
    sp.set_defaults(func=cmd_regime)
    return p


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        if args.command == "sweep" and args.eps is not None and args.scheme is None:
            raise ValidationError("sweep over epsilon needs --scheme")
        args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except HermiteQuadError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
