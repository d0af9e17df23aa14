"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical or domain
error. Diagnostics are one line on standard error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .classifiers import ForestConfig, LinearSearchConfig, TreeConfig, optimize_linear
from .data import PREPROCESS_MODES, Dataset, load_csv, load_predictions, write_csv
from .errors import DataError, DomainError, ExtremalRiskError, ParameterError
from .evaluation import SCHEMA_VERSION, parse_learner, run_cv
from .prob import RngStream, empirical_quantile
from .risk import empirical_risk
from .scenarios import SCENARIO_KINDS, ScenarioSpec, generate
from .tail import select_features


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _probability(text: str) -> float:
    v = float(text)
    if not 0 < v < 1:
        raise argparse.ArgumentTypeError(f"expected a value in (0, 1), got {text}")
    return v


def _epsilon(text: str) -> float:
    v = float(text)
    if not 0 <= v < 1:
        raise argparse.ArgumentTypeError(f"epsilon must lie in [0, 1), got {text}")
    return v


def _epsilon_list(text: str) -> list[float]:
    return [_epsilon(t) for t in text.split(",") if t.strip()]


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _seed(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be a 64-bit unsigned integer, got {text}")
    return v


def _param_pairs(items: list[str]) -> dict:
    out = {}
    for item in items:
        for pair in item.split(","):
            if not pair.strip():
                continue
            key, sep, value = pair.partition("=")
            if not sep:
                raise ParameterError(f"malformed scenario parameter {pair!r}; expected key=value")
            try:
                out[key.strip()] = float(value)
            except ValueError:
                raise ParameterError(f"scenario parameter {key.strip()!r} is not a number") from None
    return out


def _add_data_flags(p: argparse.ArgumentParser, threshold: bool = True) -> None:
    p.add_argument("--data", required=True, help="input CSV with a header row")
    p.add_argument("--target", default="H", help="target column name (default H)")
    p.add_argument("--columns", help="comma-separated feature columns (default: all but target)")
    p.add_argument("--preprocess", choices=PREPROCESS_MODES, default="none")
    if threshold:
        g = p.add_mutually_exclusive_group()
        g.add_argument("--quantile", type=_probability, default=0.97,
                       help="threshold u as an empirical quantile of the target (default 0.97)")
        g.add_argument("--threshold-abs", type=float, help="absolute threshold u")


def _add_output_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--threads", type=_positive_int, default=os.cpu_count() or 1,
                   help="worker cap (default: available cores)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="extremal-risk", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="write a scenario dataset to CSV")
    p.add_argument("--scenario", required=True, choices=SCENARIO_KINDS)
    p.add_argument("--params", action="append", default=[], help="key=value[,key=value]")
    p.add_argument("--n", type=_positive_int)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--out", help="output CSV (default: standard output)")
    _add_output_flags(p)

    p = sub.add_parser("risk", help="empirical (conditional) risk of supplied predictions")
    _add_data_flags(p)
    p.add_argument("--pred-u", required=True, help="FILE or FILE:COLUMN with +-1 predictions at u")
    p.add_argument("--pred-eps-u", help="predictions at eps*u (default: same as --pred-u)")
    p.add_argument("--epsilon", type=_epsilon, default=0.0)
    p.add_argument("--level", type=_probability, default=0.95, help="confidence level")
    _add_output_flags(p)

    p = sub.add_parser("features", help="tail-constant report and feature selection")
    _add_data_flags(p)
    p.add_argument("--min-c", type=float, default=0.01)
    _add_output_flags(p)

    p = sub.add_parser("optimize-linear", help="risk-minimizing linear classifier")
    _add_data_flags(p)
    p.add_argument("--epsilon", type=_epsilon, default=0.0)
    p.add_argument("--restarts", type=_positive_int, default=8)
    p.add_argument("--sweeps", type=_positive_int, default=5)
    p.add_argument("--grid-points", type=_positive_int, default=40)
    p.add_argument("--theta-max", type=float)
    p.add_argument("--min-c", type=float, default=0.0,
                   help="restrict the support to features with c_hat >= MIN_C (0 keeps all)")
    p.add_argument("--seed", type=_seed, default=0)
    _add_output_flags(p)

    p = sub.add_parser("cv", help="repeated train/test comparison of classifiers")
    _add_data_flags(p)
    p.add_argument("--classifiers", nargs="+", required=True,
                   help="linear, logistic_lasso, tree, forest, optimistic, crying_wolf, fixed:W1,W2,...")
    p.add_argument("--epsilons", type=_epsilon_list, default=[0.0])
    p.add_argument("--repeats", type=_positive_int, default=50)
    p.add_argument("--train-frac", type=_probability, default=0.7)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--lambda", dest="lam", type=float, default=0.01, help="lasso penalty")
    p.add_argument("--linear-min-c", type=float, default=0.0)
    p.add_argument("--restarts", type=_positive_int, default=8)
    p.add_argument("--sweeps", type=_positive_int, default=5)
    p.add_argument("--grid-points", type=_positive_int, default=40)
    p.add_argument("--max-depth", type=int, default=6)
    p.add_argument("--min-leaf", type=_positive_int, default=5)
    p.add_argument("--n-trees", type=_positive_int, default=50)
    p.add_argument("--level", type=_probability, default=0.95)
    _add_output_flags(p)
    return parser


def _load(args) -> Dataset:
    columns = [c.strip() for c in args.columns.split(",")] if args.columns else None
    return load_csv(args.data, args.target, args.preprocess, columns)


def _threshold(args, ds: Dataset) -> float:
    if args.threshold_abs is not None:
        u = args.threshold_abs
        if not (u > 0 and np.isfinite(u)):
            raise ParameterError(f"threshold u must be positive, got {u}")
        return float(u)
    u = empirical_quantile(ds.target, args.quantile)
    if not u > 0:
        raise DomainError(f"the {args.quantile} quantile of the target is {u}; u must be positive")
    return float(u)


def _emit(obj: dict, kind: str) -> None:
    payload = {"schema_version": SCHEMA_VERSION, "kind": kind, **obj}
    sys.stdout.write(json.dumps(payload, indent=2, sort_keys=False, allow_nan=False) + "\n")


def _fmt(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, float):
        return f"{v:.4g}"
    return str(v)


def _table(header: list[str], rows: list[list]) -> str:
    cells = [header] + [[_fmt(v) for v in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells]
    return "\n".join(lines) + "\n"


def cmd_simulate(args) -> None:
    params = _param_pairs(args.params)
    if args.n is not None:
        params["n"] = args.n
    ds = generate(ScenarioSpec(args.scenario, params, args.seed))
    if args.out:
        write_csv(ds, args.out)
    else:
        sys.stdout.write(",".join([*ds.feature_names, ds.target_name]) + "\n")
        for row, h in zip(ds.rows, ds.target):
            sys.stdout.write(",".join(format(float(v), ".17g") for v in (*row, h)) + "\n")
    if args.out:
        summary = {"scenario": args.scenario, "seed": args.seed, "n": ds.n,
                   "columns": [*ds.feature_names, ds.target_name], "out": args.out}
        if args.json:
            _emit(summary, "simulation")
        else:
            sys.stdout.write(f"wrote {ds.n} rows of {args.scenario} to {args.out}\n")


def cmd_risk(args) -> None:
    ds = _load(args)
    u = _threshold(args, ds)
    pred_u = load_predictions(args.pred_u)
    pred_e = load_predictions(args.pred_eps_u) if args.pred_eps_u else pred_u
    for name, p in (("--pred-u", pred_u), ("--pred-eps-u", pred_e)):
        if p.size != ds.n:
            raise DataError(f"{name} has {p.size} predictions for {ds.n} data rows")
    est = empirical_risk(pred_u, pred_e, ds.target, u, args.epsilon)
    d = est.to_dict(args.level)
    if args.json:
        _emit(d, "risk_estimate")
    else:
        sys.stdout.write(_table(list(d), [list(d.values())]))


def cmd_features(args) -> None:
    ds = _load(args)
    u = _threshold(args, ds)
    sel = select_features(ds, u, args.min_c)
    d = sel.to_dict()
    if args.json:
        _emit(d, "feature_selection")
        return
    rows = [
        [f["name"], f["c_hat"], f["std_error_c"], f["chi_star_hat"], f["x_exceed_count"],
         "yes" if f["selected"] else "no"]
        for f in d["features"]
    ]
    sys.stdout.write(f"u = {u:.6g}, target exceedances = {sel.coefficients[0].h_exceed_count}\n"
                     if sel.coefficients else f"u = {u:.6g}\n")
    sys.stdout.write(_table(["feature", "c_hat", "se_c", "chi_star", "n_exceed", "selected"], rows))


def cmd_optimize_linear(args) -> None:
    ds = _load(args)
    u = _threshold(args, ds)
    if args.min_c > 0:
        support = select_features(ds, u, args.min_c).selected
        if not support:
            raise ParameterError(f"no feature reaches c_hat >= {args.min_c}")
    else:
        support = tuple(range(ds.n_features))
    config = LinearSearchConfig(args.grid_points, args.sweeps, args.restarts, args.theta_max)
    fit = optimize_linear(ds, u, args.epsilon, support, config, RngStream(args.seed))
    d = {"epsilon": args.epsilon, "threshold_u": u, **fit.to_dict(ds.feature_names)}
    if args.json:
        _emit(d, "linear_fit")
        return
    sys.stdout.write(f"u = {u:.6g}, epsilon = {args.epsilon}\n")
    sys.stdout.write(_table(["feature", "theta", "in_support"],
                            [[k, v, "yes" if k in d["support"] else "no"] for k, v in d["theta"].items()]))
    r = d["achieved_risk"]
    sys.stdout.write(f"achieved risk = {_fmt(r['value']) if r else 'undefined'}\n")


def cmd_cv(args) -> None:
    ds = _load(args)
    options = {
        "lam": args.lam,
        "linear_min_c": args.linear_min_c,
        "linear_config": LinearSearchConfig(args.grid_points, args.sweeps, args.restarts),
        "tree_config": TreeConfig(args.max_depth, args.min_leaf),
        "forest_config": ForestConfig(n_trees=args.n_trees, min_leaf=args.min_leaf),
    }
    learners = [parse_learner(c, ds.feature_names, **options) for c in args.classifiers]
    report = run_cv(
        ds,
        learners,
        u_quantile=None if args.threshold_abs is not None else args.quantile,
        epsilons=args.epsilons,
        repeats=args.repeats,
        train_fraction=args.train_frac,
        seed=args.seed,
        workers=args.threads,
        threshold_abs=args.threshold_abs,
    )
    if args.json:
        d = report.to_dict(args.level)
        sys.stdout.write(json.dumps(d, indent=2, allow_nan=False) + "\n")
        return
    sys.stdout.write(f"u = {report.threshold_u:.6g}, repeats = {report.repeats}, "
                     f"skipped = {len(report.skipped_repetitions)}\n")
    for e in report.epsilons:
        sys.stdout.write(f"eps = {e}: typical test count with H > eps*u = {report.typical_n_eps(e):g}\n")
    rows = []
    for r in report.results:
        b = r.boxplot or {}
        rows.append([r.classifier, r.epsilon, b.get("min"), b.get("q1"), b.get("median"),
                     b.get("q3"), b.get("max"), r.missing])
    sys.stdout.write(_table(["classifier", "eps", "min", "q1", "median", "q3", "max", "missing"], rows))


COMMANDS = {
    "simulate": cmd_simulate,
    "risk": cmd_risk,
    "features": cmd_features,
    "optimize-linear": cmd_optimize_linear,
    "cv": cmd_cv,
}


def _one_line(exc: BaseException) -> str:
    return " ".join(str(exc).split()) or type(exc).__name__


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        sys.stderr.write(f"extremal-risk: usage error: {_one_line(exc)}\n")
        return 2
    try:
        COMMANDS[args.command](args)
    except ExtremalRiskError as exc:
        sys.stderr.write(f"extremal-risk {args.command}: {_one_line(exc)}\n")
        return exc.exit_code
    except OSError as exc:
        sys.stderr.write(f"extremal-risk {args.command}: {_one_line(exc)}\n")
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
