"""Command-line interface: generate, solve, features, compare, split-half, tune, report.

Exit codes: 0 on success, 1 when a benchmark stage recorded a failure,
2 for invalid configuration or unusable input.
"""

import argparse
import json
import os
import sys

from .errors import InvalidConfig, MilpEvalError
from .generators import FAMILIES, GenParams, generate_batch
from .harness import SolverConfig, run_set
from .logparse import extract_run_features, load_features
from .pipeline import (
    BenchmarkConfig,
    ComparisonReport,
    METRICS,
    SET_META_FILENAME,
    SplitHalfReport,
    benchmark_failed,
    load_benchmark_config,
    render_report,
    run_benchmark,
    split_half,
)
from .tuner import (
    default_space,
    evaluate_generalization,
    load_space,
    save_result,
    tune,
)


def _seed(args):
    return 0 if args.seed is None else args.seed


def _jobs(args):
    return 1 if args.jobs is None else args.jobs


def _parse_param(text):
    name, sep, raw = text.partition("=")
    if not sep or not name:
        raise InvalidConfig(f"--param needs NAME=VALUE, got {text!r}")
    for cast in (int, float):
        try:
            return name, cast(raw)
        except ValueError:
            continue
    return name, raw


def _solver_from_args(args):
    if not args.solver:
        return None
    if args.time_limit is None:
        raise InvalidConfig("--time-limit is required when a solver is selected")
    params = dict(_parse_param(p) for p in (args.param or []))
    return SolverConfig(
        solver_id=args.solver,
        time_limit=args.time_limit,
        executable=args.executable,
        threads=args.threads,
        seed=args.solver_seed,
        params=params,
    )


def _add_solver_flags(parser):
    parser.add_argument("--solver", help="solver id (highs, gurobi, scip)")
    parser.add_argument("--time-limit", type=float, help="per-solve limit in seconds")
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--solver-seed", type=int, default=0)
    parser.add_argument("--executable", help="explicit solver executable")
    parser.add_argument(
        "--param", action="append", metavar="NAME=VALUE", help="solver parameter override"
    )


def _cmd_generate(args):
    overrides = {}
    if args.constraints:
        overrides["constraints_range"] = tuple(args.constraints)
    if args.variables:
        overrides["variables_range"] = tuple(args.variables)
    if args.density:
        overrides["density_range"] = tuple(args.density)
    if args.values:
        overrides["value_range"] = tuple(args.values)
    if args.facility_ratio is not None:
        overrides["facility_ratio"] = args.facility_ratio
    if not args.out:
        raise InvalidConfig("generate needs --out for the instance directory")
    params = GenParams(args.family, seed=_seed(args), **overrides)
    instances = generate_batch(args.family, args.count, _seed(args), args.out, params=params)
    meta_path = os.path.join(args.out, SET_META_FILENAME)
    with open(meta_path, "w") as fh:
        json.dump(
            {"label": args.family, "model": "synthetic", "problem": args.family},
            fh,
            sort_keys=True,
        )
        fh.write("\n")
    print(f"wrote {len(instances)} instances to {args.out}")
    return 0


def _cmd_solve(args):
    config = _solver_from_args(args)
    if config is None:
        raise InvalidConfig("solve needs --solver")
    if not args.out:
        raise InvalidConfig("solve needs --out for the run directory")
    records = run_set(args.instances, config, args.out, jobs=_jobs(args))
    counts = {}
    for rec in records:
        counts[rec.status] = counts.get(rec.status, 0) + 1
    summary = ", ".join(f"{k}: {v}" for k, v in sorted(counts.items()))
    print(f"solved {len(records)} instances into {args.out} ({summary})")
    return 0


def _cmd_features(args):
    feats = extract_run_features(args.run, args.solver, out_path=args.out)
    out = args.out or os.path.join(args.run, "features.jsonl")
    print(f"extracted {len(feats)} feature records to {out}")
    return 0


def _cmd_compare(args):
    if args.config:
        config = load_benchmark_config(args.config)
        if args.out:
            config.out_dir = args.out
        if args.seed is not None:
            config.seed = args.seed
        if args.jobs is not None:
            config.jobs = args.jobs
    else:
        if not (args.baseline and args.candidate):
            raise InvalidConfig("compare needs --config or both --baseline and --candidate")
        if not args.out:
            raise InvalidConfig("compare needs --out for the run directory")
        metrics = tuple(args.metrics.split(",")) if args.metrics else None
        kwargs = {}
        if metrics:
            kwargs["metrics"] = metrics
        config = BenchmarkConfig(
            baseline_dir=args.baseline,
            candidate_dir=args.candidate,
            solver=_solver_from_args(args),
            bins=args.bins,
            pca_k=args.pca_k,
            seed=_seed(args),
            out_dir=args.out,
            jobs=_jobs(args),
            tuning_budget=args.trials,
            **kwargs,
        )
    report = run_benchmark(config)
    for stage, status in sorted(report.diagnostics.items()):
        print(f"{stage}: {status}")
    print(f"report written to {os.path.join(config.out_dir, 'report.json')}")
    return 1 if benchmark_failed(report) else 0


def _cmd_split_half(args):
    feats = load_features(args.features)
    report = split_half(feats, _seed(args), pca_k=args.pca_k)
    text = render_report(report, args.format)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        print(f"split-half report written to {args.out}")
    else:
        print(text, end="")
    return 0


def _cmd_tune(args):
    config = _solver_from_args(args)
    if config is None:
        raise InvalidConfig("tune needs --solver")
    space = load_space(args.space) if args.space else default_space(config.solver_id)
    result = tune(
        space,
        args.tuning,
        config,
        budget=args.trials,
        strategy=args.strategy,
        seed=_seed(args),
        jobs=_jobs(args),
    )
    if args.test:
        result = evaluate_generalization(result, args.test, config, jobs=_jobs(args))
    out = args.out or "tuning_result.json"
    save_result(result, out)
    print(
        f"tuning-set means: default {result.default_mean_time:.6g} s, "
        f"best {result.best_mean_time:.6g} s "
        f"({result.improvement_percent:.2f}% improvement)"
    )
    if result.test_improvement_percent is not None:
        print(
            f"held-out means: default {result.test_default_mean:.6g} s, "
            f"best {result.test_best_mean:.6g} s "
            f"({result.test_improvement_percent:.2f}% improvement)"
        )
    print(f"result written to {out}")
    return 0


def _cmd_report(args):
    with open(args.report) as fh:
        text = fh.read()
    doc = json.loads(text)
    if "comparison" in doc and "size_a" in doc:
        report = SplitHalfReport.from_json(text)
    else:
        report = ComparisonReport.from_json(text)
    rendered = render_report(report, args.format)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(rendered)
        print(f"rendered report written to {args.out}")
    else:
        print(rendered, end="")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="milpeval",
        description="Generate, solve, and compare MILP instance sets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    # seed/jobs default to None so a config file's values are only
    # overridden when the flag was actually given.
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="root random seed (default 0)")
    common.add_argument("--jobs", type=int, help="parallel solver processes (default 1)")
    common.add_argument("--out", help="output file or directory")

    p = sub.add_parser("generate", parents=[common], help="generate an instance set")
    p.add_argument("--family", required=True, choices=FAMILIES)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--constraints", type=int, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--variables", type=int, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--density", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--values", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--facility-ratio", type=float)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("solve", parents=[common], help="solve an instance set")
    p.add_argument("--instances", required=True, help="instance directory")
    _add_solver_flags(p)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("features", parents=[common], help="parse solver logs of a run")
    p.add_argument("--run", required=True, help="run directory (holds logs/)")
    p.add_argument("--solver", required=True, help="solver id the logs came from")
    p.set_defaults(func=_cmd_features)

    p = sub.add_parser("compare", parents=[common], help="full instance-set comparison")
    p.add_argument("--config", help="benchmark config file (JSON)")
    p.add_argument("--baseline", help="baseline instance directory")
    p.add_argument("--candidate", help="candidate instance directory")
    p.add_argument("--metrics", help="comma-separated metric toggles (default: all but tuning)")
    p.add_argument("--bins", type=int, default=30)
    p.add_argument("--pca-k", type=int, default=3)
    p.add_argument("--trials", type=int, default=20, help="tuning budget if tuning is enabled")
    _add_solver_flags(p)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("split-half", parents=[common], help="within-set stability check")
    p.add_argument("--features", required=True, help="features.jsonl from a solve run")
    p.add_argument("--pca-k", type=int, default=3)
    p.add_argument("--format", default="json", help="json, markdown, or csv")
    p.set_defaults(func=_cmd_split_half)

    p = sub.add_parser("tune", parents=[common], help="search solver parameters")
    p.add_argument("--space", help="parameter space file (default: the solver's shipped space)")
    p.add_argument("--tuning", required=True, help="tuning instance directory")
    p.add_argument("--test", help="held-out instance directory")
    p.add_argument("--trials", type=int, default=50, help="tuning budget")
    p.add_argument("--strategy", default="random")
    _add_solver_flags(p)
    p.set_defaults(func=_cmd_tune)

    p = sub.add_parser("report", parents=[common], help="render a stored report")
    p.add_argument("--report", required=True, help="report.json or a split-half report")
    p.add_argument("--format", default="markdown", help="json, markdown, or csv")
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MilpEvalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
