"""Command-line interface.

Subcommands cover the full workflow: ``generate`` and ``tune`` produce
network files, ``sample`` simulates one recruitment, ``estimate`` and
``bootstrap`` evaluate a sample CSV, ``experiment`` runs a JSON-described
replication study, and ``plot`` renders SVG figures from result tables.

Exit codes: 0 success, 1 usage error, 2 input validation failure,
3 runtime failure (tuning, calibration, bootstrap degeneracy, I/O).
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from . import fileio, svgplot
from ._rng import substream
from .bootstrap import METHODS, BootstrapConfig, bootstrap_replicates, percentile_ci
from .errors import RdsLabError, ValidationError
from .estimate import estimate_all, rdsi, rdsi_ego
from .experiment import ExperimentSpec, run_experiment
from .netcore import compute_stats
from .netgen import (
    DEFAULT_P_DELTA,
    KoskkParams,
    TuneTargets,
    calibrate_p_delta,
    koskk_generate,
    tune_network,
)
from .rdssim import SEED_MODES, RdsConfig, run_rds


def _add_seed(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")


def _add_network_out(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", default=None, help="output prefix: writes PREFIX.edges and PREFIX.attrs")
    p.add_argument("--edges-out", default=None, help="explicit edge list path")
    p.add_argument("--attrs-out", default=None, help="explicit attribute file path")


def _add_tuning(p: argparse.ArgumentParser) -> None:
    p.add_argument("--p-a", type=float, default=None, help="target group-A share")
    p.add_argument("--homophily", type=float, default=None, help="target homophily")
    p.add_argument("--activity-ratio", type=float, default=None, help="target A/B mean-degree ratio")
    p.add_argument("--w-tol", type=float, default=0.02, help="activity ratio tolerance")
    p.add_argument("--h-tol", type=float, default=0.005, help="homophily tolerance")
    p.add_argument(
        "--max-iterations", type=int, default=10_000_000, help="tuning iteration budget per pass"
    )


def _targets_from_args(args) -> TuneTargets:
    return TuneTargets(
        p_a=args.p_a,
        activity_ratio=args.activity_ratio,
        homophily=args.homophily,
        w_tolerance=args.w_tol,
        h_tolerance=args.h_tol,
        max_iterations=args.max_iterations,
    )


def _network_out_paths(args) -> tuple:
    """Resolve the edge/attr output pair from --out or explicit flags."""
    if args.out is not None:
        if args.edges_out is not None or args.attrs_out is not None:
            raise ValidationError("pass either --out or --edges-out/--attrs-out, not both")
        return f"{args.out}.edges", f"{args.out}.attrs"
    if args.edges_out is None or args.attrs_out is None:
        raise ValidationError("need --out PREFIX or both --edges-out and --attrs-out")
    return args.edges_out, args.attrs_out


def _is_reference_params(params: KoskkParams) -> bool:
    return (
        params.w0 == 1.0
        and params.p_r == 0.0005
        and params.p_d == 0.001
        and params.delta == 0.6
        and params.target_mean_degree == 10.0
    )


def _cmd_generate(args) -> int:
    params = KoskkParams(
        n=args.n,
        w0=args.w0,
        p_r=args.p_r,
        p_d=args.p_d,
        delta=args.delta,
        p_delta=args.p_delta,
        steps=args.steps,
        target_mean_degree=args.mean_degree,
    )
    params.validate()
    if params.p_delta is None and not _is_reference_params(params):
        p_delta = calibrate_p_delta(params, substream(args.seed, 3, 0))
        params = KoskkParams(
            n=params.n,
            w0=params.w0,
            p_r=params.p_r,
            p_d=params.p_d,
            delta=params.delta,
            p_delta=p_delta,
            steps=params.steps,
            target_mean_degree=params.target_mean_degree,
        )
        print(f"calibrated p_delta = {p_delta:.6g}", file=sys.stderr)
    edges_out, attrs_out = _network_out_paths(args)
    net = koskk_generate(params, substream(args.seed, 0, 0))
    targets = _targets_from_args(args)
    net = tune_network(net, targets, substream(args.seed, 0, 1))
    fileio.write_network(net, edges_out, attrs_out)
    stats = compute_stats(net)
    print(_stats_line(stats))
    return 0


def _cmd_tune(args) -> int:
    edges_out, attrs_out = _network_out_paths(args)
    net, labels = fileio.ingest_network(args.edges, args.attrs)
    targets = _targets_from_args(args)
    net = tune_network(net, targets, substream(args.seed, 0, 1))
    fileio.write_network(net, edges_out, attrs_out, labels)
    print(_stats_line(compute_stats(net)))
    return 0


def _stats_line(stats) -> str:
    h = "NA" if stats.homophily is None else f"{stats.homophily:.4f}"
    w = "NA" if stats.activity_ratio is None else f"{stats.activity_ratio:.4f}"
    return (
        f"n={stats.n} edges={stats.edge_count} p_a={stats.p_a:.4f} "
        f"mean_degree={stats.mean_degree:.3f} homophily={h} activity_ratio={w}"
    )


def _cmd_sample(args) -> int:
    net, labels = fileio.ingest_network(args.edges, args.attrs)
    cfg = RdsConfig(
        n_seeds=args.n_seeds,
        coupons=args.coupons,
        target_size=args.target_size,
        seed_mode=args.seed_mode,
        with_replacement=args.with_replacement,
        reseed_on_dieout=not args.no_reseed,
        p_diff=args.p_diff,
        p_miss_a=args.p_miss_a,
        p_miss_b=args.p_miss_b,
        p_err_ab=args.p_err_ab,
        p_err_ba=args.p_err_ba,
    )
    sample = run_rds(net, cfg, substream(args.seed, 1, 0, 0))
    sample.node_labels = [labels[int(i)] for i in sample.node_id]
    fileio.write_rds_sample(sample, args.out)
    if not sample.complete:
        print(
            f"warning: population exhausted at {sample.size} of {cfg.target_size} respondents",
            file=sys.stderr,
        )
    return 0


def _json_out(doc: dict, path: Optional[str]) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_estimate(args) -> int:
    sample = fileio.ingest_rds_data(args.sample)
    est = estimate_all(sample)
    doc = {k: v for k, v in est.to_dict().items()}
    doc["n_respondents"] = sample.size
    doc["n_nonseed"] = est.n_nonseed
    _json_out(doc, args.out)
    return 0


def _cmd_bootstrap(args) -> int:
    sample = fileio.ingest_rds_data(args.sample)
    cfg = BootstrapConfig(method=args.method, replicates=args.replicates, level=args.level)
    result = bootstrap_replicates(sample, cfg, substream(args.seed, 2, 0, 0))
    ci = percentile_ci(result.estimates, cfg.level)
    point = rdsi(sample) if args.method == "origin" else rdsi_ego(sample)
    _json_out(
        {
            "method": cfg.method,
            "level": cfg.level,
            "replicates": cfg.replicates,
            "lower": ci.lower,
            "upper": ci.upper,
            "point_estimate": point,
            "n_fallback_draws": result.n_fallback_draws,
            "n_redraws": result.n_redraws,
        },
        args.out,
    )
    return 0


def _cmd_experiment(args) -> int:
    spec = ExperimentSpec.from_json_file(args.config)
    if args.workers is not None:
        spec.workers = args.workers
    if args.seed is not None:
        spec.master_seed = args.seed
    if args.results is not None:
        spec.results_path = args.results
    if args.estimates is not None:
        spec.estimates_path = args.estimates
    if not spec.results_path:
        raise ValidationError("no results path: set output.results in the config or pass --results")
    result = run_experiment(spec)
    ok = sum(1 for r in result.rows if r.get("status") == "ok")
    failed = len(result.rows) - ok
    print(f"wrote {spec.results_path}: {ok} metric rows, {failed} failure rows")
    return 0


def _cmd_plot(args) -> int:
    if args.kind in ("heatmap", "line"):
        rows = [
            r
            for r in fileio.read_results_csv(args.data)
            if r.get("status") == "ok" and r.get("estimator")
        ]
    else:
        parsed = fileio.read_estimates_csv(args.data)
        rows = [
            {"cell": c, "replication": rep, "estimator": name, "estimate": est}
            for c, rep, name, est in parsed
            if est is not None and (args.cell is None or c == args.cell)
        ]
    options = {}
    if args.x is not None:
        options["x"] = args.x
    if args.y is not None:
        options["y"] = args.y
    if args.value is not None:
        options["value"] = args.value
    if args.estimator is not None:
        options["estimator"] = args.estimator
    if args.truth is not None:
        options["truth"] = args.truth
    if args.bins is not None:
        options["bins"] = args.bins
    if args.title is not None:
        options["title"] = args.title
    svgplot.emit_plot(rows, args.kind, args.out, **options)
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rdslab",
        description="Network sampling laboratory: generation, recruitment simulation, estimation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate and tune a synthetic network")
    p.add_argument("--n", type=int, default=10000, help="number of nodes")
    p.add_argument("--mean-degree", type=float, default=10.0, help="target mean degree")
    p.add_argument("--w0", type=float, default=1.0)
    p.add_argument("--p-r", type=float, default=0.0005)
    p.add_argument("--p-d", type=float, default=0.001)
    p.add_argument("--delta", type=float, default=0.6)
    p.add_argument(
        "--p-delta",
        type=float,
        default=None,
        help=f"triad closure probability (default: {DEFAULT_P_DELTA} for reference "
        "parameters, otherwise calibrated)",
    )
    p.add_argument("--steps", type=int, default=None, help="evolution steps (default n*1e4)")
    _add_tuning(p)
    _add_network_out(p)
    _add_seed(p)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("tune", help="retune an existing network file pair")
    p.add_argument("--edges", required=True)
    p.add_argument("--attrs", required=True)
    _add_tuning(p)
    _add_network_out(p)
    _add_seed(p)
    p.set_defaults(func=_cmd_tune)

    p = sub.add_parser("sample", help="simulate one recruitment sample")
    p.add_argument("--edges", required=True)
    p.add_argument("--attrs", required=True)
    p.add_argument("--n-seeds", type=int, default=6)
    p.add_argument("--coupons", type=int, default=2)
    p.add_argument("--target-size", type=int, default=500)
    p.add_argument("--seed-mode", choices=SEED_MODES, default="uniform")
    p.add_argument("--with-replacement", action="store_true")
    p.add_argument("--no-reseed", action="store_true", help="stop when all chains die out")
    p.add_argument("--p-diff", type=float, default=0.0)
    p.add_argument("--p-miss-a", type=float, default=0.0)
    p.add_argument("--p-miss-b", type=float, default=0.0)
    p.add_argument("--p-err-ab", type=float, default=0.0)
    p.add_argument("--p-err-ba", type=float, default=0.0)
    p.add_argument("--out", required=True, help="sample CSV path")
    _add_seed(p)
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("estimate", help="evaluate all estimators on a sample CSV")
    p.add_argument("--sample", required=True)
    p.add_argument("--out", default=None, help="JSON output path (default stdout)")
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("bootstrap", help="chain bootstrap confidence interval for a sample CSV")
    p.add_argument("--sample", required=True)
    p.add_argument("--method", choices=METHODS, default="origin")
    p.add_argument("--replicates", type=int, default=1000)
    p.add_argument("--level", type=float, default=0.95)
    p.add_argument("--out", default=None, help="JSON output path (default stdout)")
    _add_seed(p)
    p.set_defaults(func=_cmd_bootstrap)

    p = sub.add_parser("experiment", help="run a JSON-described replication study")
    p.add_argument("--config", required=True)
    p.add_argument("--workers", type=int, default=None, help="override spec worker count")
    p.add_argument("--seed", type=int, default=None, help="override spec master seed")
    p.add_argument("--results", default=None, help="override results CSV path")
    p.add_argument("--estimates", default=None, help="override raw estimates CSV path")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("plot", help="render an SVG figure from a results or estimates CSV")
    p.add_argument("--data", required=True, help="results CSV (heatmap, line) or estimates CSV")
    p.add_argument("--kind", choices=svgplot.KINDS, required=True)
    p.add_argument("--x", default=None)
    p.add_argument("--y", default=None)
    p.add_argument("--value", default=None)
    p.add_argument("--estimator", default=None)
    p.add_argument("--truth", type=float, default=None)
    p.add_argument("--bins", type=int, default=None)
    p.add_argument("--title", default=None)
    p.add_argument("--cell", type=int, default=None, help="restrict estimates CSV to one cell")
    p.add_argument("--out", required=True, help="SVG output path")
    p.set_defaults(func=_cmd_plot)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RdsLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
