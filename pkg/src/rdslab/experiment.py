"""Experiment harness: cells, replications, metrics, outputs.

An experiment is described by a JSON document (see :class:`ExperimentSpec`)
and runs a full factorial of network structure targets and sampling error
parameters. Every cell simulates ``replications`` independent recruitment
samples, evaluates the requested estimators on each, and aggregates
bias / SD / RMSE / accuracy credit per estimator (plus bootstrap interval
coverage when configured).

Randomness is keyed, not sequential: replication ``r`` of cell ``c`` uses
the stream ``(master_seed, (1, c, r))`` for sampling and
``(master_seed, (2, c, r))`` for its bootstrap, while network construction
uses the ``(0, ...)`` namespace. Results are therefore byte-identical for
any worker count. Workers are threads; the compiled kernels release the
GIL so replications run in parallel.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import fileio
from .bootstrap import BootstrapConfig, bootstrap_ci
from .errors import TuningError, ValidationError
from .estimate import estimate_all
from .metrics import ESTIMATOR_FAMILIES, summarize_cell
from .netcore import Group, Network, compute_stats
from .netgen import KoskkParams, TuneTargets, koskk_generate, tune_network
from .rdssim import RdsConfig, run_rds

_NETWORK_NS = 0
_SAMPLE_NS = 1
_BOOTSTRAP_NS = 2

DEFAULT_ESTIMATORS = ("sample", "rdsi", "rdsii", "rdsi_ego")


@dataclass(frozen=True)
class CellParams:
    """One experiment cell: structure targets plus error parameters."""

    index: int
    homophily: Optional[float]
    activity_ratio: Optional[float]
    p_a: Optional[float]
    p_diff: float
    p_miss_a: float
    p_miss_b: float
    p_err_ab: float
    p_err_ba: float
    target_key: int  # which tuned network this cell samples from


@dataclass
class ExperimentSpec:
    """Validated experiment description.

    JSON layout::

        {
          "master_seed": 20240801,
          "replications": 200,
          "workers": 4,
          "network": {
            "source": "koskk",             // or "file"
            "n": 5000, "mean_degree": 10.0,
            "p_delta": null,               // null = calibrated default
            "steps": null,                 // null = reference scaling
            "p_a": 0.3,
            "targets": [ {"homophily": 0.3, "activity_ratio": 1.0}, ... ]
            // file source instead: "edges": "net.edges", "attrs": "net.attrs"
          },
          "rds": { "n_seeds": 6, "coupons": 2, "target_size": 500,
                   "seed_mode": "uniform", "with_replacement": false },
          "grid": { "p_diff": [0.0, 1.0],
                    "p_miss": [[0.0, 0.0]],
                    "p_err":  [[0.0, 0.0]] },
          "estimators": ["sample", "rdsi", "rdsii", "rdsi_ego"],
          "bootstrap": { "method": "origin", "replicates": 1000,
                         "level": 0.95 },   // or null
          "output": { "results": "results.csv",
                      "estimates": null }   // optional raw estimate dump
        }
    """

    master_seed: int
    replications: int
    workers: int
    network_source: str
    koskk: Optional[KoskkParams]
    p_a: Optional[float]
    targets: List[Dict[str, Optional[float]]]
    edges_path: Optional[str]
    attrs_path: Optional[str]
    rds: RdsConfig
    p_diff_grid: List[float]
    p_miss_grid: List[Tuple[float, float]]
    p_err_grid: List[Tuple[float, float]]
    estimators: List[str]
    bootstrap: Optional[BootstrapConfig]
    results_path: Optional[str]
    estimates_path: Optional[str]
    tune_tolerances: Dict[str, float] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, doc: Dict) -> "ExperimentSpec":
        try:
            return cls._parse(doc)
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"bad experiment spec: {exc}") from exc

    @classmethod
    def _parse(cls, doc: Dict) -> "ExperimentSpec":
        master_seed = int(doc["master_seed"])
        replications = int(doc["replications"])
        if replications < 1:
            raise ValidationError("need at least one replication")
        workers = int(doc.get("workers", 1))
        if workers < 1:
            raise ValidationError("workers must be positive")

        netdoc = dict(doc["network"])
        source = netdoc.get("source", "koskk")
        koskk = None
        p_a = None
        targets: List[Dict[str, Optional[float]]] = []
        edges_path = attrs_path = None
        if source == "koskk":
            koskk = KoskkParams(
                n=int(netdoc.get("n", 10000)),
                w0=float(netdoc.get("w0", 1.0)),
                p_r=float(netdoc.get("p_r", 0.0005)),
                p_d=float(netdoc.get("p_d", 0.001)),
                delta=float(netdoc.get("delta", 0.6)),
                p_delta=None if netdoc.get("p_delta") is None else float(netdoc["p_delta"]),
                steps=None if netdoc.get("steps") is None else int(netdoc["steps"]),
                target_mean_degree=float(netdoc.get("mean_degree", 10.0)),
            )
            koskk.validate()
            p_a = None if netdoc.get("p_a") is None else float(netdoc["p_a"])
            raw_targets = netdoc.get("targets") or [{}]
            for t in raw_targets:
                targets.append(
                    {
                        "homophily": None if t.get("homophily") is None else float(t["homophily"]),
                        "activity_ratio": None
                        if t.get("activity_ratio") is None
                        else float(t["activity_ratio"]),
                        "p_a": float(t["p_a"]) if t.get("p_a") is not None else p_a,
                    }
                )
        elif source == "file":
            edges_path = str(netdoc["edges"])
            attrs_path = str(netdoc["attrs"])
            if netdoc.get("targets"):
                raise ValidationError("file-sourced networks cannot be retuned in an experiment")
            targets.append({"homophily": None, "activity_ratio": None, "p_a": None})
        else:
            raise ValidationError(f"unknown network source {source!r}")

        rdsdoc = dict(doc.get("rds") or {})
        rds = RdsConfig(
            n_seeds=int(rdsdoc.get("n_seeds", 6)),
            coupons=int(rdsdoc.get("coupons", 2)),
            target_size=int(rdsdoc.get("target_size", 500)),
            seed_mode=str(rdsdoc.get("seed_mode", "uniform")),
            with_replacement=bool(rdsdoc.get("with_replacement", False)),
            reseed_on_dieout=bool(rdsdoc.get("reseed_on_dieout", True)),
        )
        rds.validate()

        grid = dict(doc.get("grid") or {})
        p_diff_grid = [float(x) for x in grid.get("p_diff", [0.0])]
        p_miss_grid = [(float(a), float(b)) for a, b in grid.get("p_miss", [[0.0, 0.0]])]
        p_err_grid = [(float(a), float(b)) for a, b in grid.get("p_err", [[0.0, 0.0]])]
        if not p_diff_grid or not p_miss_grid or not p_err_grid:
            raise ValidationError("parameter grids cannot be empty")

        estimators = [str(e) for e in doc.get("estimators") or DEFAULT_ESTIMATORS]
        for name in estimators:
            if name not in ESTIMATOR_FAMILIES:
                raise ValidationError(f"unknown estimator {name!r}")
        if len(set(estimators)) != len(estimators):
            raise ValidationError("duplicate estimator names")

        bsdoc = doc.get("bootstrap")
        bootstrap = None
        if bsdoc:
            bootstrap = BootstrapConfig(
                method=str(bsdoc.get("method", "origin")),
                replicates=int(bsdoc.get("replicates", 1000)),
                level=float(bsdoc.get("level", 0.95)),
            )
            bootstrap.validate()

        outdoc = dict(doc.get("output") or {})
        results_path = outdoc.get("results")
        estimates_path = outdoc.get("estimates")

        tunedoc = dict(doc.get("tuning") or {})
        tune_tolerances = {}
        for key in ("w_tolerance", "h_tolerance", "max_iterations"):
            if key in tunedoc:
                tune_tolerances[key] = tunedoc[key]

        return cls(
            master_seed=master_seed,
            replications=replications,
            workers=workers,
            network_source=source,
            koskk=koskk,
            p_a=p_a,
            targets=targets,
            edges_path=edges_path,
            attrs_path=attrs_path,
            rds=rds,
            p_diff_grid=p_diff_grid,
            p_miss_grid=p_miss_grid,
            p_err_grid=p_err_grid,
            estimators=estimators,
            bootstrap=bootstrap,
            results_path=results_path,
            estimates_path=estimates_path,
            tune_tolerances=tune_tolerances,
        )

    @classmethod
    def from_json_file(cls, path: str) -> "ExperimentSpec":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: invalid JSON ({exc})") from exc
        if not isinstance(doc, dict):
            raise ValidationError(f"{path}: expected a JSON object")
        return cls.from_dict(doc)

    def cells(self) -> List[CellParams]:
        out = []
        idx = 0
        for tkey in range(len(self.targets)):
            t = self.targets[tkey]
            for p_diff in self.p_diff_grid:
                for p_miss_a, p_miss_b in self.p_miss_grid:
                    for p_err_ab, p_err_ba in self.p_err_grid:
                        out.append(
                            CellParams(
                                index=idx,
                                homophily=t["homophily"],
                                activity_ratio=t["activity_ratio"],
                                p_a=t["p_a"],
                                p_diff=p_diff,
                                p_miss_a=p_miss_a,
                                p_miss_b=p_miss_b,
                                p_err_ab=p_err_ab,
                                p_err_ba=p_err_ba,
                                target_key=tkey,
                            )
                        )
                        idx += 1
        return out


@dataclass
class ExperimentResult:
    rows: List[Dict[str, object]]
    raw_estimates: List[Tuple[int, int, str, Optional[float]]]
    networks: Dict[int, Network]


def _build_networks(spec: ExperimentSpec) -> Tuple[Dict[int, Network], Dict[int, str]]:
    """One tuned network per target; failures recorded, not raised."""
    nets: Dict[int, Network] = {}
    failures: Dict[int, str] = {}
    if spec.network_source == "file":
        net, _labels = fileio.ingest_network(spec.edges_path, spec.attrs_path)
        nets[0] = net
        return nets, failures
    base_ss = np.random.SeedSequence(spec.master_seed, spawn_key=(_NETWORK_NS, 0))
    base = koskk_generate(spec.koskk, np.random.Generator(np.random.PCG64(base_ss)))
    for tkey, t in enumerate(spec.targets):
        targets = TuneTargets(
            p_a=t["p_a"],
            activity_ratio=t["activity_ratio"],
            homophily=t["homophily"],
            **spec.tune_tolerances,
        )
        tune_ss = np.random.SeedSequence(spec.master_seed, spawn_key=(_NETWORK_NS, 1 + tkey))
        try:
            nets[tkey] = tune_network(base, targets, tune_ss)
        except (TuningError, ValidationError) as exc:
            failures[tkey] = str(exc)
    return nets, failures


def _replication_task(
    net: Network,
    cfg: RdsConfig,
    estimators: Sequence[str],
    bootstrap: Optional[BootstrapConfig],
    truths: Dict[str, float],
    master_seed: int,
    cell_index: int,
    rep: int,
) -> Tuple[int, Dict[str, float], Optional[bool]]:
    sample_ss = np.random.SeedSequence(master_seed, spawn_key=(_SAMPLE_NS, cell_index, rep))
    sample = run_rds(net, cfg, sample_ss)
    values: Dict[str, float] = {}
    try:
        est = estimate_all(sample).to_dict()
        for name in estimators:
            v = est[name]
            values[name] = math.nan if v is None else float(v)
    except ValidationError:
        # Degenerate designs (coupons=0) yield seed-only samples; the raw
        # composition is still well defined over the seeds, everything
        # that reweights by recruitment is not.
        for name in estimators:
            values[name] = math.nan
        if "sample" in values:
            values["sample"] = float(np.mean(sample.true_group == Group.A))
    hit: Optional[bool] = None
    if bootstrap is not None:
        bs_ss = np.random.SeedSequence(master_seed, spawn_key=(_BOOTSTRAP_NS, cell_index, rep))
        linked = _linked_estimator(bootstrap.method)
        ci = bootstrap_ci(sample, bootstrap, bs_ss)
        hit = ci.contains(truths[linked])
    return rep, values, hit


def _linked_estimator(method: str) -> str:
    return "rdsi" if method == "origin" else "rdsi_ego"


def run_experiment(spec: ExperimentSpec) -> ExperimentResult:
    """Execute every cell and aggregate metric rows.

    Cells whose network tuning failed produce a single row with a status
    message and no metrics; everything else reports status ``ok``.
    """
    nets, failures = _build_networks(spec)
    rows: List[Dict[str, object]] = []
    raw: List[Tuple[int, int, str, Optional[float]]] = []
    want_raw = spec.estimates_path is not None
    for cell in spec.cells():
        base_params = {
            "homophily": cell.homophily,
            "activity_ratio": cell.activity_ratio,
            "p_a": cell.p_a,
            "p_diff": cell.p_diff,
            "p_miss_a": cell.p_miss_a,
            "p_miss_b": cell.p_miss_b,
            "p_err_ab": cell.p_err_ab,
            "p_err_ba": cell.p_err_ba,
        }
        if cell.target_key in failures:
            rows.append(
                {
                    **base_params,
                    "estimator": "",
                    "status": f"tuning_failed: {failures[cell.target_key]}",
                }
            )
            continue
        net = nets[cell.target_key]
        stats = compute_stats(net)
        truths = {}
        for name in spec.estimators:
            fam = ESTIMATOR_FAMILIES[name]
            truths[name] = stats.p_a if fam == "proportion" else stats.s_star.s_ab
        if spec.bootstrap is not None:
            linked = _linked_estimator(spec.bootstrap.method)
            truths.setdefault(linked, stats.p_a)
        cfg = replace(
            spec.rds,
            p_diff=cell.p_diff,
            p_miss_a=cell.p_miss_a,
            p_miss_b=cell.p_miss_b,
            p_err_ab=cell.p_err_ab,
            p_err_ba=cell.p_err_ba,
        )
        results: List[Optional[Tuple[int, Dict[str, float], Optional[bool]]]]
        results = [None] * spec.replications
        if spec.workers == 1:
            for rep in range(spec.replications):
                results[rep] = _replication_task(
                    net, cfg, spec.estimators, spec.bootstrap, truths, spec.master_seed, cell.index, rep
                )
        else:
            with ThreadPoolExecutor(max_workers=spec.workers) as pool:
                futures = [
                    pool.submit(
                        _replication_task,
                        net,
                        cfg,
                        spec.estimators,
                        spec.bootstrap,
                        truths,
                        spec.master_seed,
                        cell.index,
                        rep,
                    )
                    for rep in range(spec.replications)
                ]
                for fut in futures:
                    rep, values, hit = fut.result()
                    results[rep] = (rep, values, hit)
        estimates_by_name = {
            name: np.array([results[r][1][name] for r in range(spec.replications)])
            for name in spec.estimators
        }
        coverage_by_name = None
        if spec.bootstrap is not None:
            hits = [results[r][2] for r in range(spec.replications)]
            cov = float(np.mean([1.0 if h else 0.0 for h in hits]))
            coverage_by_name = {_linked_estimator(spec.bootstrap.method): cov}
        cell_rows = summarize_cell(estimates_by_name, truths, coverage_by_name)
        for name in spec.estimators:
            row = cell_rows[name]
            rows.append(
                {
                    **base_params,
                    "estimator": name,
                    "truth": row.truth,
                    "mean": row.mean,
                    "bias": row.bias,
                    "sd": row.sd,
                    "rmse": row.rmse,
                    "p_best": row.p_best,
                    "n_undefined": row.n_undefined,
                    "ci_coverage": row.ci_coverage,
                    "status": "ok",
                }
            )
        if want_raw:
            for rep in range(spec.replications):
                for name in spec.estimators:
                    v = results[rep][1][name]
                    raw.append((cell.index, rep, name, None if math.isnan(v) else v))
    if spec.results_path:
        fileio.write_results_csv(rows, spec.results_path)
    if spec.estimates_path:
        fileio.write_estimates_csv(raw, spec.estimates_path)
    return ExperimentResult(rows=rows, raw_estimates=raw, networks=nets)
