"""Deterministic probe workload exercising every kernel end to end.

Used by the backend parity test and the benchmark: the same probe run
under the compiled and pure-Python backends must produce bit-identical
arrays, because both consume the same pre-drawn uniform streams.

Run as ``python -m rdslab.diagnostics OUT.npz`` to dump the probe arrays
(the parity test does this in a subprocess with ``RDSLAB_NUMBA=0``).
"""

from __future__ import annotations

import sys
from typing import Dict

import numpy as np

from .bootstrap import BootstrapConfig, bootstrap_replicates
from .netcore import compute_stats
from .netgen import KoskkParams, TuneTargets, koskk_generate, tune_network
from .rdssim import RdsConfig, run_rds

PROBE_SEED = 20240817


def probe_outputs(seed: int = PROBE_SEED) -> Dict[str, np.ndarray]:
    """Small but complete pipeline: generate, tune, sample, bootstrap."""
    params = KoskkParams(n=160, p_delta=0.01, steps=30000, p_r=0.002, p_d=0.002)
    net = koskk_generate(params, np.random.SeedSequence(seed, spawn_key=(0, 0)))
    targets = TuneTargets(
        p_a=0.35,
        activity_ratio=1.3,
        homophily=0.2,
        w_tolerance=0.05,
        h_tolerance=0.02,
        max_iterations=500_000,
    )
    net = tune_network(net, targets, np.random.SeedSequence(seed, spawn_key=(0, 1)))
    cfg = RdsConfig(
        n_seeds=4,
        coupons=2,
        target_size=100,
        p_diff=0.8,
        p_miss_a=0.1,
        p_miss_b=0.25,
        p_err_ab=0.1,
        p_err_ba=0.05,
    )
    sample = run_rds(net, cfg, np.random.SeedSequence(seed, spawn_key=(1, 0, 0)))
    out: Dict[str, np.ndarray] = {
        "indptr": net.indptr,
        "indices": net.indices,
        "groups": net.groups,
        "weights": net.weights,
        "node_id": sample.node_id,
        "wave": sample.wave,
        "recruiter_index": sample.recruiter_index,
        "reported_degree": sample.reported_degree,
        "reported_n_a": sample.reported_n_a,
        "reported_n_b": sample.reported_n_b,
    }
    for method in ("origin", "ego1", "ego2"):
        bs = bootstrap_replicates(
            sample,
            BootstrapConfig(method=method, replicates=50),
            np.random.SeedSequence(seed, spawn_key=(2, 0, 0)),
        )
        out[f"bs_{method}"] = bs.estimates
        out[f"bs_{method}_meta"] = np.array([bs.n_fallback_draws, bs.n_redraws], dtype=np.int64)
    stats = compute_stats(net)
    out["stats"] = np.array(
        [
            stats.p_a,
            stats.mean_degree,
            stats.homophily if stats.homophily is not None else np.nan,
            stats.activity_ratio if stats.activity_ratio is not None else np.nan,
        ]
    )
    return out


def main() -> int:
    if len(sys.argv) != 2:
        print("usage: python -m rdslab.diagnostics OUT.npz", file=sys.stderr)
        return 1
    np.savez(sys.argv[1], **probe_outputs())
    return 0


if __name__ == "__main__":
    sys.exit(main())
