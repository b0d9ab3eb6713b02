"""Compiled and pure-Python kernels must produce bit-identical output.

Both backends consume the same caller-supplied uniform buffers, so every
array they touch and every value they return must match exactly, not just
statistically. The subprocess test checks the full pipeline under
``RDSLAB_NUMBA=0``; the direct tests compare each kernel against its own
``py_func`` on small inputs.
"""

import os
import subprocess
import sys

import numpy as np
import pytest

from _helpers import build_network, rdsi_oracle_sample
from rdslab import kernels
from rdslab._jit import NUMBA_ENABLED, python_impl
from rdslab.diagnostics import probe_outputs

needs_numba = pytest.mark.skipif(
    not NUMBA_ENABLED, reason="compiled backend unavailable; nothing to compare"
)


@needs_numba
def test_probe_matches_pure_python_subprocess(tmp_path):
    out = tmp_path / "pure.npz"
    env = dict(os.environ, RDSLAB_NUMBA="0")
    proc = subprocess.run(
        [sys.executable, "-m", "rdslab.diagnostics", str(out)],
        env=env,
        capture_output=True,
        text=True,
        timeout=300,
    )
    assert proc.returncode == 0, proc.stderr
    pure = np.load(out)
    compiled = probe_outputs()
    assert sorted(pure.files) == sorted(compiled)
    for key in compiled:
        a, b = np.asarray(compiled[key]), pure[key]
        assert a.dtype == b.dtype, key
        if a.dtype.kind == "f":
            assert np.array_equal(a, b, equal_nan=True), key
        else:
            assert np.array_equal(a, b), key


def run_both(fn, make_args):
    """Call the kernel and its pure twin on independently built inputs."""
    compiled_args = make_args()
    pure_args = make_args()
    res_c = fn(*compiled_args)
    res_p = python_impl(fn)(*pure_args)
    return res_c, compiled_args, res_p, pure_args


def assert_same(res_c, args_c, res_p, args_p):
    flat_c = res_c if isinstance(res_c, tuple) else (res_c,)
    flat_p = res_p if isinstance(res_p, tuple) else (res_p,)
    assert len(flat_c) == len(flat_p)
    for x, y in zip(flat_c, flat_p):
        if isinstance(x, np.ndarray):
            assert np.array_equal(np.asarray(x), np.asarray(y), equal_nan=True)
        elif isinstance(x, float) and np.isnan(x):
            assert np.isnan(y)
        else:
            assert x == y
    for x, y in zip(args_c, args_p):
        if isinstance(x, np.ndarray):
            kw = {"equal_nan": True} if x.dtype.kind == "f" else {}
            assert np.array_equal(x, y, **kw)


@needs_numba
class TestDirectKernelParity:
    def test_koskk_evolve_chunk(self):
        n = 40

        def make():
            return (
                np.zeros((n, 64), dtype=np.int64),
                np.zeros((n, 64), dtype=np.float64),
                np.zeros(n, dtype=np.int64),
                np.random.default_rng(77).random(20000),
                0,
                2000,
                0.01,
                0.01,
                0.5,
                0.6,
                1.0,
            )

        res_c, args_c, res_p, args_p = run_both(kernels.koskk_evolve_chunk, make)
        # The adjacency arrays may be reallocated and returned; compare
        # those plus the in-place degree array.
        assert res_c[0] == res_p[0]
        assert np.array_equal(res_c[1], res_p[1])
        assert np.array_equal(res_c[2], res_p[2])
        assert np.array_equal(args_c[2], args_p[2])

    def test_swap_labels_chunk(self):
        rng = np.random.default_rng(3)
        degrees = rng.integers(1, 12, size=30).astype(np.int64)
        codes0 = (np.arange(30) >= 12).astype(np.uint8)

        def make():
            codes = codes0.copy()
            list_a = np.flatnonzero(codes == 0).astype(np.int64)
            list_b = np.flatnonzero(codes == 1).astype(np.int64)
            return (
                codes,
                degrees.copy(),
                list_a,
                list_b,
                int(degrees[list_a].sum()),
                int(degrees[list_b].sum()),
                1.5,
                0.01,
                np.random.default_rng(8).random(5000),
                0,
                1000,
            )

        assert_same(*run_both(kernels.swap_labels_chunk, make))

    def test_rewire_edges_chunk(self):
        codes = np.array([0, 0, 0, 1, 1, 1], dtype=np.uint8)
        edges = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (0, 3), (1, 4)]

        def make():
            m = len(edges)
            eu = np.array([e[0] for e in edges], dtype=np.int64)
            ev = np.array([e[1] for e in edges], dtype=np.int64)
            deg = np.zeros(6, dtype=np.int64)
            nbr = np.zeros((6, 8), dtype=np.int64)
            for a, b in edges:
                nbr[a, deg[a]] = b
                deg[a] += 1
                nbr[b, deg[b]] = a
                deg[b] += 1
            idx_aa = np.full(m, -1, dtype=np.int64)
            idx_bb = np.full(m, -1, dtype=np.int64)
            idx_x = np.full(m, -1, dtype=np.int64)
            slot = np.zeros(m, dtype=np.int64)
            n_aa = n_bb = n_x = 0
            for e in range(m):
                ga, gb = codes[eu[e]], codes[ev[e]]
                if ga == 0 and gb == 0:
                    idx_aa[n_aa] = e
                    slot[e] = n_aa
                    n_aa += 1
                elif ga == 1 and gb == 1:
                    idx_bb[n_bb] = e
                    slot[e] = n_bb
                    n_bb += 1
                else:
                    idx_x[n_x] = e
                    slot[e] = n_x
                    n_x += 1
            sum_deg_a = int(deg[codes == 0].sum())
            return (
                nbr,
                deg,
                eu,
                ev,
                idx_aa,
                idx_bb,
                idx_x,
                n_aa,
                n_bb,
                n_x,
                slot,
                float(sum_deg_a),
                0.5,
                0.0,
                0.01,
                np.random.default_rng(21).random(3000),
                0,
                500,
            )

        assert_same(*run_both(kernels.rewire_edges_chunk, make))

    def test_rds_chunk(self):
        n = 12
        net = build_network(
            [(i, j) for i in range(n) for j in range(i + 1, n)],
            [0] * 5 + [1] * 7,
        )

        def make():
            sampled = np.zeros(n, dtype=np.uint8)
            out_node = np.full(10, -1, dtype=np.int64)
            out_wave = np.full(10, -1, dtype=np.int64)
            out_recpos = np.full(10, -1, dtype=np.int64)
            out_node[0], out_node[1] = 0, 5
            out_wave[0] = out_wave[1] = 0
            sampled[0] = sampled[5] = 1
            deg = np.diff(net.indptr).astype(np.float64)
            cum = np.zeros(n + 1)
            cum[1:] = np.cumsum(deg)
            return (
                net.indptr,
                net.indices,
                net.groups,
                2,
                10,
                1.5,
                False,
                True,
                False,
                cum,
                sampled,
                out_node,
                out_wave,
                out_recpos,
                np.zeros(2, dtype=np.int64),
                np.random.default_rng(55).random(1024),
                0,
                2,
            )

        assert_same(*run_both(kernels.rds_chunk, make))

    def test_report_errors_block(self):
        n = 8
        net = build_network(
            [(0, k) for k in range(1, n)] + [(1, 2), (3, 4)],
            [0, 0, 1, 0, 1, 1, 0, 1],
        )

        def make():
            node_ids = np.array([0, 2, 4, 6], dtype=np.int64)
            rec_codes = np.array([255, 0, 1, 0], dtype=np.uint8)
            rows = node_ids.size
            return (
                node_ids,
                rec_codes,
                net.indptr,
                net.indices,
                net.groups,
                0.4,
                0.2,
                0.15,
                0.25,
                np.random.default_rng(31).random(256),
                np.zeros(rows, dtype=np.int64),
                np.zeros(rows, dtype=np.int64),
                np.zeros(rows, dtype=np.int64),
            )

        assert_same(*run_both(kernels.report_errors_block, make))

    @pytest.mark.parametrize("method", ["origin", "ego1", "ego2"])
    def test_bootstrap_replicates_kernels(self, method):
        sample = rdsi_oracle_sample()
        mask = ~sample.is_seed
        codes = sample.true_group[mask].astype(np.uint8)
        degrees = sample.reported_degree[mask].astype(np.float64)
        rep_na = sample.reported_n_a[mask].astype(np.float64)
        rep_nb = sample.reported_n_b[mask].astype(np.float64)
        rec = sample.recruiter_group()[mask]
        part_a = np.flatnonzero(rec == 0).astype(np.int64)
        part_b = np.flatnonzero(rec == 1).astype(np.int64)
        own_a = np.flatnonzero(codes == 0).astype(np.int64)
        own_b = np.flatnonzero(codes == 1).astype(np.int64)
        for trial in range(20):
            u = np.random.default_rng(1000 + trial).random(2 * codes.size + 8)
            if method == "origin":
                fn, args = kernels.bs_origin_replicate, (codes, degrees, part_a, part_b, u)
            elif method == "ego1":
                fn, args = kernels.bs_ego1_replicate, (
                    codes, degrees, rep_na, rep_nb, part_a, part_b, u,
                )
            else:
                fn, args = kernels.bs_ego2_replicate, (
                    codes, degrees, rep_na, rep_nb, own_a, own_b, 0.5, 0.5, u,
                )
            est_c, fb_c = fn(*args)
            est_p, fb_p = python_impl(fn)(*args)
            assert fb_c == fb_p
            if np.isnan(est_c):
                assert np.isnan(est_p)
            else:
                assert est_c == est_p
