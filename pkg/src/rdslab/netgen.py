"""Weighted social network generation and structure tuning.

Generation follows a coevolving weighted-graph model: repeated rounds of
weight-reinforced triad closure (local attachment), random link formation
(global attachment) and node turnover produce a community-structured graph
whose mean degree is controlled by the triad-closure probability
``p_delta``. :func:`calibrate_p_delta` finds that probability for a target
mean degree by bisection on pilot runs.

Tuning then shapes the labeled graph toward target structure without
touching the degree sequence: :func:`assign_groups` fixes the group share,
:func:`tune_activity_ratio` swaps labels until the A/B mean-degree ratio
hits its target, and :func:`tune_homophily` applies degree-preserving
double-edge swaps until the homophily level does.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import kernels
from ._rng import RngLike, as_generator, as_seed_sequence
from .errors import CalibrationError, TuningError, ValidationError
from .netcore import Group, Network, compute_stats

_CHUNK = 1 << 20
_INITIAL_CAP = 16

# Triad-closure probability calibrated once for the reference parameter set
# (w0=1, p_r=5e-4, p_d=1e-3, delta=0.6, target mean degree 10); used as the
# default when p_delta is not given explicitly.
DEFAULT_P_DELTA = 0.041


@dataclass(frozen=True)
class KoskkParams:
    """Parameters of the weighted-evolution generator.

    ``steps`` defaults to ``10**8 * n / 10**4`` rounds, scaling the
    reference run length with population size. ``p_delta`` defaults to the
    package-level calibrated value for the reference parameter set.
    """

    n: int
    w0: float = 1.0
    p_r: float = 0.0005
    p_d: float = 0.001
    delta: float = 0.6
    p_delta: Optional[float] = None
    steps: Optional[int] = None
    target_mean_degree: float = 10.0

    def validate(self) -> None:
        if self.n < 2:
            raise ValidationError("generation needs at least two nodes")
        if self.w0 <= 0:
            raise ValidationError("w0 must be positive")
        for name in ("p_r", "p_d"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValidationError(f"{name} must lie in [0, 1]")
        if self.p_delta is not None and not 0.0 <= self.p_delta <= 1.0:
            raise ValidationError("p_delta must lie in [0, 1]")
        if self.delta < 0:
            raise ValidationError("delta must be nonnegative")
        if self.steps is not None and self.steps < 0:
            raise ValidationError("steps must be nonnegative")
        if self.target_mean_degree <= 0:
            raise ValidationError("target mean degree must be positive")

    def resolved_steps(self) -> int:
        if self.steps is not None:
            return self.steps
        return int(round(1e8 * self.n / 1e4))

    def resolved_p_delta(self) -> float:
        return DEFAULT_P_DELTA if self.p_delta is None else self.p_delta


def koskk_generate(params: KoskkParams, rng: RngLike) -> Network:
    """Generate a connected weighted network.

    After the evolution rounds, every component other than the largest is
    linked into it by one edge at weight ``w0`` from a uniformly drawn
    member (isolated nodes are singleton components), so the result spans
    all ``n`` nodes and is connected. All nodes carry group B; label the
    graph afterwards with :func:`assign_groups`.
    """
    params.validate()
    gen = as_generator(rng)
    n = params.n
    nbr = np.zeros((n, _INITIAL_CAP), dtype=np.int64)
    wgt = np.zeros((n, _INITIAL_CAP), dtype=np.float64)
    deg = np.zeros(n, dtype=np.int64)
    total = params.resolved_steps()
    p_delta = params.resolved_p_delta()
    step = 0
    while step < total:
        u = gen.random(_CHUNK)
        step, nbr, wgt = kernels.koskk_evolve_chunk(
            nbr, wgt, deg, u, step, total, params.p_r, params.p_d, p_delta, params.delta, params.w0
        )
    rows = np.repeat(np.arange(n, dtype=np.int64), deg)
    cols = np.concatenate([nbr[i, : deg[i]] for i in range(n)]) if deg.sum() else np.empty(0, dtype=np.int64)
    vals = np.concatenate([wgt[i, : deg[i]] for i in range(n)]) if deg.sum() else np.empty(0, dtype=np.float64)
    keep = rows < cols
    eu = rows[keep]
    ev = cols[keep]
    ew = vals[keep]
    eu, ev, ew = _connect_components(n, eu, ev, ew, params.w0, gen)
    edges = np.stack([eu, ev], axis=1)
    return Network.from_edges(n, edges, np.ones(n, dtype=np.uint8), ew)


def _connect_components(n, eu, ev, ew, w0, gen):
    """Link every non-giant component to the giant one by a single edge."""
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import connected_components

    if n == 1:
        return eu, ev, ew
    data = np.ones(eu.size * 2, dtype=np.int8)
    adj = csr_matrix(
        (data, (np.concatenate([eu, ev]), np.concatenate([ev, eu]))), shape=(n, n)
    )
    ncomp, labels = connected_components(adj, directed=False)
    if ncomp == 1:
        return eu, ev, ew
    sizes = np.bincount(labels, minlength=ncomp)
    best_size = sizes.max()
    candidates = np.flatnonzero(sizes == best_size)
    first_seen = np.full(ncomp, n, dtype=np.int64)
    np.minimum.at(first_seen, labels, np.arange(n, dtype=np.int64))
    giant = candidates[np.argmin(first_seen[candidates])]
    giant_nodes = np.flatnonzero(labels == giant)
    add_u = []
    add_v = []
    for comp in range(ncomp):
        if comp == giant:
            continue
        members = np.flatnonzero(labels == comp)
        src = members[int(gen.random() * members.size)]
        dst = giant_nodes[int(gen.random() * giant_nodes.size)]
        add_u.append(src)
        add_v.append(dst)
    eu = np.concatenate([eu, np.asarray(add_u, dtype=np.int64)])
    ev = np.concatenate([ev, np.asarray(add_v, dtype=np.int64)])
    ew = np.concatenate([ew, np.full(len(add_u), w0, dtype=np.float64)])
    return eu, ev, ew


def calibrate_p_delta(
    params: KoskkParams,
    rng: RngLike,
    pilot_n: Optional[int] = None,
    n_pilots: int = 3,
    rel_tol: float = 0.03,
    max_bisections: int = 30,
) -> float:
    """Bisect the triad-closure probability for a target mean degree.

    Pilots run at a reduced population (default at most 1000 nodes) with
    the evolution rounds scaled in proportion, which preserves per-node
    turnover and keeps the equilibrium mean degree close to the full-size
    value. Pilot generations share the same seeds across probe values
    (common random numbers), so the probed response is monotone in
    practice and bisection converges. Raises :class:`CalibrationError`
    when the target lies outside the response at the bracket ends or the
    bisection budget runs out.
    """
    params.validate()
    target = params.target_mean_degree
    pn = min(params.n, 1000) if pilot_n is None else min(pilot_n, params.n)
    pn = max(pn, 2)
    steps = max(int(round(params.resolved_steps() * pn / params.n)), 1000)
    children = as_seed_sequence(rng).spawn(n_pilots)

    def mean_degree_at(p: float) -> float:
        probe = replace(params, n=pn, p_delta=p, steps=steps)
        degs = []
        for child in children:
            net = koskk_generate(probe, np.random.Generator(np.random.PCG64(child)))
            degs.append(compute_stats(net).mean_degree)
        return float(np.mean(degs))

    lo, hi = 0.0, 1.0
    d_lo = mean_degree_at(lo)
    if abs(d_lo - target) <= rel_tol * target:
        return lo
    if d_lo > target:
        raise CalibrationError(
            f"target mean degree {target} is below {d_lo:.3f}, the response at p_delta=0"
        )
    d_hi = mean_degree_at(hi)
    if abs(d_hi - target) <= rel_tol * target:
        return hi
    if d_hi < target:
        raise CalibrationError(
            f"target mean degree {target} is above {d_hi:.3f}, the response at p_delta=1"
        )
    for _ in range(max_bisections):
        mid = 0.5 * (lo + hi)
        d_mid = mean_degree_at(mid)
        if abs(d_mid - target) <= rel_tol * target:
            return mid
        if d_mid < target:
            lo, d_lo = mid, d_mid
        else:
            hi, d_hi = mid, d_mid
    raise CalibrationError(
        f"bisection exhausted: bracket [{lo:.6f}, {hi:.6f}] gives degrees [{d_lo:.3f}, {d_hi:.3f}]"
    )


@dataclass(frozen=True)
class TuneTargets:
    """Structural targets for a labeled network.

    ``None`` leaves a quantity untouched. Tolerances are absolute; the
    iteration budget applies to each tuning pass separately, and rejected
    proposals count against it.
    """

    p_a: Optional[float] = None
    activity_ratio: Optional[float] = None
    homophily: Optional[float] = None
    w_tolerance: float = 0.02
    h_tolerance: float = 0.005
    max_iterations: int = 10_000_000

    def validate(self) -> None:
        if self.p_a is not None and not 0.0 < self.p_a < 1.0:
            raise ValidationError("target group share must lie strictly in (0, 1)")
        if self.activity_ratio is not None and self.activity_ratio <= 0:
            raise ValidationError("target activity ratio must be positive")
        if self.homophily is not None and self.homophily >= 1.0:
            raise ValidationError("homophily targets of 1 or above are unreachable")
        if self.w_tolerance <= 0 or self.h_tolerance <= 0:
            raise ValidationError("tolerances must be positive")
        if self.max_iterations < 1:
            raise ValidationError("iteration budget must be positive")


def assign_groups(net: Network, p_a: float, rng: RngLike) -> Network:
    """Relabel nodes so a uniformly chosen ``round(p_a * n)`` carry group A."""
    if not 0.0 <= p_a <= 1.0:
        raise ValidationError("group share must lie in [0, 1]")
    gen = as_generator(rng)
    n_a = int(math.floor(p_a * net.n + 0.5))
    codes = np.ones(net.n, dtype=np.uint8)
    codes[gen.permutation(net.n)[:n_a]] = Group.A
    return net.with_groups(codes)


def tune_activity_ratio(net: Network, targets: TuneTargets, rng: RngLike) -> Network:
    """Swap group labels until the A/B mean-degree ratio hits its target.

    Swaps preserve group sizes and the degree sequence; only the labeling
    changes. Raises :class:`TuningError` (carrying the best ratio reached)
    when the iteration budget is exhausted.
    """
    targets.validate()
    if targets.activity_ratio is None:
        return net
    gen = as_generator(rng)
    codes = net.groups.copy()
    degrees = net.degrees.astype(np.int64)
    list_a = np.flatnonzero(codes == Group.A).astype(np.int64)
    list_b = np.flatnonzero(codes == Group.B).astype(np.int64)
    if list_a.size == 0 or list_b.size == 0:
        raise ValidationError("activity tuning needs both groups present")
    sum_a = int(degrees[list_a].sum())
    sum_b = int(degrees[list_b].sum())
    if sum_a == 0 or sum_b == 0:
        raise ValidationError("activity tuning needs edges in both groups")
    iters = 0
    while True:
        u = gen.random(_CHUNK)
        status, iters, sum_a, sum_b, best = kernels.swap_labels_chunk(
            codes,
            degrees,
            list_a,
            list_b,
            sum_a,
            sum_b,
            targets.activity_ratio,
            targets.w_tolerance,
            u,
            iters,
            targets.max_iterations,
        )
        if status == 1:
            return net.with_groups(codes)
        if status == 2:
            raise TuningError(
                f"activity ratio {targets.activity_ratio} not reached within "
                f"{targets.max_iterations} iterations (best {best:.4f})",
                best=best,
            )


def tune_homophily(net: Network, targets: TuneTargets, rng: RngLike) -> Network:
    """Rewire edges until homophily hits its target.

    Double-edge swaps preserve every node's degree and group, so the group
    share and activity ratio survive. Swapped edges keep their weights.
    Raises :class:`TuningError` (carrying the best level reached) when the
    iteration budget is exhausted.
    """
    targets.validate()
    if targets.homophily is None:
        return net
    gen = as_generator(rng)
    n_a, n_b = net.group_counts()
    if n_a == 0 or n_b == 0:
        raise ValidationError("homophily tuning needs both groups present")
    degrees = net.degrees.astype(np.int64)
    sum_deg_a = float(degrees[net.groups == Group.A].sum())
    if sum_deg_a == 0:
        raise ValidationError("homophily tuning needs group A to have edges")
    p_b = n_b / net.n
    eu, ev, ew = net.edge_list()
    eu = eu.copy()
    ev = ev.copy()
    m = eu.size
    # Orient cross edges A-end first so the kernel can rely on it.
    a_end = net.groups[eu] == Group.A
    b_end = net.groups[ev] == Group.A
    flip = ~a_end & b_end
    eu[flip], ev[flip] = ev[flip], eu[flip]
    etype = net.groups[eu].astype(np.int64) + net.groups[ev]  # 0=AA, 1=cross, 2=BB
    idx_aa = np.zeros(m, dtype=np.int64)
    idx_bb = np.zeros(m, dtype=np.int64)
    idx_x = np.zeros(m, dtype=np.int64)
    slot = np.zeros(m, dtype=np.int64)
    aa = np.flatnonzero(etype == 0)
    bb = np.flatnonzero(etype == 2)
    xx = np.flatnonzero(etype == 1)
    idx_aa[: aa.size] = aa
    idx_bb[: bb.size] = bb
    idx_x[: xx.size] = xx
    slot[aa] = np.arange(aa.size)
    slot[bb] = np.arange(bb.size)
    slot[xx] = np.arange(xx.size)
    n_aa, n_bb, n_x = aa.size, bb.size, xx.size
    cap = max(int(degrees.max()), 1)
    nbr = np.zeros((net.n, cap), dtype=np.int64)
    fill = np.zeros(net.n, dtype=np.int64)
    for s, d in ((eu, ev), (ev, eu)):
        for e in range(m):
            nbr[s[e], fill[s[e]]] = d[e]
            fill[s[e]] += 1
    iters = 0
    while True:
        u = gen.random(_CHUNK)
        status, iters, n_aa, n_bb, n_x, best = kernels.rewire_edges_chunk(
            nbr,
            degrees,
            eu,
            ev,
            idx_aa,
            idx_bb,
            idx_x,
            n_aa,
            n_bb,
            n_x,
            slot,
            sum_deg_a,
            p_b,
            targets.homophily,
            targets.h_tolerance,
            u,
            iters,
            targets.max_iterations,
        )
        if status == 1:
            break
        if status == 2:
            raise TuningError(
                f"homophily {targets.homophily} not reached within "
                f"{targets.max_iterations} iterations (best {best:.4f})",
                best=best,
            )
    edges = np.stack([eu, ev], axis=1)
    return Network.from_edges(net.n, edges, net.groups.copy(), ew.copy() if ew is not None else None)


def tune_network(net: Network, targets: TuneTargets, rng: RngLike) -> Network:
    """Apply group share, activity ratio, then homophily tuning in order.

    The order matters: label swaps move homophily as a side effect, while
    edge rewires preserve labels and degrees, so activity runs first.
    """
    targets.validate()
    ss = as_seed_sequence(rng)
    assign_ss, w_ss, h_ss = ss.spawn(3)
    out = net
    if targets.p_a is not None:
        out = assign_groups(out, targets.p_a, np.random.Generator(np.random.PCG64(assign_ss)))
    if targets.activity_ratio is not None:
        out = tune_activity_ratio(out, targets, np.random.Generator(np.random.PCG64(w_ss)))
    if targets.homophily is not None:
        out = tune_homophily(out, targets, np.random.Generator(np.random.PCG64(h_ss)))
    return out


def generate_tuned(
    params: KoskkParams, targets: TuneTargets, rng: RngLike
) -> Network:
    """Generate, keep the giant component implicit (the graph is connected),
    then tune to the requested structure."""
    ss = as_seed_sequence(rng)
    gen_ss, tune_ss = ss.spawn(2)
    net = koskk_generate(params, np.random.Generator(np.random.PCG64(gen_ss)))
    return tune_network(net, targets, tune_ss)
