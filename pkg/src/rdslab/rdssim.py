"""Respondent-driven sampling over a fixed network.

:func:`run_rds` walks coupon-based recruitment across a network: seeds are
drawn (uniformly or degree-proportionally), each respondent passes up to
``coupons`` coupons to neighbors, and recruitment can favor group-A
neighbors (differential recruitment). Sampling is without replacement by
default; a with-replacement mode exists for sanity checks against random
walk theory. Dead chains are reseeded until the target size is reached
unless disabled.

Each respondent reports a degree and per-group alter tallies through a
two-stage error channel (:func:`apply_report_errors`): alters are first
dropped independently at a group-specific miss rate (with an all-missing
report floored to one alter), then surviving alters are misclassified
independently. Estimators consume these reported values, never the truth.

Randomness is split into three independent substreams (seed draws,
recruitment, reporting errors), so changing error parameters never
perturbs the recruitment trajectory.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from . import kernels
from ._rng import RngLike, as_generator, as_seed_sequence
from .errors import ValidationError
from .netcore import Group, Network

_SEED_REC_CODE = 255  # recruiter group code marking a seed row

SEED_MODES = ("uniform", "degree_proportional")


@dataclass(frozen=True)
class RdsConfig:
    """Sampling design and error-channel parameters.

    ``p_diff`` is the extra recruitment weight on group-A neighbors: a
    coupon goes to each eligible A neighbor with weight ``1 + p_diff``
    against 1 for B, so ``p_diff=1`` makes A twice as likely per neighbor.
    ``p_miss_*`` are stage-one per-alter miss rates by alter group and
    ``p_err_ab``/``p_err_ba`` stage-two misclassification rates.
    """

    n_seeds: int = 6
    coupons: int = 2
    target_size: int = 500
    seed_mode: str = "uniform"
    with_replacement: bool = False
    reseed_on_dieout: bool = True
    p_diff: float = 0.0
    p_miss_a: float = 0.0
    p_miss_b: float = 0.0
    p_err_ab: float = 0.0
    p_err_ba: float = 0.0

    def validate(self) -> None:
        if self.n_seeds < 1:
            raise ValidationError("need at least one seed")
        if self.coupons < 0:
            raise ValidationError("coupon count cannot be negative")
        if self.target_size < self.n_seeds:
            raise ValidationError("target size cannot be below the seed count")
        if self.seed_mode not in SEED_MODES:
            raise ValidationError(f"seed mode must be one of {SEED_MODES}")
        if self.p_diff < 0:
            raise ValidationError("p_diff must be nonnegative")
        for name in ("p_miss_a", "p_miss_b", "p_err_ab", "p_err_ba"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValidationError(f"{name} must lie in [0, 1]")

    @property
    def error_free(self) -> bool:
        return (
            self.p_miss_a == 0.0
            and self.p_miss_b == 0.0
            and self.p_err_ab == 0.0
            and self.p_err_ba == 0.0
        )


@dataclass(frozen=True)
class Respondent:
    """One sampled row in recruitment order."""

    node_id: int
    wave: int
    recruiter: Optional[int]
    true_group: Group
    true_degree: int
    reported_degree: int
    reported_n_a: int
    reported_n_b: int

    @property
    def is_seed(self) -> bool:
        return self.recruiter is None


@dataclass
class RdsSample:
    """Columnar recruitment record, rows in recruitment order.

    ``recruiter_index`` points at the recruiter's row (-1 for seeds; note
    reseeded rows are seeds at wave 0 too). ``complete`` is False when
    recruitment exhausted the population before reaching the target size.
    """

    node_id: np.ndarray
    wave: np.ndarray
    recruiter_index: np.ndarray
    true_group: np.ndarray
    true_degree: np.ndarray
    reported_degree: np.ndarray
    reported_n_a: np.ndarray
    reported_n_b: np.ndarray
    complete: bool = True
    node_labels: Optional[List[str]] = None

    @property
    def size(self) -> int:
        return int(self.node_id.size)

    @property
    def is_seed(self) -> np.ndarray:
        return self.recruiter_index < 0

    @property
    def n_nonseed(self) -> int:
        return int(np.count_nonzero(~self.is_seed))

    def recruiter_group(self) -> np.ndarray:
        """Per row, the recruiter's true group code (255 for seeds)."""
        out = np.full(self.size, _SEED_REC_CODE, dtype=np.uint8)
        rec = self.recruiter_index
        has = rec >= 0
        out[has] = self.true_group[rec[has]]
        return out

    def recruitment_edges(self) -> np.ndarray:
        """(m, 2) array of (recruiter row, recruit row) index pairs."""
        rows = np.flatnonzero(self.recruiter_index >= 0)
        return np.stack([self.recruiter_index[rows], rows], axis=1)

    def respondents(self) -> List[Respondent]:
        out = []
        for i in range(self.size):
            rec = int(self.recruiter_index[i])
            out.append(
                Respondent(
                    node_id=int(self.node_id[i]),
                    wave=int(self.wave[i]),
                    recruiter=None if rec < 0 else int(self.node_id[rec]),
                    true_group=Group(int(self.true_group[i])),
                    true_degree=int(self.true_degree[i]),
                    reported_degree=int(self.reported_degree[i]),
                    reported_n_a=int(self.reported_n_a[i]),
                    reported_n_b=int(self.reported_n_b[i]),
                )
            )
        return out

    def label_of(self, row: int) -> str:
        if self.node_labels is not None:
            return self.node_labels[row]
        return str(int(self.node_id[row]))

    def validate(self, expect_unique_nodes: bool = False) -> None:
        n = self.size
        arrays = (
            self.node_id,
            self.wave,
            self.recruiter_index,
            self.true_group,
            self.true_degree,
            self.reported_degree,
            self.reported_n_a,
            self.reported_n_b,
        )
        if any(a.shape != (n,) for a in arrays):
            raise ValidationError("sample columns must share one length")
        if n == 0:
            raise ValidationError("sample is empty")
        for i in range(n):
            rec = int(self.recruiter_index[i])
            if rec >= i:
                raise ValidationError(f"row {i}: recruiter must precede recruit")
            if rec < 0:
                if self.wave[i] != 0:
                    raise ValidationError(f"row {i}: seed rows must be wave 0")
            else:
                if self.wave[i] != self.wave[rec] + 1:
                    raise ValidationError(f"row {i}: wave must be recruiter wave + 1")
        if np.any(self.reported_degree < 1):
            raise ValidationError("reported degrees must be at least 1")
        if np.any(self.reported_n_a + self.reported_n_b != self.reported_degree):
            raise ValidationError("reported group tallies must sum to the reported degree")
        if np.any(self.reported_n_a < 0) or np.any(self.reported_n_b < 0):
            raise ValidationError("reported tallies must be nonnegative")
        if expect_unique_nodes and np.unique(self.node_id).size != n:
            raise ValidationError("respondents must be distinct when sampling without replacement")


def draw_seeds(net: Network, n_seeds: int, seed_mode: str, rng: RngLike) -> np.ndarray:
    """Draw distinct seed nodes, uniformly or proportional to degree."""
    if n_seeds < 1:
        raise ValidationError("need at least one seed")
    if n_seeds > net.n:
        raise ValidationError("cannot draw more seeds than nodes")
    if seed_mode not in SEED_MODES:
        raise ValidationError(f"seed mode must be one of {SEED_MODES}")
    gen = as_generator(rng)
    if seed_mode == "uniform":
        return gen.choice(net.n, size=n_seeds, replace=False).astype(np.int64)
    deg = net.degrees.astype(np.float64)
    total = deg.sum()
    if total <= 0:
        raise ValidationError("degree-proportional seeding needs at least one edge")
    return gen.choice(net.n, size=n_seeds, replace=False, p=deg / total).astype(np.int64)


def run_rds(net: Network, cfg: RdsConfig, rng: RngLike) -> RdsSample:
    """Simulate one recruitment chain collection.

    The network is assumed connected (generation guarantees this); on a
    disconnected network without-replacement recruitment can exhaust the
    reachable population, in which case the sample is returned short with
    ``complete=False``. Reported quantities come from the error channel;
    with all error rates zero they equal the true values.
    """
    cfg.validate()
    if cfg.n_seeds > net.n:
        raise ValidationError("cannot draw more seeds than nodes")
    if not cfg.with_replacement and cfg.target_size > net.n:
        raise ValidationError("target size exceeds the population without replacement")
    ss = as_seed_sequence(rng)
    seed_ss, rec_ss, err_ss = ss.spawn(3)
    seed_gen = np.random.Generator(np.random.PCG64(seed_ss))
    rec_gen = np.random.Generator(np.random.PCG64(rec_ss))

    seeds = draw_seeds(net, cfg.n_seeds, cfg.seed_mode, seed_gen)
    target = cfg.target_size
    out_node = np.zeros(target, dtype=np.int64)
    out_wave = np.zeros(target, dtype=np.int64)
    out_recpos = np.full(target, -1, dtype=np.int64)
    sampled = np.zeros(net.n, dtype=np.uint8)
    out_node[: seeds.size] = seeds
    if not cfg.with_replacement:
        sampled[seeds] = 1
    filled = int(seeds.size)
    head = 0
    picked_buf = np.zeros(cfg.coupons, dtype=np.int64)
    cum_deg = np.zeros(net.n + 1, dtype=np.float64)
    np.cumsum(net.degrees, out=cum_deg[1:])
    degprop = cfg.seed_mode == "degree_proportional"
    chunk = max(4096, min(_rds_chunk_size(cfg), 1 << 20))
    status = 0
    while status == 0:
        u = rec_gen.random(chunk)
        status, head, filled = kernels.rds_chunk(
            net.indptr,
            net.indices,
            net.groups,
            cfg.coupons,
            target,
            1.0 + cfg.p_diff,
            cfg.with_replacement,
            cfg.reseed_on_dieout,
            degprop,
            cum_deg,
            sampled,
            out_node,
            out_wave,
            out_recpos,
            picked_buf,
            u,
            head,
            filled,
        )
    node = out_node[:filled]
    wave = out_wave[:filled]
    recpos = out_recpos[:filled]
    true_group = net.groups[node].copy()
    true_degree = net.degrees[node].astype(np.int64)
    rec_codes = np.full(filled, _SEED_REC_CODE, dtype=np.uint8)
    has = recpos >= 0
    rec_codes[has] = true_group[recpos[has]]
    if cfg.error_free:
        na, nb = net.neighbor_group_counts()
        reported_degree = true_degree.copy()
        reported_n_a = na[node].astype(np.int64)
        reported_n_b = nb[node].astype(np.int64)
    else:
        err_gen = np.random.Generator(np.random.PCG64(err_ss))
        reported_degree = np.zeros(filled, dtype=np.int64)
        reported_n_a = np.zeros(filled, dtype=np.int64)
        reported_n_b = np.zeros(filled, dtype=np.int64)
        budget = int(2 * true_degree.sum() + 2 * filled)
        u = err_gen.random(budget)
        kernels.report_errors_block(
            node,
            rec_codes,
            net.indptr,
            net.indices,
            net.groups,
            cfg.p_miss_a,
            cfg.p_miss_b,
            cfg.p_err_ab,
            cfg.p_err_ba,
            u,
            reported_degree,
            reported_n_a,
            reported_n_b,
        )
    return RdsSample(
        node_id=node.copy(),
        wave=wave.copy(),
        recruiter_index=recpos.copy(),
        true_group=true_group,
        true_degree=true_degree,
        reported_degree=reported_degree,
        reported_n_a=reported_n_a,
        reported_n_b=reported_n_b,
        complete=status == 1,
    )


def _rds_chunk_size(cfg: RdsConfig) -> int:
    per_unit = cfg.coupons + kernels.RDS_DRAWS_PER_UNIT
    return int(cfg.target_size * per_unit + 2 * per_unit)


def apply_report_errors(
    node: int,
    net: Network,
    cfg: RdsConfig,
    rng: RngLike,
    recruiter_group: Optional[Group] = None,
) -> Tuple[int, int, int]:
    """Reported (degree, n_A, n_B) for one respondent.

    ``recruiter_group=None`` marks a seed: an all-missing report is then
    floored with a uniformly drawn true alter instead of the recruiter's
    group.
    """
    cfg.validate()
    gen = as_generator(rng)
    rec = np.array(
        [_SEED_REC_CODE if recruiter_group is None else int(recruiter_group)],
        dtype=np.uint8,
    )
    ids = np.array([node], dtype=np.int64)
    out_deg = np.zeros(1, dtype=np.int64)
    out_na = np.zeros(1, dtype=np.int64)
    out_nb = np.zeros(1, dtype=np.int64)
    budget = int(2 * net.degree(node) + 2)
    u = gen.random(budget)
    kernels.report_errors_block(
        ids,
        rec,
        net.indptr,
        net.indices,
        net.groups,
        cfg.p_miss_a,
        cfg.p_miss_b,
        cfg.p_err_ab,
        cfg.p_err_ba,
        u,
        out_deg,
        out_na,
        out_nb,
    )
    return int(out_deg[0]), int(out_na[0]), int(out_nb[0])
