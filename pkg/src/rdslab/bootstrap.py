"""Chain bootstrap confidence intervals for recruitment samples.

Replicates rebuild synthetic chains of the original sample size from the
non-seed rows and re-estimate on each. Three resampling schemes:

* ``origin``: members are partitioned by their recruiter's group; the
  chain hops into the partition named by the current member's group, and
  the replicate is estimated like ``rdsi`` from the synthetic chain's own
  transitions.
* ``ego1``: same resampling walk, estimated like ``rdsi_ego`` from the
  resampled members' reported alter shares.
* ``ego2``: members are partitioned by their own group; the chain hops
  between partitions with the original sample's ego cross proportions, and
  is estimated like ``rdsi_ego``.

An interval is formed from the sorted replicate estimates by dropping
``ceil(R * (1 - level) / 2)`` order statistics on each side. Undefined
replicate estimates are redrawn (up to ``R`` extra attempts overall);
an empty partition needed mid-walk falls back to a uniform draw over all
non-seed rows and is counted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from ._rng import RngLike, as_seed_sequence
from .errors import BootstrapError, ValidationError
from .netcore import Group
from .rdssim import RdsConfig, RdsSample, run_rds
from .estimate import ego_matrix

METHODS = ("origin", "ego1", "ego2")


@dataclass(frozen=True)
class BootstrapConfig:
    method: str = "origin"
    replicates: int = 1000
    level: float = 0.95

    def validate(self) -> None:
        if self.method not in METHODS:
            raise ValidationError(f"bootstrap method must be one of {METHODS}")
        if self.replicates < 2:
            raise ValidationError("need at least two replicates")
        if not 0.0 < self.level < 1.0:
            raise ValidationError("confidence level must lie strictly in (0, 1)")


@dataclass(frozen=True)
class ConfidenceInterval:
    lower: float
    upper: float
    level: float

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper

    @property
    def width(self) -> float:
        return self.upper - self.lower


@dataclass
class BootstrapResult:
    """Replicate estimates plus resampling diagnostics."""

    estimates: np.ndarray
    n_fallback_draws: int
    n_redraws: int


def bootstrap_replicates(sample: RdsSample, cfg: BootstrapConfig, rng: RngLike) -> BootstrapResult:
    """Draw ``cfg.replicates`` defined replicate estimates.

    A replicate whose estimate is undefined is redrawn with fresh
    randomness; the total redraw budget is ``cfg.replicates``, after which
    :class:`BootstrapError` is raised.
    """
    cfg.validate()
    mask = ~sample.is_seed
    if not mask.any():
        raise ValidationError("bootstrap needs at least one non-seed respondent")
    codes = sample.true_group[mask].astype(np.uint8)
    degrees = sample.reported_degree[mask].astype(np.float64)
    if np.any(degrees < 1):
        raise ValidationError("reported degrees must be at least 1")
    rep_na = sample.reported_n_a[mask].astype(np.float64)
    rep_nb = sample.reported_n_b[mask].astype(np.float64)
    n = int(codes.size)

    if cfg.method in ("origin", "ego1"):
        rec_codes = sample.recruiter_group()[mask]
        part_a = np.flatnonzero(rec_codes == Group.A).astype(np.int64)
        part_b = np.flatnonzero(rec_codes == Group.B).astype(np.int64)
    else:
        part_a = np.flatnonzero(codes == Group.A).astype(np.int64)
        part_b = np.flatnonzero(codes == Group.B).astype(np.int64)
        ego = ego_matrix(sample)
        s_ab0 = ego.s_ab if ego.s_ab is not None else 0.0
        s_ba0 = ego.s_ba if ego.s_ba is not None else 0.0

    draws_per = 2 * n + 8
    children = as_seed_sequence(rng).spawn(cfg.replicates)
    estimates = np.empty(cfg.replicates, dtype=np.float64)
    fallbacks = 0
    redraws = 0
    budget = cfg.replicates
    for r in range(cfg.replicates):
        gen = np.random.Generator(np.random.PCG64(children[r]))
        while True:
            u = gen.random(draws_per)
            if cfg.method == "origin":
                est, fb = kernels.bs_origin_replicate(codes, degrees, part_a, part_b, u)
            elif cfg.method == "ego1":
                est, fb = kernels.bs_ego1_replicate(codes, degrees, rep_na, rep_nb, part_a, part_b, u)
            else:
                est, fb = kernels.bs_ego2_replicate(
                    codes, degrees, rep_na, rep_nb, part_a, part_b, s_ab0, s_ba0, u
                )
            fallbacks += int(fb)
            if not math.isnan(est):
                estimates[r] = est
                break
            redraws += 1
            if redraws > budget:
                raise BootstrapError(
                    f"more than {budget} undefined replicates; the sample cannot support "
                    f"the {cfg.method} bootstrap"
                )
    return BootstrapResult(estimates=estimates, n_fallback_draws=fallbacks, n_redraws=redraws)


def percentile_ci(estimates: np.ndarray, level: float) -> ConfidenceInterval:
    """Order-statistic interval dropping ``ceil(R(1-level)/2)`` per tail."""
    est = np.asarray(estimates, dtype=np.float64)
    if est.size < 2:
        raise ValidationError("need at least two replicate estimates")
    if np.any(np.isnan(est)):
        raise ValidationError("replicate estimates must be defined")
    if not 0.0 < level < 1.0:
        raise ValidationError("confidence level must lie strictly in (0, 1)")
    ordered = np.sort(est)
    r = ordered.size
    # The epsilon keeps binary rounding noise (e.g. 1000 * 0.05 / 2 giving
    # 25.000000000000022) from pushing an exact rank up a whole step.
    k = math.ceil(r * (1.0 - level) / 2.0 - 1e-9)
    k = min(max(k, 0), (r - 1) // 2)
    return ConfidenceInterval(float(ordered[k]), float(ordered[r - k - 1]), level)


def bootstrap_ci(sample: RdsSample, cfg: BootstrapConfig, rng: RngLike) -> ConfidenceInterval:
    """Replicates plus interval in one call."""
    result = bootstrap_replicates(sample, cfg, rng)
    return percentile_ci(result.estimates, cfg.level)


def coverage(
    net,
    rds_cfg: RdsConfig,
    bs_cfg: BootstrapConfig,
    n_samples: int,
    truth: float,
    rng: RngLike,
) -> float:
    """Share of fresh samples whose bootstrap interval covers ``truth``."""
    if n_samples < 1:
        raise ValidationError("coverage needs at least one sample")
    children = as_seed_sequence(rng).spawn(n_samples)
    hits = 0
    for child in children:
        sample_ss, bs_ss = child.spawn(2)
        sample = run_rds(net, rds_cfg, sample_ss)
        ci = bootstrap_ci(sample, bs_cfg, bs_ss)
        if ci.contains(truth):
            hits += 1
    return hits / n_samples
