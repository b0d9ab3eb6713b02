"""Estimators of the group-A population share from a recruitment sample.

All estimators exclude seed rows and consume reported quantities only.
Three families are implemented:

* the raw sample proportion,
* reciprocity-based estimators that combine observed recruitment
  proportions with harmonic mean reported degrees (``rdsi``) or weight
  members by inverse reported degree directly (``rdsii``),
* an ego-report variant (``rdsi_ego``) that replaces the observed
  recruitment proportions with the mean reported cross-alter shares, which
  recruiters cannot distort.

Estimates are ``None`` when a defining denominator is empty (for example a
group with no recruitments); callers decide how to aggregate undefined
values. Single-group samples sit at the boundary: an all-A sample yields 1
and an all-B sample 0 for the reciprocity estimators.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from .errors import ValidationError
from .netcore import Group, RecruitmentMatrix
from .rdssim import RdsSample


@dataclass(frozen=True)
class EstimateSet:
    """Every estimator evaluated once on one sample."""

    sample_proportion: float
    rdsi: Optional[float]
    rdsii: Optional[float]
    rdsi_ego: Optional[float]
    s_observed: RecruitmentMatrix
    s_ego: RecruitmentMatrix
    mean_degree_a: Optional[float]
    mean_degree_b: Optional[float]
    n_nonseed: int

    def to_dict(self) -> Dict[str, Optional[float]]:
        return {
            "sample": self.sample_proportion,
            "rdsi": self.rdsi,
            "rdsii": self.rdsii,
            "rdsi_ego": self.rdsi_ego,
            "s_ab": self.s_observed.s_ab,
            "s_ba": self.s_observed.s_ba,
            "s_ego_ab": self.s_ego.s_ab,
            "s_ego_ba": self.s_ego.s_ba,
            "mean_degree_a": self.mean_degree_a,
            "mean_degree_b": self.mean_degree_b,
        }


def _nonseed_mask(sample: RdsSample) -> np.ndarray:
    mask = ~sample.is_seed
    if not mask.any():
        raise ValidationError("estimation needs at least one non-seed respondent")
    return mask


def sample_proportion(sample: RdsSample) -> float:
    """Share of group-A members among non-seed respondents."""
    mask = _nonseed_mask(sample)
    g = sample.true_group[mask]
    return float(np.count_nonzero(g == Group.A) / g.size)


def observed_matrix(sample: RdsSample) -> RecruitmentMatrix:
    """Recruitment proportions from recruiter group to recruit group.

    Only recruitments made by non-seed respondents count; edges leaving a
    seed would smuggle seed attributes into the estimators. Rows with no
    recruitments are undefined.
    """
    rec = sample.recruiter_index
    rows = np.flatnonzero(rec >= 0)
    rows = rows[rec[rec[rows]] >= 0]
    src = sample.true_group[rec[rows]]
    dst = sample.true_group[rows]
    counts = np.bincount(src.astype(np.int64) * 2 + dst, minlength=4)
    return RecruitmentMatrix.from_counts(*(int(c) for c in counts))


def ego_matrix(sample: RdsSample) -> RecruitmentMatrix:
    """Mean reported alter shares by respondent group.

    For group X the cross entry is the average over non-seed X members of
    (reported alters in the other group) / (reported degree). Seeds are
    excluded as everywhere; a group with no non-seed members has an
    undefined row.
    """
    mask = _nonseed_mask(sample)
    g = sample.true_group[mask]
    deg = sample.reported_degree[mask].astype(np.float64)
    if np.any(deg < 1):
        raise ValidationError("reported degrees must be at least 1")
    share_a = sample.reported_n_a[mask] / deg
    share_b = sample.reported_n_b[mask] / deg
    is_a = g == Group.A
    is_b = ~is_a
    if is_a.any():
        s_aa = float(share_a[is_a].mean())
        s_ab = float(share_b[is_a].mean())
    else:
        s_aa = s_ab = None
    if is_b.any():
        s_ba = float(share_a[is_b].mean())
        s_bb = float(share_b[is_b].mean())
    else:
        s_ba = s_bb = None
    return RecruitmentMatrix(s_aa, s_ab, s_ba, s_bb)


def mean_degree_estimate(sample: RdsSample, group: Group) -> float:
    """Harmonic mean of reported degrees among non-seed members of a group.

    The harmonic mean undoes the degree-proportional inclusion bias of
    chain recruitment. Raises when the group has no non-seed members.
    """
    mask = _nonseed_mask(sample)
    sel = sample.true_group[mask] == group
    if not sel.any():
        raise ValidationError(f"no non-seed respondents in group {Group(group).name}")
    deg = sample.reported_degree[mask][sel].astype(np.float64)
    if np.any(deg < 1):
        raise ValidationError("reported degrees must be at least 1")
    return float(deg.size / np.sum(1.0 / deg))


def rdsii(sample: RdsSample) -> Optional[float]:
    """Inverse-reported-degree weighted share of group A."""
    mask = _nonseed_mask(sample)
    g = sample.true_group[mask]
    deg = sample.reported_degree[mask].astype(np.float64)
    if np.any(deg < 1):
        raise ValidationError("reported degrees must be at least 1")
    inv = 1.0 / deg
    return float(inv[g == Group.A].sum() / inv.sum())


def rdsi_from_parts(
    s_ab: float, s_ba: float, dbar_a: float, dbar_b: float
) -> Optional[float]:
    """Reciprocity share from cross proportions and mean degrees.

    ``s_ba * dbar_b / (s_ab * dbar_a + s_ba * dbar_b)``; ``None`` when both
    cross proportions are zero (no information flow between groups).
    """
    num = s_ba * dbar_b
    den = s_ab * dbar_a + num
    if den == 0.0:
        return None
    return float(num / den)


def _rdsi_generic(sample: RdsSample, matrix: RecruitmentMatrix) -> Optional[float]:
    mask = _nonseed_mask(sample)
    g = sample.true_group[mask]
    n_a = int(np.count_nonzero(g == Group.A))
    n_b = g.size - n_a
    if n_b == 0:
        return 1.0
    if n_a == 0:
        return 0.0
    if matrix.s_ab is None or matrix.s_ba is None:
        return None
    d_a = mean_degree_estimate(sample, Group.A)
    d_b = mean_degree_estimate(sample, Group.B)
    return rdsi_from_parts(matrix.s_ab, matrix.s_ba, d_a, d_b)


def rdsi(sample: RdsSample) -> Optional[float]:
    """Reciprocity estimate using observed recruitment proportions."""
    return _rdsi_generic(sample, observed_matrix(sample))


def rdsi_ego(sample: RdsSample) -> Optional[float]:
    """Reciprocity estimate using reported alter shares.

    Replacing recruitment proportions with ego reports removes the
    recruiter-behavior distortion that differential recruitment induces.
    """
    return _rdsi_generic(sample, ego_matrix(sample))


def estimate_all(sample: RdsSample) -> EstimateSet:
    """Evaluate every estimator once; single-group degrees become None."""
    mask = _nonseed_mask(sample)
    g = sample.true_group[mask]
    n_a = int(np.count_nonzero(g == Group.A))
    n_b = g.size - n_a
    obs = observed_matrix(sample)
    ego = ego_matrix(sample)
    return EstimateSet(
        sample_proportion=sample_proportion(sample),
        rdsi=_rdsi_generic(sample, obs),
        rdsii=rdsii(sample),
        rdsi_ego=_rdsi_generic(sample, ego),
        s_observed=obs,
        s_ego=ego,
        mean_degree_a=mean_degree_estimate(sample, Group.A) if n_a else None,
        mean_degree_b=mean_degree_estimate(sample, Group.B) if n_b else None,
        n_nonseed=int(g.size),
    )
