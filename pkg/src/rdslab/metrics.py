"""Replication-level performance metrics for estimator comparisons.

Undefined estimates travel as NaN inside metric arrays (the public
estimator API uses ``None``; harness code converts at the boundary). They
are excluded from moment metrics and counted, and they never win the
per-replication accuracy credit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Optional, Sequence

import numpy as np

from .errors import ValidationError

# Estimators compete for accuracy credit only within their own family:
# population-share estimators against each other, cross-proportion
# estimators against each other.
ESTIMATOR_FAMILIES: Dict[str, str] = {
    "sample": "proportion",
    "rdsi": "proportion",
    "rdsii": "proportion",
    "rdsi_ego": "proportion",
    "s_ab": "cross_link",
    "s_ego_ab": "cross_link",
}


@dataclass(frozen=True)
class MetricSummary:
    bias: float
    sd: float
    rmse: float
    n_undefined: int


@dataclass
class MetricRow:
    """One estimator's aggregate over all replications of one cell."""

    estimator: str
    truth: float
    mean: float
    bias: float
    sd: float
    rmse: float
    p_best: float
    n_undefined: int
    ci_coverage: Optional[float] = None


def compute_metrics(estimates: Sequence[float], truth: float) -> MetricSummary:
    """Absolute bias, spread and root-mean-square error against ``truth``.

    NaN entries are excluded and counted; at least two defined estimates
    are required for the sample standard deviation.
    """
    est = np.asarray(estimates, dtype=np.float64)
    defined = est[~np.isnan(est)]
    n_undefined = int(est.size - defined.size)
    if defined.size < 2:
        raise ValidationError("metrics need at least two defined estimates")
    bias = abs(float(defined.mean()) - truth)
    sd = float(defined.std(ddof=1))
    rmse = math.sqrt(float(np.mean((defined - truth) ** 2)))
    return MetricSummary(bias=bias, sd=sd, rmse=rmse, n_undefined=n_undefined)


def compute_p_best(estimate_matrix: np.ndarray, truth: float) -> np.ndarray:
    """Per-column share of replications where that estimator is closest.

    ``estimate_matrix`` has one row per replication, one column per
    estimator. In each row one unit of credit is split equally among the
    estimators tied at the minimal absolute error; undefined (NaN) entries
    never receive credit. A row with no defined entry splits its credit
    over all columns so the column totals still sum to one.
    """
    mat = np.asarray(estimate_matrix, dtype=np.float64)
    if mat.ndim != 2 or mat.shape[0] < 1 or mat.shape[1] < 1:
        raise ValidationError("estimate matrix must be 2-D and nonempty")
    m, k = mat.shape
    err = np.abs(mat - truth)
    credit = np.zeros(k, dtype=np.float64)
    for row in err:
        defined = ~np.isnan(row)
        if not defined.any():
            credit += 1.0 / k
            continue
        best = row[defined].min()
        winners = defined & (row == best)
        credit[winners] += 1.0 / winners.sum()
    return credit / m


def family_of(estimator: str) -> str:
    try:
        return ESTIMATOR_FAMILIES[estimator]
    except KeyError:
        raise ValidationError(f"unknown estimator {estimator!r}") from None


def summarize_cell(
    estimates_by_name: Dict[str, np.ndarray],
    truths_by_name: Dict[str, float],
    ci_coverage_by_name: Optional[Dict[str, float]] = None,
) -> Dict[str, MetricRow]:
    """Metric rows for one experiment cell.

    Accuracy credit is computed within estimator families; every family
    member must target the same truth value.
    """
    names = list(estimates_by_name)
    if not names:
        raise ValidationError("no estimators to summarize")
    rows: Dict[str, MetricRow] = {}
    families: Dict[str, list] = {}
    for name in names:
        families.setdefault(family_of(name), []).append(name)
    for fam_names in families.values():
        truth = truths_by_name[fam_names[0]]
        for other in fam_names[1:]:
            if truths_by_name[other] != truth:
                raise ValidationError("family members must share a truth value")
        mat = np.stack([np.asarray(estimates_by_name[n], dtype=np.float64) for n in fam_names], axis=1)
        p_best = compute_p_best(mat, truth)
        for j, name in enumerate(fam_names):
            summary = _summary_or_degenerate(mat[:, j], truth)
            cov = None
            if ci_coverage_by_name is not None:
                cov = ci_coverage_by_name.get(name)
            defined = mat[:, j][~np.isnan(mat[:, j])]
            rows[name] = MetricRow(
                estimator=name,
                truth=truth,
                mean=float(defined.mean()) if defined.size else math.nan,
                bias=summary.bias,
                sd=summary.sd,
                rmse=summary.rmse,
                p_best=float(p_best[j]),
                n_undefined=summary.n_undefined,
                ci_coverage=cov,
            )
    return rows


def _summary_or_degenerate(column: np.ndarray, truth: float) -> MetricSummary:
    """Moment metrics that tolerate zero or one defined estimates.

    Single-replication cells get bias and RMSE but no spread; a fully
    undefined column reports NaN throughout so the row still appears with
    its undefined count.
    """
    defined = column[~np.isnan(column)]
    n_undefined = int(column.size - defined.size)
    if defined.size >= 2:
        return compute_metrics(column, truth)
    if defined.size == 1:
        err = abs(float(defined[0]) - truth)
        return MetricSummary(bias=err, sd=math.nan, rmse=err, n_undefined=n_undefined)
    return MetricSummary(bias=math.nan, sd=math.nan, rmse=math.nan, n_undefined=n_undefined)
