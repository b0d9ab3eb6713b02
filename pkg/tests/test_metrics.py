"""Metric arithmetic: bias, spread, RMSE and accuracy credit."""

import math

import numpy as np
import pytest

from rdslab.errors import ValidationError
from rdslab.metrics import (
    compute_metrics,
    compute_p_best,
    family_of,
    summarize_cell,
)


class TestComputeMetrics:
    def test_two_point_oracle(self):
        s = compute_metrics([0.3, 0.5], truth=0.4)
        assert s.bias == pytest.approx(0.0, abs=1e-15)
        assert s.rmse == pytest.approx(0.1, rel=1e-12)
        assert s.sd == pytest.approx(math.sqrt(0.02), rel=1e-12)
        assert s.n_undefined == 0

    def test_constant_at_truth(self):
        s = compute_metrics([0.4] * 5, truth=0.4)
        assert (s.bias, s.sd, s.rmse) == (0.0, 0.0, 0.0)

    def test_bias_is_absolute(self):
        low = compute_metrics([0.2, 0.2], truth=0.4)
        high = compute_metrics([0.6, 0.6], truth=0.4)
        assert low.bias == pytest.approx(0.2, rel=1e-12)
        assert high.bias == pytest.approx(0.2, rel=1e-12)

    def test_decomposition(self):
        # RMSE splits into bias and population spread.
        rng = np.random.default_rng(5)
        est = rng.normal(0.45, 0.07, size=400)
        s = compute_metrics(est, truth=0.4)
        sd_pop = est.std(ddof=0)
        assert s.rmse**2 == pytest.approx(s.bias**2 + sd_pop**2, rel=1e-10)

    def test_nan_excluded_and_counted(self):
        s = compute_metrics([0.3, math.nan, 0.5, math.nan], truth=0.4)
        assert s.n_undefined == 2
        assert s.rmse == pytest.approx(0.1, rel=1e-12)

    def test_needs_two_defined(self):
        with pytest.raises(ValidationError):
            compute_metrics([0.4, math.nan], truth=0.4)
        with pytest.raises(ValidationError):
            compute_metrics([math.nan, math.nan], truth=0.4)


class TestPBest:
    def test_clear_winner(self):
        mat = np.array([[0.41, 0.2], [0.39, 0.9], [0.4, 0.0]])
        assert compute_p_best(mat, 0.4).tolist() == [1.0, 0.0]

    def test_exact_tie_splits(self):
        # Dyadic values so both absolute errors are bit-identical.
        mat = np.array([[0.25, 0.75], [0.0, 1.0]])
        assert compute_p_best(mat, 0.5).tolist() == [0.5, 0.5]

    def test_nan_never_wins(self):
        mat = np.array([[math.nan, 0.9], [math.nan, 0.1]])
        assert compute_p_best(mat, 0.4).tolist() == [0.0, 1.0]

    def test_all_nan_row_splits_over_everyone(self):
        mat = np.array([[math.nan, math.nan], [0.4, 0.9]])
        assert compute_p_best(mat, 0.4).tolist() == [0.75, 0.25]

    def test_columns_sum_to_one(self):
        rng = np.random.default_rng(17)
        mat = rng.random((50, 4))
        mat[rng.random((50, 4)) < 0.2] = math.nan
        credit = compute_p_best(mat, 0.5)
        assert credit.sum() == pytest.approx(1.0, abs=1e-9)

    def test_rejects_empty(self):
        with pytest.raises(ValidationError):
            compute_p_best(np.empty((0, 2)), 0.4)


class TestFamilies:
    def test_known_names(self):
        assert family_of("sample") == "proportion"
        assert family_of("rdsi_ego") == "proportion"
        assert family_of("s_ab") == "cross_link"
        assert family_of("s_ego_ab") == "cross_link"

    def test_unknown_name(self):
        with pytest.raises(ValidationError, match="unknown estimator"):
            family_of("magic")


class TestSummarizeCell:
    def test_families_compete_separately(self):
        est = {
            "sample": np.array([0.41, 0.39]),   # nearly perfect share
            "rdsi": np.array([0.2, 0.6]),
            "s_ab": np.array([0.8, 0.8]),       # alone in its family
        }
        truths = {"sample": 0.4, "rdsi": 0.4, "s_ab": 0.7}
        rows = summarize_cell(est, truths)
        assert rows["sample"].p_best == 1.0
        assert rows["rdsi"].p_best == 0.0
        assert rows["s_ab"].p_best == 1.0
        assert rows["s_ab"].truth == 0.7

    def test_family_truths_must_agree(self):
        est = {"sample": np.array([0.4, 0.4]), "rdsi": np.array([0.4, 0.4])}
        with pytest.raises(ValidationError, match="share a truth"):
            summarize_cell(est, {"sample": 0.4, "rdsi": 0.5})

    def test_single_replication_row(self):
        rows = summarize_cell({"sample": np.array([0.3])}, {"sample": 0.4})
        r = rows["sample"]
        assert r.bias == pytest.approx(0.1)
        assert r.rmse == pytest.approx(0.1)
        assert math.isnan(r.sd)
        assert r.p_best == 1.0

    def test_fully_undefined_column(self):
        est = {
            "sample": np.array([0.4, 0.4]),
            "rdsi": np.array([math.nan, math.nan]),
        }
        rows = summarize_cell(est, {"sample": 0.4, "rdsi": 0.4})
        r = rows["rdsi"]
        assert r.n_undefined == 2
        assert math.isnan(r.bias) and math.isnan(r.mean)
        assert r.p_best == 0.0
        assert rows["sample"].p_best == 1.0

    def test_coverage_passthrough(self):
        rows = summarize_cell(
            {"sample": np.array([0.4, 0.4])},
            {"sample": 0.4},
            ci_coverage_by_name={"sample": 0.93},
        )
        assert rows["sample"].ci_coverage == 0.93

    def test_empty_input_rejected(self):
        with pytest.raises(ValidationError):
            summarize_cell({}, {})
