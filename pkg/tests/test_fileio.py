"""File round trips and line-accurate ingestion diagnostics."""

import math

import numpy as np
import pytest

from _helpers import build_network, triangle_network
from rdslab.errors import ValidationError
from rdslab.estimate import rdsi
from rdslab.fileio import (
    ESTIMATES_HEADER,
    RESULTS_HEADER,
    SAMPLE_HEADER,
    fmt6,
    ingest_network,
    ingest_rds_data,
    read_estimates_csv,
    read_results_csv,
    write_estimates_csv,
    write_network,
    write_rds_sample,
    write_results_csv,
)
from rdslab.netcore import compute_stats
from rdslab.netgen import KoskkParams, koskk_generate
from rdslab.rdssim import RdsConfig, run_rds


def write_lines(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


class TestFmt6:
    def test_six_significant_digits(self):
        assert fmt6(0.123456789) == "0.123457"
        assert fmt6(2.0) == "2"

    def test_missing_values_blank(self):
        assert fmt6(None) == ""
        assert fmt6(math.nan) == ""


class TestNetworkRoundTrip:
    def test_weighted_roundtrip_preserves_structure(self, tmp_path):
        net = koskk_generate(KoskkParams(n=150, steps=200_000), rng=41)
        net = net.with_groups((np.arange(net.n) % 3 == 0).astype(np.uint8))
        e1, a1 = str(tmp_path / "net.edges"), str(tmp_path / "net.attrs")
        write_network(net, e1, a1)
        back, labels = ingest_network(e1, a1)
        assert labels == [str(i) for i in range(net.n)]
        s0, s1 = compute_stats(net), compute_stats(back)
        assert s1.edge_count == s0.edge_count
        assert s1.n_a == s0.n_a
        assert s1.homophily == pytest.approx(s0.homophily, abs=1e-9)
        assert s1.activity_ratio == pytest.approx(s0.activity_ratio, rel=1e-9)

    def test_rewrite_is_byte_stable(self, tmp_path):
        net = triangle_network()
        e1, a1 = tmp_path / "a.edges", tmp_path / "a.attrs"
        e2, a2 = tmp_path / "b.edges", tmp_path / "b.attrs"
        write_network(net, str(e1), str(a1))
        back, labels = ingest_network(str(e1), str(a1))
        write_network(back, str(e2), str(a2), labels)
        assert e1.read_bytes() == e2.read_bytes()
        assert a1.read_bytes() == a2.read_bytes()

    def test_unweighted_and_comments(self, tmp_path):
        epath = write_lines(tmp_path / "x.edges", "# header\nalice bob\n\nbob carol\n")
        apath = write_lines(tmp_path / "x.attrs", "alice A\nbob B\ncarol A\n")
        net, labels = ingest_network(epath, apath)
        assert labels == ["alice", "bob", "carol"]
        assert net.edge_count == 2
        assert net.weights is None or np.all(net.weights == 1.0)


class TestNetworkIngestErrors:
    def err(self, tmp_path, edges, attrs="a A\nb B\nc A\n"):
        epath = write_lines(tmp_path / "n.edges", edges)
        apath = write_lines(tmp_path / "n.attrs", attrs)
        with pytest.raises(ValidationError) as exc:
            ingest_network(epath, apath)
        return str(exc.value)

    def test_self_loop_names_line(self, tmp_path):
        msg = self.err(tmp_path, "a b\nc c\n")
        assert "n.edges:2" in msg and "self loop" in msg

    def test_duplicate_edge_either_orientation(self, tmp_path):
        msg = self.err(tmp_path, "a b\nb c\nb a\n")
        assert "n.edges:3" in msg and "duplicate edge" in msg

    def test_unknown_node(self, tmp_path):
        msg = self.err(tmp_path, "a b\na zed\nb c\n")
        assert "n.edges:2" in msg and "zed" in msg

    def test_ragged_columns(self, tmp_path):
        msg = self.err(tmp_path, "a b 1.5\nb c\n")
        assert "n.edges:2" in msg and "columns" in msg

    def test_bad_weight_token(self, tmp_path):
        msg = self.err(tmp_path, "a b 1.5\nb c heavy\n")
        assert "n.edges:2" in msg and "heavy" in msg

    def test_nonpositive_weight(self, tmp_path):
        msg = self.err(tmp_path, "a b 1.5\nb c 0\n")
        assert "n.edges:2" in msg and "positive" in msg

    def test_isolated_attribute_node(self, tmp_path):
        msg = self.err(tmp_path, "a b\n")
        assert "n.attrs" in msg and "'c'" in msg

    def test_duplicate_label(self, tmp_path):
        msg = self.err(tmp_path, "a b\n", attrs="a A\na B\nb A\n")
        assert "n.attrs:2" in msg and "duplicate" in msg

    def test_bad_group_token(self, tmp_path):
        epath = write_lines(tmp_path / "n.edges", "a b\n")
        apath = write_lines(tmp_path / "n.attrs", "a A\nb Q\n")
        with pytest.raises(ValidationError):
            ingest_network(epath, apath)

    def test_empty_files(self, tmp_path):
        epath = write_lines(tmp_path / "n.edges", "# nothing\n")
        apath = write_lines(tmp_path / "n.attrs", "a A\nb B\n")
        with pytest.raises(ValidationError, match="no edges"):
            ingest_network(epath, apath)
        with pytest.raises(ValidationError, match="no node attributes"):
            ingest_network(epath, write_lines(tmp_path / "e.attrs", "\n"))


SAMPLE_CSV = (
    ",".join(SAMPLE_HEADER)
    + "\n"
    + "s1,0,,A,2,1,1\n"
    + "s2,0,,B,2,1,1\n"
    + "r1,1,s1,A,2,1,1\n"
    + "r2,1,s2,B,1,0,1\n"
    + "r3,2,r1,A,4,2,2\n"
    + "r4,2,r1,B,3,2,1\n"
    + "r5,2,r2,A,2,1,1\n"
    + "r6,3,r3,A,4,2,2\n"
    + "r7,3,r3,B,1,0,1\n"
    + "r8,3,r4,B,3,1,2\n"
)


class TestSampleRoundTrip:
    def test_simulated_sample_roundtrip(self, tmp_path):
        net = koskk_generate(KoskkParams(n=200, steps=250_000), rng=43)
        net = net.with_groups((np.arange(net.n) < 60).astype(np.uint8))
        sample = run_rds(net, RdsConfig(n_seeds=3, coupons=2, target_size=80), 17)
        path = str(tmp_path / "sample.csv")
        write_rds_sample(sample, path)
        back = ingest_rds_data(path)
        assert back.size == sample.size
        assert np.array_equal(back.wave, sample.wave)
        assert np.array_equal(back.recruiter_index, sample.recruiter_index)
        assert np.array_equal(back.true_group, sample.true_group)
        assert np.array_equal(back.reported_degree, sample.reported_degree)
        assert np.array_equal(back.reported_n_a, sample.reported_n_a)

    def test_hand_file_reproduces_estimator_oracle(self, tmp_path):
        # The CSV mirrors the ten-row arithmetic example: both estimators
        # land on 0.36 exactly.
        path = write_lines(tmp_path / "field.csv", SAMPLE_CSV)
        sample = ingest_rds_data(path)
        assert sample.size == 10
        assert rdsi(sample) == pytest.approx(0.36, rel=1e-12)

    def test_reported_doubles_as_true(self, tmp_path):
        path = write_lines(tmp_path / "field.csv", SAMPLE_CSV)
        sample = ingest_rds_data(path)
        assert np.array_equal(sample.true_degree, sample.reported_degree)


class TestSampleIngestErrors:
    def err(self, tmp_path, text):
        path = write_lines(tmp_path / "bad.csv", text)
        with pytest.raises(ValidationError) as exc:
            ingest_rds_data(path)
        return str(exc.value)

    def head(self, *rows):
        return ",".join(SAMPLE_HEADER) + "\n" + "\n".join(rows) + "\n"

    def test_wrong_header(self, tmp_path):
        msg = self.err(tmp_path, "id,wave\nx,0\n")
        assert "header" in msg

    def test_duplicate_respondent(self, tmp_path):
        msg = self.err(tmp_path, self.head("s,0,,A,2,1,1", "s,1,s,B,2,1,1"))
        assert "bad.csv:3" in msg and "duplicate" in msg

    def test_malformed_integer(self, tmp_path):
        msg = self.err(tmp_path, self.head("s,zero,,A,2,1,1"))
        assert "bad.csv:2" in msg and "integer" in msg

    def test_seed_with_nonzero_wave(self, tmp_path):
        msg = self.err(tmp_path, self.head("s,1,,A,2,1,1"))
        assert "wave 0" in msg

    def test_dangling_recruiter(self, tmp_path):
        msg = self.err(tmp_path, self.head("s,0,,A,2,1,1", "r,1,ghost,B,2,1,1"))
        assert "ghost" in msg

    def test_wave_must_increment(self, tmp_path):
        msg = self.err(tmp_path, self.head("s,0,,A,2,1,1", "r,2,s,B,2,1,1"))
        assert "recruiter wave" in msg

    def test_tally_sum_mismatch(self, tmp_path):
        msg = self.err(tmp_path, self.head("s,0,,A,3,1,1"))
        assert "sum to the degree" in msg

    def test_zero_degree(self, tmp_path):
        msg = self.err(tmp_path, self.head("s,0,,A,0,0,0"))
        assert "at least 1" in msg

    def test_empty_file(self, tmp_path):
        assert "empty" in self.err(tmp_path, "")


class TestResultsRoundTrip:
    def test_typed_roundtrip_with_missing_cells(self, tmp_path):
        rows = [
            {
                "homophily": 0.5,
                "activity_ratio": 1.22,
                "p_a": 0.388,
                "p_diff": 0.0,
                "p_miss_a": 0.0,
                "p_miss_b": 0.0,
                "p_err_ab": 0.0,
                "p_err_ba": 0.0,
                "estimator": "rdsi",
                "truth": 0.388,
                "mean": 0.39,
                "bias": 0.002,
                "sd": 0.05,
                "rmse": 0.0500399,
                "p_best": 0.25,
                "n_undefined": 3,
                "ci_coverage": None,
                "status": "ok",
            },
            {
                "homophily": 0.5,
                "activity_ratio": 1.22,
                "p_a": 0.388,
                "p_diff": 0.0,
                "p_miss_a": 0.0,
                "p_miss_b": 0.0,
                "p_err_ab": 0.0,
                "p_err_ba": 0.0,
                "estimator": "rdsii",
                "truth": 0.388,
                "mean": None,
                "bias": math.nan,
                "sd": None,
                "rmse": None,
                "p_best": 0.0,
                "n_undefined": 500,
                "ci_coverage": None,
                "status": "ok",
            },
        ]
        path = str(tmp_path / "results.csv")
        write_results_csv(rows, path)
        back = read_results_csv(path)
        assert len(back) == 2
        assert back[0]["estimator"] == "rdsi"
        assert back[0]["bias"] == pytest.approx(0.002)
        assert back[0]["ci_coverage"] is None
        assert back[1]["mean"] is None and back[1]["bias"] is None
        assert back[1]["n_undefined"] == 500
        assert back[1]["status"] == "ok"

    def test_header_enforced(self, tmp_path):
        path = write_lines(tmp_path / "r.csv", "a,b\n1,2\n")
        with pytest.raises(ValidationError, match="header"):
            read_results_csv(path)
        assert RESULTS_HEADER[0] == "homophily"


class TestEstimatesRoundTrip:
    def test_roundtrip_including_undefined(self, tmp_path):
        rows = [
            (0, 0, "rdsi", 0.3612345678),
            (0, 0, "rdsii", None),
            (1, 7, "sample", 0.5),
        ]
        path = str(tmp_path / "est.csv")
        write_estimates_csv(rows, path)
        back = read_estimates_csv(path)
        assert back[0][:3] == (0, 0, "rdsi")
        assert back[0][3] == pytest.approx(0.361235)  # six significant digits
        assert back[1][3] is None
        assert back[2] == (1, 7, "sample", 0.5)
        assert ESTIMATES_HEADER == ["cell", "replication", "estimator", "estimate"]

    def test_header_enforced(self, tmp_path):
        path = write_lines(tmp_path / "e.csv", "x\n")
        with pytest.raises(ValidationError, match="header"):
            read_estimates_csv(path)
