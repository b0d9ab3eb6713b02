"""Command-line workflow and exit-code contract."""

import json

import pytest

from rdslab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    return tmp_path_factory.mktemp("cli")


def test_full_workflow(workdir, capsys):
    d = workdir

    code, out, _ = run(
        capsys,
        "generate",
        "--n", "300",
        "--steps", "400000",
        "--p-a", "0.3",
        "--out", str(d / "raw"),
        "--seed", "5",
    )
    assert code == 0
    assert "n=300" in out and "p_a=0.3000" in out
    assert (d / "raw.edges").exists() and (d / "raw.attrs").exists()

    code, out, _ = run(
        capsys,
        "tune",
        "--edges", str(d / "raw.edges"),
        "--attrs", str(d / "raw.attrs"),
        "--activity-ratio", "1.3",
        "--out", str(d / "tuned"),
        "--seed", "5",
    )
    assert code == 0
    token = next(t for t in out.split() if t.startswith("activity_ratio="))
    assert abs(float(token.split("=")[1]) - 1.3) <= 0.02

    code, _, err = run(
        capsys,
        "sample",
        "--edges", str(d / "tuned.edges"),
        "--attrs", str(d / "tuned.attrs"),
        "--n-seeds", "3",
        "--coupons", "2",
        "--target-size", "60",
        "--out", str(d / "sample.csv"),
        "--seed", "5",
    )
    assert code == 0
    lines = (d / "sample.csv").read_text().strip().splitlines()
    assert len(lines) == 61  # header plus one row per respondent

    code, out, _ = run(capsys, "estimate", "--sample", str(d / "sample.csv"))
    assert code == 0
    doc = json.loads(out)
    assert doc["n_respondents"] == 60
    assert 0.0 <= doc["sample"] <= 1.0
    assert "rdsii" in doc and "mean_degree_a" in doc

    code, out, _ = run(
        capsys,
        "bootstrap",
        "--sample", str(d / "sample.csv"),
        "--replicates", "50",
        "--seed", "5",
        "--out", str(d / "ci.json"),
    )
    assert code == 0
    ci = json.loads((d / "ci.json").read_text())
    assert ci["method"] == "origin" and ci["replicates"] == 50
    assert ci["lower"] <= ci["upper"]

    config = {
        "master_seed": 12,
        "replications": 3,
        "network": {
            "source": "file",
            "edges": str(d / "tuned.edges"),
            "attrs": str(d / "tuned.attrs"),
        },
        "rds": {"n_seeds": 3, "coupons": 2, "target_size": 60},
        "grid": {"p_diff": [0.0, 0.5]},
        "output": {
            "results": str(d / "results.csv"),
            "estimates": str(d / "estimates.csv"),
        },
    }
    (d / "exp.json").write_text(json.dumps(config))
    code, out, _ = run(capsys, "experiment", "--config", str(d / "exp.json"))
    assert code == 0
    assert "metric rows" in out
    assert (d / "results.csv").exists()

    code, out, _ = run(
        capsys,
        "plot",
        "--data", str(d / "results.csv"),
        "--kind", "line",
        "--x", "p_diff",
        "--y", "mean",
        "--out", str(d / "line.svg"),
    )
    assert code == 0
    assert (d / "line.svg").read_text().startswith("<?xml")

    code, _, _ = run(
        capsys,
        "plot",
        "--data", str(d / "estimates.csv"),
        "--kind", "histogram",
        "--cell", "0",
        "--truth", "0.3",
        "--out", str(d / "hist.svg"),
    )
    assert code == 0
    assert "<svg" in (d / "hist.svg").read_text()


class TestExitCodes:
    def test_usage_errors_return_one(self, capsys):
        assert run(capsys, "generate", "--bogus-flag")[0] == 1
        assert run(capsys, "plot", "--kind", "mosaic", "--data", "x", "--out", "y")[0] == 1

    def test_validation_returns_two(self, workdir, capsys):
        # Conflicting output flags.
        code, _, err = run(
            capsys,
            "generate", "--n", "50", "--steps", "1000",
            "--out", str(workdir / "p"),
            "--edges-out", str(workdir / "e"),
            "--attrs-out", str(workdir / "a"),
        )
        assert code == 2 and "not both" in err
        # No output flags at all.
        assert run(capsys, "generate", "--n", "50", "--steps", "1000")[0] == 2
        # Sampling more nodes than exist without replacement.
        code, _, err = run(
            capsys,
            "sample",
            "--edges", str(workdir / "tuned.edges"),
            "--attrs", str(workdir / "tuned.attrs"),
            "--target-size", "4000",
            "--out", str(workdir / "s2.csv"),
        )
        assert code == 2

    def test_runtime_failures_return_three(self, workdir, capsys):
        code, _, err = run(
            capsys,
            "tune",
            "--edges", str(workdir / "tuned.edges"),
            "--attrs", str(workdir / "tuned.attrs"),
            "--activity-ratio", "40.0",
            "--max-iterations", "500",
            "--out", str(workdir / "t2"),
        )
        assert code == 3 and "error:" in err
        code, _, err = run(capsys, "estimate", "--sample", str(workdir / "missing.csv"))
        assert code == 3

    def test_experiment_needs_results_path(self, workdir, capsys):
        config = {
            "master_seed": 1,
            "replications": 1,
            "network": {
                "source": "file",
                "edges": str(workdir / "tuned.edges"),
                "attrs": str(workdir / "tuned.attrs"),
            },
            "rds": {"n_seeds": 2, "coupons": 1, "target_size": 10},
        }
        path = workdir / "noout.json"
        path.write_text(json.dumps(config))
        code, _, err = run(capsys, "experiment", "--config", str(path))
        assert code == 2 and "results path" in err
