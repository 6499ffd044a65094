import json

import numpy as np
import pytest

from gspm import build_kernel_matrix, builtin_kernel, sample_uniform, top_k_eigen
from gspm.cli import main


def run_cli(capsys, argv):
    rc = main(argv)
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


def test_kernel_info_w2(capsys):
    rc, out, err = run_cli(capsys, ["kernel-info", "--paper", "W2"])
    assert rc == 0
    info = json.loads(out)
    assert info["degenerate"] is True
    assert abs(info["lambda1"] - 0.2) < 1e-12
    assert "range_warning" not in info


def test_kernel_info_w1_warns_about_range(capsys):
    rc, out, err = run_cli(capsys, ["kernel-info", "--paper", "W1"])
    assert rc == 0
    info = json.loads(out)
    assert info["degenerate"] is False
    assert "range_warning" in info
    assert "warning" in err.lower()


def test_kernel_info_malformed_file(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    rc, out, err = run_cli(capsys, ["kernel-info", "--kernel", str(bad)])
    assert rc == 2


def test_kernel_info_unknown_name(capsys):
    # argparse rejects names outside the bundled pair, also with code 2
    with pytest.raises(SystemExit) as exc:
        main(["kernel-info", "--paper", "W9"])
    assert exc.value.code == 2
    capsys.readouterr()


def test_validate_exit_codes(capsys):
    rc, out, _ = run_cli(capsys, ["validate", "--paper", "W2", "--graphon"])
    assert rc == 0
    assert json.loads(out)["passed"] is True
    rc, out, _ = run_cli(capsys, ["validate", "--paper", "W1", "--graphon"])
    assert rc == 3
    assert json.loads(out)["passed"] is False


def test_sample_spectrum_round_trip(capsys, tmp_path):
    matrix_path = tmp_path / "m.gspm"
    rc, out, _ = run_cli(
        capsys,
        ["sample", "--paper", "W2", "--n", "200", "--seed", "11", "--format", "binary", "--out", str(matrix_path)],
    )
    assert rc == 0
    rc, out, _ = run_cli(capsys, ["spectrum", "--matrix", str(matrix_path), "--k", "1"])
    assert rc == 0
    reported = json.loads(out)["eigenvalues"][0]

    lam = top_k_eigen(build_kernel_matrix(builtin_kernel("W2"), sample_uniform(200, 11)), 1)[0].value
    assert abs(reported - lam) <= 1e-12


def test_sample_csv_round_trip(capsys, tmp_path):
    matrix_path = tmp_path / "m.csv"
    rc, _, _ = run_cli(
        capsys,
        ["sample", "--paper", "W2", "--n", "50", "--seed", "3", "--format", "csv", "--out", str(matrix_path)],
    )
    assert rc == 0
    rc, out, _ = run_cli(capsys, ["spectrum", "--matrix", str(matrix_path), "--k", "2"])
    assert rc == 0
    assert len(json.loads(out)["eigenvalues"]) == 2


def test_sample_graph_strict_w1_fails(capsys, tmp_path):
    rc, _, err = run_cli(
        capsys,
        ["sample", "--paper", "W1", "--n", "40", "--mode", "graph", "--out", str(tmp_path / "x.csv")],
    )
    assert rc == 2


def test_limit_writes_samples(capsys, tmp_path):
    out_path = tmp_path / "lim.csv"
    rc, out, _ = run_cli(
        capsys, ["limit", "--paper", "W2", "--count", "20000", "--seed", "5", "--out", str(out_path)]
    )
    assert rc == 0
    payload = json.loads(out)
    draws = np.loadtxt(out_path)
    assert draws.shape == (20000,)
    assert abs(draws.mean() - payload["law_mean"]) < 0.01
    sidecar = json.loads(open(payload["sidecar"]).read())
    assert sidecar["law"]["variant"] == "weighted-chisq"


def test_limit_gaussian_variance(capsys, tmp_path):
    out_path = tmp_path / "g.csv"
    rc, out, _ = run_cli(
        capsys, ["limit", "--paper", "W1", "--count", "100000", "--seed", "2", "--out", str(out_path)]
    )
    assert rc == 0
    draws = np.loadtxt(out_path)
    assert abs(draws.var() - 0.2) < 0.006


def test_limit_count_zero(capsys):
    rc, _, _ = run_cli(capsys, ["limit", "--paper", "W2", "--count", "0"])
    assert rc == 2


def test_experiment_end_to_end(capsys, tmp_path):
    out_dir = tmp_path / "exp"
    rc, out, _ = run_cli(
        capsys,
        [
            "experiment",
            "--paper",
            "W2",
            "--mode",
            "kernel-zeroed",
            "--n",
            "60",
            "--reps",
            "50",
            "--seed",
            "12",
            "--limit-samples",
            "2000",
            "--ks-threshold",
            "0.9",
            "--out",
            str(out_dir),
        ],
    )
    assert rc == 0
    payload = json.loads(out)
    assert payload["passed"] is True
    produced = {p.name for p in out_dir.iterdir()}
    assert produced >= {
        "run.csv",
        "comparison.json",
        "hist_empirical.csv",
        "hist_limit.csv",
        "config.json",
        "histogram.svg",
    }
    comparison = json.loads((out_dir / "comparison.json").read_text())
    assert comparison["ks_distance"] == payload["ks_distance"]
    svg = (out_dir / "histogram.svg").read_text()
    assert svg.lstrip().startswith("<?xml")


def test_experiment_fail_exit_code(capsys, tmp_path):
    rc, out, _ = run_cli(
        capsys,
        [
            "experiment",
            "--paper",
            "W2",
            "--mode",
            "kernel-zeroed",
            "--n",
            "60",
            "--reps",
            "30",
            "--seed",
            "12",
            "--limit-samples",
            "1000",
            "--ks-threshold",
            "0.01",
            "--out",
            str(tmp_path / "exp"),
        ],
    )
    assert rc == 4
    assert json.loads(out)["passed"] is False


def test_experiment_config_file(capsys, tmp_path):
    cfg = {
        "kernel": "W2",
        "mode": "kernel-zeroed",
        "n": 50,
        "replications": 20,
        "master_seed": 7,
        "limit_samples": 1000,
        "ks_threshold": 0.9,
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    rc, out, _ = run_cli(capsys, ["experiment", "--config", str(cfg_path), "--out", str(tmp_path / "o")])
    assert rc == 0
    assert json.loads(out)["config"]["replications"] == 20


def test_experiment_rejects_bad_config(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    rc, _, _ = run_cli(capsys, ["experiment", "--config", str(bad)])
    assert rc == 2

    zero = tmp_path / "zero.json"
    zero.write_text(json.dumps({"kernel": "W2", "replications": 0}))
    rc, _, _ = run_cli(capsys, ["experiment", "--config", str(zero)])
    assert rc == 2


def test_stdout_is_json_only(capsys):
    rc, out, _ = run_cli(capsys, ["kernel-info", "--paper", "W2"])
    json.loads(out)
    rc, out, _ = run_cli(capsys, ["validate", "--paper", "W2"])
    json.loads(out)
