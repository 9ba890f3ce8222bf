import json

import numpy as np
import pytest

from cdfmatch import EmpiricalCdf, ecdf_build
from cdfmatch.cli import main


def test_distance_command(tmp_path, capsys):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    EmpiricalCdf(np.array([0.0, 1.0]), np.array([0.0, 1.0])).to_csv(a)
    EmpiricalCdf(np.array([0.25, 1.25]), np.array([0.0, 1.0])).to_csv(b)
    code = main(["distance", str(a), str(b), "--distance", "l1", "--grid-size", "400"])
    out = capsys.readouterr().out
    assert code == 0
    assert "l1_cdf" in out
    assert "raw_threshold_sum" in out
    value = float(out.splitlines()[0].split(":")[1])
    assert value == pytest.approx(0.25, abs=0.01)


def test_distance_kind_flag(tmp_path, capsys):
    a = tmp_path / "a.csv"
    ecdf_build([1.0, 2.0, 3.0]).to_csv(a)
    code = main(["distance", str(a), str(a), "--distance", "kl"])
    out = capsys.readouterr().out
    assert code == 0
    assert out.startswith("kl:")


def test_polydemo_command(tmp_path, capsys):
    out_dir = tmp_path / "run"
    code = main(["polydemo", "--seed", "0", "--out", str(out_dir)])
    stdout = capsys.readouterr().out
    assert code == 0
    assert "selected order: 5" in stdout
    assert (out_dir / "results.json").exists()


def test_config_file_defaults(tmp_path, capsys):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"n_train": 25, "order_truth": 5, "seed": 0}))
    code = main(["polydemo", "--config", str(config)])
    assert code == 0


def test_flag_overrides_config(tmp_path, capsys):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"orders": "1,2"}))
    out_dir = tmp_path / "run"
    code = main(
        ["polydemo", "--config", str(config), "--orders", "1,2,3,4,5", "--out", str(out_dir)]
    )
    assert code == 0
    payload = json.loads((out_dir / "results.json").read_text())
    assert payload["config"]["orders"] == [1, 2, 3, 4, 5]


def test_shm_command_small(tmp_path, capsys):
    out_dir = tmp_path / "shm"
    code = main(
        [
            "shm",
            "--samples", "80",
            "--budget", "6",
            "--mc-samples", "300",
            "--test-samples", "400",
            "--seed", "1",
            "--out", str(out_dir),
        ]
    )
    stdout = capsys.readouterr().out
    assert code == 0
    assert "verdict" in stdout
    assert (out_dir / "results.json").exists()


def test_unknown_distance_rejected(tmp_path):
    with pytest.raises(SystemExit):
        main(["polydemo", "--distance", "energy"])


def test_ionosphere_command(tmp_path, capsys):
    rows = []
    gen = np.random.default_rng(0)
    for k in range(60):
        label = "g" if k < 35 else "b"
        shift = 0.5 if label == "g" else -0.5
        values = gen.normal(shift, 0.4, 34).round(5)
        rows.append(",".join(str(v) for v in values) + f",{label}")
    data = tmp_path / "iono.csv"
    data.write_text("\n".join(rows) + "\n")
    out_dir = tmp_path / "run"
    code = main(
        [
            "ionosphere", str(data),
            "--train-fraction", "0.4",
            "--seeds", "0,1",
            "--budget", "6",
            "--out", str(out_dir),
        ]
    )
    stdout = capsys.readouterr().out
    assert code == 0
    assert "loaded 60 rows (35 good / 25 bad)" in stdout
    assert (out_dir / "results.json").exists()
