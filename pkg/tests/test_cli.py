"""CLI: exit codes, output determinism, sweep orchestration."""
import json
import os

import pytest

from zenoleak.cli import main

CFG = {"alpha": 1.0, "sites": [{"c": 0.0, "a": 4.0, "beta": 0.1}]}


def _write(tmp_path, doc, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def test_unknown_key_exits_1_and_names_it(tmp_path, capsys):
    path = _write(tmp_path, dict(CFG, gamma=3.0))
    rc = main(["spectrum", "--config", path, "--out", str(tmp_path / "o")])
    assert rc == 1
    err = capsys.readouterr().err
    assert "config error" in err and "gamma" in err


def test_missing_config_file_exits_1(tmp_path, capsys):
    rc = main(["spectrum", "--config", str(tmp_path / "nope.json"),
               "--out", str(tmp_path / "o")])
    assert rc == 1
    assert "config error" in capsys.readouterr().err


def test_spectrum_outputs_and_manifest(tmp_path):
    path = _write(tmp_path, CFG)
    out = tmp_path / "run"
    rc = main(["spectrum", "--config", path, "--out", str(out)])
    assert rc == 0
    for name in ("spectrum.csv", "isolated.csv", "spectrum.png", "result.json"):
        assert (out / name).exists()
    doc = json.loads((out / "result.json").read_text())
    assert doc["command"] == "spectrum"
    assert doc["config"]["alpha"] == 1.0
    assert len(doc["results"]["dot_eigenvalues"]) == 1
    header = (out / "spectrum.csv").read_text().splitlines()[0]
    assert header == "index,eigenvalue,null_residual,d_0"


def test_spectrum_runs_are_byte_identical(tmp_path):
    path = _write(tmp_path, CFG)
    outs = []
    for name in ("r1", "r2"):
        out = tmp_path / name
        assert main(["spectrum", "--config", path, "--out", str(out)]) == 0
        outs.append(out)
    for csv_name in ("spectrum.csv", "isolated.csv"):
        assert (outs[0] / csv_name).read_bytes() == (outs[1] / csv_name).read_bytes()


def test_quadrature_failure_exits_2_with_diagnostics(tmp_path, capsys):
    doc = dict(CFG, quadrature={"max_subdivisions": 1})
    path = _write(tmp_path, doc)
    out = tmp_path / "bad"
    rc = main(["spectrum", "--config", path, "--out", str(out)])
    assert rc == 2
    assert "non-convergence" in capsys.readouterr().err
    diag = json.loads((out / "error.json").read_text())
    assert diag["error"] == "QuadratureError"
    assert "subdivisions" in diag["message"]


def test_sweep_serial_parallel_identical(tmp_path):
    path = _write(tmp_path, CFG)
    outs = []
    for name, workers in (("serial", "1"), ("parallel", "2")):
        out = tmp_path / name
        rc = main(["sweep", "--config", path, "--out", str(out),
                   "--run", "spectrum", "--param", "beta",
                   "--values", "0.05", "0.15", "--workers", workers])
        assert rc == 0
        outs.append(out)
    for sub in ("beta=0.05", "beta=0.15"):
        a = (outs[0] / sub / "spectrum.csv").read_bytes()
        b = (outs[1] / sub / "spectrum.csv").read_bytes()
        assert a == b
    doc = json.loads((outs[0] / "result.json").read_text())
    assert doc["results"]["values"] == [0.05, 0.15]


def test_workers_env_default(tmp_path, monkeypatch):
    monkeypatch.setenv("ZENOLEAK_WORKERS", "1")
    path = _write(tmp_path, CFG)
    out = tmp_path / "env"
    assert main(["spectrum", "--config", path, "--out", str(out)]) == 0


def test_mirror_warning_on_stderr(tmp_path, capsys):
    doc = {"alpha": 1.0, "sites": [{"c": 0.0, "a": 3.0, "beta": 0.1},
                                   {"c": 0.0, "a": -3.0, "beta": 0.1}]}
    path = _write(tmp_path, doc)
    out = tmp_path / "mir"
    assert main(["spectrum", "--config", path, "--out", str(out)]) == 0
    assert "mirror-symmetric" in capsys.readouterr().err
