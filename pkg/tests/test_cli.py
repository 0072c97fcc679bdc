import json

import numpy as np

from singhyp.cli import main


def _write(tmp_path, text):
    p = tmp_path / "run.cfg"
    p.write_text(text)
    return str(p)


def test_ulam_density_is_one(tmp_path):
    cfg = _write(tmp_path, "[map]\nfamily = doubling\n[ulam]\nbins = 256\n")
    out = tmp_path / "out"
    assert main(["ulam", "--config", cfg, "--out", str(out)]) == 0
    rows = (out / "density.csv").read_text().splitlines()
    assert rows[0] == "bin_left,density"
    dens = np.array([float(r.split(",")[1]) for r in rows[1:]])
    assert dens.size == 256 and np.max(np.abs(dens - 1.0)) <= 1e-10
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["exit_status"] == 0 and "density.csv" in manifest["outputs"]
    assert {"numpy", "scipy", "python"} <= set(manifest["versions"])


def test_malformed_key_exit_1(tmp_path, capsys):
    cfg = _write(tmp_path, "[ulam]\nbinz = 256\n")
    assert main(["ulam", "--config", cfg, "--out", str(tmp_path / "o")]) == 1
    assert "binz" in capsys.readouterr().err


def test_missing_config_exit_1(tmp_path):
    assert main(["ulam", "--out", str(tmp_path)]) == 1
    assert main(["ulam", "--config", str(tmp_path / "nope.cfg"), "--out", str(tmp_path)]) == 1


def test_seed_override_and_byte_identical(tmp_path):
    cfg = _write(tmp_path, "[run]\nseed = 1\n[map]\nfamily = affine-skew\n"
                           "[correlations]\nchains = 600\nlength = 300\nburn_in = 50\nlags = 5\nf = x\ng = x\n")
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["correlations", "--config", cfg, "--seed", "9", "--out", str(a)]) == 0
    assert main(["correlations", "--config", cfg, "--seed", "9", "--workers", "3", "--out", str(b)]) == 0
    assert (a / "correlations.csv").read_bytes() == (b / "correlations.csv").read_bytes()
    assert json.loads((a / "manifest.json").read_text())["seed"] == 9


def test_wrong_map_kind_exit_1(tmp_path):
    cfg = _write(tmp_path, "[map]\nfamily = affine-skew\n[ulam]\nbins = 64\n")
    assert main(["ulam", "--config", cfg, "--out", str(tmp_path / "o")]) == 1


def test_acceptance_subcommand(tmp_path, capsys):
    out = tmp_path / "acc"
    assert main(["acceptance", "--suite", "w1", "--seed", "1", "--out", str(out)]) == 0
    verdict = json.loads((out / "verdict.json").read_text())
    assert verdict["suites"][0]["passed"]
    assert "[PASS]" in capsys.readouterr().out


def test_lorenz_roof_needs_matching_map(tmp_path, capsys):
    cfg = _write(tmp_path, "[map]\nfamily = lorenz\nalpha = 0.8\n[flow-loglaw]\nroof = lorenz\n")
    assert main(["flow-loglaw", "--config", cfg, "--out", str(tmp_path / "o")]) == 1
    assert "alpha" in capsys.readouterr().err
    cfg = _write(tmp_path, "[map]\nfamily = doubling\n[flow-loglaw]\nroof = lorenz\n")
    assert main(["flow-loglaw", "--config", cfg, "--out", str(tmp_path / "o")]) == 1


def test_invalid_eigenvalues_exit_1(tmp_path):
    cfg = _write(tmp_path, "[map]\nfamily = lorenz\n[flow-loglaw]\nroof = lorenz\nlambda3 = -1.5\n")
    assert main(["flow-loglaw", "--config", cfg, "--out", str(tmp_path / "o")]) == 1
