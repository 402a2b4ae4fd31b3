import csv
import json
import subprocess
import sys

import pytest

from spectralsi import registry
from spectralsi.cli import main
from spectralsi.config import ProbeConfig, RunConfig


def run(*argv):
    return main([str(a) for a in argv])


def test_dilation_subcommand(capsys):
    assert run("dilation", "[[1,1],[1,-1]]") == 0
    out = capsys.readouterr().out
    assert "d_A = 2" in out
    assert run("dilation", "[[2,0],[0,1]]") == 1
    assert run("dilation", "[[3]]") == 0
    assert "[[0], [1], [2]]" in capsys.readouterr().out


def test_registry_list(capsys):
    assert run("registry", "list") == 0
    out = capsys.readouterr().out
    for key in ("haar", "shannon", "hardy-shannon", "journe", "quincunx-shannon", "haar-wavelet", "shannon-wavelet", "bspline:n"):
        assert key in out


def test_spectral_haar_grid(tmp_path):
    out = tmp_path / "haar.csv"
    assert run("spectral", "haar", "--out", out) == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["xi", "sigma"]
    assert len(rows) - 1 == 8001
    zero = [r for r in rows[1:] if float(r[0]) == 0.0]
    assert float(zero[0][1]) == 1.0
    assert (tmp_path / "haar.plot.py").exists()


def test_spectral_journe_is_indicator(tmp_path):
    out = tmp_path / "j.csv"
    assert run("spectral", "journe", "--out", out, "--lo", -3, "--hi", 3, "--step", 0.01) == 0
    for xi, s in list(csv.reader(out.open()))[1:]:
        x = float(xi)
        inside = any(a <= x <= b for a, b in registry.JOURNE_K)
        assert float(s) == float(inside)


def test_spectral_quincunx_grid(tmp_path):
    out = tmp_path / "q.csv"
    assert run("spectral", "quincunx-shannon", "--out", out, "--lo", -1, "--hi", 1, "--step", 0.1) == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["xi1", "xi2", "sigma"] and len(rows) - 1 == 21 * 21


def _config(tmp_path, **kw):
    cfg = RunConfig(probe=ProbeConfig(samples_per_level=5000), **kw)
    path = tmp_path / "run.yaml"
    cfg.save(path)
    return path


def test_criteria_exit_codes(tmp_path):
    out = tmp_path / "r.json"
    assert run("criteria", _config(tmp_path, example="haar"), "--out", out) == 0
    assert json.loads(out.read_text())["consensus"] == "PASS"
    assert run("criteria", _config(tmp_path, example="hardy-shannon", G="all"), "--out", out) == 0
    rep = json.loads(out.read_text())
    assert rep["consensus"] == "FAIL" and rep["matches_ground_truth"] is True
    mislabel = _config(tmp_path, example="hardy-shannon", G="all", ground_truth=True)
    assert run("criteria", mislabel, "--out", out) == 1
    assert run("criteria", _config(tmp_path, example="box-1-2"), "--out", out) == 2
    assert "hypothesis_violated" in json.loads(out.read_text())


def test_criteria_csv_traces(tmp_path):
    out = tmp_path / "haar.csv"
    assert run("criteria", _config(tmp_path, example="haar"), "--format", "csv", "--out", out) == 0
    rows = list(csv.DictReader(out.open()))
    assert [r["criterion_id"] for r in rows][0] == "C2_support_union"
    assert (tmp_path / "haar.C3_cesaro.csv").exists()
    assert (tmp_path / "haar.json").exists()


def test_criteria_determinism(tmp_path):
    cfg = _config(tmp_path, example="bspline:2", seed=7)
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run("criteria", cfg, "--deterministic", "--out", a) == 0
    assert run("criteria", cfg, "--deterministic", "--out", b) == 0
    assert a.read_bytes() == b.read_bytes()
    rep = json.loads(a.read_text())
    assert rep["seed"] == 7 and len(rep["config_hash"]) == 64 and "created" not in rep


def test_flags_override_config(tmp_path):
    out = tmp_path / "r.json"
    cfg = _config(tmp_path, example="shannon")
    assert run("criteria", cfg, "--seed", 3, "--jmax", 12, "--samples", 2000, "--epsilon", 0.01, "--deterministic", "--out", out) == 0
    assert json.loads(out.read_text())["seed"] == 3
    c = json.loads(out.read_text())["criteria"][0]
    assert c["tolerance"] == 0.01


def test_wavelet_subcommand(tmp_path):
    out = tmp_path / "w.json"
    for key in ("shannon-wavelet", "journe", "shannon-wavelet-perturbed"):
        assert run("wavelet", key, "--samples", 5000, "--out", out) == 0, key
    rep = json.loads(out.read_text())
    assert rep["checks"]["calderon"]["verdict"] == "FAIL"


def test_custom_grid_example(tmp_path):
    import numpy as np

    axis = np.linspace(-0.4995, 0.4995, 1000)
    grid = tmp_path / "shannon.npz"
    np.savez(grid, axis0=axis, values=np.ones_like(axis, complex))
    cfg = _config(tmp_path, example={"grid": str(grid), "claimed_tight_frame": True, "ground_truth": {"all": True}}, dilation=((2,),))
    out = tmp_path / "r.json"
    assert run("criteria", cfg, "--out", out) == 0
    assert json.loads(out.read_text())["consensus"] == "PASS"


def test_unknown_key_is_an_error(capsys):
    assert run("criteria", "no-such-example") == 1


@pytest.mark.parametrize("key", [k for k in registry.keys() if not k.endswith((":n", ":M"))] + ["bspline:2", "h2g:3"])
def test_config_round_trip(key):
    ex = registry.lookup(key)
    cfg = RunConfig(example=key, dilation=tuple(map(tuple, ex.dilation.tolist())), G=ex.G, seed=11)
    again = RunConfig.loads(cfg.dumps())
    assert again == cfg
    assert again.config_hash() == cfg.config_hash()


def test_config_rejects_unknown_keys():
    with pytest.raises(ValueError):
        RunConfig.loads("example: haar\nbogus: 1\n")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "spectralsi", "dilation", "[[2]]"], capture_output=True, text=True)
    assert proc.returncode == 0 and "d_A = 2" in proc.stdout
