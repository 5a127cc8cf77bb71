import json
import subprocess
import sys
import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np
import pytest

from sta_pictures.cli import ConfigError, compare_files, main, read_config, resolve

CONFIGS = Path(__file__).resolve().parents[1] / "configs"
SMALL_LZ = ["--n-grid", "1001", "--n-report", "101", "--tolerance", "1e-9"]
SMALL_TRAP = ["--n-points", "512", "--steps", "400", "--n-samples", "11", "--n-levels", "64"]


def test_precedence(tmp_path):
    cfg = tmp_path / "a.cfg"
    cfg.write_text("# comment\nalpha = -5\nn-report = 11   # trailing\nt = 3\n")
    entries = read_config(cfg)
    assert entries == {"alpha": "-5", "n_report": "11", "T": "3"}
    merged = resolve("lz-inversion", entries, {"alpha": "-2", "out": None})
    assert (merged["alpha"], merged["n_report"], merged["T"], merged["x0"]) == (-2.0, 11, 3.0, 1.0)
    assert merged["protocols"] == ["bare", "cd0", "cd1", "cd01", "cd0-only", "zrot"]


@pytest.mark.parametrize("given,expected", [({}, (-10.0, 2.0)), ({"T": "4"}, (-5.0, 4.0)),
                                            ({"alpha": "-2"}, (-2.0, 10.0)), ({"alpha": "3", "T": "1"}, (3.0, 1.0))])
def test_sweep_defaults(given, expected):
    cfg = resolve("lz-inversion", given, {})
    assert (cfg["alpha"], cfg["T"]) == expected


@pytest.mark.parametrize("entries", [{"bogus": "1"}, {"protocols": " , "}, {"protocols": "cd0, warp"},
                                     {"order": "3"}, {"n_report": "1.5"}, {"tolerance": "-1"},
                                     {"scenario": "trap-expansion"}])
def test_invalid_configs(entries):
    with pytest.raises(ConfigError):
        resolve("lz-inversion", entries, {})


def test_alias_and_dedup():
    cfg = resolve("trap-expansion", {"protocols": "cd, modified-frequency, modified"}, {})
    assert cfg["protocols"] == ["cd", "modified"]


def test_unknown_key_exit_code(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("scenario = lz-inversion\nwarp = 9\n")
    assert main(["run", str(cfg)]) == 2
    assert "unknown parameter" in capsys.readouterr().err
    assert main(["lz-inversion", "--protocols", ",", "--out", str(tmp_path)]) == 2


@pytest.fixture(scope="module")
def lz_out(tmp_path_factory):
    out = tmp_path_factory.mktemp("lz")
    assert main(["lz-inversion", "--protocols", "cd0,zrot", "--out", str(out)] + SMALL_LZ) == 0
    return out


def test_lz_outputs(lz_out):
    for p in ("bare", "cd0", "zrot"):
        for f in ("hamiltonian.csv", "populations.csv", "summary.json"):
            assert (lz_out / p / f).is_file()
    header = (lz_out / "cd0" / "populations.csv").read_text().splitlines()[0]
    assert header.replace(" ", "").lstrip("#") == "t,P1,P2,eigen_P1"
    summary = json.loads((lz_out / "summary.json").read_text())
    assert summary["defaults"]["tolerance"] == 1e-10
    assert summary["config"]["tolerance"] == 1e-9
    assert summary["protocols"]["cd0"]["fidelity"] > 1 - 1e-6
    for svg in lz_out.glob("*.svg"):
        assert ET.parse(svg).getroot().tag.endswith("svg")
    assert {"hamiltonian_X.svg", "populations.svg"} <= {p.name for p in lz_out.glob("*.svg")}


def test_byte_identical_rerun(lz_out, tmp_path):
    again = tmp_path / "again"
    assert main(["lz-inversion", "--protocols", "cd0,zrot", "--out", str(again)] + SMALL_LZ) == 0
    first = sorted(p.relative_to(lz_out) for p in lz_out.rglob("*") if p.is_file())
    assert first == sorted(p.relative_to(again) for p in again.rglob("*") if p.is_file())
    for rel in first:
        if rel.name == "summary.json":
            # only the recorded output directory may differ
            a = (lz_out / rel).read_text().replace(str(lz_out), "OUT")
            assert a == (again / rel).read_text().replace(str(again), "OUT")
        else:
            assert (lz_out / rel).read_bytes() == (again / rel).read_bytes(), rel


def test_compare(lz_out, tmp_path, capsys):
    a, b = lz_out / "cd0" / "populations.csv", lz_out / "zrot" / "populations.csv"
    assert main(["compare", str(a), str(a)]) == 0
    assert main(["compare", str(a), str(b), "--tolerance", "1e-6"]) == 0
    assert main(["compare", str(a), str(lz_out / "bare" / "populations.csv"), "--tolerance", "1e-3"]) == 1
    res = compare_files(a, b)
    assert res["max_abs"] < 1e-6 and res["l1"] <= res["max_abs"] * 2
    shifted = tmp_path / "shifted.csv"
    lines = a.read_text().splitlines()
    shifted.write_text("\n".join([lines[0]] + lines[2:]) + "\n")
    assert main(["compare", str(a), str(shifted)]) == 2
    assert "GridMismatch" in capsys.readouterr().err


def test_small_trap_run(tmp_path):
    out = tmp_path / "trap"
    assert main(["trap-expansion", "--out", str(out)] + SMALL_TRAP) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert set(summary["protocols"]) == {"reference", "cd", "modified"}
    assert summary["protocols"]["cd"]["final_P0"] > 1 - 1e-3
    data = np.loadtxt(out / "reference" / "observables.csv", delimiter=",", comments="#", skiprows=1)
    assert data.shape == (11, 5)
    assert np.max(np.abs(data[:, 1] / data[:, 2] - 1)) < 1e-3
    assert (out / "widths.svg").is_file()


def test_lab_run(tmp_path):
    out = tmp_path / "lab"
    assert main(["atom-lab-frame", "--protocols", "cd0-only", "--omega0", "40", "--out", str(out)] + SMALL_LZ) == 0
    s = json.loads((out / "summary.json").read_text())["protocols"]["cd0-only"]
    assert s["max_population_difference_vs_rotating"] < 1e-6
    assert (out / "cd0-only" / "populations_rotating.csv").is_file()


def test_run_by_config(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("scenario = lz-inversion\nprotocols = cd0-only\nn_grid = 1001\nn_report = 51\n")
    out = tmp_path / "o"
    assert main(["run", str(cfg), "--out", str(out)]) == 0
    assert (out / "cd0-only" / "populations.csv").is_file()


def test_shipped_configs_parse():
    for path in sorted(CONFIGS.glob("*.cfg")):
        entries = read_config(path)
        cfg = resolve(entries["scenario"], entries, {})
        assert cfg["protocols"]


def test_console_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "sta_pictures.cli", "compare", "--help"], capture_output=True, text=True)
    assert r.returncode == 0 and "--column" in r.stdout
