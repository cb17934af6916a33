import csv
import io
import json

import numpy as np
import pytest

from qeevqe.cli import CSV_COLUMNS, NOISY_COLUMNS, WorkflowConfig, compare_results, format_report, main
from qeevqe.errors import ConfigurationError
from qeevqe.fermion import random_table, write_fcidump
from qeevqe.noise import NoiseModel

from conftest import record_vqe


def _fcidump(path, n_orb=6, n_el=4, seed=0):
    path.write_text(write_fcidump(random_table(n_orb, n_el, seed)))
    return path


@pytest.fixture
def encoded(tmp_path, capsys):
    fd = _fcidump(tmp_path / "keto.fcidump", 3, 2, 1)
    assert main(["encode", "--fcidump", str(fd), "--label", "keto", "--out", str(tmp_path / "enc")]) == 0
    capsys.readouterr()
    return tmp_path / "enc" / "keto"


def test_encode_reports_qubit_counts(tmp_path, capsys):
    fd = _fcidump(tmp_path / "m.fcidump")
    assert main(["encode", "--fcidump", str(fd), "--out", str(tmp_path / "o")]) == 0
    assert "JW 12 / QEE 8 qubits" in capsys.readouterr().out
    s = json.loads((tmp_path / "o" / "system" / "summary.json").read_text())
    assert (s["jw_qubits"], s["qee_qubits"], s["sector_size"]) == (12, 8, 225)
    assert (tmp_path / "o" / "system" / "hamiltonian.pauli.txt").exists()


def test_encode_active_subset_and_jw(tmp_path, capsys):
    fd = _fcidump(tmp_path / "m.fcidump", 5, 6, 2)
    out = tmp_path / "o"
    assert main(["encode", "--fcidump", str(fd), "--active", "2-4", "--out", str(out)]) == 0
    qee = json.loads((out / "system" / "summary.json").read_text())
    assert qee["active_electrons"] == 2 and qee["frozen_orbitals"] == [0, 1]
    assert main(["encode", "--fcidump", str(fd), "--active", "2-4", "--encoding", "jw", "--out", str(tmp_path / "j")]) == 0
    jw = json.loads((tmp_path / "j" / "system" / "summary.json").read_text())
    assert jw["n_qubits"] == 6
    assert jw["exact_energy_hartree"] == pytest.approx(qee["exact_energy_hartree"], abs=1e-10)
    assert jw["variational_floor_hartree"] <= jw["exact_energy_hartree"] + 1e-12


def test_single_configuration_needs_no_qubits(tmp_path, capsys):
    fd = _fcidump(tmp_path / "h.fcidump", 1, 2, 0)
    assert main(["encode", "--fcidump", str(fd), "--out", str(tmp_path / "o")]) == 0
    assert "QEE 0 qubits" in capsys.readouterr().out


def test_malformed_fcidump_exits_1(tmp_path, capsys):
    bad = tmp_path / "bad.fcidump"
    bad.write_text("&FCI NORB=2,\n")
    assert main(["encode", "--fcidump", str(bad), "--out", str(tmp_path / "o")]) == 1
    assert "bad.fcidump" in capsys.readouterr().err


def _rows(path):
    return list(csv.DictReader(io.StringIO(path.read_text())))


def test_vqe_writes_convergence_csv(encoded, tmp_path, capsys):
    out = tmp_path / "v"
    assert main(["vqe", "--hamiltonian", str(encoded), "--layers", "1,2", "--restarts", "2", "--out", str(out)]) == 0
    rows = _rows(out / "convergence.csv")
    assert list(rows[0]) == CSV_COLUMNS and len(rows) == 2
    payload = json.loads((out / "vqe_results.json").read_text())
    for r in payload["rows"]:
        record_vqe("cli", r["energy_hartree"], payload["exact_energy_hartree"])
        assert r["error_hartree"] >= -1e-9
    assert payload["vqe_energy_hartree"] == min(r["energy_hartree"] for r in payload["rows"])


def test_vqe_noisy_columns(encoded, tmp_path, capsys):
    noise = tmp_path / "noise.json"
    noise.write_text(NoiseModel([0.05] * 4, [0.05] * 4).to_json())
    out = tmp_path / "v"
    args = ["vqe", "--hamiltonian", str(encoded), "--layers", "2", "--restarts", "1", "--noise", str(noise), "--out", str(out)]
    assert main(args) == 0
    row = _rows(out / "convergence.csv")[0]
    assert list(row) == CSV_COLUMNS + NOISY_COLUMNS
    assert float(row["noisy_energy_raw"]) > float(row["energy_hartree"])


def test_layer_sweep_rows(encoded, tmp_path, capsys):
    out = tmp_path / "v"
    layers = ",".join(str(L) for L in range(2, 21, 2))
    assert main(["vqe", "--hamiltonian", str(encoded), "--ansatz", "chain", "--layers", layers, "--restarts", "1", "--out", str(out)]) == 0
    rows = _rows(out / "convergence.csv")
    assert [int(r["layers"]) for r in rows] == list(range(2, 21, 2))


def test_results_are_deterministic_apart_from_metadata(encoded, tmp_path, capsys):
    docs = []
    for name in ("a", "b"):
        assert main(["vqe", "--hamiltonian", str(encoded), "--layers", "1", "--restarts", "2", "--out", str(tmp_path / name)]) == 0
        d = json.loads((tmp_path / name / "vqe_results.json").read_text())
        d.pop("metadata")
        docs.append(d)
    assert docs[0] == docs[1]


def _result(tmp_path, name, exact, vqe):
    p = tmp_path / f"{name}.json"
    p.write_text(json.dumps({"exact_energy_hartree": exact, "vqe_energy_hartree": vqe}))
    return f"{name}={p}"


def test_compare_gap(tmp_path, capsys):
    gap = 24.070 / 627.509474
    args = [
        "compare",
        "--results",
        _result(tmp_path, "keto", -10.0, -10.0 + 1e-4),
        _result(tmp_path, "enol", -10.0 + gap, -10.0 + gap + 2e-4),
        "--reference",
        "keto=0,enol=24.070",
        "--out",
        str(tmp_path / "r"),
    ]
    assert main(args) == 0
    text = capsys.readouterr().out
    assert "24.070" in text
    rep = json.loads((tmp_path / "r" / "report.json").read_text())
    assert rep["relative_exact_kcal"]["enol"] == pytest.approx(24.070, abs=1e-6)
    assert rep["preferred_vqe"] == "keto" and rep["reference_agreement"] and rep["exact_vqe_agree"]


def test_compare_flags_disagreement():
    rep = compare_results(
        {"a": {"exact_energy_hartree": -1.0, "vqe_energy_hartree": -0.9}, "b": {"exact_energy_hartree": -0.99, "vqe_energy_hartree": -0.98}},
        "a",
        {"a": 0.0, "b": 1.0},
    )
    assert rep["preferred_exact"] == "a" and rep["preferred_vqe"] == "b"
    assert not rep["exact_vqe_agree"] and not rep["reference_agreement"]
    assert "WARNING" in format_report(rep)


def test_compare_needs_two(tmp_path, capsys):
    assert main(["compare", "--results", _result(tmp_path, "keto", -1.0, -1.0), "--out", str(tmp_path / "r")]) == 1


def test_rank_active(tmp_path, capsys):
    cand = tmp_path / "cand.csv"
    cand.write_text("set,keto,enol\nref,0,10\n13-18,0,10.5\n14-19,0,9.9\n")
    assert main(["rank-active", "--candidates", str(cand), "--reference-set", "ref", "--out", str(tmp_path / "o")]) == 0
    ranking = json.loads((tmp_path / "o" / "ranking.json").read_text())["ranking"]
    assert [r["set"] for r in ranking] == ["14-19", "13-18"]
    assert ranking[0]["deviation_kcal"] == pytest.approx(0.1)
    assert main(["rank-active", "--candidates", str(cand), "--reference", "keto=0"]) == 1


def test_nan_hamiltonian_exits_2(encoded, tmp_path, capsys):
    sparse = encoded / "hamiltonian.sparse.txt"
    lines = sparse.read_text().splitlines()
    idx = next(i for i, l in enumerate(lines) if l.strip() and not l.startswith("#"))
    parts = lines[idx].split()
    parts[2] = "nan"
    lines[idx] = " ".join(parts)
    sparse.write_text("\n".join(lines) + "\n")
    assert main(["vqe", "--hamiltonian", str(encoded), "--layers", "1", "--restarts", "1", "--out", str(tmp_path / "v")]) == 2


def test_config_file(tmp_path, capsys):
    _fcidump(tmp_path / "k.fcidump", 3, 2, 3)
    _fcidump(tmp_path / "e.fcidump", 3, 2, 4)
    cfg = {
        "tautomers": {"keto": {"fcidump": "k.fcidump"}, "enol": {"fcidump": "e.fcidump"}},
        "layers": [1],
        "restarts": 1,
        "out": "run",
    }
    (tmp_path / "cfg.json").write_text(json.dumps(cfg))
    assert main(["sweep", "--config", str(tmp_path / "cfg.json")]) == 0
    rep = json.loads((tmp_path / "run" / "report.json").read_text())
    assert rep["anchor"] == "keto" and set(rep["tautomers"]) == {"keto", "enol"}
    (tmp_path / "bad.json").write_text(json.dumps({**cfg, "colour": 1}))
    with pytest.raises(ConfigurationError):
        WorkflowConfig.load(tmp_path / "bad.json")
