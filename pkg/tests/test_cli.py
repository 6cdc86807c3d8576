import json

import numpy as np
import pytest

from ctnsim.cli import main
from ctnsim.experiments import read_csv
from ctnsim.gateclasses import GateClassTable
from ctnsim.mps import MPS


@pytest.fixture
def circuit_file(tmp_path):
    circuit = {"n": 3, "gates": [
        {"type": "H", "q": [0]},
        {"type": "RANDOM_CLIFFORD"},
        {"type": "RZ", "q": [1], "theta": np.pi / 4},
        {"type": "RP", "pauli": "XIZ", "theta": np.pi / 8},
    ]}
    path = tmp_path / "c.json"
    path.write_text(json.dumps(circuit))
    return path


def test_run_writes_csv_and_snapshot(tmp_path, circuit_file, capsys):
    out = tmp_path / "t.csv"
    dump = tmp_path / "state.bin"
    rc = main(["run", "--circuit", str(circuit_file), "--cool", "exact",
               "--chi-max", "8", "--seed", "7", "--out", str(out),
               "--dump-state", str(dump)])
    assert rc == 0
    records = read_csv(out)
    assert len(records) == 2
    snap = MPS.load(dump)
    assert snap.n == 3
    assert "rotations=2" in capsys.readouterr().out


def test_run_determinism(tmp_path, circuit_file):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (a, b):
        assert main(["run", "--circuit", str(circuit_file), "--seed", "3",
                     "--chi-max", "8", "--out", str(out)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_run_missing_circuit(tmp_path, capsys):
    rc = main(["run", "--circuit", str(tmp_path / "nope.json")])
    assert rc != 0
    assert "error" in capsys.readouterr().err


def test_run_invalid_policy(tmp_path, circuit_file, capsys):
    rc = main(["run", "--circuit", str(circuit_file), "--cool", "sideways"])
    assert rc != 0
    assert "cooling policy" in capsys.readouterr().err


def test_experiment_doped(tmp_path):
    out = tmp_path / "d.csv"
    rc = main(["experiment", "doped", "--n", "5", "--t-max", "3",
               "--realizations", "2", "--seed", "11", "--chi-max", "8",
               "--cool", "exact", "--out", str(out)])
    assert rc == 0
    assert len(read_csv(out)) == 6


def test_experiment_angles(tmp_path):
    out = tmp_path / "a.csv"
    rc = main(["experiment", "angles", "--n", "4", "--t-max", "2",
               "--realizations", "1", "--seed", "2", "--chi-max", "8",
               "--cool", "none", "--theta", "0.4", "0.8", "--out", str(out)])
    assert rc == 0
    recs = read_csv(out)
    assert sorted({round(r.theta, 3) for r in recs}) == [0.4, 0.8]


def test_experiment_fidelity(tmp_path):
    out = tmp_path / "f.csv"
    rc = main(["experiment", "fidelity", "--n", "4", "--t-max", "3",
               "--realizations", "1", "--seed", "5", "--cool", "exact",
               "--out", str(out)])
    assert rc == 0
    header = out.read_text().splitlines()[0]
    assert header == "seed,n,t_count,chi,inv_chi,fidelity"


def test_classes_subcommand(tmp_path, capsys):
    out = tmp_path / "cls2.bin"
    assert main(["classes", "--k", "2", "--out", str(out)]) == 0
    table = GateClassTable.load(out)
    assert table.class_count == 20
    assert "20 classes" in capsys.readouterr().out


def test_verify_theorem(tmp_path, capsys):
    report = tmp_path / "rep.json"
    rc = main(["verify", "theorem", "--samples", "40", "--seed", "3",
               "--report", str(report)])
    assert rc == 0
    data = json.loads(report.read_text())
    assert data["passed"] is True
    assert data["max_formula_oracle_diff"] < 1e-10
