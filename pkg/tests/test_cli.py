import csv
import json
import subprocess
import sys

import pytest

from multirail.cli import main
from multirail.fock import SparseState


def run(args, capsys):
    code = main(args)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def state_file(tmp_path, capsys):
    path = tmp_path / "state.json"
    code, _, _ = run(
        ["gen", "--parties", "3", "--modes", "5", "--photons", "2,1,1", "--source", "squeezed", "--r-db", "0.5", "--x", "0", "-o", str(path)],
        capsys,
    )
    assert code == 0
    return path


def test_gen_writes_state(state_file):
    state = SparseState.load(state_file)
    assert state.shape.dimension == 375
    assert 0 < len(state) <= 375
    assert state.is_normalized()


def test_verify_report(state_file, capsys):
    code, out, _ = run(["verify", "--state", str(state_file), "--j", "1,4,4", "--L", "0,1,2,3,4", "--k", "0", "--all-kappa"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["bound"] == pytest.approx(1 / 3)
    assert doc["verdict"] == "GME-detected"
    assert [row["kappa"] for row in doc["per_kappa"]] == [0, 1, 2, 3, 4]
    assert "version" in doc


def test_verify_bad_indices(state_file, capsys):
    code, _, err = run(["verify", "--state", str(state_file), "--j", "1,1,1"], capsys)
    assert code != 0
    assert err.startswith("error:") and "index condition" in err


def test_unreadable_state(tmp_path, capsys):
    code, _, err = run(["verify", "--state", str(tmp_path / "none.json"), "--j", "1,4,4"], capsys)
    assert code != 0 and "cannot read" in err


def test_unknown_subcommand(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code != 0


def test_missing_subcommand(capsys):
    code, _, err = run([], capsys)
    assert code != 0 and "subcommand" in err


def test_sweep_csv(tmp_path, capsys):
    out = tmp_path / "s.csv"
    code, _, _ = run(["sweep", "--r-db", "0.5", "--j", "1,4,4", "--x-to", "0.02", "--x-step", "0.01", "-o", str(out), "--threads", "2"], capsys)
    assert code == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["x", "kappa", "expectation", "bound"]
    assert len(rows) == 1 + 3 * 5
    assert rows[1][:2] == ["0", "0"]


def test_lossy_sweep_csv(capsys):
    code, out, _ = run(["sweep", "--r-db", "5", "--j", "1,4,4", "--x-to", "0.01", "--x-step", "0.01", "--epsilon", "0.1,0.2"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "x,kappa,epsilon,expectation,bound,retained_probability"
    assert len(lines) == 1 + 2 * 2 * 5


def test_sweep_validation(capsys):
    code, _, err = run(["sweep", "--r-db", "0.5", "--j", "1,4,4", "--x-from", "1", "--x-to", "0"], capsys)
    assert code != 0 and "error:" in err
    code, _, err = run(["sweep", "--j", "1,4,4"], capsys)
    assert code != 0 and "--r" in err
    code, _, err = run(["sweep", "--r", "0.3", "--r-db", "1", "--j", "1,4,4"], capsys)
    assert code != 0


def test_stats_with_samples(state_file, capsys):
    code, out, _ = run(["stats", "--state", str(state_file), "--setting", "l=1", "--j", "1,4,4", "--samples", "200", "--seed", "3"], capsys)
    assert code == 0
    rows = list(csv.DictReader(out.splitlines()))
    assert sum(float(r["probability"]) for r in rows) == pytest.approx(1.0, abs=1e-9)
    assert sum(int(r["count"]) for r in rows) == 200
    code2, out2, _ = run(["stats", "--state", str(state_file), "--setting", "l=1", "--j", "1,4,4", "--samples", "200", "--seed", "3"], capsys)
    assert out2 == out


def test_stats_bad_setting(state_file, capsys):
    code, _, err = run(["stats", "--state", str(state_file), "--setting", "diagonal"], capsys)
    assert code != 0 and "setting" in err
    code, _, err = run(["stats", "--state", str(state_file), "--setting", "l=1"], capsys)
    assert code != 0


def test_classes_report(capsys):
    code, out, _ = run(["classes", "--modes", "4", "--photons", "2,2", "--j", "1,1"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert len(doc["basis"]) == 100
    assert {e["min_cardinality"] for e in doc["basis"]} == {2, 4}
    matrix = doc["l_validity"]
    assert len(matrix) == 4 and all(len(row) == 4 for row in matrix)
    assert matrix[0][0] is True
    assert matrix[0][1] is False


def test_classes_from_state(state_file, capsys):
    code, out, _ = run(["classes", "--state", str(state_file), "--j", "1,4,4"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert all(e["cardinalities"] == [5, 5, 5] for e in doc["basis"])
    assert all(all(row) for row in doc["l_validity"])


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("j = 1,4,4\nr-db = 0.5\nx-to = 0.01\nx-step = 0.01\n")
    code, out, _ = run(["sweep", "--config", str(cfg)], capsys)
    assert code == 0 and len(out.splitlines()) == 11
    code, out2, _ = run(["sweep", "--config", str(cfg), "--j", "1,1,2"], capsys)
    assert code == 0 and out2 != out


def test_identical_config_identical_output(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        run(["sweep", "--r-db", "5", "--j", "1,4,4", "--x-to", "0.05", "--epsilon", "0.1", "-o", str(path)], capsys)
    assert a.read_bytes() == b.read_bytes()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "multirail", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and "multirail" in proc.stdout
