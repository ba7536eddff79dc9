import json

from edpc.cli import main, parse_seeds
from edpc.layout import RotatedLayout


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_parse_seeds():
    assert parse_seeds("3") == [0, 1, 2]
    assert parse_seeds("2-4") == [2, 3, 4]
    assert parse_seeds("5,1") == [5, 1]


def test_compile_and_verify_round_trip(tmp_path, capsys):
    circ = write(tmp_path, "c.txt", "qubits 4\ncnot 0 3\nh 1\nmeas_x 1\n")
    for algo in ("edpc", "swap"):
        sched = str(tmp_path / f"{algo}.json")
        layout = str(tmp_path / f"{algo}_layout.json")
        assert main(["compile", "--algo", algo, "--circuit", circ, "--dump-schedule", sched, "--dump-layout", layout]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["valid"] and report["spacetime"] == report["depth"] * report["space"]
        assert json.loads((tmp_path / f"{algo}_layout.json").read_text())
        assert main(["verify", "--circuit", circ, "--schedule", sched, "--samples", "20"]) == 0
        assert json.loads(capsys.readouterr().out)["ok"]


def test_verify_fails_on_wrong_circuit(tmp_path, capsys):
    circ = write(tmp_path, "c.txt", "qubits 2\ncnot 0 1\n")
    other = write(tmp_path, "d.txt", "qubits 2\ncnot 1 0\n")
    sched = str(tmp_path / "s.json")
    assert main(["compile", "--circuit", circ, "--dump-schedule", sched]) == 0
    assert main(["verify", "--circuit", other, "--schedule", sched]) == 1


def test_compile_options(tmp_path, capsys):
    circ = write(tmp_path, "c.txt", "qubits 4\ncnot 0 3\ns 2\n")
    paths = str(tmp_path / "paths.json")
    assert main(["compile", "--circuit", circ, "--grid", "7", "--dump-paths", paths, "--p", "0.001"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["space"] == 49 and report["d"] % 2 == 1
    assert json.loads((tmp_path / "paths.json").read_text())[0]
    assert main(["compile", "--algo", "swap", "--circuit", circ, "--grid-rows", "2", "--grid-cols", "3", "--swap-select", "max"]) == 0
    assert json.loads(capsys.readouterr().out)["space"] == RotatedLayout(2, 3).space


def test_bad_input_exit_code(tmp_path, capsys):
    circ = write(tmp_path, "c.txt", "qubits 2\ncnot 0 5\n")
    assert main(["compile", "--circuit", circ]) == 2
    assert "line 2" in capsys.readouterr().err


def test_bench_outputs(tmp_path):
    out = tmp_path / "r.csv"
    assert main(["bench", "--n", "4", "--layers", "2", "--seeds", "2", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "circuit_id,algorithm,n,L,depth,space,spacetime,wall_ms,seed,status"
    assert len(lines) == 5
    agg = json.loads(out.with_suffix(".json").read_text())["aggregate"]
    assert len(agg) == 2
    out2 = tmp_path / "h.csv"
    assert main(["bench", "--generator", "half_ckx", "--k", "2", "--algo", "edpc", "--out", str(out2)]) == 0
    assert "half_c2x" in out2.read_text()
