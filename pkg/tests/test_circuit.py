import random

import numpy as np
import pytest
from dense import apply_circuit, fidelity, random_state
from helpers import random_clifford

from edpc.circuit import (
    CircuitError,
    Frontier,
    Gate,
    GateKind,
    LogicalCircuit,
    available_ops,
    commute_paulis,
    format_circuit,
    parse_circuit,
)


def test_parse_and_format_round_trip():
    text = "qubits 3\n# comment\nprep_z 2\ncnot 0 2  # inline\nh 1\nt 2\nmeas_x 0\n"
    c = parse_circuit(text, name="demo")
    assert c.n_logical == 3
    assert [g.kind for g in c.gates] == [GateKind.PREP_Z, GateKind.CNOT, GateKind.H, GateKind.T, GateKind.MEAS_X]
    again = parse_circuit(format_circuit(c))
    assert again.gates == c.gates


@pytest.mark.parametrize(
    "text,line",
    [
        ("cnot 0 1", 1),
        ("qubits 2\ncnot 0 0", 2),
        ("qubits 2\nfoo 1", 2),
        ("qubits 2\nh 2", 2),
        ("qubits 2\nh a", 2),
        ("qubits 2\nqubits 3", 2),
        ("qubits 2\ncnot 1", 2),
    ],
)
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(CircuitError) as exc:
        parse_circuit(text)
    assert exc.value.line == line


def test_missing_header():
    with pytest.raises(CircuitError):
        parse_circuit("# nothing\n")


def test_gate_arity():
    with pytest.raises(CircuitError):
        Gate(GateKind.H, (0, 1))
    with pytest.raises(CircuitError):
        LogicalCircuit(2, (Gate(GateKind.H, (5,)),))


def test_liveness():
    c = parse_circuit("qubits 2\nprep_z 1\ncnot 0 1\nmeas_z 1\nprep_x 1")
    assert c.initially_live() == [True, False]
    assert c.final_live() == [True, True]
    c.check_liveness()
    with pytest.raises(CircuitError):
        parse_circuit("qubits 1\nmeas_z 0\nh 0").check_liveness()
    with pytest.raises(CircuitError):
        parse_circuit("qubits 1\nh 0\nprep_z 0").check_liveness()


def test_available_ops_follow_dependencies():
    c = parse_circuit("qubits 3\nh 0\ncnot 0 1\nh 2\ncnot 1 2")
    assert available_ops(c, []) == [0, 2]
    assert available_ops(c, [0]) == [1, 2]
    assert available_ops(c, [0, 1, 2]) == [3]
    with pytest.raises(ValueError):
        available_ops(c, [1])


def test_frontier_matches_available_ops():
    rng = random.Random(2)
    for _ in range(30):
        c = random_clifford(5, 6, rng)
        f = Frontier(c)
        done = []
        while not f.done():
            av = f.available()
            assert av == available_ops(c, done)
            i = rng.choice(av)
            f.execute(i)
            done.append(i)


def test_commute_paulis_drops_paulis_and_keeps_unitary():
    rng = random.Random(4)
    nrng = np.random.default_rng(4)
    for _ in range(40):
        c = random_clifford(3, 5, rng)
        c = LogicalCircuit(3, tuple(g for g in c.gates if g.kind.value not in ("prep_z", "prep_x", "meas_z", "meas_x")))
        norm, frame = commute_paulis(c)
        assert not any(g.kind in (GateKind.X, GateKind.Y, GateKind.Z) for g in norm.gates)
        tail = []
        for q in range(3):
            if frame.z[q]:
                tail.append(Gate(GateKind.Z, (q,)))
            if frame.x[q]:
                tail.append(Gate(GateKind.X, (q,)))
        psi = random_state(3, nrng)
        want = apply_circuit(c, psi)
        got = apply_circuit(LogicalCircuit(3, norm.gates + tuple(tail)), psi)
        assert fidelity(got, want) == pytest.approx(1.0)


def test_commute_paulis_flips_measurements():
    norm, frame = commute_paulis(parse_circuit("qubits 2\nx 0\ncnot 0 1\nmeas_z 1\nmeas_x 0"))
    assert norm.meas_flips == {1: True}
    assert frame.is_identity()


def test_pauli_before_t_is_kept():
    norm, _ = commute_paulis(parse_circuit("qubits 1\nx 0\nh 0\nt 0"))
    assert [g.kind for g in norm.gates] == [GateKind.H, GateKind.Z, GateKind.T]
