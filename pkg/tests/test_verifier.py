import dataclasses

import pytest

from edpc.circuit import parse_circuit
from edpc.compiler import compile_edpc
from edpc.schedule import Layer, SurfaceSchedule, with_final_embedding
from edpc.swap import compile_swap
from edpc.verifier import NonCliffordError, check_equivalence, check_structure


def strip_byproducts(s, keep_every=2):
    layers, seen = [], 0
    for layer in s.layers:
        ops = []
        for op in layer.ops:
            if op.byproducts:
                seen += 1
                if seen % keep_every == 0:
                    op = dataclasses.replace(op, byproducts=())
            ops.append(op)
        layers.append(Layer(ops, layer.paulis))
    return SurfaceSchedule(s.grid, layers)


def test_accepts_correct_schedule():
    c = parse_circuit("qubits 3\ncnot 0 2\nh 1\nmeas_x 1")
    for s in (compile_edpc(c).schedule, compile_swap(c).schedule):
        v = check_equivalence(c, s, samples=100)
        assert v.ok and v.samples == 100 and v.failed_samples == 0


def test_rejects_reversed_cnot():
    s = compile_edpc(parse_circuit("qubits 2\ncnot 0 1")).schedule
    assert not check_equivalence(parse_circuit("qubits 2\ncnot 1 0"), s).ok


def test_rejects_missing_corrections():
    c = parse_circuit("qubits 4\ncnot 0 3\ncnot 1 2")
    s = compile_edpc(c).schedule
    v = check_equivalence(c, strip_byproducts(s, 1), samples=100)
    assert not v.ok and v.failed_samples > 0


def test_logical_paulis_stay_in_the_frame():
    # Paulis are tracked classically: the schedule is the same with or without them
    with_x = parse_circuit("qubits 2\nx 0\ncnot 0 1\nmeas_z 1")
    without = parse_circuit("qubits 2\ncnot 0 1\nmeas_z 1")
    s1, s2 = compile_edpc(with_x).schedule, compile_edpc(without).schedule
    assert s1.layers == s2.layers
    assert check_equivalence(with_x, s1).ok


def test_rejects_wrong_final_embedding():
    c = parse_circuit("qubits 2\ncnot 0 1")
    s = compile_swap(c).schedule
    bad = with_final_embedding(s, s.grid.final_embedding[::-1])
    assert not check_equivalence(c, bad).ok


def test_rejects_unmeasured_output():
    c = parse_circuit("qubits 2\ncnot 0 1\nmeas_z 1")
    s = compile_edpc(parse_circuit("qubits 2\ncnot 0 1")).schedule
    v = check_equivalence(c, s)
    assert not v.ok


def test_non_clifford_needs_structure_check():
    c = parse_circuit("qubits 1\nt 0")
    s = compile_edpc(c).schedule
    with pytest.raises(NonCliffordError):
        check_equivalence(c, s)
    assert check_structure(c, s).ok
    assert not check_structure(parse_circuit("qubits 1\nt 0\nt 0"), s).ok
