import math
import random

import pytest
from helpers import random_clifford, random_edp_sets

from edpc.bench import gen_half_ckx
from edpc.circuit import parse_circuit
from edpc.compiler import _feasible_subset, compile_edpc, hadamard_cell, rotation_paths
from edpc.emit import Builder, Role, emit_paths
from edpc.layout import LayoutError, build_grid, embed_qubits, is_horizontal, is_vertical
from edpc.paths import Path, check_edp_set
from edpc.schedule import OpKind, validate
from edpc.verifier import check_equivalence, check_structure


def test_random_clifford_circuits_compile_correctly():
    rng = random.Random(21)
    for k in range(20):
        c = random_clifford(rng.randint(1, 9), rng.randint(1, 8), rng)
        res = compile_edpc(c)
        v = check_equivalence(c, res.schedule, samples=50, seed=k)
        assert v.ok, v.reasons


def test_parallel_local_cnots_take_depth_two():
    c = parse_circuit("qubits 4\ncnot 0 2\ncnot 1 3")
    res = compile_edpc(c)
    assert res.cost.depth == 2
    assert res.stats.subroutine_depths == [2]


def test_crossing_cnots_fit_depth_four():
    c = parse_circuit("qubits 9\ncnot 0 8\ncnot 2 6\ncnot 1 7\ncnot 3 5")
    res = compile_edpc(c)
    assert max(res.stats.subroutine_depths) <= 4
    assert check_equivalence(c, res.schedule, 100).ok


def test_explicit_grid_and_space():
    c = parse_circuit("qubits 2\ncnot 0 1")
    res = compile_edpc(c, L=7)
    assert res.cost.space == 49
    with pytest.raises(LayoutError):
        compile_edpc(parse_circuit("qubits 5\nh 4"), L=5)


def test_hadamards_run_in_parallel():
    c = parse_circuit("qubits 4\nh 0\nh 1\nh 2\nh 3")
    res = compile_edpc(c)
    assert res.cost.depth == 3
    g = build_grid(5)
    cells = [set(hadamard_cell(v)) | {v} for v in g.black_vertices]
    for a in range(len(cells)):
        for b in range(a + 1, len(cells)):
            assert not cells[a] & cells[b]


def test_non_clifford_circuit_structure():
    c = gen_half_ckx(4)
    res = compile_edpc(c)
    assert validate(res.schedule) == []
    assert check_structure(c, res.schedule).ok
    n_rot = sum(1 for _, op in res.schedule.ops() if op.kind is OpKind.ROTATION)
    assert n_rot == sum(1 for g in c.gates if g.kind.value in ("t", "tdg"))


def test_rotation_paths_reach_distinct_boundary_ancillas():
    g = build_grid(9)
    emb = embed_qubits(16, g)
    targets = [(v, k % 2 == 0) for k, v in enumerate(emb.positions)]
    paths = rotation_paths(g, emb, targets)
    assert len(paths) == 16
    assert check_edp_set(paths, g, operator=False) == []
    for p in paths:
        assert p.end in emb.boundary
        assert all(v not in emb.boundary for v in p.vertices[1:-1])
        vertical = targets[p.key][1]
        assert (is_vertical if vertical else is_horizontal)(p.vertices[0], p.vertices[1])


def test_feasible_subset_defers_conflicts():
    a = Path(((1, 1), (1, 2), (1, 3)), 0)
    b = Path(((0, 2), (1, 2), (2, 2)), 1)
    c = Path(((1, 4), (1, 2), (1, 0)), 2)
    keep, defer = _feasible_subset([a, b, c])
    assert [p.key for p in keep] == [0, 1] and [p.key for p in defer] == [2]


def test_emit_paths_depth_bounds():
    for _, paths in random_edp_sets(150, seed=13):
        d = emit_paths(Builder(), paths, [Role(p.key) for p in paths])
        assert d <= 4
        vertex_disjoint = len({v for p in paths for v in p.vertices}) == sum(len(p.vertices) for p in paths)
        if vertex_disjoint:
            assert d == 2


def test_rotation_iterations_scale_with_sqrt_k():
    for k in (4, 16, 36):
        c = parse_circuit(f"qubits {k}\n" + "".join(f"s {q}\n" for q in range(k)))
        res = compile_edpc(c)
        assert res.stats.rotation_iterations / math.sqrt(k) <= 4
        assert check_equivalence(c, res.schedule, 20).ok


def test_record_paths():
    c = parse_circuit("qubits 4\ncnot 0 3\ns 1")
    res = compile_edpc(c, record_paths=True)
    entry = res.stats.paths[0]
    assert {e["gate"] for e in entry} == {0, 1}
    for e in entry:
        assert len(e["labels"]) == len(e["vertices"]) - 1
