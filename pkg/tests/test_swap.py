import random

import pytest
from helpers import random_clifford

from edpc.circuit import parse_circuit
from edpc.layout import RotatedLayout
from edpc.schedule import OpKind, validate
from edpc.swap import (
    RoutingError,
    apply_route,
    compile_swap,
    extend_permutation,
    greedy_matching,
    route_permutation,
    swap_cost,
)
from edpc.verifier import check_equivalence, check_structure


def random_perm(lay, rng):
    t = list(lay.sites)
    rng.shuffle(t)
    return dict(zip(lay.sites, t))


@pytest.mark.parametrize("dims", [(1, 4), (2, 3), (3, 3), (4, 5), (6, 4)])
def test_routing_realizes_permutation_within_bound(dims):
    lay = RotatedLayout(*dims)
    rng = random.Random(sum(dims))
    for _ in range(40):
        perm = random_perm(lay, rng)
        route = route_permutation(lay, perm)
        assert route.depth <= 4 * (lay.L1 + 1) + 2 * (lay.L2 + 1)
        tokens = apply_route(route, {s: s for s in lay.sites})
        assert {tok: s for s, tok in tokens.items()} == perm
        for rnd in route.rounds:
            touched = [s for pair in rnd for s in pair]
            assert len(touched) == len(set(touched))
            ancillas = [a for s1, s2 in rnd for a in lay.common_ancillas(s1, s2)]
            assert len(ancillas) == len(set(ancillas))


def test_identity_needs_no_swaps():
    lay = RotatedLayout(3, 4)
    assert route_permutation(lay, {s: s for s in lay.sites}).depth == 0


def test_empty_sites_are_not_swapped():
    lay = RotatedLayout(3, 3)
    perm = extend_permutation(lay, {(0, 0): (2, 2)}, occupied={(0, 0)})
    route = route_permutation(lay, perm, occupied={(0, 0)})
    assert all(len(r) == 1 for r in route.rounds)
    assert route.depth == 2 * 4


def test_extend_permutation():
    lay = RotatedLayout(3, 3)
    perm = extend_permutation(lay, {(0, 0): (1, 1), (1, 1): (2, 2)}, occupied={(0, 0), (1, 1), (0, 1)})
    assert sorted(perm.values()) == sorted(lay.sites)
    assert perm[(0, 1)] == (0, 1)
    assert perm[(2, 2)] == (0, 0)
    with pytest.raises(RoutingError):
        extend_permutation(lay, {(0, 0): (1, 1), (0, 1): (1, 1)})


def test_greedy_matching_is_maximal():
    lay = RotatedLayout(4, 5)
    excluded = {(0, 0), (3, 4)}
    m = greedy_matching(lay, excluded)
    used = {s for e in m for s in e}
    assert len(used) == 2 * len(m) and not used & excluded
    for s1, s2 in lay.site_edges:
        assert s1 in used or s2 in used or s1 in excluded or s2 in excluded


def test_swap_cost_matches_routing_depth():
    lay = RotatedLayout(3, 3)
    m = greedy_matching(lay, set())
    d, (e1, e2) = swap_cost(lay, {}, (0, 0), (2, 2), m, occupied={(0, 0), (2, 2)})
    perm = extend_permutation(lay, {(0, 0): e1, (2, 2): e2}, {(0, 0), (2, 2)})
    assert d == route_permutation(lay, perm, {(0, 0), (2, 2)}).depth
    assert {e1, e2} in [set(e) for e in m]


def test_random_clifford_circuits_compile_correctly():
    rng = random.Random(31)
    for k in range(20):
        c = random_clifford(rng.randint(1, 9), rng.randint(1, 8), rng)
        res = compile_swap(c, seed=k)
        v = check_equivalence(c, res.schedule, samples=50, seed=k)
        assert v.ok, v.reasons


def test_max_selection_is_also_correct():
    rng = random.Random(3)
    c = random_clifford(8, 6, rng)
    res = compile_swap(c, select="max")
    assert check_equivalence(c, res.schedule, 50).ok
    with pytest.raises(ValueError):
        compile_swap(c, select="median")


def test_rotations_happen_on_the_boundary():
    c = parse_circuit("qubits 9\nt 4\ns 4\nsx 0")
    res = compile_swap(c)
    assert check_structure(c, res.schedule).ok
    rots = [op for _, op in res.schedule.ops() if op.kind is OpKind.ROTATION]
    assert len(rots) == 3
    assert all(op.patches[0] in res.schedule.grid.boundary for op in rots)


def test_same_seed_same_schedule():
    c = random_clifford(9, 8, random.Random(5))
    a, b = compile_swap(c, seed=4), compile_swap(c, seed=4)
    assert a.schedule.layers == b.schedule.layers


def test_schedules_validate():
    c = parse_circuit("qubits 6\ncnot 0 5\ncnot 1 4\nh 2\nmeas_z 3\nprep_x 3\ncnot 3 2")
    res = compile_swap(c, 2, 3)
    assert validate(res.schedule) == []
    assert res.cost.space == RotatedLayout(2, 3).space
