"""Random circuit generators shared by the tests."""

from __future__ import annotations

import random

from edpc.circuit import Gate, GateKind, LogicalCircuit


def random_clifford(n: int, depth: int, rng: random.Random, paulis: bool = True) -> LogicalCircuit:
    """Layers of CNOT/H/S/Sx plus measurements and re-preparations.

    With ``paulis`` the gate mix also includes X, Y, Z and Sdg.
    """
    gates = []
    live = [True] * n
    for _ in range(depth):
        qs = list(range(n))
        rng.shuffle(qs)
        while qs:
            q = qs.pop()
            if not live[q]:
                gates.append(Gate(rng.choice([GateKind.PREP_Z, GateKind.PREP_X]), (q,)))
                live[q] = True
                continue
            r = rng.random()
            if r < 0.4 and qs and live[qs[-1]]:
                gates.append(Gate(GateKind.CNOT, (q, qs.pop())))
            elif r < 0.55:
                gates.append(Gate(GateKind.H, (q,)))
            elif r < 0.65:
                gates.append(Gate(GateKind.S, (q,)))
            elif r < 0.72:
                gates.append(Gate(GateKind.SX, (q,)))
            elif r < 0.78 and paulis:
                gates.append(Gate(rng.choice([GateKind.X, GateKind.Y, GateKind.Z, GateKind.SDG]), (q,)))
            elif r < 0.86:
                gates.append(Gate(rng.choice([GateKind.MEAS_Z, GateKind.MEAS_X]), (q,)))
                live[q] = False
    return LogicalCircuit(n, tuple(gates))


def random_pairs(g, rng: random.Random, max_pairs: int | None = None):
    """Random disjoint (control, target) pairs of data vertices."""
    black = list(g.black_vertices)
    rng.shuffle(black)
    k = len(black) // 2 if max_pairs is None else min(max_pairs, len(black) // 2)
    k = rng.randint(1, k)
    return [(black[2 * i], black[2 * i + 1]) for i in range(k)]


def random_edp_sets(count: int, seed: int = 0, sides=(7, 9, 13)):
    """Operator EDP sets produced by the greedy router on random terminal pairs."""
    from edpc.layout import build_grid, build_operator_graph
    from edpc.paths import greedy_max_edp

    rng = random.Random(seed)
    out = []
    while len(out) < count:
        g = build_grid(sides[len(out) % len(sides)])
        pairs = random_pairs(g, rng)
        paths = greedy_max_edp(build_operator_graph(g, pairs), pairs)
        if paths:
            out.append((g, paths))
    return out


def random_network(rng: random.Random, max_edges: int = 30):
    """Small unit-capacity network: (nodes, directed arcs, undirected edges)."""
    n = rng.randint(2, 8)
    m = rng.randint(0, max_edges)
    arcs, edges = [], []
    for _ in range(m):
        u, v = rng.sample(range(n), 2)
        (arcs if rng.random() < 0.6 else edges).append((u, v))
    return n, arcs, edges


def brute_min_cut(n: int, arcs, edges, s: int = 0, t: int = 1) -> int:
    """Minimum s-t cut by enumerating every vertex side containing s."""
    others = [v for v in range(n) if v not in (s, t)]
    best = None
    for mask in range(1 << len(others)):
        side = {s} | {v for i, v in enumerate(others) if mask >> i & 1}
        cut = sum(1 for u, v in arcs if u in side and v not in side)
        cut += sum(1 for u, v in edges if (u in side) != (v in side))
        best = cut if best is None else min(best, cut)
    return best
