"""SWAP-based baseline compiler on the rotated 1:1 layout."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .circuit import MEASUREMENTS, PAULIS, PREPS, ROTATIONS, Frontier, GateKind, LogicalCircuit, commute_paulis
from .compiler import CompileError, CompileResult
from .emit import Builder, emit_chain, move_op
from .layout import RotatedLayout, Site, Vertex, build_swap_layout, is_horizontal, is_vertical, swap_grid_for
from .schedule import Byproduct, GridSpec, OpKind, SurfaceOp


class RoutingError(ValueError):
    pass


Perm = dict[Site, Site]


def extend_permutation(lay: RotatedLayout, partial: Mapping[Site, Site], occupied: set[Site] | frozenset[Site] = frozenset()) -> Perm:
    """Complete a partial map of sites: unmapped tokens stay put when their
    site is free, otherwise take the nearest free site (occupied tokens first)."""
    targets = list(partial.values())
    if len(set(targets)) != len(targets):
        raise RoutingError("partial mapping is not injective")
    for s, t in partial.items():
        if not (lay.contains(s) and lay.contains(t)):
            raise RoutingError(f"mapping {s}->{t} leaves the layout")
    perm = dict(partial)
    taken = set(targets)
    rest = []
    for s in lay.sites:
        if s in perm:
            continue
        if s not in taken:
            perm[s] = s
            taken.add(s)
        else:
            rest.append(s)
    free = [s for s in lay.sites if s not in taken]
    rest.sort(key=lambda s: (s not in occupied, s))
    for s in rest:
        k = min(range(len(free)), key=lambda i: (lay.distance(s, free[i]), free[i]))
        perm[s] = free.pop(k)
    return perm


def _decompose(n_left: int, degree: int, tokens: list[tuple[int, int, int]]) -> list[int]:
    """tokens: (left, right, preferred slot). Returns a slot per token such
    that each slot is a perfect matching between left and right nodes."""
    by_left: list[list[int]] = [[] for _ in range(n_left)]
    for idx, (u, _, _) in enumerate(tokens):
        by_left[u].append(idx)
    slot = [-1] * len(tokens)
    for k in range(degree):
        match_right: dict[int, int] = {}  # right node -> token
        order = [[i for i in ids if tokens[i][2] == k] + [i for i in ids if tokens[i][2] != k] for ids in by_left]

        def augment(u: int, seen: set[int]) -> bool:
            for i in order[u]:
                r = tokens[i][1]
                if r in seen:
                    continue
                seen.add(r)
                if r not in match_right or augment(tokens[match_right[r]][0], seen):
                    match_right[r] = i
                    return True
            return False

        for u in range(n_left):
            if not augment(u, set()):
                raise RoutingError("line assignment failed; mapping is not a permutation")
        for i in match_right.values():
            slot[i] = k
            by_left[tokens[i][0]].remove(i)
    return slot


def _odd_even(lines: list[list[int]], stagger: Sequence[int]) -> list[list[tuple[int, int]]]:
    """Odd-even transposition sort of every line at once; line ``l`` compares
    pairs starting at ``(round + stagger[l]) % 2``. A line is sorted once two
    consecutive rounds leave it unchanged."""
    arrs = [list(a) for a in lines]
    idle = {l: 0 for l in range(len(arrs)) if len(arrs[l]) > 1}
    rounds = []
    r = 0
    while idle:
        swaps = []
        for l in list(idle):
            a = arrs[l]
            hit = False
            for p in range((r + stagger[l]) % 2, len(a) - 1, 2):
                if a[p] > a[p + 1]:
                    a[p], a[p + 1] = a[p + 1], a[p]
                    swaps.append((l, p))
                    hit = True
            idle[l] = 0 if hit else idle[l] + 1
            if idle[l] == 2:
                del idle[l]
        if swaps:
            rounds.append(swaps)
        r += 1
    return rounds


@dataclass
class Route:
    rounds: list[list[tuple[Site, Site]]]

    @property
    def depth(self) -> int:
        return 2 * len(self.rounds)


def route_permutation(lay: RotatedLayout, perm: Mapping[Site, Site], occupied: set[Site] | frozenset[Site] | None = None) -> Route:
    """Three-stage routing: along a, along b, along a again.

    ``perm`` maps current sites to destination sites (partial maps are
    extended). Swaps between two unoccupied sites are dropped, and so are
    rounds left empty.
    """
    occupied = set(lay.sites) if occupied is None else set(occupied)
    if len(perm) != len(lay.sites):
        perm = extend_permutation(lay, perm, occupied)
    if sorted(perm.values()) != sorted(lay.sites):
        raise RoutingError("mapping is not a permutation of the sites")
    L1, L2 = lay.L1, lay.L2
    # token currently at (a, b) wants dest[(a, b)]
    dest = dict(perm)
    # stage 1: choose a slot a* per token so each a*-line gets one token per target column
    tokens = [(b, dest[(a, b)][1], a) for a in range(L1) for b in range(L2)]
    slots = _decompose(L2, L1, tokens)
    where = {}  # site -> stage-1 destination a
    for (b, _, a), k in zip(tokens, slots):
        where[(a, b)] = k
    rounds_out: list[list[tuple[Site, Site]]] = []
    occ = {s: (s in occupied) for s in lay.sites}
    cur = dict(dest)  # site -> final destination of token there

    def run(lines, stagger, site_of):
        nonlocal cur, occ
        for rnd in _odd_even(lines, stagger):
            out = []
            for l, p in rnd:
                s1, s2 = site_of(l, p), site_of(l, p + 1)
                if occ[s1] or occ[s2]:
                    out.append((s1, s2))
                occ[s1], occ[s2] = occ[s2], occ[s1]
                cur[s1], cur[s2] = cur[s2], cur[s1]
            if out:
                rounds_out.append(out)

    # lines along a, one per b
    run([[where[(a, b)] for a in range(L1)] for b in range(L2)], [b % 2 for b in range(L2)], lambda b, a: (a, b))
    # lines along b, one per a
    run([[cur[(a, b)][1] for b in range(L2)] for a in range(L1)], [a % 2 for a in range(L1)], lambda a, b: (a, b))
    run([[cur[(a, b)][0] for a in range(L1)] for b in range(L2)], [b % 2 for b in range(L2)], lambda b, a: (a, b))
    for s, d in cur.items():
        if s != d:
            raise RoutingError("routing did not realize the permutation")
    return Route(rounds_out)


def apply_route(route: Route, placement: Mapping[Site, object]) -> dict[Site, object]:
    out = dict(placement)
    for rnd in route.rounds:
        for s1, s2 in rnd:
            out[s1], out[s2] = out.get(s2), out.get(s1)
    return {s: v for s, v in out.items() if v is not None}


def greedy_matching(lay: RotatedLayout, excluded: set[Site]) -> list[tuple[Site, Site]]:
    used = set(excluded)
    out = []
    for s1, s2 in lay.site_edges:
        if s1 in used or s2 in used:
            continue
        used.update((s1, s2))
        out.append((s1, s2))
    return out


def swap_cost(
    lay: RotatedLayout,
    partial: Mapping[Site, Site],
    v1: Site,
    v2: Site,
    matching: Sequence[tuple[Site, Site]],
    occupied: set[Site] | frozenset[Site] | None = None,
    candidates: int | None = None,
) -> tuple[int, tuple[Site, Site]]:
    """Smallest routing depth over matched edges (both orientations) after
    adding ``v1 -> e1, v2 -> e2``; returns (depth, (e1, e2)).

    ``candidates`` limits the search to the edges nearest to ``v1, v2``.
    """
    if not matching:
        raise RoutingError("matching is empty")
    pool = list(matching)
    if candidates is not None and len(pool) > candidates:
        pool.sort(key=lambda e: (min(lay.distance(v1, e[0]) + lay.distance(v2, e[1]), lay.distance(v1, e[1]) + lay.distance(v2, e[0])), e))
        pool = pool[:candidates]
    best = None
    for e1, e2 in pool:
        for t1, t2 in ((e1, e2), (e2, e1)):
            trial = dict(partial)
            trial[v1], trial[v2] = t1, t2
            d = route_permutation(lay, extend_permutation(lay, trial, occupied or frozenset()), occupied).depth
            key = (d, (t1, t2))
            if best is None or key < best:
                best = key
    return best


@dataclass
class SwapStats:
    L1: int = 0
    L2: int = 0
    iterations: int = 0
    routing_depths: list[int] = field(default_factory=list)


def _local_ancilla(lay: RotatedLayout, c: Vertex, t: Vertex) -> Vertex:
    for a in ((c[0], t[1]), (t[0], c[1])):
        if is_vertical(c, a) and is_horizontal(a, t):
            return a
    raise CompileError(f"no local CNOT ancilla between {c} and {t}")


def compile_swap(
    c: LogicalCircuit,
    L1: int | None = None,
    L2: int | None = None,
    select: str = "min",
    seed: int = 0,
    candidates: int | None = 4,
) -> CompileResult:
    if select not in ("min", "max"):
        raise ValueError("select must be 'min' or 'max'")
    norm, _ = commute_paulis(c)
    norm.check_liveness()
    if L1 is None or L2 is None:
        L1, L2 = swap_grid_for(max(1, c.n_logical))
    lay = build_swap_layout(c.n_logical, L1, L2)
    rng = random.Random(seed)
    live = norm.initially_live()
    site = {q: lay.sites[q] for q in range(c.n_logical)}
    home = [lay.patch(site[q]) for q in range(c.n_logical)]
    grid = GridSpec.rotated(lay, home, [home[q] for q in range(c.n_logical) if live[q]])
    b = Builder()
    front = Frontier(norm)
    active = list(live)
    boundary = set(lay.boundary_sites)
    stats = SwapStats(L1, L2)

    def patch(q):
        return lay.patch(site[q])

    while not front.done():
        stats.iterations += 1
        avail = front.available()
        executed = 0
        gm, gc, hads = [], [], []
        for i in avail:
            gate = norm.gates[i]
            k, q = gate.kind, gate.qubits[0]
            if k in PAULIS:
                xs = (patch(q),) if k in (GateKind.X, GateKind.Y) else ()
                zs = (patch(q),) if k in (GateKind.Z, GateKind.Y) else ()
                b.pauli(Byproduct((), xs, zs))
            elif k in PREPS:
                b.pre(SurfaceOp(OpKind.PREP_Z if k is GateKind.PREP_Z else OpKind.PREP_X, (patch(q),), gate=i))
                active[q] = True
            elif k in MEASUREMENTS:
                kind = OpKind.MEAS_Z if k is GateKind.MEAS_Z else OpKind.MEAS_X
                b.post(SurfaceOp(kind, (patch(q),), (b.var(),), gate=i))
                active[q] = False
            elif k is GateKind.H:
                hads.append(i)
                continue
            elif k in ROTATIONS:
                gm.append(i)
                continue
            elif k is GateKind.CNOT:
                gc.append(i)
                continue
            else:
                raise CompileError(f"unsupported gate {gate}")
            front.execute(i)
            executed += 1
        if hads:
            base = b.open(3)
            for i in hads:
                b.add(base, SurfaceOp(OpKind.HADAMARD, (patch(norm.gates[i].qubits[0]),), gate=i))
                front.execute(i)
                executed += 1

        if gm or gc:
            occupied = {site[q] for q in range(c.n_logical) if active[q]}
            partial: Perm = {}
            free_b = set(boundary)
            order = list(gm)
            rng.shuffle(order)
            rot_done = []
            for i in order:
                if not free_b:
                    break
                v = site[norm.gates[i].qubits[0]]
                u = min(free_b, key=lambda s: (lay.distance(v, s), s))
                partial[v] = u
                free_b.discard(u)
                rot_done.append(i)
            matching = greedy_matching(lay, set(partial.values()))
            pending = list(gc)
            cnot_done = []
            while pending and matching:
                best = None
                for i in pending:
                    q1, q2 = norm.gates[i].qubits
                    d, e = swap_cost(lay, partial, site[q1], site[q2], matching, occupied, candidates)
                    key = (d if select == "min" else -d, i)
                    if best is None or key < best[0]:
                        best = (key, i, e)
                _, i, (e1, e2) = best
                q1, q2 = norm.gates[i].qubits
                partial[site[q1]], partial[site[q2]] = e1, e2
                matching = [m for m in matching if set(m) != {e1, e2}]
                pending.remove(i)
                cnot_done.append(i)
            route = route_permutation(lay, extend_permutation(lay, partial, occupied), occupied)
            stats.routing_depths.append(route.depth)
            _emit_route(b, lay, route, occupied)
            at = {s: q for q, s in site.items()}
            after = apply_route(route, at)
            site = {q: s for s, q in after.items()}
            for i in rot_done:
                q = norm.gates[i].qubits[0]
                if site[q] not in boundary:
                    raise CompileError(f"rotation qubit {q} did not reach the boundary")
                b.post(SurfaceOp(OpKind.ROTATION, (patch(q),), basis=norm.gates[i].kind.value, gate=i))
                front.execute(i)
                executed += 1
            _emit_local_cnots(b, lay, [(patch(norm.gates[i].qubits[0]), patch(norm.gates[i].qubits[1])) for i in cnot_done])
            for i in cnot_done:
                front.execute(i)
                executed += 1
        if not executed:
            raise CompileError("no progress")

    final = [lay.patch(site[q]) for q in range(c.n_logical)]
    s = b.finish(GridSpec.rotated(lay, home, grid.initial_active, final))
    return CompileResult(s, s.cost(), stats, norm)


def _emit_route(b: Builder, lay: RotatedLayout, route: Route, occupied: set[Site]) -> None:
    occ = {s: (s in occupied) for s in lay.sites}
    for rnd in route.rounds:
        base = b.open(2)
        for s1, s2 in rnd:
            x1, x2 = lay.common_ancillas(s1, s2)
            p1, p2 = lay.patch(s1), lay.patch(s2)
            if occ[s1]:
                b.add(base, move_op(b, p1, x1))
                b.add(base + 1, move_op(b, x1, p2))
            if occ[s2]:
                b.add(base, move_op(b, p2, x2))
                b.add(base + 1, move_op(b, x2, p1))
            occ[s1], occ[s2] = occ[s2], occ[s1]


def _emit_local_cnots(b: Builder, lay: RotatedLayout, pairs: list[tuple[Vertex, Vertex]]) -> None:
    batches: list[tuple[set[Vertex], list[tuple[Vertex, Vertex, Vertex]]]] = []
    for c, t in pairs:
        a = _local_ancilla(lay, c, t)
        for used, items in batches:
            if a not in used:
                used.add(a)
                items.append((c, a, t))
                break
        else:
            batches.append(({a}, [(c, a, t)]))
    for _, items in batches:
        base = b.open(2)
        for c, a, t in items:
            emit_chain(b, base, (c, a, t), (0, 1), endpoint_prepared=False)
