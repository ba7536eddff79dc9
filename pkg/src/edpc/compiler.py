"""Edge-disjoint paths compilation on the square patch grid."""

from __future__ import annotations

from dataclasses import dataclass, field

from .circuit import (
    MEASUREMENTS,
    PAULIS,
    PREPS,
    ROTATIONS,
    X_ROTATIONS,
    Frontier,
    GateKind,
    LogicalCircuit,
    commute_paulis,
)
from .emit import Builder, Role, emit_paths
from .layout import (
    Edge,
    Embedding,
    GridGraph,
    Vertex,
    build_grid,
    build_operator_graph,
    edge_key,
    embed_qubits,
    grid_side_for,
    is_horizontal,
    is_vertical,
)
from .paths import FlowNetwork, Path, PathError, extract_flow_paths, fragment_edp, greedy_max_edp, max_flow
from .schedule import Byproduct, CostReport, GridSpec, OpKind, SurfaceOp, SurfaceSchedule


class CompileError(RuntimeError):
    pass


@dataclass
class CompileStats:
    outer_iterations: int = 0
    inner_iterations: int = 0
    rotation_iterations: int = 0
    edp_calls: int = 0
    subroutine_depths: list[int] = field(default_factory=list)
    paths: list[list[dict]] = field(default_factory=list)


@dataclass
class CompileResult:
    schedule: SurfaceSchedule
    cost: CostReport
    stats: CompileStats
    circuit: LogicalCircuit  # normalized circuit the schedule's gate tags refer to


def hadamard_cell(v: Vertex) -> tuple[Vertex, Vertex, Vertex]:
    i, j = v
    return ((i, j + 1), (i + 1, j), (i + 1, j + 1))


def rotation_paths(
    g: GridGraph,
    emb: Embedding,
    targets: list[tuple[Vertex, bool]],
    keys: list | None = None,
) -> list[Path]:
    """Edge-disjoint paths from data vertices to distinct boundary ancillas by
    unit-capacity max-flow.

    ``targets`` holds (data vertex, needs_vertical_first_edge). Boundary
    vertices only absorb flow, so no path runs through one.
    """
    if not targets:
        return []
    keys = list(range(len(targets))) if keys is None else keys
    net = FlowNetwork()
    S, T = ("s",), ("t",)
    boundary = emb.boundary
    sources = {}
    for k, (v, vertical) in enumerate(targets):
        sources[v] = keys[k]
        net.add_arc(S, v)
        for u in g.neighbors(v):
            if g.is_data(u):
                continue
            if vertical == is_vertical(u, v):
                net.add_arc(v, u)
    for e in g.edges:
        u, v = e
        if g.is_data(u) or g.is_data(v):
            continue
        ub, vb = u in boundary, v in boundary
        if ub and vb:
            continue
        if ub:
            net.add_arc(v, u)
        elif vb:
            net.add_arc(u, v)
        else:
            net.add_edge(u, v)
    for b in sorted(boundary):
        net.add_arc(b, T)
    max_flow(net, S, T)
    out = []
    for vs in extract_flow_paths(net, S, T):
        out.append(Path(tuple(vs), sources[vs[0]]))
    out.sort(key=lambda p: p.vertices)
    return out


def _feasible_subset(paths: list[Path]) -> tuple[list[Path], list[Path]]:
    try:
        fragment_edp(paths)
        return paths, []
    except PathError:
        pass
    keep, defer = [], []
    for p in paths:
        try:
            fragment_edp(keep + [p])
            keep.append(p)
        except PathError:
            defer.append(p)
    return keep, defer


def compile_edpc(c: LogicalCircuit, L: int | None = None, record_paths: bool = False) -> CompileResult:
    norm, _ = commute_paulis(c)
    norm.check_liveness()
    g = build_grid(L if L is not None else grid_side_for(max(1, c.n_logical)))
    emb = embed_qubits(c.n_logical, g)
    live = norm.initially_live()
    grid = GridSpec.square(g, emb.boundary, emb.positions, [emb.positions[q] for q in range(c.n_logical) if live[q]])
    b = Builder()
    stats = CompileStats()
    front = Frontier(norm)
    pos = emb.positions

    while not front.done():
        stats.outer_iterations += 1
        avail = front.available()
        executed = 0
        gm, gc, hads = [], [], []
        for i in avail:
            gate = norm.gates[i]
            k, q = gate.kind, gate.qubits[0]
            if k in PAULIS:
                xs = (pos[q],) if k in (GateKind.X, GateKind.Y) else ()
                zs = (pos[q],) if k in (GateKind.Z, GateKind.Y) else ()
                b.pauli(Byproduct((), xs, zs))
            elif k in PREPS:
                b.pre(SurfaceOp(OpKind.PREP_Z if k is GateKind.PREP_Z else OpKind.PREP_X, (pos[q],), gate=i))
            elif k in MEASUREMENTS:
                kind = OpKind.MEAS_Z if k is GateKind.MEAS_Z else OpKind.MEAS_X
                b.post(SurfaceOp(kind, (pos[q],), (b.var(),), gate=i))
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
            # cells of distinct data vertices never overlap, so all run together
            base = b.open(3)
            for i in hads:
                v = pos[norm.gates[i].qubits[0]]
                b.add(base, SurfaceOp(OpKind.HADAMARD, (v, *hadamard_cell(v)), gate=i))
                front.execute(i)
                executed += 1
        while gm or gc:
            stats.inner_iterations += 1
            done = _inner_step(g, emb, norm, b, gm, gc, stats, record_paths)
            if not done:
                raise CompileError("inner loop made no progress")
            if any(norm.gates[i].kind in ROTATIONS for i in done):
                stats.rotation_iterations += 1
            for i in done:
                front.execute(i)
                executed += 1
            gm[:] = [i for i in gm if i not in done]
            gc[:] = [i for i in gc if i not in done]
        if not executed:
            raise CompileError("outer loop made no progress")

    s = b.finish(grid)
    return CompileResult(s, s.cost(), stats, norm)


def _inner_step(g, emb, norm, b, gm, gc, stats, record_paths) -> set[int]:
    pos = emb.positions
    targets = []
    for i in gm:
        gate = norm.gates[i]
        targets.append((pos[gate.qubits[0]], gate.kind not in X_ROTATIONS))
    pm = rotation_paths(g, emb, targets, keys=list(gm))
    blocked_edges = {e for p in pm for e in p.edges()}
    blocked_vertices = {p.end for p in pm}
    terminals = [(pos[norm.gates[i].qubits[0]], pos[norm.gates[i].qubits[1]]) for i in gc]
    pc = []
    if terminals:
        og = build_operator_graph(g, terminals, blocked_edges, blocked_vertices)
        pc = greedy_max_edp(og, terminals, keys=list(gc))
        if not pc and not pm:
            og = build_operator_graph(g, terminals)
            pc = greedy_max_edp(og, terminals, keys=list(gc))
    paths, _ = _feasible_subset(pm + pc)
    roles = []
    for p in paths:
        gate = norm.gates[p.key]
        roles.append(Role(p.key, gate.kind.value if gate.kind in ROTATIONS else None))
    depth = emit_paths(b, paths, roles)
    stats.edp_calls += 1
    stats.subroutine_depths.append(depth)
    if record_paths:
        frag = fragment_edp(paths) if paths else None
        stats.paths.append(
            [
                {"gate": p.key, "vertices": [list(v) for v in p.vertices], "labels": frag.labels[k]}
                for k, p in enumerate(paths)
            ]
        )
    return {p.key for p in paths}
