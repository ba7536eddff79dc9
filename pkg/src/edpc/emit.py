"""Schedule construction helpers shared by both compilers: a layer builder and
the gadget emitter that turns fragmented paths into lattice-surgery ops."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

from .circuit import X_ROTATIONS, GateKind
from .layout import Vertex, is_horizontal, is_vertical
from .paths import Path, fragment_edp
from .schedule import PHASE, Byproduct, GridSpec, Layer, OpKind, SurfaceOp, SurfaceSchedule


class Builder:
    """Accumulates layers; zero-duration ops attach to neighboring layers."""

    def __init__(self):
        self.layers: list[list[SurfaceOp]] = []
        self.paulis: list[list[Byproduct]] = []
        self.pending: list[SurfaceOp] = []
        self.pending_paulis: list[Byproduct] = []
        self.n_vars = 0

    def var(self) -> int:
        self.n_vars += 1
        return self.n_vars - 1

    def open(self, count: int) -> int:
        """Append ``count`` layers; pending preparations go into the first."""
        base = len(self.layers)
        for k in range(count):
            self.layers.append(self.pending if k == 0 else [])
            self.paulis.append(self.pending_paulis if k == 0 else [])
            if k == 0:
                self.pending, self.pending_paulis = [], []
        return base

    def pre(self, op: SurfaceOp) -> None:
        self.pending.append(op)

    def pauli(self, b: Byproduct) -> None:
        self.pending_paulis.append(b)

    def post(self, op: SurfaceOp) -> None:
        if not self.layers or self.pending or self.pending_paulis:
            self.open(1)
        self.layers[-1].append(op)

    def add(self, t: int, op: SurfaceOp) -> None:
        self.layers[t].append(op)

    def finish(self, grid: GridSpec) -> SurfaceSchedule:
        if self.pending or self.pending_paulis:
            self.open(1)
        out = []
        for ops, paulis in zip(self.layers, self.paulis):
            out.append(Layer(sorted(ops, key=lambda op: PHASE[op.kind]), paulis))
        return SurfaceSchedule(grid, out)


@dataclass(frozen=True)
class Role:
    """What a routed path does: a CNOT from its first to its last vertex, or
    a rotation delivered from its last (boundary) vertex to its first."""

    gate: int
    rotation: str | None = None


def edge_slots(labels: Sequence[int]) -> list[int]:
    """Time slot of every edge: phase offset plus alternation inside each
    same-label run."""
    out = []
    run = 0
    for i, lab in enumerate(labels):
        run = run + 1 if i and labels[i - 1] == lab else 0
        out.append(2 * (lab - 1) + run % 2)
    return out


def _joint(u: Vertex, v: Vertex) -> OpKind:
    return OpKind.JOINT_XX if is_horizontal(u, v) else OpKind.JOINT_ZZ


def emit_chain(b: Builder, base: int, vs: Sequence[Vertex], slots: Sequence[int], endpoint_prepared: bool) -> None:
    """Lattice-surgery chain between ``vs[0]`` and ``vs[-1]`` through ancillas.

    Each ancilla is prepared for its earlier edge (|0> before XX, |+> before
    ZZ) and measured after its later one (Z after XX, X after ZZ). If
    ``endpoint_prepared`` the last vertex is a fresh ancilla that the chain
    prepares but leaves alive. All byproducts land on the chain's last op.
    """
    m = len(vs) - 1
    horiz = [is_horizontal(vs[i], vs[i + 1]) for i in range(m)]
    prep_at: dict[int, list[int]] = {i: [] for i in range(m)}
    meas_at: dict[int, list[int]] = {i: [] for i in range(m)}
    for j in range(1, m):
        early, late = (j - 1, j) if slots[j - 1] < slots[j] else (j, j - 1)
        prep_at[early].append(j)
        meas_at[late].append(j)
    if endpoint_prepared:
        prep_at[m - 1].append(m)

    a_is_z = not horiz[0]
    x_vars: list[int] = []  # outcomes that call for an X correction
    z_vars: list[int] = []

    def joint_var(i: int) -> int:
        v = b.var()
        (z_vars if horiz[i] else x_vars).append(v)
        return v

    def meas_op(j: int, i: int) -> SurfaceOp:
        v = b.var()
        (x_vars if horiz[i] else z_vars).append(v)
        return SurfaceOp(OpKind.MEAS_Z if horiz[i] else OpKind.MEAS_X, (vs[j],), (v,))

    def prep_op(j: int, i: int) -> SurfaceOp:
        return SurfaceOp(OpKind.PREP_Z if horiz[i] else OpKind.PREP_X, (vs[j],))

    placed: list[tuple[int, int, int, SurfaceOp]] = []  # (slot, phase, seq, op)
    for i in range(m):
        s = slots[i]
        u, v = vs[i], vs[i + 1]
        if len(prep_at[i]) == 2:
            placed.append((s, 1, len(placed), SurfaceOp(OpKind.BELL_PREP, (u, v), (joint_var(i),))))
            continue
        if len(meas_at[i]) == 2:
            jv = joint_var(i)
            mu, mv = b.var(), b.var()
            (x_vars if horiz[i] else z_vars).extend((mu, mv))
            placed.append((s, 1, len(placed), SurfaceOp(OpKind.BELL_MEAS, (u, v), (jv, mu, mv))))
            continue
        for j in prep_at[i]:
            placed.append((s, 0, len(placed), prep_op(j, i)))
        placed.append((s, 1, len(placed), SurfaceOp(_joint(u, v), (u, v), (joint_var(i),))))
        for j in meas_at[i]:
            placed.append((s, 2, len(placed), meas_op(j, i)))

    a, z_end = vs[0], vs[-1]
    x_target = a if not a_is_z else z_end
    z_target = a if a_is_z else z_end
    fixes = []
    if x_vars:
        fixes.append(Byproduct(tuple(x_vars), x=(x_target,)))
    if z_vars:
        fixes.append(Byproduct(tuple(z_vars), z=(z_target,)))
    last = max(range(len(placed)), key=lambda k: placed[k][:3])
    s, ph, seq, op = placed[last]
    placed[last] = (s, ph, seq, replace(op, byproducts=tuple(fixes)))
    for s, _, _, op in placed:
        b.add(base + s, op)


def emit_paths(b: Builder, paths: Sequence[Path], roles: Sequence[Role]) -> int:
    """Emit CNOT and remote-rotation gadgets for an operator EDP set in two
    vertex-disjoint phases. Returns the appended depth (at most 4)."""
    if not paths:
        return 0
    frag = fragment_edp(paths)
    slots = [edge_slots(lab) for lab in frag.labels]
    depth = 1 + max(max(sl) for sl in slots)
    base = b.open(depth)
    for p, sl, role in zip(paths, slots, roles):
        emit_chain(b, base, p.vertices, sl, endpoint_prepared=role.rotation is not None)
    last = base + depth - 1
    for p, role in zip(paths, roles):
        if role.rotation is None:
            continue
        q, end = p.vertices[0], p.vertices[-1]
        b.add(last, SurfaceOp(OpKind.ROTATION, (end,), basis=role.rotation, gate=role.gate))
        v = b.var()
        if GateKind(role.rotation) in X_ROTATIONS:
            b.add(last, SurfaceOp(OpKind.MEAS_Z, (end,), (v,), byproducts=(Byproduct((v,), x=(q,)),)))
        else:
            b.add(last, SurfaceOp(OpKind.MEAS_X, (end,), (v,), byproducts=(Byproduct((v,), z=(q,)),)))
    return depth


def move_op(b: Builder, src: Vertex, dst: Vertex) -> SurfaceOp:
    """Teleport the patch at ``src`` into the free neighbor ``dst``."""
    m1, m2 = b.var(), b.var()
    if is_horizontal(src, dst):
        fix = (Byproduct((m2,), x=(dst,)), Byproduct((m1,), z=(dst,)))
    elif is_vertical(src, dst):
        fix = (Byproduct((m1,), x=(dst,)), Byproduct((m2,), z=(dst,)))
    else:
        raise ValueError(f"move between non-neighbors {src} -> {dst}")
    return SurfaceOp(OpKind.MOVE, (src, dst), (m1, m2), byproducts=fix)
