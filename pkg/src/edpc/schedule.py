"""Layered schedules of elementary lattice-surgery operations, their validation,
JSON form and cost accounting."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Sequence

from .layout import GridGraph, RotatedLayout, Vertex, is_horizontal, is_vertical


class ScheduleError(ValueError):
    pass


class OpKind(str, Enum):
    PREP_X = "PrepX"
    PREP_Z = "PrepZ"
    MEAS_X = "MeasX"
    MEAS_Z = "MeasZ"
    JOINT_XX = "JointXX"
    JOINT_ZZ = "JointZZ"
    MOVE = "Move"
    BELL_PREP = "BellPrep"
    BELL_MEAS = "BellMeas"
    HADAMARD = "Hadamard"
    ROTATION = "BoundaryRotation"


DURATION = {
    OpKind.PREP_X: 0,
    OpKind.PREP_Z: 0,
    OpKind.MEAS_X: 0,
    OpKind.MEAS_Z: 0,
    OpKind.ROTATION: 0,
    OpKind.JOINT_XX: 1,
    OpKind.JOINT_ZZ: 1,
    OpKind.MOVE: 1,
    OpKind.BELL_PREP: 1,
    OpKind.BELL_MEAS: 1,
    OpKind.HADAMARD: 3,
}
N_OUTCOMES = {
    OpKind.MEAS_X: 1,
    OpKind.MEAS_Z: 1,
    OpKind.JOINT_XX: 1,
    OpKind.JOINT_ZZ: 1,
    OpKind.BELL_PREP: 1,
    OpKind.BELL_MEAS: 3,
    OpKind.MOVE: 2,
}
ROTATION_NAMES = ("s", "sdg", "t", "tdg", "sx", "tx")

# within a layer: preparations, then timed operations, then measurements/rotations
PHASE = {k: (0 if k in (OpKind.PREP_X, OpKind.PREP_Z) else 2 if DURATION[k] == 0 else 1) for k in OpKind}


@dataclass(frozen=True)
class Byproduct:
    """Pauli ``X[x] Z[z]`` applied when the XOR of ``vars`` is 1 (always if empty)."""

    vars: tuple[int, ...] = ()
    x: tuple[Vertex, ...] = ()
    z: tuple[Vertex, ...] = ()


@dataclass(frozen=True)
class SurfaceOp:
    kind: OpKind
    patches: tuple[Vertex, ...]
    outcome_vars: tuple[int, ...] = ()
    basis: str | None = None
    gate: int | None = None
    byproducts: tuple[Byproduct, ...] = ()

    @property
    def duration(self) -> int:
        return DURATION[self.kind]


@dataclass
class Layer:
    ops: list[SurfaceOp] = field(default_factory=list)
    paulis: list[Byproduct] = field(default_factory=list)


@dataclass(frozen=True)
class GridSpec:
    kind: str  # "square" or "rotated"
    rows: int
    cols: int
    patches: frozenset[Vertex]
    boundary: frozenset[Vertex]
    hadamard_ancillas: bool
    embedding: tuple[Vertex, ...]
    final_embedding: tuple[Vertex, ...]
    initial_active: frozenset[Vertex]

    @property
    def space(self) -> int:
        return len(self.patches)

    @classmethod
    def square(cls, g: GridGraph, boundary, embedding, initial_active, final_embedding=None) -> GridSpec:
        return cls(
            "square",
            g.L,
            g.L,
            frozenset(g.vertices),
            frozenset(boundary),
            True,
            tuple(embedding),
            tuple(embedding if final_embedding is None else final_embedding),
            frozenset(initial_active),
        )

    @classmethod
    def rotated(cls, lay: RotatedLayout, embedding, initial_active, final_embedding=None) -> GridSpec:
        return cls(
            "rotated",
            lay.patch_rows,
            lay.patch_rows,
            frozenset(lay.patches),
            frozenset(lay.patch(s) for s in lay.boundary_sites),
            False,
            tuple(embedding),
            tuple(embedding if final_embedding is None else final_embedding),
            frozenset(initial_active),
        )


@dataclass
class SurfaceSchedule:
    grid: GridSpec
    layers: list[Layer] = field(default_factory=list)

    def ops(self) -> Iterable[tuple[int, SurfaceOp]]:
        for t, layer in enumerate(self.layers):
            for op in layer.ops:
                yield t, op

    def occupied_layers(self) -> set[int]:
        busy = set()
        for t, op in self.ops():
            busy.update(range(t, t + op.duration))
        return busy

    def depth(self) -> int:
        return len(self.occupied_layers())

    def cost(self) -> CostReport:
        return cost_report(self.depth(), self.grid.space)


def depth(s: SurfaceSchedule) -> int:
    return s.depth()


@dataclass(frozen=True)
class CostReport:
    depth: int
    space: int
    spacetime: int
    d: int | None = None
    physical: int | None = None


def cost_report(depth: int, space: int) -> CostReport:
    return CostReport(depth, space, depth * space)


def spacetime_cost(s: SurfaceSchedule) -> CostReport:
    return s.cost()


def code_distance(a_logical: float, p: float, p_star: float) -> int:
    if not 0 < p < p_star < 1:
        raise ValueError(f"need 0 < p < p_star < 1, got p={p}, p_star={p_star}")
    if a_logical < 1:
        raise ValueError(f"logical cost must be at least 1, got {a_logical}")
    x = 2 * math.log(a_logical) / (math.log(p_star) - math.log(p))
    d = max(1, math.ceil(x - 1e-9))
    return d if d % 2 == 1 else d + 1


def physical_cost_estimate(report: CostReport | float, p: float, p_star: float) -> tuple[int, float]:
    """Smallest odd distance suppressing errors over the whole volume, and the
    resulting physical volume ``A * d**3``."""
    a = report.spacetime if isinstance(report, CostReport) else report
    d = code_distance(a, p, p_star)
    return d, a * d**3


def _adjacent(u: Vertex, v: Vertex) -> bool:
    return is_horizontal(u, v) or is_vertical(u, v)


class _Checker:
    def __init__(self, grid: GridSpec):
        self.grid = grid
        self.active = set(grid.initial_active)
        self.busy_until: dict[Vertex, int] = {}
        self.vars: set[int] = set()
        self.problems: list[str] = []
        self.last_multi = -1

    def bad(self, t: int, msg: str) -> None:
        self.problems.append(f"layer {t}: {msg}")

    def _busy(self, p: Vertex, t: int, strict: bool) -> bool:
        u = self.busy_until.get(p, -1)
        return u >= t if strict else u > t

    def _byproducts(self, t: int, items: Sequence[Byproduct], what: str) -> None:
        for b in items:
            for v in b.vars:
                if v not in self.vars:
                    self.bad(t, f"{what} byproduct uses undefined outcome {v}")
            for p in (*b.x, *b.z):
                if p not in self.active:
                    self.bad(t, f"{what} byproduct acts on inactive patch {p}")

    def layer(self, t: int, layer: Layer) -> None:
        self._byproducts(t, layer.paulis, "layer")
        phase = 0
        unit_used: set[Vertex] = set()
        for op in layer.ops:
            k = op.kind
            what = f"{k.value}{list(op.patches)}"
            if PHASE[k] < phase:
                self.bad(t, f"{what} out of order within layer")
            phase = max(phase, PHASE[k])
            for p in op.patches:
                if p not in self.grid.patches:
                    self.bad(t, f"{what} uses patch {p} outside the grid")
            if len(set(op.patches)) != len(op.patches):
                self.bad(t, f"{what} repeats a patch")
            want = N_OUTCOMES.get(k, 0)
            if len(op.outcome_vars) != want:
                self.bad(t, f"{what} has {len(op.outcome_vars)} outcomes, expected {want}")
            for v in op.outcome_vars:
                if v in self.vars:
                    self.bad(t, f"{what} reuses outcome variable {v}")
                self.vars.add(v)
            if PHASE[k] == 1:
                for p in op.patches:
                    if p in unit_used:
                        self.bad(t, f"{what} collides on patch {p}")
                    if self._busy(p, t, strict=True):
                        self.bad(t, f"{what} uses patch {p} held by a running Hadamard")
                unit_used.update(op.patches)
            else:
                for p in op.patches:
                    if self._busy(p, t, strict=PHASE[k] == 0):
                        self.bad(t, f"{what} uses patch {p} held by a running Hadamard")
            self._apply(t, op, what)
            self._byproducts(t, op.byproducts, what)

    def _need(self, t, what, patches, active: bool) -> None:
        for p in patches:
            if (p in self.active) != active:
                self.bad(t, f"{what} needs patch {p} {'active' if active else 'inactive'}")

    def _apply(self, t: int, op: SurfaceOp, what: str) -> None:
        k, ps = op.kind, op.patches
        arity = {OpKind.HADAMARD: 4 if self.grid.hadamard_ancillas else 1}.get(
            k, 1 if PHASE[k] != 1 else 2
        )
        if len(ps) != arity:
            self.bad(t, f"{what} takes {arity} patches")
            return
        if k in (OpKind.PREP_X, OpKind.PREP_Z):
            self._need(t, what, ps, False)
            self.active.add(ps[0])
        elif k in (OpKind.MEAS_X, OpKind.MEAS_Z):
            self._need(t, what, ps, True)
            self.active.discard(ps[0])
        elif k is OpKind.ROTATION:
            self._need(t, what, ps, True)
            if ps[0] not in self.grid.boundary:
                self.bad(t, f"{what} rotation off the boundary")
            if op.basis not in ROTATION_NAMES:
                self.bad(t, f"{what} has unknown rotation {op.basis!r}")
        elif k is OpKind.HADAMARD:
            self._need(t, what, ps[:1], True)
            if self.grid.hadamard_ancillas:
                self._need(t, what, ps[1:], False)
                rows = {p[0] for p in ps}
                cols = {p[1] for p in ps}
                if len(rows) != 2 or len(cols) != 2 or max(rows) - min(rows) != 1 or max(cols) - min(cols) != 1:
                    self.bad(t, f"{what} ancillas do not form a 2x2 cell with the data patch")
            for p in ps:
                self.busy_until[p] = t + 2
            self.last_multi = max(self.last_multi, t + 2)
        else:
            u, v = ps
            if k is OpKind.JOINT_XX and not is_horizontal(u, v):
                self.bad(t, f"{what} needs horizontal neighbors")
            elif k is OpKind.JOINT_ZZ and not is_vertical(u, v):
                self.bad(t, f"{what} needs vertical neighbors")
            elif not _adjacent(u, v):
                self.bad(t, f"{what} needs neighboring patches")
            if k in (OpKind.JOINT_XX, OpKind.JOINT_ZZ):
                self._need(t, what, ps, True)
            elif k is OpKind.BELL_PREP:
                self._need(t, what, ps, False)
                self.active.update(ps)
            elif k is OpKind.BELL_MEAS:
                self._need(t, what, ps, True)
                self.active.difference_update(ps)
            elif k is OpKind.MOVE:
                self._need(t, what, (u,), True)
                self._need(t, what, (v,), False)
                self.active.discard(u)
                self.active.add(v)

    def finish(self, n_layers: int) -> None:
        if self.last_multi >= n_layers:
            self.problems.append(f"a Hadamard runs past the last layer {n_layers - 1}")


def validate(s: SurfaceSchedule) -> list[str]:
    """All invariant violations of ``s``; empty means valid."""
    chk = _Checker(s.grid)
    for problem in _grid_problems(s.grid):
        chk.problems.append(problem)
    for t, layer in enumerate(s.layers):
        chk.layer(t, layer)
    chk.finish(len(s.layers))
    return chk.problems


def _grid_problems(g: GridSpec) -> list[str]:
    out = []
    for name, vs in (("embedding", g.embedding), ("final embedding", g.final_embedding)):
        if len(set(vs)) != len(vs):
            out.append(f"{name} is not injective")
        for v in vs:
            if v not in g.patches:
                out.append(f"{name} places a qubit on {v} outside the grid")
    for v in g.boundary | g.initial_active:
        if v not in g.patches:
            out.append(f"patch {v} outside the grid")
    return out


def append_layer(s: SurfaceSchedule, ops: Sequence[SurfaceOp], paulis: Sequence[Byproduct] = ()) -> SurfaceSchedule:
    """New schedule with one more layer; raises on the first violation it introduces."""
    out = SurfaceSchedule(s.grid, [*s.layers, Layer(list(ops), list(paulis))])
    chk = _Checker(s.grid)
    for t, layer in enumerate(s.layers):
        chk.layer(t, layer)
    before = len(chk.problems)
    chk.layer(len(s.layers), out.layers[-1])
    if len(chk.problems) > before:
        raise ScheduleError(chk.problems[before])
    n = len(out.layers)
    extra = max(0, chk.last_multi - (n - 1))
    out.layers.extend(Layer() for _ in range(extra))
    return out


def _vs(vs) -> list[list[int]]:
    return [list(v) for v in vs]


def _bp_json(b: Byproduct) -> dict:
    d: dict = {"vars": list(b.vars)}
    if b.x:
        d["x"] = _vs(b.x)
    if b.z:
        d["z"] = _vs(b.z)
    return d


def _op_json(op: SurfaceOp) -> dict:
    d: dict = {"kind": op.kind.value, "patches": _vs(op.patches)}
    if op.outcome_vars:
        d["outcome_vars"] = list(op.outcome_vars)
    if op.basis is not None:
        d["basis"] = op.basis
    if op.gate is not None:
        d["gate"] = op.gate
    if op.byproducts:
        d["byproducts"] = [_bp_json(b) for b in op.byproducts]
    return d


def schedule_json(s: SurfaceSchedule) -> dict:
    g = s.grid
    grid = {
        "kind": g.kind,
        "rows": g.rows,
        "cols": g.cols,
        "boundary": sorted(_vs(g.boundary)),
        "hadamard_ancillas": g.hadamard_ancillas,
        "embedding": _vs(g.embedding),
        "final_embedding": _vs(g.final_embedding),
        "initial_active": sorted(_vs(g.initial_active)),
    }
    if g.kind == "square":
        grid["L"] = g.rows
    else:
        grid["patches"] = sorted(_vs(g.patches))
    layers = []
    for t, layer in enumerate(s.layers):
        d: dict = {"t": t, "ops": [_op_json(op) for op in layer.ops]}
        if layer.paulis:
            d["paulis"] = [_bp_json(b) for b in layer.paulis]
        layers.append(d)
    return {"grid": grid, "layers": layers}


def serialize(s: SurfaceSchedule) -> str:
    return json.dumps(schedule_json(s), sort_keys=True, separators=(",", ":"))


def _v(x) -> Vertex:
    if not isinstance(x, list) or len(x) != 2 or not all(isinstance(a, int) for a in x):
        raise ScheduleError(f"malformed patch coordinate {x!r}")
    return (x[0], x[1])


def _bp(d: dict) -> Byproduct:
    return Byproduct(
        tuple(int(v) for v in d.get("vars", [])),
        tuple(_v(p) for p in d.get("x", [])),
        tuple(_v(p) for p in d.get("z", [])),
    )


def deserialize(text: str, check: bool = True) -> SurfaceSchedule:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScheduleError(f"malformed schedule JSON: {exc}") from None
    try:
        g = raw["grid"]
        kind = g["kind"]
        if kind == "square":
            L = g["L"]
            patches = frozenset((i, j) for i in range(1, L + 1) for j in range(1, L + 1))
        else:
            patches = frozenset(_v(p) for p in g["patches"])
        grid = GridSpec(
            kind,
            g["rows"],
            g["cols"],
            patches,
            frozenset(_v(p) for p in g["boundary"]),
            bool(g["hadamard_ancillas"]),
            tuple(_v(p) for p in g["embedding"]),
            tuple(_v(p) for p in g["final_embedding"]),
            frozenset(_v(p) for p in g["initial_active"]),
        )
        layers = []
        for t, ld in enumerate(raw["layers"]):
            if ld.get("t", t) != t:
                raise ScheduleError(f"layer index {ld.get('t')} out of sequence at position {t}")
            ops = [
                SurfaceOp(
                    OpKind(od["kind"]),
                    tuple(_v(p) for p in od["patches"]),
                    tuple(int(v) for v in od.get("outcome_vars", [])),
                    od.get("basis"),
                    od.get("gate"),
                    tuple(_bp(b) for b in od.get("byproducts", [])),
                )
                for od in ld["ops"]
            ]
            layers.append(Layer(ops, [_bp(b) for b in ld.get("paulis", [])]))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ScheduleError):
            raise
        raise ScheduleError(f"malformed schedule: {exc!r}") from None
    s = SurfaceSchedule(grid, layers)
    if check:
        problems = validate(s)
        if problems:
            raise ScheduleError(f"schedule violates invariants: {problems[0]}")
    return s


def with_final_embedding(s: SurfaceSchedule, final: Sequence[Vertex]) -> SurfaceSchedule:
    return SurfaceSchedule(replace(s.grid, final_embedding=tuple(final)), s.layers)
