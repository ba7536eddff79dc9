"""Executes schedules on a stabilizer tableau and checks them against the
logical circuit they were compiled from."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .circuit import GateKind, LogicalCircuit, commute_paulis
from .layout import Vertex, is_horizontal
from .schedule import OpKind, SurfaceOp, SurfaceSchedule, validate
from .tableau import CONST, Tableau, evaluate, random_assignment, restrict_group, var_form


class NonCliffordError(ValueError):
    pass


class VerificationError(ValueError):
    pass


@dataclass
class Verdict:
    ok: bool
    reasons: list[str] = field(default_factory=list)
    samples: int = 0
    failed_samples: int = 0

    def __bool__(self) -> bool:
        return self.ok


_CLIFFORD_ROTATIONS = {"s", "sdg", "sx"}


class ScheduleRun:
    """One symbolic run of a schedule over patches plus reference qubits."""

    def __init__(self, s: SurfaceSchedule, c: LogicalCircuit, live: list[bool]):
        self.s = s
        self.c = c
        self.patches = sorted(s.grid.patches)
        self.pidx = {p: i for i, p in enumerate(self.patches)}
        self.refs = {}
        n = len(self.patches)
        for q, alive in enumerate(live):
            if alive:
                self.refs[q] = n + len(self.refs)
        max_var = max((v for _, op in s.ops() for v in op.outcome_vars), default=-1)
        self.tab = Tableau(n + len(self.refs), first_var=max_var + 1)
        self.forms: dict[int, int] = {}
        self.gate_outcomes: dict[int, int] = {}
        self.active = set(s.grid.initial_active)
        self.pos: dict[int, Vertex] = {}
        self.problems: list[str] = []
        for q, alive in enumerate(live):
            if alive:
                p = s.grid.embedding[q]
                if p not in self.active:
                    self.problems.append(f"qubit {q} starts on inactive patch {p}")
                self.pos[q] = p
                self.tab.h(self.pidx[p])
                self.tab.cnot(self.pidx[p], self.refs[q])

    def _pauli(self, b) -> None:
        form = 0
        for v in b.vars:
            if v not in self.forms:
                raise VerificationError(f"byproduct refers to unknown outcome {v}")
            form ^= self.forms[v]
        if not b.vars:
            form = CONST
        px = pz = 0
        for p in b.x:
            px |= 1 << self.pidx[p]
        for p in b.z:
            pz |= 1 << self.pidx[p]
        self.tab.pauli(px, pz, form)

    def _record(self, var: int, px: int, pz: int) -> int:
        form, _ = self.tab.measure(px, pz, forced=var_form(var))
        self.forms[var] = form
        return form

    def _qubit_of(self, op: SurfaceOp) -> int | None:
        if op.gate is None:
            return None
        if not 0 <= op.gate < len(self.c.gates):
            raise VerificationError(f"op refers to unknown gate {op.gate}")
        return self.c.gates[op.gate].qubits[0]

    def run(self) -> None:
        for layer in self.s.layers:
            for b in layer.paulis:
                self._pauli(b)
            for op in layer.ops:
                self.step(op)
                for b in op.byproducts:
                    self._pauli(b)

    def step(self, op: SurfaceOp) -> None:
        t, k = self.tab, op.kind
        idx = [self.pidx[p] for p in op.patches]
        bits = [1 << i for i in idx]
        ov = op.outcome_vars
        q = self._qubit_of(op)
        if k in (OpKind.PREP_Z, OpKind.PREP_X):
            (t.reset if k is OpKind.PREP_Z else t.reset_x)(idx[0])
            self.active.add(op.patches[0])
            if q is not None:
                self.pos[q] = op.patches[0]
        elif k in (OpKind.MEAS_Z, OpKind.MEAS_X):
            if q is not None and self.pos.get(q) != op.patches[0]:
                self.problems.append(f"gate {op.gate} measured on {op.patches[0]} but qubit {q} is at {self.pos.get(q)}")
            form = self._record(ov[0], 0, bits[0]) if k is OpKind.MEAS_Z else self._record(ov[0], bits[0], 0)
            self.active.discard(op.patches[0])
            if q is not None:
                self.gate_outcomes[op.gate] = form
                self.pos.pop(q, None)
        elif k is OpKind.JOINT_XX:
            self._record(ov[0], bits[0] | bits[1], 0)
        elif k is OpKind.JOINT_ZZ:
            self._record(ov[0], 0, bits[0] | bits[1])
        elif k is OpKind.BELL_PREP:
            horiz = is_horizontal(*op.patches)
            for i in idx:
                (t.reset if horiz else t.reset_x)(i)
            self._record(ov[0], *((bits[0] | bits[1], 0) if horiz else (0, bits[0] | bits[1])))
            self.active.update(op.patches)
        elif k is OpKind.BELL_MEAS:
            horiz = is_horizontal(*op.patches)
            if horiz:
                self._record(ov[0], bits[0] | bits[1], 0)
                self._record(ov[1], 0, bits[0])
                self._record(ov[2], 0, bits[1])
            else:
                self._record(ov[0], 0, bits[0] | bits[1])
                self._record(ov[1], bits[0], 0)
                self._record(ov[2], bits[1], 0)
            self.active.difference_update(op.patches)
        elif k is OpKind.MOVE:
            u, v = op.patches
            if is_horizontal(u, v):
                t.reset(idx[1])
                self._record(ov[0], bits[0] | bits[1], 0)
                self._record(ov[1], 0, bits[0])
            else:
                t.reset_x(idx[1])
                self._record(ov[0], 0, bits[0] | bits[1])
                self._record(ov[1], bits[0], 0)
            self.active.discard(u)
            self.active.add(v)
            for qq, p in self.pos.items():
                if p == u:
                    self.pos[qq] = v
                    break
        elif k is OpKind.HADAMARD:
            if q is not None and self.pos.get(q) != op.patches[0]:
                self.problems.append(f"gate {op.gate} applied on {op.patches[0]} but qubit {q} is at {self.pos.get(q)}")
            t.h(idx[0])
        elif k is OpKind.ROTATION:
            if op.basis not in _CLIFFORD_ROTATIONS:
                raise NonCliffordError(f"rotation {op.basis!r} cannot be simulated on a stabilizer tableau")
            {"s": t.s_gate, "sdg": t.sdg, "sx": t.sx}[op.basis](idx[0])
        else:
            raise VerificationError(f"unknown op {k}")


def _reference(c: LogicalCircuit, live: list[bool], first_var: int, forced_by_ordinal: dict[int, int]):
    n = c.n_logical
    refs = {}
    for q, alive in enumerate(live):
        if alive:
            refs[q] = n + len(refs)
    t = Tableau(n + len(refs), first_var=first_var)
    for q, r in refs.items():
        t.h(q)
        t.cnot(q, r)
    diffs: list[tuple[str, int]] = []
    problems = []
    ordinal = 0
    for i, g in enumerate(c.gates):
        k, qs = g.kind, g.qubits
        if k is GateKind.PREP_Z:
            t.reset(qs[0])
        elif k is GateKind.PREP_X:
            t.reset_x(qs[0])
        elif k in (GateKind.MEAS_Z, GateKind.MEAS_X):
            want = forced_by_ordinal.get(ordinal)
            if want is None:
                problems.append(f"measurement gate {i} never executed by the schedule")
                want = None
            px, pz = (0, 1 << qs[0]) if k is GateKind.MEAS_Z else (1 << qs[0], 0)
            form, rnd = t.measure(px, pz, forced=want)
            if want is not None and not rnd:
                diffs.append((f"outcome of measurement gate {i}", form ^ want))
            ordinal += 1
        elif k is GateKind.X:
            t.pauli(1 << qs[0], 0)
        elif k is GateKind.Z:
            t.pauli(0, 1 << qs[0])
        elif k is GateKind.Y:
            t.pauli(1 << qs[0], 1 << qs[0])
        elif k is GateKind.H:
            t.h(qs[0])
        elif k is GateKind.S:
            t.s_gate(qs[0])
        elif k is GateKind.SDG:
            t.sdg(qs[0])
        elif k is GateKind.SX:
            t.sx(qs[0])
        elif k is GateKind.CNOT:
            t.cnot(*qs)
        else:
            raise NonCliffordError(f"gate {i} ({g}) is not Clifford")
    return t, refs, diffs, problems


def check_equivalence(c: LogicalCircuit, s: SurfaceSchedule, samples: int = 100, seed: int = 0) -> Verdict:
    """Compare ``s`` with ``c`` on a reference-entangled input for ``samples``
    random measurement records."""
    if not c.is_clifford:
        raise NonCliffordError("equivalence checking needs a Clifford circuit; use check_structure")
    problems = list(validate(s))
    if problems:
        return Verdict(False, problems)
    norm, frame = commute_paulis(c)
    live = c.initially_live()
    final_live = c.final_live()
    run = ScheduleRun(s, norm, live)
    try:
        run.run()
    except VerificationError as exc:
        return Verdict(False, [str(exc)])
    problems += run.problems

    # schedule outcomes indexed by measurement ordinal, flips folded in
    forced = {}
    ordinal = 0
    for i, g in enumerate(norm.gates):
        if g.kind in (GateKind.MEAS_Z, GateKind.MEAS_X):
            if i in run.gate_outcomes:
                forced[ordinal] = run.gate_outcomes[i] ^ (CONST if norm.meas_flips.get(i) else 0)
            ordinal += 1
    ref, ref_refs, diffs, ref_problems = _reference(c, live, run.tab.next_var, forced)
    problems += ref_problems

    keep_q = [q for q in range(c.n_logical) if final_live[q]]
    for q in keep_q:
        if q not in run.pos:
            problems.append(f"qubit {q} is not live at the end of the schedule")
        elif run.pos[q] != s.grid.final_embedding[q]:
            problems.append(f"qubit {q} ends on {run.pos[q]}, schedule declares {s.grid.final_embedding[q]}")
    expected_active = {run.pos[q] for q in keep_q if q in run.pos}
    if run.active != expected_active:
        extra = sorted(run.active - expected_active)
        missing = sorted(expected_active - run.active)
        problems.append(f"active patches at the end differ from live data (extra {extra}, missing {missing})")
    if problems:
        return Verdict(False, problems)

    for q in keep_q:
        i = run.pidx[run.pos[q]]
        run.tab.pauli((1 << i) if frame.x[q] else 0, (1 << i) if frame.z[q] else 0)
    keep_s = [run.pidx[run.pos[q]] for q in keep_q] + [run.refs[q] for q in sorted(run.refs)]
    drop_s = [i for i in range(len(run.patches)) if i not in set(keep_s[: len(keep_q)])]
    for i in drop_s:
        run.tab.reset(i)
    got = restrict_group(run.tab.stabilizers(), drop_s, keep_s)

    keep_r = keep_q + [ref_refs[q] for q in sorted(ref_refs)]
    drop_r = [q for q in range(c.n_logical) if not final_live[q]]
    for q in drop_r:
        ref.reset(q)
    want = restrict_group(ref.stabilizers(), drop_r, keep_r)

    if len(got) != len(keep_s) or len(want) != len(keep_r):
        return Verdict(False, [f"final state is not pure on the kept qubits ({len(got)}/{len(keep_s)} generators)"])
    if [(x, z) for x, z, _ in got] != [(x, z) for x, z, _ in want]:
        return Verdict(False, ["final stabilizer groups differ"])
    diffs += [(f"sign of final stabilizer {k}", a[2] ^ b[2]) for k, (a, b) in enumerate(zip(got, want))]

    n_vars = max(ref.next_var, run.tab.next_var)
    rng = random.Random(seed)
    failed = 0
    reasons = []
    for _ in range(samples):
        a = random_assignment(n_vars, rng)
        bad = [name for name, f in diffs if evaluate(f, a)]
        if bad:
            failed += 1
            if len(reasons) < 5:
                reasons.append(f"sample mismatch: {bad[0]}")
    return Verdict(failed == 0, reasons, samples, failed)


def check_structure(c: LogicalCircuit, s: SurfaceSchedule) -> Verdict:
    """Validity plus coverage: every rotation and measurement gate appears
    on exactly one schedule op."""
    problems = list(validate(s))
    norm, _ = commute_paulis(c)
    seen: dict[int, int] = {}
    for _, op in s.ops():
        if op.gate is not None and op.kind in (OpKind.ROTATION, OpKind.MEAS_X, OpKind.MEAS_Z, OpKind.HADAMARD):
            seen[op.gate] = seen.get(op.gate, 0) + 1
    for i, g in enumerate(norm.gates):
        need = g.kind in (GateKind.MEAS_X, GateKind.MEAS_Z, GateKind.H) or g.kind.value in (
            "s", "sdg", "t", "tdg", "sx", "tx",
        )
        if need and seen.get(i, 0) != 1:
            problems.append(f"gate {i} ({g}) appears {seen.get(i, 0)} times in the schedule")
    return Verdict(not problems, problems)
