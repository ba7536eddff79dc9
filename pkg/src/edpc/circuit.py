"""Logical circuit representation, text format, Pauli-frame normalization and
gate availability."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable


class GateKind(str, Enum):
    PREP_Z = "prep_z"
    PREP_X = "prep_x"
    MEAS_Z = "meas_z"
    MEAS_X = "meas_x"
    X = "x"
    Y = "y"
    Z = "z"
    H = "h"
    S = "s"
    SDG = "sdg"
    T = "t"
    TDG = "tdg"
    SX = "sx"
    TX = "tx"
    CNOT = "cnot"


PAULIS = {GateKind.X, GateKind.Y, GateKind.Z}
PREPS = {GateKind.PREP_Z, GateKind.PREP_X}
MEASUREMENTS = {GateKind.MEAS_Z, GateKind.MEAS_X}
# rotations that need a magic state (or an S state) delivered from the boundary
Z_ROTATIONS = {GateKind.S, GateKind.SDG, GateKind.T, GateKind.TDG}
X_ROTATIONS = {GateKind.SX, GateKind.TX}
ROTATIONS = Z_ROTATIONS | X_ROTATIONS
NON_CLIFFORD = {GateKind.T, GateKind.TDG, GateKind.TX}


class CircuitError(ValueError):
    """Raised for malformed circuits or circuit files."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    qubits: tuple[int, ...]

    def __post_init__(self):
        expected = 2 if self.kind is GateKind.CNOT else 1
        if len(self.qubits) != expected:
            raise CircuitError(f"{self.kind.value} takes {expected} operand(s), got {len(self.qubits)}")
        if expected == 2 and self.qubits[0] == self.qubits[1]:
            raise CircuitError(f"cnot has duplicate operand {self.qubits[0]}")

    @property
    def is_clifford(self) -> bool:
        return self.kind not in NON_CLIFFORD

    def __str__(self) -> str:
        return " ".join([self.kind.value, *map(str, self.qubits)])


@dataclass(frozen=True)
class LogicalCircuit:
    """Ordered gate list over qubits ``0..n_logical-1``.

    ``meas_flips`` maps gate indices of measurements to a flag telling that
    the recorded outcome must be inverted to recover the outcome of the
    circuit this one was normalized from.
    """

    n_logical: int
    gates: tuple[Gate, ...] = ()
    name: str | None = None
    seed: int | None = None
    meas_flips: dict[int, bool] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for i, g in enumerate(self.gates):
            for q in g.qubits:
                if not 0 <= q < self.n_logical:
                    raise CircuitError(f"gate {i} ({g}) operand {q} out of range [0, {self.n_logical})")

    def __len__(self) -> int:
        return len(self.gates)

    @property
    def is_clifford(self) -> bool:
        return all(g.is_clifford for g in self.gates)

    def initially_live(self) -> list[bool]:
        """Qubits whose first gate is not a preparation carry circuit input."""
        live = [True] * self.n_logical
        seen = [False] * self.n_logical
        for g in self.gates:
            for q in g.qubits:
                if not seen[q]:
                    seen[q] = True
                    if g.kind in PREPS:
                        live[q] = False
        return live

    def check_liveness(self) -> None:
        """Reject preparations of live qubits and gates on measured-out qubits."""
        live = self.initially_live()
        for i, g in enumerate(self.gates):
            if g.kind in PREPS:
                if live[g.qubits[0]]:
                    raise CircuitError(f"gate {i} ({g}) prepares a qubit that is still live")
                live[g.qubits[0]] = True
                continue
            for q in g.qubits:
                if not live[q]:
                    raise CircuitError(f"gate {i} ({g}) acts on measured-out qubit {q}")
            if g.kind in MEASUREMENTS:
                live[g.qubits[0]] = False

    def final_live(self) -> list[bool]:
        live = self.initially_live()
        for g in self.gates:
            if g.kind in PREPS:
                live[g.qubits[0]] = True
            elif g.kind in MEASUREMENTS:
                live[g.qubits[0]] = False
        return live


_KINDS = {k.value: k for k in GateKind}


def parse_circuit(text: str, name: str | None = None) -> LogicalCircuit:
    n_logical = None
    gates: list[Gate] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        head, args = words[0].lower(), words[1:]
        try:
            operands = tuple(int(a) for a in args)
        except ValueError:
            raise CircuitError(f"non-integer operand in {line!r}", lineno) from None
        if head == "qubits":
            if n_logical is not None:
                raise CircuitError("duplicate 'qubits' header", lineno)
            if len(operands) != 1 or operands[0] < 0:
                raise CircuitError("header must be 'qubits <n>'", lineno)
            n_logical = operands[0]
            continue
        if n_logical is None:
            raise CircuitError("missing 'qubits <n>' header before first instruction", lineno)
        kind = _KINDS.get(head)
        if kind is None:
            raise CircuitError(f"unknown instruction {head!r}", lineno)
        try:
            gate = Gate(kind, operands)
        except CircuitError as exc:
            raise CircuitError(str(exc), lineno) from None
        for q in operands:
            if not 0 <= q < n_logical:
                raise CircuitError(f"operand {q} out of range [0, {n_logical})", lineno)
        gates.append(gate)
    if n_logical is None:
        raise CircuitError("missing 'qubits <n>' header")
    return LogicalCircuit(n_logical, tuple(gates), name=name)


def format_circuit(c: LogicalCircuit) -> str:
    lines = []
    if c.name:
        lines.append(f"# {c.name}")
    lines.append(f"qubits {c.n_logical}")
    lines.extend(str(g) for g in c.gates)
    return "\n".join(lines) + "\n"


@dataclass
class PauliFrame:
    """Per-qubit X and Z bits; global phase is ignored."""

    x: list[bool]
    z: list[bool]

    @classmethod
    def identity(cls, n: int) -> PauliFrame:
        return cls([False] * n, [False] * n)

    def __mul__(self, other: PauliFrame) -> PauliFrame:
        return PauliFrame([a ^ b for a, b in zip(self.x, other.x)], [a ^ b for a, b in zip(self.z, other.z)])

    def is_identity(self) -> bool:
        return not any(self.x) and not any(self.z)

    def label(self, q: int) -> str:
        return {(False, False): "I", (True, False): "X", (False, True): "Z", (True, True): "Y"}[(self.x[q], self.z[q])]

    def clear(self, q: int) -> None:
        self.x[q] = self.z[q] = False

    def conjugate(self, g: Gate) -> None:
        """Push the frame forward through Clifford gate ``g``."""
        k = g.kind
        if k is GateKind.CNOT:
            c, t = g.qubits
            self.x[t] ^= self.x[c]
            self.z[c] ^= self.z[t]
            return
        (q,) = g.qubits
        if k is GateKind.H:
            self.x[q], self.z[q] = self.z[q], self.x[q]
        elif k in (GateKind.S, GateKind.SDG):
            self.z[q] ^= self.x[q]
        elif k is GateKind.SX:
            self.x[q] ^= self.z[q]
        elif k in PAULIS:
            pass
        else:
            raise ValueError(f"cannot conjugate frame through {k.value}")


def commute_paulis(c: LogicalCircuit) -> tuple[LogicalCircuit, PauliFrame]:
    """Remove Pauli gates by pushing them to the end of the circuit.

    Measurements absorb the frame as outcome flips. Pending Paulis on a qubit
    are re-emitted right before a non-Clifford rotation on it.
    """
    frame = PauliFrame.identity(c.n_logical)
    out: list[Gate] = []
    flips: dict[int, bool] = {}
    for g in c.gates:
        k = g.kind
        if k is GateKind.X:
            frame.x[g.qubits[0]] ^= True
        elif k is GateKind.Z:
            frame.z[g.qubits[0]] ^= True
        elif k is GateKind.Y:
            frame.x[g.qubits[0]] ^= True
            frame.z[g.qubits[0]] ^= True
        elif k in PREPS:
            frame.clear(g.qubits[0])
            out.append(g)
        elif k in MEASUREMENTS:
            q = g.qubits[0]
            flip = frame.x[q] if k is GateKind.MEAS_Z else frame.z[q]
            if flip:
                flips[len(out)] = True
            frame.clear(q)
            out.append(g)
        elif k in NON_CLIFFORD:
            q = g.qubits[0]
            if frame.x[q]:
                out.append(Gate(GateKind.X, (q,)))
            if frame.z[q]:
                out.append(Gate(GateKind.Z, (q,)))
            frame.clear(q)
            out.append(g)
        else:
            frame.conjugate(g)
            out.append(g)
    return LogicalCircuit(c.n_logical, tuple(out), name=c.name, seed=c.seed, meas_flips=flips), frame


def available_ops(c: LogicalCircuit, executed: Iterable[int]) -> list[int]:
    """Indices of gates not yet executed whose overlapping predecessors all are."""
    done = set(executed)
    first_pending: dict[int, int] = {}
    for i, g in enumerate(c.gates):
        for q in g.qubits:
            if i in done:
                if q in first_pending:
                    raise ValueError(
                        f"executed set is inconsistent: gate {i} executed before gate {first_pending[q]} on qubit {q}"
                    )
            else:
                first_pending.setdefault(q, i)
    return [i for i, g in enumerate(c.gates) if i not in done and all(first_pending[q] == i for q in g.qubits)]


class Frontier:
    """Incremental availability tracking used by the compilers."""

    def __init__(self, c: LogicalCircuit):
        self.circuit = c
        self._per_qubit: list[list[int]] = [[] for _ in range(c.n_logical)]
        for i, g in enumerate(c.gates):
            for q in g.qubits:
                self._per_qubit[q].append(i)
        self._head = [0] * c.n_logical
        self.executed: set[int] = set()

    def _next(self, q: int) -> int | None:
        lst = self._per_qubit[q]
        h = self._head[q]
        return lst[h] if h < len(lst) else None

    def available(self) -> list[int]:
        out = set()
        for q in range(self.circuit.n_logical):
            i = self._next(q)
            if i is not None and all(self._next(p) == i for p in self.circuit.gates[i].qubits):
                out.add(i)
        return sorted(out)

    def execute(self, i: int) -> None:
        for q in self.circuit.gates[i].qubits:
            if self._next(q) != i:
                raise ValueError(f"gate {i} is not available")
        for q in self.circuit.gates[i].qubits:
            self._head[q] += 1
        self.executed.add(i)

    def done(self) -> bool:
        return len(self.executed) == len(self.circuit.gates)
