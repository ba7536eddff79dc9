"""Compile logical circuits into lattice-surgery schedules on a patch grid."""

from .circuit import Gate, GateKind, LogicalCircuit, format_circuit, parse_circuit
from .compiler import CompileResult, compile_edpc
from .schedule import SurfaceSchedule, deserialize, physical_cost_estimate, serialize, validate
from .swap import compile_swap
from .verifier import check_equivalence, check_structure

__all__ = [
    "CompileResult",
    "Gate",
    "GateKind",
    "LogicalCircuit",
    "SurfaceSchedule",
    "check_equivalence",
    "check_structure",
    "compile_edpc",
    "compile_swap",
    "deserialize",
    "format_circuit",
    "parse_circuit",
    "physical_cost_estimate",
    "serialize",
    "validate",
]
