"""Benchmark circuits and the harness that compares both compilers."""

from __future__ import annotations

import csv
import io
import json
import math
import random
import signal
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from .circuit import Gate, GateKind, LogicalCircuit
from .compiler import compile_edpc
from .schedule import validate
from .swap import compile_swap

CSV_COLUMNS = ["circuit_id", "algorithm", "n", "L", "depth", "space", "spacetime", "wall_ms", "seed", "status"]


def gen_random_parallel_cnots(n: int, n_cnot: int, layers: int = 20, seed: int = 0) -> LogicalCircuit:
    """``layers`` rounds, each pairing ``n_cnot`` random distinct qubits into CNOTs."""
    if n < 1 or layers < 0:
        raise ValueError("need n >= 1 and layers >= 0")
    if n_cnot % 2 or not 0 <= n_cnot <= n:
        raise ValueError(f"n_cnot must be even and at most n, got {n_cnot}")
    rng = random.Random(seed)
    gates = []
    for _ in range(layers):
        qs = rng.sample(range(n), n_cnot)
        gates.extend(Gate(GateKind.CNOT, (qs[i], qs[i + 1])) for i in range(0, n_cnot, 2))
    return LogicalCircuit(n, tuple(gates), name=f"random_n{n}_c{n_cnot}_l{layers}_s{seed}", seed=seed)


def density_count(n: int, fraction: float) -> int:
    """``fraction * n`` rounded to an even count (at least 2 when n >= 2)."""
    k = 2 * round(fraction * n / 2)
    return min(max(k, 2 if n >= 2 else 0), n - n % 2)


def toffoli_gates(a: int, b: int, c: int) -> list[Gate]:
    """Seven-T Toffoli with controls a, b and target c."""
    seq = [
        (GateKind.H, c), (GateKind.CNOT, b, c), (GateKind.TDG, c), (GateKind.CNOT, a, c),
        (GateKind.T, c), (GateKind.CNOT, b, c), (GateKind.TDG, c), (GateKind.CNOT, a, c),
        (GateKind.T, b), (GateKind.T, c), (GateKind.H, c), (GateKind.CNOT, a, b),
        (GateKind.T, a), (GateKind.TDG, b), (GateKind.CNOT, a, b),
    ]  # fmt: skip
    return [Gate(k, tuple(qs)) for k, *qs in seq]


def gen_half_ckx(k: int) -> LogicalCircuit:
    """Compute half of a k-controlled NOT: a binary tree of Toffolis, each
    writing the AND of two earlier results into a fresh |0> ancilla."""
    if k < 2 or k & (k - 1):
        raise ValueError(f"k must be a power of two >= 2, got {k}")
    n = 2 * k - 1
    gates = []
    level = list(range(k))
    nxt = k
    while len(level) > 1:
        out = []
        for i in range(0, len(level), 2):
            gates.append(Gate(GateKind.PREP_Z, (nxt,)))
            gates.extend(toffoli_gates(level[i], level[i + 1], nxt))
            out.append(nxt)
            nxt += 1
        level = out
    return LogicalCircuit(n, tuple(gates), name=f"half_c{k}x")


@dataclass
class BenchSpec:
    generator: str  # random_parallel_cnot | half_ckx
    n: int = 16
    n_cnot: int = 16
    layers: int = 20
    k: int = 2
    seeds: list[int] = field(default_factory=lambda: [0])
    algorithms: list[str] = field(default_factory=lambda: ["edpc", "swap"])
    timeout_s: float = 600.0
    swap_select: str = "min"
    workers: int = 1

    def circuits(self) -> list[tuple[int, LogicalCircuit]]:
        if self.generator == "random_parallel_cnot":
            return [(s, gen_random_parallel_cnots(self.n, self.n_cnot, self.layers, s)) for s in self.seeds]
        if self.generator == "half_ckx":
            return [(s, gen_half_ckx(self.k)) for s in self.seeds]
        raise ValueError(f"unknown generator {self.generator!r}")


class _Timeout(Exception):
    pass


def _alarm(signum, frame):
    raise _Timeout()


def run_instance(circuit: LogicalCircuit, algo: str, seed: int, timeout_s: float, swap_select: str = "min") -> dict:
    row = {"circuit_id": circuit.name, "algorithm": algo, "n": circuit.n_logical, "seed": seed}
    use_alarm = timeout_s and hasattr(signal, "SIGALRM")
    if use_alarm:
        old = signal.signal(signal.SIGALRM, _alarm)
        signal.setitimer(signal.ITIMER_REAL, timeout_s)
    t0 = time.perf_counter()
    try:
        if algo == "edpc":
            res = compile_edpc(circuit)
        elif algo == "swap":
            res = compile_swap(circuit, select=swap_select, seed=seed)
        else:
            raise ValueError(f"unknown algorithm {algo!r}")
        wall = (time.perf_counter() - t0) * 1000
        problems = validate(res.schedule)
    except _Timeout:
        row.update(L="", depth="", space="", spacetime="", wall_ms=round((time.perf_counter() - t0) * 1000, 1), status="timeout")
        return row
    finally:
        if use_alarm:
            signal.setitimer(signal.ITIMER_REAL, 0)
            signal.signal(signal.SIGALRM, old)
    cost = res.cost
    label = f"{res.stats.L1}x{res.stats.L2}" if algo == "swap" else str(res.schedule.grid.rows)
    row.update(
        L=label,
        depth=cost.depth,
        space=cost.space,
        spacetime=cost.spacetime,
        wall_ms=round(wall, 1),
        status="ok" if not problems else "invalid",
    )
    return row


def _job(args):
    return run_instance(*args)


def run_benchmark(spec: BenchSpec) -> list[dict]:
    jobs = [(c, algo, seed, spec.timeout_s, spec.swap_select) for seed, c in spec.circuits() for algo in spec.algorithms]
    if spec.workers > 1:
        with ProcessPoolExecutor(spec.workers) as pool:
            return list(pool.map(_job, jobs))
    return [_job(j) for j in jobs]


def aggregate(rows: list[dict]) -> list[dict]:
    """Mean and standard error of the mean per (circuit family, algorithm)."""
    groups: dict[tuple, list[dict]] = {}
    for r in rows:
        if r["status"] != "ok":
            continue
        family = r["circuit_id"].rsplit("_s", 1)[0] if r["circuit_id"].startswith("random_") else r["circuit_id"]
        groups.setdefault((family, r["algorithm"], r["n"]), []).append(r)
    out = []
    for (family, algo, n), rs in sorted(groups.items()):
        entry = {"config": family, "algorithm": algo, "n": n, "count": len(rs)}
        for col in ("depth", "space", "spacetime"):
            vals = [float(r[col]) for r in rs]
            entry[f"{col}_mean"] = statistics.fmean(vals)
            entry[f"{col}_sem"] = statistics.stdev(vals) / math.sqrt(len(vals)) if len(vals) > 1 else 0.0
        out.append(entry)
    return out


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: r.get(k, "") for k in CSV_COLUMNS})
    return buf.getvalue()


def aggregate_json(rows: list[dict], spec: BenchSpec | None = None) -> str:
    doc = {"aggregate": aggregate(rows)}
    if spec is not None:
        doc["benchmark"] = asdict(spec)
    return json.dumps(doc, indent=2, sort_keys=True)
