"""Command line entry point: compile, verify and bench."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bench import BenchSpec, aggregate_json, rows_to_csv, run_benchmark
from .circuit import CircuitError, parse_circuit
from .compiler import CompileError, compile_edpc
from .layout import LayoutError, RotatedLayout, build_grid, embed_qubits, layout_json
from .schedule import ScheduleError, deserialize, physical_cost_estimate, serialize, validate
from .swap import compile_swap
from .verifier import check_equivalence, check_structure


def parse_seeds(text: str) -> list[int]:
    """``"10"`` means seeds 0..9; ``"3-7"`` is inclusive; ``"1,4,9"`` is a list."""
    text = text.strip()
    if "," in text:
        return [int(x) for x in text.split(",") if x.strip()]
    if "-" in text[1:]:
        a, b = text.split("-", 1)
        return list(range(int(a), int(b) + 1))
    return list(range(int(text)))


def _rotated_layout_json(lay) -> dict:
    return {
        "kind": "rotated",
        "L1": lay.L1,
        "L2": lay.L2,
        "sites": [{"site": list(s), "patch": list(lay.patch(s))} for s in lay.sites],
        "patches": [list(p) for p in lay.patches],
        "boundary": [list(lay.patch(s)) for s in lay.boundary_sites],
    }


def cmd_compile(args) -> int:
    c = parse_circuit(Path(args.circuit).read_text(), name=Path(args.circuit).stem)
    if args.algo == "edpc":
        res = compile_edpc(c, L=args.grid, record_paths=bool(args.dump_paths))
        g = build_grid(res.schedule.grid.rows)
        layout = layout_json(g, embed_qubits(c.n_logical, g))
    else:
        if (args.grid_rows is None) != (args.grid_cols is None):
            raise SystemExit("--grid-rows and --grid-cols go together")
        res = compile_swap(c, args.grid_rows, args.grid_cols, select=args.swap_select, seed=args.seed)
        layout = _rotated_layout_json(RotatedLayout(res.stats.L1, res.stats.L2))
    problems = validate(res.schedule)
    report = {
        "circuit": c.name,
        "algorithm": args.algo,
        "n": c.n_logical,
        "depth": res.cost.depth,
        "space": res.cost.space,
        "spacetime": res.cost.spacetime,
        "valid": not problems,
    }
    if args.p is not None:
        d, phys = physical_cost_estimate(res.cost, args.p, args.p_star)
        report.update(d=d, physical=phys)
    if args.dump_schedule:
        Path(args.dump_schedule).write_text(serialize(res.schedule))
    if args.dump_layout:
        Path(args.dump_layout).write_text(json.dumps(layout, indent=1))
    if args.dump_paths:
        if args.algo != "edpc":
            print("--dump-paths only applies to --algo edpc", file=sys.stderr)
        else:
            Path(args.dump_paths).write_text(json.dumps(res.stats.paths))
    print(json.dumps(report))
    for p in problems[:10]:
        print(f"invalid: {p}", file=sys.stderr)
    return 0 if not problems else 1


def cmd_verify(args) -> int:
    c = parse_circuit(Path(args.circuit).read_text(), name=Path(args.circuit).stem)
    s = deserialize(Path(args.schedule).read_text(), check=False)
    if c.is_clifford:
        v = check_equivalence(c, s, samples=args.samples, seed=args.seed)
        mode = "equivalence"
    else:
        v = check_structure(c, s)
        mode = "structure"
    print(json.dumps({"ok": v.ok, "mode": mode, "samples": v.samples, "failed_samples": v.failed_samples}))
    for r in v.reasons[:10]:
        print(r, file=sys.stderr)
    return 0 if v.ok else 1


def cmd_bench(args) -> int:
    algos = ["edpc", "swap"] if args.algo == "both" else [args.algo]
    ks = [int(k) for k in args.k.split(",")] if args.generator == "half_ckx" else [0]
    rows = []
    for k in ks:
        n_cnot = args.n_cnot if args.n_cnot is not None else args.n - args.n % 2
        spec = BenchSpec(
            args.generator,
            n=args.n,
            n_cnot=n_cnot,
            layers=args.layers,
            k=k,
            seeds=parse_seeds(args.seeds),
            algorithms=algos,
            timeout_s=args.timeout_s,
            swap_select=args.swap_select,
            workers=args.workers,
        )
        rows += run_benchmark(spec)
    text = rows_to_csv(rows)
    if args.out:
        Path(args.out).write_text(text)
        agg = Path(args.aggregate) if args.aggregate else Path(args.out).with_suffix(".json")
        agg.write_text(aggregate_json(rows))
    else:
        sys.stdout.write(text)
        if args.aggregate:
            Path(args.aggregate).write_text(aggregate_json(rows))
    return 0 if all(r["status"] == "ok" for r in rows) else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="edpc", description="Lattice-surgery compilation with edge-disjoint paths and a SWAP baseline.")
    sub = ap.add_subparsers(dest="verb", required=True)

    pc = sub.add_parser("compile", help="compile a circuit file to a schedule")
    pc.add_argument("--algo", choices=["edpc", "swap"], default="edpc")
    pc.add_argument("--circuit", required=True)
    pc.add_argument("--grid", type=int, help="odd side length L of the square grid (edpc)")
    pc.add_argument("--grid-rows", type=int, help="L1 of the rotated grid (swap)")
    pc.add_argument("--grid-cols", type=int, help="L2 of the rotated grid (swap)")
    pc.add_argument("--swap-select", choices=["min", "max"], default="min")
    pc.add_argument("--seed", type=int, default=0)
    pc.add_argument("--dump-schedule")
    pc.add_argument("--dump-layout")
    pc.add_argument("--dump-paths")
    pc.add_argument("--p", type=float, help="physical error rate for the physical cost estimate")
    pc.add_argument("--p-star", type=float, default=0.01)
    pc.set_defaults(func=cmd_compile)

    pv = sub.add_parser("verify", help="check a schedule against its circuit")
    pv.add_argument("--circuit", required=True)
    pv.add_argument("--schedule", required=True)
    pv.add_argument("--samples", type=int, default=100)
    pv.add_argument("--seed", type=int, default=0)
    pv.set_defaults(func=cmd_verify)

    pb = sub.add_parser("bench", help="run benchmark circuits through the compilers")
    pb.add_argument("--generator", choices=["random_parallel_cnot", "half_ckx"], default="random_parallel_cnot")
    pb.add_argument("--algo", choices=["edpc", "swap", "both"], default="both")
    pb.add_argument("--n", type=int, default=16)
    pb.add_argument("--n-cnot", type=int, help="qubits touched per layer (even, default n)")
    pb.add_argument("--layers", type=int, default=20)
    pb.add_argument("--k", default="2,4,8,16", help="comma-separated control counts for half_ckx")
    pb.add_argument("--seeds", default="1")
    pb.add_argument("--out")
    pb.add_argument("--aggregate", help="aggregate JSON path (default: --out with .json)")
    pb.add_argument("--timeout-s", type=float, default=600.0)
    pb.add_argument("--swap-select", choices=["min", "max"], default="min")
    pb.add_argument("--workers", type=int, default=1)
    pb.set_defaults(func=cmd_bench)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CircuitError, CompileError, LayoutError, ScheduleError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
