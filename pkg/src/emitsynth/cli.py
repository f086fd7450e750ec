"""Command-line interface: ``emitsynth {height,solve,verify,bench}``.

Targets come from ``--graph FILE`` (edge list), ``--stabilizers FILE`` (one
generator per line) or ``--family NAME [--param key=value ...]``. Emission
orderings are chosen with ``--ordering``:

* ``auto`` (default): the family's own ordering, identity otherwise
* ``identity``, ``bfs``, ``dfs``, ``greedy``: constructive heuristics
* ``search``: best heuristic refined by local search (``--budget``, ``--seed``)
* anything else is read as a file of whitespace-separated vertex ids

Exit status is 0 on success, 1 when verification fails and 2 on bad input.
The default seed is taken from ``EMITSYNTH_SEED`` when set.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from . import bench as bench_mod
from .circuit import CircuitError, GenerationCircuit, from_dict, parse, serialize, to_dict
from .graphs import (Graph, GraphError, builtin, builtin_graph, check_ordering, graph_stabilizers,
                     parse_edge_list)
from .ordering import best_ordering, cut_heights, heuristics
from .pauli import StabilizerTableau, TableauError, parse_stabilizers, permute_qubits
from .solver import SolverError, solve, solve_graph
from .verify import verify

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
INPUT_ERRORS = (GraphError, TableauError, CircuitError, SolverError, OSError, ValueError)
GRAPH_ONLY = ("rgs", "rgs_reduced", "modified_rgs", "line", "ring", "star", "grid")


class InputError(ValueError):
    pass


def _default_seed() -> int:
    raw = os.environ.get("EMITSYNTH_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"EMITSYNTH_SEED must be an integer, got {raw!r}") from None


def _params(items: list[str]) -> dict:
    out = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise InputError(f"--param expects key=value, got {item!r}")
        try:
            out[key] = int(value)
        except ValueError:
            out[key] = value
    return out


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None


def _with_file(path: str, fn, text: str):
    try:
        return fn(text)
    except (GraphError, TableauError, CircuitError) as exc:
        raise InputError(f"{path}: {exc}") from None


def load_target(args) -> tuple[Graph | StabilizerTableau, tuple[int, ...] | None]:
    """Target and its default ordering (None means identity)."""
    given = [a for a in ("graph", "stabilizers", "family") if getattr(args, a, None)]
    if len(given) != 1:
        raise InputError("give exactly one of --graph, --stabilizers, --family")
    if args.graph:
        return _with_file(args.graph, parse_edge_list, _read(args.graph)), None
    if args.stabilizers:
        return _with_file(args.stabilizers, parse_stabilizers, _read(args.stabilizers)), None
    params = _params(args.param)
    if args.family in GRAPH_ONLY:
        return builtin_graph(args.family, **params)
    tab, order = builtin(args.family, **params)
    return tab, order


def resolve_ordering(args, target, default) -> tuple[int, ...]:
    n = target.n_vertices if isinstance(target, Graph) else target.n_photons
    choice = args.ordering
    if choice == "auto":
        return check_ordering(default, n)
    if choice in ("identity", "bfs", "dfs", "greedy"):
        return heuristics(target)[choice]
    if choice == "search":
        return best_ordering(target, args.budget, args.seed)
    text = _read(choice)
    try:
        ids = [int(t) for t in text.split()]
    except ValueError:
        raise InputError(f"{choice}: ordering file must contain integers") from None
    try:
        return check_ordering(ids, n)
    except GraphError as exc:
        raise InputError(f"{choice}: {exc}") from None


def target_tableau(target, ordering) -> StabilizerTableau:
    if isinstance(target, Graph):
        return graph_stabilizers(target, ordering)
    return permute_qubits(target, ordering)


def _emit(args, text: str, data) -> None:
    if args.format == "machine":
        print(json.dumps(data, indent=1))
    else:
        print(text, end="" if text.endswith("\n") else "\n")


# -- commands -----------------------------------------------------------------

def cmd_height(args) -> int:
    target, default = load_target(args)
    ordering = resolve_ordering(args, target, default)
    h = cut_heights(target, ordering)
    if args.csv:
        Path(args.csv).write_text("x,h\n" + "".join(f"{x},{v}\n" for x, v in enumerate(h)))
    lines = ["ordering " + " ".join(map(str, ordering)), "x h"]
    lines += [f"{x} {v}" for x, v in enumerate(h)]
    lines.append(f"h_max {max(h)}")
    _emit(args, "\n".join(lines), {"ordering": list(ordering), "h": h, "h_max": max(h)})
    return EXIT_OK


def cmd_solve(args) -> int:
    target, default = load_target(args)
    ordering = resolve_ordering(args, target, default)
    if isinstance(target, Graph):
        circuit = solve_graph(target, ordering, split=args.split)
    else:
        circuit = solve(permute_qubits(target, ordering), ordering)
    text = serialize(circuit)
    if args.output:
        Path(args.output).write_text(json.dumps(to_dict(circuit), indent=1) + "\n"
                                     if args.output.endswith(".json") else text)
    report = None
    if args.check:
        report = verify(circuit, target_tableau(target, ordering), seed=args.seed,
                        enumerate_limit=_enumerate_limit(args.branch_cap))
    c = circuit.counts
    summary = [f"emitters {circuit.n_emitters}",
               f"emitter_cnots {c.emitter_cnots}",
               f"measurements {c.measurements}",
               f"total_gates {c.total_gates}"]
    if report is not None:
        summary.append(report.to_text().rstrip("\n"))
    body = "\n".join(summary) if args.output else text + "\n".join(summary)
    data = {"circuit": to_dict(circuit)}
    if report is not None:
        data["verification"] = report.to_dict()
    _emit(args, body, data)
    return EXIT_FAIL if report is not None and not report.passed else EXIT_OK


def _enumerate_limit(branch_cap: int) -> int:
    if branch_cap < 1:
        raise InputError("--branch-cap must be positive")
    return int(math.log2(branch_cap))


def load_circuit(path: str) -> GenerationCircuit:
    text = _read(path)
    if text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: invalid JSON: {exc}") from None
        return _with_file(path, from_dict, data)
    return _with_file(path, parse, text)


def cmd_verify(args) -> int:
    circuit = load_circuit(args.circuit)
    target, default = load_target(args)
    ordering = circuit.ordering if args.ordering == "auto" else resolve_ordering(args, target, default)
    report = verify(circuit, target_tableau(target, ordering), seed=args.seed,
                    samples=args.samples, enumerate_limit=_enumerate_limit(args.branch_cap))
    _emit(args, report.to_text(), report.to_dict())
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_bench(args) -> int:
    try:
        sizes = [int(s) for s in args.sizes.split(",") if s]
    except ValueError:
        raise InputError("--sizes must be a comma-separated list of integers") from None
    results = bench_mod.bench(sizes, args.p, args.trials, args.seed,
                              verify_fraction=args.verify_fraction, samples=args.samples,
                              workers=args.workers)
    rows = bench_mod.summarize(results)
    text = bench_mod.to_csv(rows)
    if args.csv:
        Path(args.csv).write_text(text)
    _emit(args, text, rows)
    failures = sum(r["verify_failures"] for r in rows)
    return EXIT_FAIL if failures else EXIT_OK


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "machine"), default="text",
                        help="human-readable text or JSON (default text)")
    common.add_argument("--seed", type=int, default=None,
                        help="random seed (default $EMITSYNTH_SEED or 0)")

    tgt = argparse.ArgumentParser(add_help=False)
    tgt.add_argument("--graph", metavar="FILE", help="edge-list file")
    tgt.add_argument("--stabilizers", metavar="FILE", help="stabilizer generator file")
    tgt.add_argument("--family", help="built-in family name")
    tgt.add_argument("--param", action="append", metavar="KEY=VALUE",
                     help="family parameter, repeatable (e.g. m=6)")
    tgt.add_argument("--ordering", default="auto",
                     help="auto|identity|bfs|dfs|greedy|search|FILE (default auto)")
    tgt.add_argument("--budget", type=int, default=2000, help="local-search steps (default 2000)")
    tgt.add_argument("--branch-cap", type=int, default=4096,
                     help="enumerate all branches up to this many (default 4096)")

    p = argparse.ArgumentParser(prog="emitsynth", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    h = sub.add_parser("height", parents=[common, tgt], help="height function and h_max")
    h.add_argument("--csv", metavar="FILE", help="write x,h rows for plotting")
    h.set_defaults(func=cmd_height)

    s = sub.add_parser("solve", parents=[common, tgt], help="synthesize a generation circuit")
    s.add_argument("-o", "--output", metavar="FILE", help="write the circuit (.json for JSON)")
    s.add_argument("--split", action="store_true", help="solve disconnected components separately")
    s.add_argument("--check", action="store_true", help="verify the circuit before returning")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", parents=[common, tgt], help="check a circuit against a target")
    v.add_argument("circuit", help="circuit file (text or JSON)")
    v.add_argument("--samples", type=int, default=256,
                   help="random branches when enumeration is capped (default 256)")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", parents=[common], help="random-graph scaling benchmark")
    b.add_argument("--sizes", default="16,32,64", help="comma-separated photon numbers")
    b.add_argument("--p", type=float, default=0.95, help="edge probability (default 0.95)")
    b.add_argument("--trials", type=int, default=128, help="graphs per size (default 128)")
    b.add_argument("--csv", metavar="FILE", help="also write the CSV here")
    b.add_argument("--verify-fraction", type=float, default=0.1,
                   help="fraction of trials verified per size (default 0.1)")
    b.add_argument("--samples", type=int, default=8,
                   help="branches checked per verified trial (all of them if fewer)")
    b.add_argument("--workers", type=int, default=1, help="worker processes (default 1)")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.seed is None:
            args.seed = _default_seed()
        return args.func(args)
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
