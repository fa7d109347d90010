"""Command-line pipeline: evaluate, quantify, solve, verify, rosetta, logic.

Exit codes are a stable contract:

    0  success
    2  validation error (bad arguments, schema, caps)
    3  infeasible seed
    4  solve produced a box that failed maximality certification
    5  verify found a disagreement with the stored result
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .designspace import load_problem, quantify_requirement
from .errors import CddError, InfeasibleSeed
from .modeltheory import (
    Interpretation,
    check_theory,
    graph_to_sentence,
    load_graph,
    load_structure,
    load_theory,
    to_text,
)
from .orthotope import SolveResult, oracle_check_steps, oracle_solve, solve_greedy, verify_maximality
from .rosetta import build_report, emit

EXIT_VALIDATION = 2
EXIT_INFEASIBLE_SEED = 3
EXIT_CERTIFICATE = 4
EXIT_DISAGREEMENT = 5


def _load_problem_file(path: str):
    return load_problem(Path(path).read_text())


def _parse_point(text: str, dim: int) -> tuple[float, ...]:
    try:
        point = tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise CddError(f"malformed point {text!r}: {exc}") from exc
    if len(point) != dim:
        raise CddError(f"point {text!r} has {len(point)} coordinates, problem needs {dim}")
    return point


def _parse_ranking(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError as exc:
        raise CddError(f"malformed ranking {text!r}: {exc}") from exc


def _dump_json(payload) -> str:
    return json.dumps(payload, indent=2)


def cmd_evaluate(args) -> int:
    problem = _load_problem_file(args.problem)
    point = _parse_point(args.point, problem.dim)
    region = problem.region()
    feasible, slacks = region.is_point_feasible(point)
    values = {s.name: s.evaluate(point) for s in problem.surfaces}
    if args.json:
        print(
            _dump_json(
                {
                    "point": list(point),
                    "objectives": values,
                    "slacks": {c.surface: sl for c, sl in zip(problem.constraints, slacks)},
                    "feasible": feasible,
                }
            )
        )
        return 0
    bounds = {c.surface: c.bound for c in problem.constraints}
    slack_by_name = {c.surface: sl for c, sl in zip(problem.constraints, slacks)}
    print(f"problem: {problem.name}   point: {', '.join(repr(v) for v in point)}")
    print(f"{'objective':<12} {'value':>14} {'bound':>12} {'slack':>14}")
    for name, value in values.items():
        bound = bounds.get(name)
        btxt = f"{bound:g}" if bound is not None else "-"
        stxt = f"{slack_by_name[name]:.6g}" if name in slack_by_name else "-"
        print(f"{name:<12} {value:>14.6g} {btxt:>12} {stxt:>14}")
    print(f"feasible: {'yes' if feasible else 'no'}")
    return 0


def cmd_quantify(args) -> int:
    problem = _load_problem_file(args.problem)
    constraint = quantify_requirement(args.requirement, problem)
    if args.json:
        print(_dump_json({"surface": constraint.surface, "op": "<=", "bound": constraint.bound}))
    else:
        print(str(constraint))
    return 0


def cmd_solve(args) -> int:
    problem = _load_problem_file(args.problem)
    ranking = _parse_ranking(args.ranking) if args.ranking else None
    result = solve_greedy(problem, ranking=ranking, eps=args.epsilon)

    out_dir = Path(args.out) if args.out else Path(".")
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / f"{problem.name}_solution.json"
    out_path.write_text(_dump_json(result.to_json()) + "\n")

    if args.json:
        print(_dump_json(result.to_json()))
    else:
        print(f"problem: {problem.name}")
        print(f"ranking: {', '.join(str(i) for i in result.ranking)}")
        for var, iv in zip(problem.variables, result.orthotope.intervals):
            print(f"  {var.name:<16} [{iv.lo:.6g}, {iv.hi:.6g}] {var.unit}")
        print(f"maximal: {'yes' if result.certificate.maximal else 'NO'}")
        print(f"written: {out_path}")
    if not result.certificate.maximal:
        print("certification failed: some face is not blocked", file=sys.stderr)
        return EXIT_CERTIFICATE
    return 0


def cmd_verify(args) -> int:
    problem = _load_problem_file(args.problem)
    result = SolveResult.from_json(json.loads(Path(args.result).read_text()))

    failures = []
    region = problem.region()
    feasible, slacks = region.is_box_feasible(result.orthotope.intervals)
    if not feasible:
        worst = min(range(len(slacks)), key=lambda i: slacks[i])
        failures.append(
            f"stored box violates {problem.constraints[worst]} by {-slacks[worst]:.3g}"
        )

    if feasible:
        certificate = verify_maximality(problem, result.orthotope, eps=args.epsilon)
        for face in certificate.faces:
            if not face.blocked:
                failures.append(f"face {face.axis}/{face.side} can still expand")

        checks = oracle_check_steps(problem, result, args.resolution)
        for check in checks:
            if not check.ok:
                failures.append(
                    f"step for factor {check.factor}: stored "
                    f"[{check.stored_lo:.6g}, {check.stored_hi:.6g}] vs grid "
                    f"[{check.grid_lo:.6g}, {check.grid_hi:.6g}] "
                    f"(tolerance {check.tolerance:.3g})"
                )

    oracle = oracle_solve(problem, args.resolution)
    payload = {
        "problem": problem.name,
        "agreement": not failures,
        "failures": failures,
        "oracle_greedy_box": oracle.greedy_box.to_json(),
        "oracle_volume_box": oracle.volume_box.to_json() if oracle.volume_box else None,
    }
    if args.json:
        print(_dump_json(payload))
    else:
        print(f"problem: {problem.name}   resolution: {args.resolution}")
        for line in failures:
            print(f"FAIL {line}")
        print(f"agreement: {'yes' if not failures else 'no'}")
    return 0 if not failures else EXIT_DISAGREEMENT


def cmd_rosetta(args) -> int:
    problem = _load_problem_file(args.problem)
    solution = None
    if args.solution:
        solution = SolveResult.from_json(json.loads(Path(args.solution).read_text()))
    report = build_report(problem, solution, resolution=args.resolution)
    formats = []
    if args.csv:
        formats.append("csv")
    if args.svg:
        formats.append("svg")
    if not formats:
        formats = ["csv", "svg"]
    written = []
    for fmt in formats:
        written.extend(emit(report, fmt, args.out or "."))
    for path in written:
        print(path)
    return 0


def cmd_logic(args) -> int:
    if args.graph:
        graph = load_graph(Path(args.graph).read_text())
        sig, sentence = graph_to_sentence(graph)
        if args.json:
            print(_dump_json({"signature": sig.to_json(), "sentence": to_text(sentence)}))
        else:
            print(to_text(sentence))
        return 0
    if not (args.theory and args.structure):
        print("logic needs --theory and --structure, or --graph", file=sys.stderr)
        return EXIT_VALIDATION
    sig, struct = load_structure(Path(args.structure).read_text())
    theory = load_theory(Path(args.theory).read_text(), signature=sig)
    verdicts = check_theory(theory, struct, Interpretation.identity(theory.signature))
    if args.json:
        print(
            _dump_json(
                {
                    "theory": theory.name,
                    "verdicts": verdicts,
                    "model": all(verdicts),
                }
            )
        )
    else:
        for sentence, verdict in zip(theory.sentences, verdicts):
            print(f"{'true ' if verdict else 'false'}  {to_text(sentence)}")
        print(f"model: {'yes' if all(verdicts) else 'no'}")
    return 0


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cdd",
        description="Constraint-driven design over quadratic response surfaces",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evaluate", help="evaluate objectives and slacks at a point")
    p.add_argument("problem")
    p.add_argument("--point", required=True, help="comma-separated coordinates")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("quantify", help="turn 'NAME <= NUMBER' into a constraint")
    p.add_argument("problem")
    p.add_argument("requirement")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_quantify)

    p = sub.add_parser("solve", help="greedy maximal orthotope with certification")
    p.add_argument("problem")
    p.add_argument("--ranking", help="comma-separated variable indices")
    p.add_argument("--epsilon", type=float, default=None, help="certification epsilon fraction")
    p.add_argument("--out", help="output directory for the result JSON")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="independently check a stored solve result")
    p.add_argument("problem")
    p.add_argument("result")
    p.add_argument("--resolution", type=int, default=201)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("rosetta", help="emit M/N/Q matrix reports")
    p.add_argument("problem")
    p.add_argument("--solution", help="solve result JSON to overlay")
    p.add_argument("--resolution", type=int, default=21)
    p.add_argument("--csv", action="store_true")
    p.add_argument("--svg", action="store_true")
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_rosetta)

    p = sub.add_parser("logic", help="check a theory against a structure, or translate a graph")
    p.add_argument("--theory", help="theory JSON file")
    p.add_argument("--structure", help="structure JSON file")
    p.add_argument("--graph", help="conceptual graph JSON file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_logic)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_arg_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InfeasibleSeed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE_SEED
    except (CddError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
