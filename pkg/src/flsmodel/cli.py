"""Command-line entry point: ingest, validate, compile, query, annotate, inspect.

Exit codes: 0 success, 1 validation violations, 2 usage error, 3 I/O or parse error.
Results go to standard output, diagnostics to standard error.
"""

from __future__ import annotations

import argparse
import os
import shlex
import sys

from .errors import FlsError, NotCompiled, ParseError, SchemaMismatch, UnknownId
from .graph import ModelGraph
from .ingest import format_number, read_frames, read_voxels
from .mri import ingest_scan, read_stiffness
from .pathgen import check_feasibility, summarize
from .pipeline import compile_model
from .query import (contained_at, find_by_annotation, hidden_in, interactions_during,
                    organs_with_disease, parts_of, triggered_sounds)
from .records import FlsSpec
from .schema import get_schema
from .store import read_flight_paths, read_model, write_flight_paths, write_model
from .validation import validate

EXIT_OK, EXIT_VIOLATIONS, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

QUERY_HELP = """query verbs:
  parts-of <id> [transitive]
  interactions-of <id> <t0> <t1>
  contained-at <subject-id> <t>
  hidden-in <container-id> <t>          (needs --paths)
  find-annotated <key> [<value>]
  organs-with <disease>
  sounds-of <id> <trigger>
"""


class UsageError(Exception):
    pass


def _open_or_create(path: str, schema_name: str) -> ModelGraph:
    if os.path.exists(path):
        graph = read_model(path)
        if graph.schema.name != schema_name:
            raise UsageError(f"{path} uses schema {graph.schema.name!r}, not {schema_name!r}")
        return graph
    graph = ModelGraph(get_schema(schema_name))
    graph.base_dir = os.path.dirname(os.path.abspath(path))
    return graph


def _geometry_ref(frames_path: str, model_path: str) -> str:
    model_dir = os.path.dirname(os.path.abspath(model_path))
    rel = os.path.relpath(os.path.abspath(frames_path), model_dir)
    return rel.replace(os.sep, "/")


def cmd_validate(args) -> int:
    report = validate(read_model(args.model))
    for line in report.info:
        print(f"info: {line}", file=sys.stderr)
    for v in report.violations:
        print(v.message)
    print(f"{len(report.violations)} violations")
    return EXIT_OK if report.ok else EXIT_VIOLATIONS


def cmd_ingest_frames(args) -> int:
    read_frames(args.file)  # fail early on a malformed file
    graph = _open_or_create(args.model, args.schema)
    objects = graph.resolve_set("Objects")
    if args.part_of is not None:
        graph.entity(args.part_of)
    obj = graph.create_entity(objects, {"name": args.object,
                                        "geometry": _geometry_ref(args.file, args.model)})
    if args.part_of is not None:
        graph.link("Consists-Of", {"parent": args.part_of, "child": obj})
    write_model(graph, args.model, allow_invalid=True)
    print(obj)
    return EXIT_OK


def cmd_ingest_voxels(args) -> int:
    grid = read_voxels(args.file)
    table = read_stiffness(args.stiffness) if args.stiffness else None
    graph = _open_or_create(args.model, "mri")
    result = ingest_scan(graph, grid, {"name": args.patient}, {"name": args.equipment},
                         args.threshold, table)
    write_model(graph, args.model, allow_invalid=True)
    print(result.patient)
    for organ in result.organs:
        print(organ)
    return EXIT_OK


def cmd_compile(args) -> int:
    graph = read_model(args.model)
    try:
        spec = FlsSpec(args.nu, args.beta, args.force, args.omega)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    result = compile_model(graph, spec, args.fps, args.method, source=args.output)
    for obj in result.skipped:
        print(f"warning: {obj} has no geometry and no compiled parts", file=sys.stderr)
    report = check_feasibility(result.paths)
    for i, frame, speed in report.velocity_violations:
        print(f"warning: fls {i} needs {speed:.6g} m/s at frame {frame} (max {spec.nu})",
              file=sys.stderr)
    write_flight_paths(result.paths, args.output)
    write_model(graph, args.model, allow_invalid=True)
    print(f"fls {result.paths.fls_count}")
    print(f"battery_waves {report.battery_waves}")
    return EXIT_OK


def _float(tok: str) -> float:
    try:
        return float(tok)
    except ValueError:
        raise UsageError(f"expected a number, got {tok!r}") from None


def run_query(graph: ModelGraph, line: str, paths=None) -> list[str]:
    """Evaluate one query line and return output lines."""
    toks = shlex.split(line)
    if not toks:
        raise UsageError("empty query")
    verb, rest = toks[0], toks[1:]

    def arity(lo, hi=None):
        hi = lo if hi is None else hi
        if not lo <= len(rest) <= hi:
            raise UsageError(f"{verb}: wrong number of arguments\n{QUERY_HELP}")

    if verb == "parts-of":
        arity(1, 2)
        if len(rest) == 2 and rest[1] != "transitive":
            raise UsageError("parts-of takes an optional 'transitive'")
        return parts_of(graph, rest[0], transitive=len(rest) == 2)
    if verb == "interactions-of":
        arity(3)
        recs = interactions_during(graph, rest[0], _float(rest[1]), _float(rest[2]))
        return [f"{r.id} {r.source} {r.target} {format_number(r.start)} {format_number(r.end)}"
                for r in recs]
    if verb == "contained-at":
        arity(2)
        return contained_at(graph, rest[0], _float(rest[1]))
    if verb == "hidden-in":
        arity(2)
        if paths is None:
            raise UsageError("hidden-in needs --paths")
        return hidden_in(graph, paths, rest[0], _float(rest[1]))
    if verb == "find-annotated":
        arity(1, 2)
        return find_by_annotation(graph, rest[0], rest[1] if len(rest) == 2 else None)
    if verb == "organs-with":
        arity(1)
        return organs_with_disease(graph, rest[0])
    if verb == "sounds-of":
        arity(2)
        return [f"{r.id} {r.sound_id or '-'}" for r in triggered_sounds(graph, rest[0], rest[1])]
    raise UsageError(f"unknown query verb {verb!r}\n{QUERY_HELP}")


def cmd_query(args) -> int:
    graph = read_model(args.model)
    paths = read_flight_paths(args.paths) if args.paths else None
    for line in run_query(graph, args.line, paths):
        print(line)
    return EXIT_OK


def cmd_annotate(args) -> int:
    key, sep, value = args.pair.partition("=")
    if not sep or not key:
        raise UsageError(f"expected key=value, got {args.pair!r}")
    graph = read_model(args.model)
    try:
        ann = graph.annotate(args.id, key, value, args.author)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    write_model(graph, args.model, allow_invalid=True)
    print(ann)
    return EXIT_OK


def inspect_lines(paths) -> list[str]:
    s = summarize(paths)
    out = [
        f"fps {format_number(s['fps'])}",
        f"fls {s['fls_count']}",
        f"segments {s['segment_count']}",
        f"intervals {s['interval_count']}",
        f"span {format_number(s['span_start'])} {format_number(s['span_end'])}",
    ]
    for i, (segs, ivs) in enumerate(s["per_fls"]):
        out.append(f"fls[{i}] segments {segs} intervals {ivs}")
    return out


def cmd_inspect(args) -> int:
    for line in inspect_lines(read_flight_paths(args.flsp)):
        print(line)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="flsmodel", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check a model and list violations")
    v.add_argument("model")
    v.set_defaults(func=cmd_validate)

    ing = sub.add_parser("ingest", help="add frames or a voxel scan to a model")
    isub = ing.add_subparsers(dest="kind", required=True)
    f = isub.add_parser("frames", help="add an object whose geometry is a frames file")
    f.add_argument("file")
    f.add_argument("--model", required=True)
    f.add_argument("--object", required=True, help="object name")
    f.add_argument("--part-of", help="parent object id (adds a Consists-Of link)")
    f.add_argument("--schema", default="core", help="schema for a new model (default core)")
    f.set_defaults(func=cmd_ingest_frames)
    vx = isub.add_parser("voxels", help="label organs in a voxel scan (MRI schema)")
    vx.add_argument("file")
    vx.add_argument("--model", required=True)
    vx.add_argument("--threshold", type=float, required=True)
    vx.add_argument("--stiffness", help="intensity-to-newtons table")
    vx.add_argument("--patient", default="patient")
    vx.add_argument("--equipment", default="scanner")
    vx.set_defaults(func=cmd_ingest_voxels)

    c = sub.add_parser("compile", help="compile flight paths for every object")
    c.add_argument("model")
    c.add_argument("--fps", type=float, required=True)
    c.add_argument("--nu", type=float, required=True, help="max speed (m/s)")
    c.add_argument("--beta", type=float, required=True, help="flight time per charge (s)")
    c.add_argument("--omega", type=float, required=True, help="charging time (s)")
    c.add_argument("--force", type=float, required=True, help="max haptic force (N)")
    c.add_argument("--method", choices=("exact", "greedy"), default="exact")
    c.add_argument("-o", "--output", required=True, help="flight path file to write")
    c.set_defaults(func=cmd_compile)

    q = sub.add_parser("query", help="run one query line", epilog=QUERY_HELP,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    q.add_argument("model")
    q.add_argument("line")
    q.add_argument("--paths", help="compiled flight path file")
    q.set_defaults(func=cmd_query)

    a = sub.add_parser("annotate", help="attach key=value to an entity or relationship")
    a.add_argument("model")
    a.add_argument("id")
    a.add_argument("pair", metavar="key=value")
    a.add_argument("--author", default="")
    a.set_defaults(func=cmd_annotate)

    i = sub.add_parser("inspect", help="dump a flight path file")
    i.add_argument("flsp")
    i.set_defaults(func=cmd_inspect)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, UnknownId, NotCompiled, SchemaMismatch) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (FlsError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
