"""Compile every object of a model graph and record the result in the graph."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .animation import keyed_end_time
from .errors import MissingGeometry
from .frames import FrameSequence, PointSet
from .graph import ModelGraph
from .interp import frame_count, load_geometry, sample_object
from .pathgen import HUNGARIAN_CUTOFF, FlightPathSet, compile_flight_paths, merge_path_sets
from .records import FlsSpec


@dataclass
class CompileResult:
    paths: FlightPathSet
    fls_of: dict[str, list[int]] = field(default_factory=dict)
    skipped: list[str] = field(default_factory=list)


def resample(seq: FrameSequence, fps: float) -> FrameSequence:
    """Hold-last-frame resampling of a precomputed sequence onto ``fps``."""
    if seq.fps == fps:
        return seq
    n = len(seq.frames)
    last = (n - 1) / seq.fps
    frames = []
    for k in range(frame_count(0.0, last, fps)):
        src = min(n - 1, int(math.floor(k / fps * seq.fps + 1e-9)))
        frames.append(seq.frames[src])
    return FrameSequence(fps, frames, seq.t0)


def _occupied_points(graph: ModelGraph, obj: str) -> PointSet | None:
    if not graph.schema.has_rel_set("Occupies"):
        return None
    rels = graph.incident(obj, "Occupies", role="organ")
    if not rels:
        return None
    coords, colors = [], []
    for rel in rels:
        c = graph.entity(rel.bindings["coordinate"]).attrs
        k = graph.entity(rel.bindings["color"]).attrs
        coords.append((c["l"], c["h"], c["d"]))
        colors.append((k["r"], k["g"], k["b"], k["a"]))
    return PointSet(np.array(coords), np.array(colors))


def object_frames(graph: ModelGraph, obj: str, fps: float) -> FrameSequence | None:
    """Frames an object renders at ``fps``, or None when it has no geometry of its own.

    Multi-frame geometry files are precomputed sequences and are resampled;
    single-frame geometry is animated by the object's keyframes.
    """
    ent = graph.entity(obj)
    occupied = _occupied_points(graph, obj)
    if occupied is not None:
        return sample_object(graph, obj, fps, 0.0, keyed_end_time(graph, obj), occupied)
    if not ent.attrs.get("geometry"):
        return None
    geom = load_geometry(graph, obj)
    if isinstance(geom, FrameSequence) and len(geom.frames) > 1:
        if any(len(f) == 0 for f in geom.frames):
            raise MissingGeometry(f"{obj}: geometry sequence has an empty frame")
        return resample(geom, fps)
    return sample_object(graph, obj, fps, 0.0, keyed_end_time(graph, obj), geom)


def _merged_intervals(paths: FlightPathSet, i: int) -> list[tuple[float, float]]:
    ivs = sorted(iv for seg in paths.paths[i] for iv in seg.intervals)
    tol = 1e-9 / paths.fps
    out: list[tuple[float, float]] = []
    for s, e in ivs:
        if out and s <= out[-1][1] + tol:
            out[-1] = (out[-1][0], max(out[-1][1], e))
        else:
            out.append((s, e))
    return out


def compile_model(graph: ModelGraph, spec: FlsSpec, fps: float, method: str = "exact",
                  source: str | None = None, cutoff: int = HUNGARIAN_CUTOFF) -> CompileResult:
    """Compile all objects, replace previous FLS records, and link Flight Paths.

    Objects without geometry of their own fly with the FLSs of their
    transitive parts.
    """
    from .query import parts_of

    objects_set = graph.resolve_set("Objects")
    algorithms_set = graph.resolve_set("Algorithms")
    for ent in graph.entities_of("FLSs"):
        graph.delete_entity(ent.id, cascade=True)

    compiled: list[FlightPathSet] = []
    fls_of: dict[str, list[int]] = {}
    offset = 0
    objects = [e.id for e in graph.entities_of(objects_set)]
    for obj in objects:
        frames = object_frames(graph, obj, fps)
        if frames is None:
            continue
        result = compile_flight_paths(frames, spec, method, cutoff=cutoff)
        compiled.append(result)
        fls_of[obj] = list(range(offset, offset + result.fls_count))
        offset += result.fls_count

    skipped = []
    for obj in objects:
        if obj in fls_of:
            continue
        inherited = sorted({i for part in parts_of(graph, obj, transitive=True)
                            for i in fls_of.get(part, ())})
        if inherited:
            fls_of[obj] = inherited
        else:
            skipped.append(obj)

    paths = merge_path_sets(compiled) if compiled else FlightPathSet(fps, spec, [])
    paths.fls_spec = spec
    if not paths.paths:
        return CompileResult(paths, fls_of, skipped)

    alg_name = f"pathgen.{method}"
    existing = [e.id for e in graph.entities_of(algorithms_set)
                if e.attrs.get("name") == alg_name]
    algorithm = existing[0] if existing else graph.create_entity(algorithms_set,
                                                                 {"name": alg_name})
    fls_ids = [graph.create_entity("FLSs", {**spec.as_attrs(), "fls_index": i})
               for i in range(paths.fls_count)]
    for obj in objects:
        for i in fls_of.get(obj, ()):
            attrs = {"interval": _merged_intervals(paths, i)}
            if source:
                attrs["source"] = source
            graph.link("Flight Paths", {"object": obj, "fls": fls_ids[i], "algorithm": algorithm},
                       attrs)
    return CompileResult(paths, fls_of, skipped)


def fls_indices(graph: ModelGraph, obj: str) -> list[int]:
    """FLS indices recorded for ``obj`` by the last compilation."""
    out = set()
    for rel in graph.incident(obj, "Flight Paths", role="object"):
        fls = graph.entities.get(rel.bindings["fls"])
        if fls is not None and "fls_index" in fls.attrs:
            out.add(fls.attrs["fls_index"])
    return sorted(out)
