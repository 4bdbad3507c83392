"""Read-only queries over model graphs and compiled flight paths.

Results are id-sorted unless a function says otherwise. Time intervals
are half-open ``[start, end)`` throughout.
"""

from __future__ import annotations

import math
from collections import deque

import numpy as np

from .errors import NotCompiled, SchemaMismatch, UnknownId
from .graph import ModelGraph, id_key
from .pathgen import FlightPathSet, state_at
from .records import AcousticRecord, InteractionRecord


def _require(graph: ModelGraph, ident: str) -> None:
    if ident not in graph:
        raise UnknownId(f"no entity or relationship {ident!r}")


def _children(graph: ModelGraph, obj: str) -> list[str]:
    if not graph.schema.has_rel_set("Consists-Of"):
        return []
    return sorted({r.bindings["child"] for r in graph.incident(obj, "Consists-Of", role="parent")},
                  key=id_key)


def parts_of(graph: ModelGraph, obj: str, transitive: bool = False) -> list[str]:
    """Consists-Of children of ``obj``; with ``transitive`` the whole closure.

    The closure is listed breadth-first, id-sorted within each level.
    """
    _require(graph, obj)
    if not transitive:
        return _children(graph, obj)
    seen = {obj}
    out: list[str] = []
    level = [obj]
    while level:
        nxt = set()
        for node in level:
            nxt.update(c for c in _children(graph, node) if c not in seen)
        level = sorted(nxt, key=id_key)
        seen.update(level)
        out.extend(level)
    return out


def _overlaps(start: float, end: float, t0: float, t1: float) -> bool:
    if t0 == t1:
        return start <= t0 < end
    return start < t1 and t0 < end


def interactions_during(graph: ModelGraph, obj: str, t0: float, t1: float) -> list[InteractionRecord]:
    """Interactions with ``obj`` as source or target overlapping ``[t0, t1)``.

    A zero-width window asks about the single instant ``t0``.
    """
    _require(graph, obj)
    if t0 > t1:
        raise ValueError(f"window start {t0} is after its end {t1}")
    out = []
    for rel in graph.incident(obj, "Interactions"):
        a = rel.attrs
        start = a.get("start", -math.inf)
        end = a.get("end", math.inf)
        if start is None:
            start = -math.inf
        if end is None:
            end = math.inf
        if _overlaps(start, end, t0, t1):
            out.append(InteractionRecord(rel.id, rel.bindings["source"], rel.bindings["target"],
                                         start, end, a.get("interaction_id"),
                                         a.get("description")))
    return out


def contained_at(graph: ModelGraph, subject: str, t: float) -> list[str]:
    """Objects whose Contains link with ``subject`` covers ``t`` (enter <= t < exit)."""
    _require(graph, subject)
    out = set()
    for rel in graph.incident(subject, "Contains", role="subject"):
        enter = rel.attrs["enter"]
        exit_ = rel.attrs.get("exit")
        if enter <= t and (exit_ is None or t < exit_):
            out.add(rel.bindings["object"])
    return sorted(out, key=id_key)


def _fls_by_object(graph: ModelGraph) -> dict[str, set[int]]:
    out: dict[str, set[int]] = {}
    if not graph.schema.has_rel_set("Flight Paths"):
        return out
    for rel in graph.relationships_of("Flight Paths"):
        fls = graph.entities.get(rel.bindings.get("fls"))
        if fls is None or fls.attrs.get("fls_index") is None:
            continue
        out.setdefault(rel.bindings["object"], set()).add(fls.attrs["fls_index"])
    return out


def _lit_points(paths: FlightPathSet, indices, t: float) -> np.ndarray:
    pts = []
    for i in sorted(indices):
        if not 0 <= i < paths.fls_count:
            raise NotCompiled(f"FLS index {i} is not in the compiled flight paths")
        seg = state_at(paths, i, t)
        if seg is not None and seg.color.a > 0:
            pts.append(seg.coord)
    return np.array(pts, dtype=float).reshape(-1, 3)


def hidden_in(graph: ModelGraph, paths: FlightPathSet, container: str, t: float) -> list[str]:
    """Objects whose lit-point centroid at ``t`` is strictly inside ``container``'s box.

    The box is the axis-aligned bound of the container's lit points at ``t``.
    The container and its transitive parts are never returned.
    """
    _require(graph, container)
    fls_of = _fls_by_object(graph)
    if container not in fls_of:
        raise NotCompiled(f"{container} has no compiled flight paths")
    box = _lit_points(paths, fls_of[container], t)
    if len(box) == 0:
        raise NotCompiled(f"{container} has no lit points at t={t}")
    lo, hi = box.min(axis=0), box.max(axis=0)
    excluded = {container, *parts_of(graph, container, transitive=True)}
    out = []
    for obj, indices in fls_of.items():
        if obj in excluded:
            continue
        pts = _lit_points(paths, indices, t)
        if len(pts) == 0:
            continue
        c = pts.mean(axis=0)
        if np.all(lo < c) and np.all(c < hi):
            out.append(obj)
    return sorted(out, key=id_key)


def annotate(graph: ModelGraph, target: str, key: str, value: str, author: str = "") -> str:
    return graph.annotate(target, key, value, author)


def find_by_annotation(graph: ModelGraph, key: str, value: str | None = None) -> list[str]:
    """Targets carrying an annotation with ``key`` (and ``value`` if given), exact match."""
    out = {a.target for a in graph.annotations.values()
           if a.key == key and (value is None or a.value == value)}
    return sorted(out, key=id_key)


def organs_with_disease(graph: ModelGraph, name: str) -> list[str]:
    """Organs whose disease list contains ``name`` (case-sensitive)."""
    if not graph.schema.has_entity_set("Organs"):
        raise SchemaMismatch(f"schema {graph.schema.name!r} has no Organs")
    return [e.id for e in graph.entities_of("Organs") if name in e.attrs.get("disease", ())]


def triggered_sounds(graph: ModelGraph, obj: str, trigger: str) -> list[AcousticRecord]:
    """Acoustic records that ``obj`` makes when ``trigger`` happens."""
    _require(graph, obj)
    found = {}
    for rel in graph.incident(obj, "Make Noise", role="object"):
        if rel.attrs.get("trigger") != trigger:
            continue
        ent = graph.entity(rel.bindings["acoustic"])
        a = dict(ent.attrs)
        known = {k: a.pop(k, None) for k in ("sound_id", "pitch", "db", "frequency")}
        found[ent.id] = AcousticRecord(ent.id, extra={k: str(v) for k, v in a.items()}, **known)
    return [found[k] for k in sorted(found, key=id_key)]
