"""Whole-graph constraint checking.

Validation is on demand: authoring workflows pass through states that break
total participation (an object exists before its flight path is compiled),
so mutations only enforce local rules and :func:`validate` reports the rest.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import FlsError
from .graph import ModelGraph, id_key


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    target: str | None = None

    def __str__(self) -> str:
        return self.message


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)
    info: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __len__(self) -> int:
        return len(self.violations)

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def lines(self) -> list[str]:
        return [str(v) for v in self.violations]


def validate(graph: ModelGraph) -> ValidationReport:
    """Report every constraint violation in ``graph``; empty report means valid."""
    report = ValidationReport()
    add = report.violations.append
    schema = graph.schema

    for ent in sorted(graph.entities.values(), key=lambda e: id_key(e.id)):
        if not schema.has_entity_set(ent.set_name):
            add(Violation("unknown-set", f"unknown entity set {ent.set_name} ({ent.id})", ent.id))
            continue
        try:
            schema.check_attrs(ent.set_name, ent.attrs, where=f"{ent.id}: ")
        except FlsError as exc:
            add(Violation("attribute", f"attribute: {exc}", ent.id))

    for rel in sorted(graph.relationships.values(), key=lambda r: id_key(r.id)):
        if not schema.has_rel_set(rel.set_name):
            add(Violation("unknown-set", f"unknown relationship set {rel.set_name} ({rel.id})",
                          rel.id))
            continue
        rdef = schema.rel_set(rel.set_name)
        for role in rdef.roles:
            if role.required and role.name not in rel.bindings:
                add(Violation("missing-role", f"missing role: {rel.id} {role.name}", rel.id))
        if rdef.role_alternatives and not any(
                all(g in rel.bindings for g in grp) for grp in rdef.role_alternatives):
            add(Violation("missing-role",
                          f"missing role: {rel.id} needs one of "
                          + " | ".join("+".join(g) for g in rdef.role_alternatives), rel.id))
        roles = {r.name: r for r in rdef.roles}
        for name, target in rel.bindings.items():
            role = roles.get(name)
            if role is None:
                add(Violation("dangling", f"dangling reference: {rel.id} unknown role {name}",
                              rel.id))
                continue
            msg = _binding_problem(graph, role.target, target)
            if msg:
                add(Violation("dangling", f"dangling reference: {rel.id}.{name} -> {target} "
                              f"({msg})", rel.id))
        if rdef.acyclic is not None:
            a, b = rdef.acyclic
            if rel.bindings.get(a) is not None and rel.bindings.get(a) == rel.bindings.get(b):
                add(Violation("containment-cycle",
                              f"containment cycle: {rel.bindings[a]} ({rel.set_name} self-loop)",
                              rel.id))
        try:
            schema.check_attrs(rel.set_name, rel.attrs, where=f"{rel.id}: ")
        except FlsError as exc:
            add(Violation("attribute", f"attribute: {exc}", rel.id))

    for ann in sorted(graph.annotations.values(), key=lambda a: id_key(a.id)):
        if ann.target not in graph:
            add(Violation("dangling", f"dangling reference: annotation {ann.id} -> {ann.target}",
                          ann.id))

    _check_total_participation(graph, report)
    _check_cycles(graph, report)
    return report


def _binding_problem(graph: ModelGraph, target_set: str, ident: str) -> str | None:
    schema = graph.schema
    if schema.has_rel_set(target_set):
        rel = graph.relationships.get(ident)
        if rel is None:
            return "missing"
        return None if rel.set_name == target_set else f"expected {target_set}"
    ent = graph.entities.get(ident)
    if ent is None:
        return "missing"
    if not schema.has_entity_set(ent.set_name) or not schema.is_a(ent.set_name, target_set):
        return f"expected {target_set}"
    return None


def _check_total_participation(graph: ModelGraph, report: ValidationReport) -> None:
    schema = graph.schema
    bound: dict[tuple[str, str], set[str]] = {}
    for rel in graph.relationships.values():
        for role, target in rel.bindings.items():
            bound.setdefault((rel.set_name, role), set()).add(target)
    for rdef in schema.relationship_sets:
        for role in rdef.roles:
            if role.participation != "total":
                continue
            members = bound.get((rdef.name, role.name), set())
            if schema.has_rel_set(role.target):
                candidates = [r.id for r in graph.relationships_of(role.target)]
                lookup = graph.relationships
            else:
                candidates = [e.id for e in graph.entities_of(role.target)]
                lookup = graph.entities
            for ident in candidates:
                if ident in members:
                    continue
                if lookup[ident].attrs.get("unilluminated"):
                    report.info.append(
                        f"unilluminated: {ident} exempt from {role.target}⇄{rdef.name}")
                    continue
                report.violations.append(Violation(
                    "total-participation",
                    f"total participation: {role.target}⇄{rdef.name} ({ident})", ident))
    subject_set = schema.aliases.get("Subject")
    if subject_set and schema.has_entity_set(subject_set):
        for ent in graph.entities_of(subject_set):
            if ent.attrs.get("unilluminated"):
                report.info.append(f"unilluminated: {ent.id} has no illuminated content")


def _check_cycles(graph: ModelGraph, report: ValidationReport) -> None:
    """Flag every strongly connected component of size > 1 in acyclic rel sets."""
    for rdef in graph.schema.relationship_sets:
        if rdef.acyclic is None:
            continue
        a, b = rdef.acyclic
        adj: dict[str, list[str]] = {}
        for rel in graph.relationships_of(rdef.name):
            p, c = rel.bindings.get(a), rel.bindings.get(b)
            if p is None or c is None or p == c:
                continue
            adj.setdefault(p, []).append(c)
            adj.setdefault(c, [])
        for comp in _sccs(adj):
            if len(comp) > 1:
                members = sorted(comp, key=id_key)
                report.violations.append(Violation(
                    "containment-cycle",
                    f"containment cycle: {rdef.name} among {' '.join(members)}", members[0]))


def _sccs(adj: dict[str, list[str]]) -> list[list[str]]:
    """Tarjan's algorithm, iterative; components in deterministic order."""
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    out: list[list[str]] = []
    counter = 0
    for root in sorted(adj, key=id_key):
        if root in index:
            continue
        work = [(root, iter(sorted(adj[root], key=id_key)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            node, it = work[-1]
            advanced = False
            for nxt in it:
                if nxt not in index:
                    index[nxt] = low[nxt] = counter
                    counter += 1
                    stack.append(nxt)
                    on_stack.add(nxt)
                    work.append((nxt, iter(sorted(adj[nxt], key=id_key))))
                    advanced = True
                    break
                if nxt in on_stack:
                    low[node] = min(low[node], index[nxt])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == node:
                        break
                out.append(comp)
    return out
