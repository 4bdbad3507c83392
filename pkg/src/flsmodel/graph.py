"""Typed instance graph of entities, relationships and annotations."""

from __future__ import annotations

import copy
import re
import datetime as _dt
from dataclasses import dataclass, field
from typing import Any, Iterator

from .errors import (
    FrozenGraph,
    HasIncidentRelationships,
    MissingRole,
    RoleTypeMismatch,
    SelfLoop,
    UnknownId,
)
from .schema import SchemaDef, get_schema


def id_number(ident: str) -> int:
    """Numeric part of an external id such as ``obj:7``."""
    return int(ident.rsplit(":", 1)[1])


def id_key(ident: str) -> tuple[int, str]:
    return (id_number(ident), ident)


@dataclass
class Entity:
    id: str
    set_name: str
    attrs: dict[str, Any]


@dataclass
class Relationship:
    id: str
    set_name: str
    bindings: dict[str, str]
    attrs: dict[str, Any]


@dataclass
class Annotation:
    id: str
    target: str
    key: str
    value: str
    author: str = ""
    created_at: str = ""


@dataclass
class ModelGraph:
    """Entities and relationships conforming to one schema.

    Ids come from a single monotonically increasing counter and are rendered
    as ``<set prefix>:<n>``; deleted ids are never handed out again.
    Mutation is single-writer; :meth:`snapshot` returns a frozen deep copy
    that is safe to share across threads.
    """

    schema: SchemaDef
    entities: dict[str, Entity] = field(default_factory=dict)
    relationships: dict[str, Relationship] = field(default_factory=dict)
    annotations: dict[str, Annotation] = field(default_factory=dict)
    next_id: int = 1
    frozen: bool = field(default=False, compare=False)
    # in-memory geometry keyed by the value of an object's ``geometry`` attribute;
    # not persisted
    geometry_store: dict[str, Any] = field(default_factory=dict, compare=False, repr=False)
    base_dir: str | None = field(default=None, compare=False)
    _incident: dict[str, set[str]] = field(default_factory=dict, compare=False, repr=False)
    _ann_by_target: dict[str, set[str]] = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if isinstance(self.schema, str):
            self.schema = get_schema(self.schema)
        self._reindex()

    def _reindex(self) -> None:
        self._incident = {}
        for rel in self.relationships.values():
            for target in rel.bindings.values():
                self._incident.setdefault(target, set()).add(rel.id)
        self._ann_by_target = {}
        for ann in self.annotations.values():
            self._ann_by_target.setdefault(ann.target, set()).add(ann.id)

    def _check_writable(self) -> None:
        if self.frozen:
            raise FrozenGraph("graph snapshot is read-only")

    def _fresh_id(self, prefix: str) -> str:
        ident = f"{prefix}:{self.next_id}"
        self.next_id += 1
        return ident

    # -- queries -------------------------------------------------------------

    def __contains__(self, ident: str) -> bool:
        return ident in self.entities or ident in self.relationships

    def entity(self, ident: str) -> Entity:
        try:
            return self.entities[ident]
        except KeyError:
            raise UnknownId(f"no entity {ident!r}") from None

    def relationship(self, ident: str) -> Relationship:
        try:
            return self.relationships[ident]
        except KeyError:
            raise UnknownId(f"no relationship {ident!r}") from None

    def set_of(self, ident: str) -> str:
        if ident in self.entities:
            return self.entities[ident].set_name
        if ident in self.relationships:
            return self.relationships[ident].set_name
        raise UnknownId(f"no entity or relationship {ident!r}")

    def entities_of(self, set_name: str, *, include_subsets: bool = True) -> list[Entity]:
        """Entities of ``set_name`` (and its Is-A descendants), id-sorted."""
        self.schema.entity_set(set_name)
        if include_subsets:
            wanted = self.schema.descendants(set_name)
        else:
            wanted = {set_name}
        return sorted((e for e in self.entities.values() if e.set_name in wanted),
                      key=lambda e: id_key(e.id))

    def relationships_of(self, set_name: str) -> list[Relationship]:
        self.schema.rel_set(set_name)
        return sorted((r for r in self.relationships.values() if r.set_name == set_name),
                      key=lambda r: id_key(r.id))

    def incident(self, ident: str, set_name: str | None = None,
                 role: str | None = None) -> list[Relationship]:
        """Relationships binding ``ident``, optionally filtered by set and role."""
        out = []
        for rid in self._incident.get(ident, ()):
            rel = self.relationships[rid]
            if set_name is not None and rel.set_name != set_name:
                continue
            if role is not None and rel.bindings.get(role) != ident:
                continue
            out.append(rel)
        out.sort(key=lambda r: id_key(r.id))
        return out

    def annotations_on(self, ident: str) -> list[Annotation]:
        return sorted((self.annotations[a] for a in self._ann_by_target.get(ident, ())),
                      key=lambda a: id_key(a.id))

    def records(self) -> Iterator[Entity | Relationship | Annotation]:
        yield from self.entities.values()
        yield from self.relationships.values()
        yield from self.annotations.values()

    # -- mutation ------------------------------------------------------------

    def create_entity(self, set_name: str, attrs: dict[str, Any] | None = None) -> str:
        self._check_writable()
        sdef = self.schema.entity_set(set_name)
        clean = self.schema.check_attrs(set_name, dict(attrs or {}))
        ident = self._fresh_id(sdef.id_prefix)
        self.entities[ident] = Entity(ident, set_name, clean)
        return ident

    def link(self, rel_set: str, bindings: dict[str, str],
             attrs: dict[str, Any] | None = None) -> str:
        self._check_writable()
        rdef = self.schema.rel_set(rel_set)
        roles = {r.name: r for r in rdef.roles}
        for name in bindings:
            if name not in roles:
                raise RoleTypeMismatch(f"{rel_set} has no role {name!r}")
        for role in rdef.roles:
            if role.required and role.name not in bindings:
                raise MissingRole(f"{rel_set} requires role {role.name!r}")
        if rdef.role_alternatives and not any(
                all(g in bindings for g in group) for group in rdef.role_alternatives):
            opts = " or ".join("+".join(g) for g in rdef.role_alternatives)
            raise MissingRole(f"{rel_set} needs roles {opts}")
        for name, target in bindings.items():
            self._check_binding(rel_set, roles[name].target, name, target)
        if rdef.acyclic is not None:
            a, b = rdef.acyclic
            if a in bindings and bindings.get(a) == bindings.get(b):
                raise SelfLoop(f"{rel_set}: {bindings[a]} cannot relate to itself")
        clean = self.schema.check_attrs(rel_set, dict(attrs or {}))
        ident = self._fresh_id(rdef.id_prefix)
        ordered = {r.name: bindings[r.name] for r in rdef.roles if r.name in bindings}
        self.relationships[ident] = Relationship(ident, rel_set, ordered, clean)
        for target in ordered.values():
            self._incident.setdefault(target, set()).add(ident)
        return ident

    def _check_binding(self, rel_set: str, target_set: str, role: str, ident: str) -> None:
        if self.schema.has_rel_set(target_set):
            rel = self.relationships.get(ident)
            if rel is None:
                if ident in self.entities:
                    raise RoleTypeMismatch(
                        f"{rel_set}.{role} expects a {target_set} relationship, got {ident}")
                raise UnknownId(f"{rel_set}.{role}: no relationship {ident!r}")
            if rel.set_name != target_set:
                raise RoleTypeMismatch(
                    f"{rel_set}.{role} expects a {target_set} relationship, got {rel.set_name}")
            return
        ent = self.entities.get(ident)
        if ent is None:
            if ident in self.relationships:
                raise RoleTypeMismatch(f"{rel_set}.{role} expects an entity, got {ident}")
            raise UnknownId(f"{rel_set}.{role}: no entity {ident!r}")
        if not self.schema.is_a(ent.set_name, target_set):
            raise RoleTypeMismatch(
                f"{rel_set}.{role} expects {target_set}, got {ent.set_name} ({ident})")

    def set_attr(self, ident: str, key: str, value: Any) -> None:
        """Replace one attribute of an entity or relationship, re-checking the whole record."""
        self._check_writable()
        rec: Entity | Relationship
        rec = self.entities[ident] if ident in self.entities else self.relationship(ident)
        attrs = dict(rec.attrs)
        attrs[key] = value
        if value is None:
            del attrs[key]
        rec.attrs = self.schema.check_attrs(rec.set_name, attrs)

    def _dependents(self, ident: str) -> tuple[list[str], list[str]]:
        """Relationships (transitively, through aggregation) and annotations hanging off ident."""
        rels: list[str] = []
        seen: set[str] = set()
        stack = [ident]
        while stack:
            cur = stack.pop()
            for rid in sorted(self._incident.get(cur, ()), key=id_key):
                if rid not in seen:
                    seen.add(rid)
                    rels.append(rid)
                    stack.append(rid)
        anns = [a for t in [ident, *rels] for a in self._ann_by_target.get(t, ())]
        return rels, anns

    def delete_entity(self, ident: str, cascade: bool = False) -> int:
        """Remove an entity; returns the number of records removed."""
        self._check_writable()
        if ident not in self.entities:
            raise UnknownId(f"no entity {ident!r}")
        rels, anns = self._dependents(ident)
        if (rels or anns) and not cascade:
            raise HasIncidentRelationships(
                f"{ident} has {len(rels)} relationship(s) and {len(anns)} annotation(s)")
        for rid in rels:
            self._drop_relationship(rid)
        for aid in anns:
            self._drop_annotation(aid)
        del self.entities[ident]
        self._incident.pop(ident, None)
        return 1 + len(rels) + len(anns)

    def delete_relationship(self, ident: str) -> int:
        self._check_writable()
        if ident not in self.relationships:
            raise UnknownId(f"no relationship {ident!r}")
        rels, anns = self._dependents(ident)
        for rid in [ident, *rels]:
            self._drop_relationship(rid)
        for aid in anns:
            self._drop_annotation(aid)
        return 1 + len(rels) + len(anns)

    def _drop_relationship(self, rid: str) -> None:
        rel = self.relationships.pop(rid, None)
        if rel is None:
            return
        for target in rel.bindings.values():
            s = self._incident.get(target)
            if s is not None:
                s.discard(rid)
        self._incident.pop(rid, None)

    def _drop_annotation(self, aid: str) -> None:
        ann = self.annotations.pop(aid, None)
        if ann is not None:
            self._ann_by_target.get(ann.target, set()).discard(aid)

    def annotate(self, target: str, key: str, value: str, author: str = "",
                 created_at: str | _dt.datetime | None = None) -> str:
        self._check_writable()
        if target not in self:
            raise UnknownId(f"cannot annotate missing {target!r}")
        if not isinstance(key, str) or not re.fullmatch(r'[^\s"\\=]+', key):
            raise ValueError(f"annotation key must be a non-empty word without '=', got {key!r}")
        if not isinstance(value, str) or not isinstance(author, str):
            raise TypeError("annotation value and author must be text")
        if created_at is None:
            created_at = _dt.datetime.now(_dt.timezone.utc)
        if isinstance(created_at, _dt.datetime):
            created_at = created_at.isoformat(timespec="seconds")
        ident = self._fresh_id("ann")
        self.annotations[ident] = Annotation(ident, target, key, value, author, created_at)
        self._ann_by_target.setdefault(target, set()).add(ident)
        return ident

    # -- snapshots -----------------------------------------------------------

    def snapshot(self) -> ModelGraph:
        snap = copy.deepcopy(self)
        snap.frozen = True
        return snap

    def resolve_set(self, concept: str) -> str:
        return self.schema.resolve(concept)
