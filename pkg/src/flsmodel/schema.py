"""Generic entity-relationship metamodel.

Schemas are plain data: entity sets with (possibly multi-valued) attributes
and an optional Is-A parent, and relationship sets whose roles point at
entity sets or, for aggregation, at other relationship sets.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Any, Iterable

from .errors import (
    AttributeTypeMismatch,
    ConstraintViolation,
    DuplicateSetName,
    IsACycle,
    MissingRequiredAttribute,
    UnknownAttribute,
    UnknownRoleTarget,
    UnknownSet,
)

VALUE_KINDS = ("text", "float", "int", "bool", "interval")


@dataclass(frozen=True)
class AttrDef:
    name: str
    kind: str = "text"
    multi: bool = False
    required: bool = False
    allow_duplicates: bool = False
    lo: float | None = None
    hi: float | None = None
    positive: bool = False
    choices: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.kind not in VALUE_KINDS:
            raise ValueError(f"unknown attribute kind {self.kind!r}")
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_.]*", self.name):
            raise ValueError(f"bad attribute name {self.name!r}")

    def coerce(self, value: Any, where: str = "") -> Any:
        """Check one attribute value and return its canonical stored form."""
        if self.multi:
            if isinstance(value, (str, bytes)) or not isinstance(value, (list, tuple)):
                raise AttributeTypeMismatch(
                    f"{where}{self.name}: multi-valued attribute needs a list, got {value!r}")
            items = [self._coerce_one(v, where) for v in value]
            if not self.allow_duplicates and len(set(items)) != len(items):
                raise ConstraintViolation(f"{where}{self.name}: duplicate values not allowed")
            return items
        if isinstance(value, list):
            raise AttributeTypeMismatch(
                f"{where}{self.name}: single-valued attribute got a list")
        return self._coerce_one(value, where)

    def _coerce_one(self, v: Any, where: str) -> Any:
        label = f"{where}{self.name}"
        if self.kind == "text":
            if not isinstance(v, str):
                raise AttributeTypeMismatch(f"{label}: expected text, got {v!r}")
            if self.choices is not None and v not in self.choices:
                raise ConstraintViolation(f"{label}: {v!r} not in {self.choices}")
            return v
        if self.kind == "bool":
            if not isinstance(v, bool):
                raise AttributeTypeMismatch(f"{label}: expected bool, got {v!r}")
            return v
        if self.kind == "int":
            if isinstance(v, bool) or not isinstance(v, int):
                raise AttributeTypeMismatch(f"{label}: expected int, got {v!r}")
            self._check_bounds(v, label)
            return int(v)
        if self.kind == "float":
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise AttributeTypeMismatch(f"{label}: expected number, got {v!r}")
            x = float(v)
            if not math.isfinite(x):
                raise ConstraintViolation(f"{label}: non-finite value")
            self._check_bounds(x, label)
            return x
        # interval
        if not isinstance(v, (tuple, list)) or len(v) != 2 or any(
                isinstance(x, bool) or not isinstance(x, (int, float)) for x in v):
            raise AttributeTypeMismatch(f"{label}: expected (start, end), got {v!r}")
        a, b = float(v[0]), float(v[1])
        if not (math.isfinite(a) and math.isfinite(b)) or not a < b:
            raise ConstraintViolation(f"{label}: interval must satisfy start < end")
        return (a, b)

    def _check_bounds(self, x: float, label: str) -> None:
        if self.positive and not x > 0:
            raise ConstraintViolation(f"{label}: must be > 0, got {x}")
        if self.lo is not None and x < self.lo:
            raise ConstraintViolation(f"{label}: must be >= {self.lo}, got {x}")
        if self.hi is not None and x > self.hi:
            raise ConstraintViolation(f"{label}: must be <= {self.hi}, got {x}")


@dataclass(frozen=True)
class EntitySetDef:
    name: str
    attrs: tuple[AttrDef, ...] = ()
    parent: str | None = None
    prefix: str | None = None
    open_attributes: bool = False
    # pairs (a, b) requiring attr a <= attr b when both are present
    ordered: tuple[tuple[str, str], ...] = ()
    # groups of attribute names; at least one of each group must be present
    any_of: tuple[tuple[str, ...], ...] = ()

    @property
    def id_prefix(self) -> str:
        return self.prefix or default_prefix(self.name)


@dataclass(frozen=True)
class RoleDef:
    name: str
    target: str
    participation: str = "partial"
    required: bool = True

    def __post_init__(self):
        if self.participation not in ("partial", "total"):
            raise ValueError(f"participation must be partial|total, got {self.participation!r}")


@dataclass(frozen=True)
class RelSetDef:
    name: str
    roles: tuple[RoleDef, ...]
    attrs: tuple[AttrDef, ...] = ()
    prefix: str | None = None
    ordered: tuple[tuple[str, str], ...] = ()
    any_of: tuple[tuple[str, ...], ...] = ()
    # groups of optional roles; at least one group must be fully bound
    role_alternatives: tuple[tuple[str, ...], ...] = ()
    # (parent_role, child_role) for recursive relationships that must stay acyclic
    acyclic: tuple[str, str] | None = None

    @property
    def id_prefix(self) -> str:
        return self.prefix or default_prefix(self.name)

    def role(self, name: str) -> RoleDef:
        for r in self.roles:
            if r.name == name:
                return r
        raise KeyError(name)


def default_prefix(name: str) -> str:
    return re.sub(r"[^a-z0-9]", "", name.lower()) or "x"


@dataclass(frozen=True)
class SchemaDef:
    name: str
    entity_sets: tuple[EntitySetDef, ...]
    relationship_sets: tuple[RelSetDef, ...] = ()
    # canonical concept name -> set name in this schema (e.g. "Objects" -> "Organs")
    aliases: dict[str, str] = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_ents", {e.name: e for e in self.entity_sets})
        object.__setattr__(self, "_rels", {r.name: r for r in self.relationship_sets})

    # -- lookups -----------------------------------------------------------

    def has_entity_set(self, name: str) -> bool:
        return name in self._ents

    def has_rel_set(self, name: str) -> bool:
        return name in self._rels

    def entity_set(self, name: str) -> EntitySetDef:
        try:
            return self._ents[name]
        except KeyError:
            raise UnknownSet(f"schema {self.name!r} has no entity set {name!r}") from None

    def rel_set(self, name: str) -> RelSetDef:
        try:
            return self._rels[name]
        except KeyError:
            raise UnknownSet(f"schema {self.name!r} has no relationship set {name!r}") from None

    def resolve(self, concept: str) -> str:
        """Map a canonical concept ("Objects", "Subject", ...) to this schema's set name."""
        name = self.aliases.get(concept, concept)
        if name not in self._ents and name not in self._rels:
            raise UnknownSet(f"schema {self.name!r} has no set for {concept!r}")
        return name

    def ancestors(self, name: str) -> list[str]:
        """``name`` followed by its Is-A parents up to the root."""
        out: list[str] = []
        cur: str | None = name
        while cur is not None and cur not in out:
            out.append(cur)
            cur = self._ents[cur].parent
        return out

    def is_a(self, name: str, ancestor: str) -> bool:
        return name in self._ents and ancestor in self.ancestors(name)

    def descendants(self, name: str) -> set[str]:
        return {e.name for e in self.entity_sets if self.is_a(e.name, name)}

    def attr_defs(self, set_name: str) -> dict[str, AttrDef]:
        """Attributes of a set, including those inherited through Is-A."""
        if set_name in self._rels:
            return {a.name: a for a in self._rels[set_name].attrs}
        defs: dict[str, AttrDef] = {}
        for anc in reversed(self.ancestors(set_name)):
            for a in self._ents[anc].attrs:
                defs[a.name] = a
        return defs

    def _set_constraints(self, set_name: str):
        if set_name in self._rels:
            r = self._rels[set_name]
            return r.ordered, r.any_of, False
        ordered: list = []
        any_of: list = []
        open_attrs = False
        for anc in self.ancestors(set_name):
            e = self._ents[anc]
            ordered.extend(e.ordered)
            any_of.extend(e.any_of)
            open_attrs = open_attrs or e.open_attributes
        return tuple(ordered), tuple(any_of), open_attrs

    def check_attrs(self, set_name: str, attrs: dict[str, Any], where: str = "") -> dict[str, Any]:
        """Validate and normalise an attribute map for ``set_name``.

        Missing multi-valued attributes become empty lists; ``None`` values
        are dropped.
        """
        defs = self.attr_defs(set_name)
        ordered, any_of, open_attrs = self._set_constraints(set_name)
        out: dict[str, Any] = {}
        for key, value in attrs.items():
            if value is None:
                continue
            d = defs.get(key)
            if d is None:
                if not open_attrs:
                    raise UnknownAttribute(f"{where}{set_name} has no attribute {key!r}")
                if not isinstance(value, str) or not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_.]*", key):
                    raise AttributeTypeMismatch(
                        f"{where}open attribute {key!r} must be a text value with a plain name")
                out[key] = value
                continue
            out[key] = d.coerce(value, where)
        for d in defs.values():
            if d.name not in out:
                if d.multi:
                    out[d.name] = []
                if d.required and (d.name not in out or (d.multi and not out[d.name])):
                    raise MissingRequiredAttribute(f"{where}{set_name}.{d.name} is required")
        for a, b in ordered:
            if a in out and b in out and not out[a] <= out[b]:
                raise ConstraintViolation(f"{where}{set_name}: {a} must be <= {b}")
        for group in any_of:
            if not any(g in out for g in group):
                raise ConstraintViolation(
                    f"{where}{set_name}: at least one of {', '.join(group)} is required")
        return out

    def validate_definition(self) -> None:
        """Raise if the schema violates the metamodel's structural rules."""
        seen: set[str] = set()
        prefixes: dict[str, str] = {}
        for s in [*self.entity_sets, *self.relationship_sets]:
            if s.name in seen:
                raise DuplicateSetName(f"duplicate set name {s.name!r} in schema {self.name!r}")
            seen.add(s.name)
            p = s.id_prefix
            if p in prefixes:
                raise DuplicateSetName(
                    f"sets {prefixes[p]!r} and {s.name!r} share id prefix {p!r}")
            prefixes[p] = s.name
        for e in self.entity_sets:
            if e.parent is not None and e.parent not in self._ents:
                raise UnknownRoleTarget(f"{e.name!r} Is-A unknown set {e.parent!r}")
        for e in self.entity_sets:
            trail: list[str] = []
            cur: str | None = e.name
            while cur is not None:
                if cur in trail:
                    raise IsACycle(" -> ".join([*trail[trail.index(cur):], cur]))
                trail.append(cur)
                cur = self._ents[cur].parent
        for r in self.relationship_sets:
            names = [role.name for role in r.roles]
            if len(set(names)) != len(names) or not names:
                raise DuplicateSetName(f"{r.name!r}: role names must be unique and non-empty")
            clash = set(names) & {a.name for a in r.attrs}
            if clash:
                raise DuplicateSetName(f"{r.name!r}: roles and attributes share names {sorted(clash)}")
            for role in r.roles:
                if role.target not in seen:
                    raise UnknownRoleTarget(
                        f"{r.name}.{role.name} targets undeclared set {role.target!r}")
            for group in r.role_alternatives:
                for g in group:
                    if g not in names:
                        raise UnknownRoleTarget(f"{r.name}: alternative names unknown role {g!r}")
            if r.acyclic is not None and not set(r.acyclic) <= set(names):
                raise UnknownRoleTarget(f"{r.name}: acyclic roles {r.acyclic} not declared")
        for concept, target in self.aliases.items():
            if target not in seen:
                raise UnknownRoleTarget(f"alias {concept!r} points at undeclared {target!r}")


class Registry:
    """Named collection of validated schemas."""

    def __init__(self, schemas: Iterable[SchemaDef] = ()):
        self._schemas: dict[str, SchemaDef] = {}
        for s in schemas:
            self.register(s)

    def register(self, schema: SchemaDef) -> SchemaDef:
        schema.validate_definition()
        if schema.name in self._schemas:
            raise DuplicateSetName(f"schema {schema.name!r} is already registered")
        self._schemas[schema.name] = schema
        return schema

    def get(self, name: str) -> SchemaDef:
        try:
            return self._schemas[name]
        except KeyError:
            raise UnknownSet(f"no schema named {name!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._schemas

    def names(self) -> list[str]:
        return sorted(self._schemas)


REGISTRY = Registry()


def register_schema(schema: SchemaDef, registry: Registry | None = None) -> SchemaDef:
    return (registry or REGISTRY).register(schema)


def get_schema(name: str, registry: Registry | None = None) -> SchemaDef:
    return (registry or REGISTRY).get(name)
