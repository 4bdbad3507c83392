"""Deterministic persistence for model graphs and compiled flight paths.

Model files are line-oriented UTF-8 text::

    FLSM 1
    schema core
    next 4
    entity Objects obj:1 name=rose
    rel Consists-Of cons:3 parent=obj:1 child=obj:2
    ann ann:4 obj:1 note="thorny stem" alice 2026-01-01T00:00:00+00:00

Records are sorted by kind (entity, rel, ann), set name and id number.
Values containing whitespace, quotes, backslashes or ``=`` are double-quoted
with backslash escapes. Multi-valued attributes repeat their key in order.

Flight-path files are little-endian binary: ``b"FLSP"``, u16 version,
f64 fps, u32 FLS count, then per FLS a u32 segment count and per segment a
u32 interval count, ``(f64 start, f64 end)`` pairs, ``f64 l h d`` and
``u8 r g b a`` (each ``floor(channel * 255 + 0.5)``).
"""

from __future__ import annotations

import math
import re
import struct
from pathlib import Path
from typing import Any

from .errors import (
    BadMagic,
    FlsError,
    InvalidGraph,
    MissingHeader,
    ParseError,
    TruncatedFile,
    UnknownSchemaReference,
    VersionUnsupported,
)
from .graph import Annotation, Entity, ModelGraph, Relationship, id_key, id_number
from .ingest import format_number, parse_number
from .pathgen import FlightPathSet, FlightSegment
from .records import ColorRGBA, Coordinate, FlsSpec
from .schema import AttrDef, Registry, SchemaDef, get_schema
from .validation import validate

MODEL_MAGIC = "FLSM"
MODEL_VERSION = 1
FLSP_MAGIC = b"FLSP"
FLSP_VERSION = 1

_PLAIN = re.compile(r'[^\s"\\=]+')
_ESCAPES = {"\\": "\\", '"': '"', "n": "\n", "t": "\t", "r": "\r"}
_ESCAPE_OUT = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\t": "\\t", "\r": "\\r"}
_ID = re.compile(r"[a-z0-9]+:[0-9]+")


# -- model text --------------------------------------------------------------

def quote(s: str) -> str:
    if _PLAIN.fullmatch(s):
        return s
    return '"' + "".join(_ESCAPE_OUT.get(c, c) for c in s) + '"'


def tokenize(line: str, lineno: int | None = None) -> list[str]:
    toks = []
    i, n = 0, len(line)
    while i < n:
        if line[i] in " \t":
            i += 1
            continue
        buf = []
        while i < n and line[i] not in " \t":
            c = line[i]
            if c == '"':
                i += 1
                while True:
                    if i >= n:
                        raise ParseError("unterminated quote", lineno)
                    c = line[i]
                    if c == "\\":
                        if i + 1 >= n or line[i + 1] not in _ESCAPES:
                            raise ParseError("bad escape sequence", lineno)
                        buf.append(_ESCAPES[line[i + 1]])
                        i += 2
                    elif c == '"':
                        i += 1
                        break
                    else:
                        buf.append(c)
                        i += 1
            elif c == "\\":
                raise ParseError("backslash outside quotes", lineno)
            else:
                buf.append(c)
                i += 1
        toks.append("".join(buf))
    return toks


def _format_value(d: AttrDef | None, v: Any) -> str:
    if d is None or d.kind == "text":
        return quote(v)
    if d.kind == "bool":
        return "true" if v else "false"
    if d.kind == "int":
        return str(v)
    if d.kind == "float":
        return format_number(v)
    return f"{format_number(v[0])},{format_number(v[1])}"


def _parse_value(d: AttrDef | None, raw: str, lineno: int) -> Any:
    if d is None or d.kind == "text":
        return raw
    if d.kind == "bool":
        if raw not in ("true", "false"):
            raise ParseError(f"{d.name}: expected true|false", lineno)
        return raw == "true"
    if d.kind == "int":
        if not re.fullmatch(r"[+-]?[0-9]+", raw):
            raise ParseError(f"{d.name}: expected integer", lineno)
        return int(raw)
    if d.kind == "float":
        return parse_number(raw, lineno)
    parts = raw.split(",")
    if len(parts) != 2:
        raise ParseError(f"{d.name}: expected 'start,end'", lineno)
    return (parse_number(parts[0], lineno), parse_number(parts[1], lineno))


def _format_attrs(schema: SchemaDef, set_name: str, attrs: dict) -> list[str]:
    defs = schema.attr_defs(set_name)
    out = []
    ordered = [k for k in defs if k in attrs] + sorted(k for k in attrs if k not in defs)
    for key in ordered:
        d = defs.get(key)
        value = attrs[key]
        if d is not None and d.multi:
            out.extend(f"{key}={_format_value(d, v)}" for v in value)
        else:
            out.append(f"{key}={_format_value(d, value)}")
    return out


def dumps_model(graph: ModelGraph) -> str:
    schema = graph.schema
    lines = [f"{MODEL_MAGIC} {MODEL_VERSION}", f"schema {quote(schema.name)}",
             f"next {graph.next_id}"]
    for ent in sorted(graph.entities.values(), key=lambda e: (e.set_name, id_key(e.id))):
        parts = ["entity", quote(ent.set_name), ent.id,
                 *_format_attrs(schema, ent.set_name, ent.attrs)]
        lines.append(" ".join(parts))
    for rel in sorted(graph.relationships.values(), key=lambda r: (r.set_name, id_key(r.id))):
        parts = ["rel", quote(rel.set_name), rel.id,
                 *(f"{role}={target}" for role, target in rel.bindings.items()),
                 *_format_attrs(schema, rel.set_name, rel.attrs)]
        lines.append(" ".join(parts))
    for ann in sorted(graph.annotations.values(), key=lambda a: id_key(a.id)):
        lines.append(" ".join(["ann", ann.id, ann.target, f"{ann.key}={quote(ann.value)}",
                               quote(ann.author), quote(ann.created_at)]))
    return "\n".join(lines) + "\n"


def write_model(graph: ModelGraph, path, allow_invalid: bool = False) -> None:
    """Write ``graph``; refuses invalid graphs unless ``allow_invalid`` (draft saves)."""
    if not allow_invalid:
        report = validate(graph)
        if not report.ok:
            raise InvalidGraph(report)
    Path(path).write_text(dumps_model(graph), encoding="utf-8")


def _split_kv(tok: str, lineno: int) -> tuple[str, str]:
    key, sep, value = tok.partition("=")
    if not sep or not key:
        raise ParseError(f"expected key=value, got {tok!r}", lineno)
    return key, value


def loads_model(text: str, registry: Registry | None = None) -> ModelGraph:
    # only "\n" ends a record; quoted text may hold other line separators
    lines = [ln[:-1] if ln.endswith("\r") else ln for ln in text.split("\n")]
    header: list[list[str]] = []
    lineno = 0
    while len(header) < 3:
        if lineno >= len(lines):
            raise MissingHeader("model file header incomplete", lineno or 1)
        raw = lines[lineno]
        lineno += 1
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        header.append(tokenize(raw, lineno))
    magic, schema_line, next_line = header
    if magic != [MODEL_MAGIC, str(MODEL_VERSION)]:
        raise MissingHeader(f"expected '{MODEL_MAGIC} {MODEL_VERSION}' header", 1)
    if len(schema_line) != 2 or schema_line[0] != "schema":
        raise MissingHeader("expected 'schema <name>'", 2)
    try:
        schema = get_schema(schema_line[1], registry)
    except FlsError:
        raise UnknownSchemaReference(f"unknown schema {schema_line[1]!r}", 2) from None
    if (len(next_line) != 2 or next_line[0] != "next"
            or not re.fullmatch(r"[0-9]+", next_line[1])):
        raise MissingHeader("expected 'next <n>'", 3)
    next_id = int(next_line[1])

    entities: dict[str, Entity] = {}
    rels: dict[str, Relationship] = {}
    anns: dict[str, Annotation] = {}
    seen: set[str] = set()

    def claim(ident: str, ln: int) -> None:
        if not _ID.fullmatch(ident):
            raise ParseError(f"malformed id {ident!r}", ln)
        if ident in seen:
            raise ParseError(f"duplicate id {ident}", ln)
        if id_number(ident) >= next_id:
            raise ParseError(f"id {ident} not below 'next {next_id}'", ln)
        seen.add(ident)

    for ln in range(lineno + 1, len(lines) + 1):
        raw = lines[ln - 1]
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        toks = tokenize(raw, ln)
        kind = toks[0]
        if kind in ("entity", "rel"):
            if len(toks) < 3:
                raise ParseError(f"{kind} record needs a set and an id", ln)
            set_name, ident = toks[1], toks[2]
            is_rel = kind == "rel"
            if is_rel and not schema.has_rel_set(set_name):
                raise ParseError(f"unknown relationship set {set_name!r}", ln)
            if not is_rel and not schema.has_entity_set(set_name):
                raise ParseError(f"unknown entity set {set_name!r}", ln)
            prefix = (schema.rel_set(set_name) if is_rel else schema.entity_set(set_name)).id_prefix
            claim(ident, ln)
            if ident.rsplit(":", 1)[0] != prefix:
                raise ParseError(f"id {ident} does not match prefix {prefix!r}", ln)
            defs = schema.attr_defs(set_name)
            roles = {r.name for r in schema.rel_set(set_name).roles} if is_rel else set()
            bindings: dict[str, str] = {}
            attrs: dict[str, Any] = {}
            for tok in toks[3:]:
                key, value = _split_kv(tok, ln)
                if key in roles:
                    if key in bindings:
                        raise ParseError(f"role {key} bound twice", ln)
                    bindings[key] = value
                    continue
                d = defs.get(key)
                parsed = _parse_value(d, value, ln)
                if d is not None and d.multi:
                    attrs.setdefault(key, []).append(parsed)
                elif key in attrs:
                    raise ParseError(f"attribute {key} repeated", ln)
                else:
                    attrs[key] = parsed
            try:
                attrs = schema.check_attrs(set_name, attrs)
            except FlsError as exc:
                raise ParseError(str(exc), ln) from None
            if is_rel:
                order = [r.name for r in schema.rel_set(set_name).roles]
                bindings = {r: bindings[r] for r in order if r in bindings}
                rels[ident] = Relationship(ident, set_name, bindings, attrs)
            else:
                entities[ident] = Entity(ident, set_name, attrs)
        elif kind == "ann":
            if len(toks) != 6:
                raise ParseError("ann record: 'ann <id> <target> key=value <author> <ts>'", ln)
            ident, target = toks[1], toks[2]
            claim(ident, ln)
            key, value = _split_kv(toks[3], ln)
            anns[ident] = Annotation(ident, target, key, value, toks[4], toks[5])
        else:
            raise ParseError(f"unknown record kind {kind!r}", ln)
    return ModelGraph(schema, entities, rels, anns, next_id)


def read_model(path, registry: Registry | None = None) -> ModelGraph:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"not UTF-8 text: {exc.reason}") from None
    graph = loads_model(text, registry)
    graph.base_dir = str(p.resolve().parent)
    return graph


# -- flight paths binary -----------------------------------------------------

_HEADER = struct.Struct("<4sHdI")
_U32 = struct.Struct("<I")
_INTERVAL = struct.Struct("<dd")
_STATE = struct.Struct("<ddd4B")
_MIN_SEGMENT = _U32.size + _STATE.size


def quantize(c: float) -> int:
    return min(255, max(0, int(math.floor(c * 255.0 + 0.5))))


def dumps_flight_paths(paths: FlightPathSet) -> bytes:
    out = bytearray(_HEADER.pack(FLSP_MAGIC, FLSP_VERSION, float(paths.fps), len(paths.paths)))
    for segments in paths.paths:
        out += _U32.pack(len(segments))
        for seg in segments:
            out += _U32.pack(len(seg.intervals))
            for s, e in seg.intervals:
                out += _INTERVAL.pack(float(s), float(e))
            out += _STATE.pack(*map(float, seg.coord), *(quantize(c) for c in seg.color))
    return bytes(out)


def write_flight_paths(paths: FlightPathSet, path) -> None:
    Path(path).write_bytes(dumps_flight_paths(paths))


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, st: struct.Struct, what: str):
        if self.pos + st.size > len(self.data):
            raise TruncatedFile(f"file ends inside {what}", offset=self.pos)
        vals = st.unpack_from(self.data, self.pos)
        self.pos += st.size
        return vals

    def need(self, count: int, unit: int, what: str) -> None:
        if count * unit > len(self.data) - self.pos:
            raise TruncatedFile(f"{count} {what} cannot fit in the remaining bytes",
                                offset=self.pos)


def loads_flight_paths(data: bytes, fls_spec: FlsSpec | None = None) -> FlightPathSet:
    r = _Reader(data)
    if len(data) < 4 or data[:4] != FLSP_MAGIC:
        raise BadMagic(f"expected magic {FLSP_MAGIC!r}, got {bytes(data[:4])!r}", offset=0)
    magic, version, fps, count = r.take(_HEADER, "header")
    if version != FLSP_VERSION:
        raise VersionUnsupported(f"version {version} not supported", offset=4)
    if not (math.isfinite(fps) and fps > 0):
        raise ParseError(f"fps must be > 0, got {fps}", offset=6)
    r.need(count, _U32.size, "FLS records")
    paths = []
    for _ in range(count):
        (nseg,) = r.take(_U32, "segment count")
        r.need(nseg, _MIN_SEGMENT, "segments")
        segments = []
        for _ in range(nseg):
            (nint,) = r.take(_U32, "interval count")
            r.need(nint, _INTERVAL.size, "intervals")
            intervals = []
            for _ in range(nint):
                at = r.pos
                s, e = r.take(_INTERVAL, "interval")
                if not (math.isfinite(s) and math.isfinite(e) and s < e):
                    raise ParseError(f"bad interval ({s}, {e})", offset=at)
                intervals.append((s, e))
            at = r.pos
            l, h, d, *rgba = r.take(_STATE, "segment state")
            if not all(math.isfinite(x) for x in (l, h, d)):
                raise ParseError("non-finite coordinate", offset=at)
            segments.append(FlightSegment(intervals, Coordinate(l, h, d),
                                          ColorRGBA(*(c / 255.0 for c in rgba))))
        paths.append(segments)
    if r.pos != len(data):
        raise ParseError(f"{len(data) - r.pos} trailing bytes", offset=r.pos)
    return FlightPathSet(fps, fls_spec, paths)


def read_flight_paths(path, fls_spec: FlsSpec | None = None) -> FlightPathSet:
    return loads_flight_paths(Path(path).read_bytes(), fls_spec)
