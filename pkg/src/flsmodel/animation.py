"""Keyframes and per-channel animation curves stored in a model graph.

Each animatable property is a scalar channel (``position.l``, ``color.a``,
``scale`` ...); vector properties are several parallel channels. Keyframes
are ``Keyframe`` entities attached to their object through ``Has Keyframe``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DuplicateKeyTime, InvalidKeyframe, SchemaMismatch, UnknownChannel
from .graph import ModelGraph
from .schemas import CHANNELS, STATIC_CHANNEL_ATTRS

INTERP_MODES = ("linear", "bezier")

_CHANNEL_DEFAULTS = {
    "position.l": 0.0, "position.h": 0.0, "position.d": 0.0,
    "color.r": 1.0, "color.g": 1.0, "color.b": 1.0, "color.a": 1.0,
    "scale": 1.0,
}


def check_channel(channel: str) -> str:
    if channel not in CHANNELS:
        raise UnknownChannel(f"unknown channel {channel!r}; expected one of {', '.join(CHANNELS)}")
    return channel


@dataclass(frozen=True)
class Keyframe:
    """A value anchor on one channel.

    Handles are ``(dt, dv)`` offsets from the key itself and only matter for
    Bezier segments; the left handle points back in time, the right forward.
    """

    time: float
    value: float
    interp: str = "linear"
    handle_left: tuple[float, float] = (0.0, 0.0)
    handle_right: tuple[float, float] = (0.0, 0.0)
    channel: str | None = None

    def __post_init__(self):
        if not (math.isfinite(self.time) and math.isfinite(self.value)):
            raise InvalidKeyframe("keyframe time and value must be finite")
        if self.time < 0:
            raise InvalidKeyframe(f"keyframe time must be >= 0, got {self.time}")
        if self.interp not in INTERP_MODES:
            raise InvalidKeyframe(f"interp must be linear|bezier, got {self.interp!r}")
        for h in (self.handle_left, self.handle_right):
            if len(h) != 2 or not all(math.isfinite(x) for x in h):
                raise InvalidKeyframe(f"bad handle {h!r}")
        object.__setattr__(self, "handle_left", tuple(map(float, self.handle_left)))
        object.__setattr__(self, "handle_right", tuple(map(float, self.handle_right)))
        if self.interp == "bezier" and (self.handle_right[0] < 0 or self.handle_left[0] > 0):
            raise InvalidKeyframe("bezier handles must point outward in time")
        if self.channel is not None:
            check_channel(self.channel)


@dataclass(frozen=True)
class FCurve:
    object: str | None
    channel: str
    keys: tuple[Keyframe, ...]

    def __post_init__(self):
        if not self.keys:
            raise InvalidKeyframe("an FCurve needs at least one key")
        times = [k.time for k in self.keys]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise InvalidKeyframe("FCurve key times must be strictly increasing")

    @property
    def times(self) -> list[float]:
        return [k.time for k in self.keys]

    @property
    def start(self) -> float:
        return self.keys[0].time

    @property
    def end(self) -> float:
        return self.keys[-1].time


@dataclass(frozen=True)
class AuthoringToolRecord:
    name: str
    model: str | None = None
    software_specifications: str | None = None

    def __post_init__(self):
        if not self.name:
            raise ValueError("authoring tool name must be non-empty")


@dataclass(frozen=True)
class AlgorithmRecord:
    id: str
    name: str
    kind: str
    derived_from: str | None = None


_KIND_BY_SET = {"Rendering": "rendering", "Interpolation": "interpolation",
                "Organ Annotation": "annotation"}


def _require_keyframe_schema(graph: ModelGraph) -> None:
    if not (graph.schema.has_entity_set("Keyframe") and graph.schema.has_rel_set("Has Keyframe")):
        raise SchemaMismatch(f"schema {graph.schema.name!r} does not support keyframes")


def _keyframe_attrs(kf: Keyframe, channel: str) -> dict:
    return {
        "time": float(kf.time), "channel": channel, "value": float(kf.value),
        "interp": kf.interp,
        "hl_dt": kf.handle_left[0], "hl_dv": kf.handle_left[1],
        "hr_dt": kf.handle_right[0], "hr_dv": kf.handle_right[1],
    }


def keyframe_from_attrs(attrs: dict) -> Keyframe:
    return Keyframe(
        time=attrs["time"], value=attrs["value"], interp=attrs["interp"],
        handle_left=(attrs.get("hl_dt", 0.0), attrs.get("hl_dv", 0.0)),
        handle_right=(attrs.get("hr_dt", 0.0), attrs.get("hr_dv", 0.0)),
        channel=attrs["channel"],
    )


def _object_keys(graph: ModelGraph, obj: str, channel: str) -> list[tuple[str, Keyframe]]:
    if not graph.schema.has_rel_set("Has Keyframe"):
        return []
    out = []
    for rel in graph.incident(obj, "Has Keyframe", role="object"):
        ent = graph.entities.get(rel.bindings["keyframe"])
        if ent is not None and ent.attrs.get("channel") == channel:
            out.append((ent.id, keyframe_from_attrs(ent.attrs)))
    out.sort(key=lambda p: p[1].time)
    return out


def add_keyframe(graph: ModelGraph, obj: str, keyframe: Keyframe,
                 channel: str | None = None, replace: bool = False) -> str:
    """Insert ``keyframe`` into the object's curve for its channel; returns the key id."""
    _require_keyframe_schema(graph)
    channel = check_channel(channel or keyframe.channel or "")
    objects = graph.schema.resolve("Objects")
    ent = graph.entity(obj)
    if not graph.schema.is_a(ent.set_name, objects):
        raise SchemaMismatch(f"{obj} is not an {objects} entity")
    for kid, existing in _object_keys(graph, obj, channel):
        if existing.time == keyframe.time:
            if not replace:
                raise DuplicateKeyTime(f"{obj} already has a {channel} key at t={keyframe.time}")
            graph.delete_entity(kid, cascade=True)
    kid = graph.create_entity("Keyframe", _keyframe_attrs(keyframe, channel))
    graph.link("Has Keyframe", {"object": obj, "keyframe": kid})
    return kid


def has_channel_data(graph: ModelGraph, obj: str, channel: str) -> bool:
    """True if the channel is keyed or set by a static attribute."""
    check_channel(channel)
    ent = graph.entity(obj)
    return bool(_object_keys(graph, obj, channel)) or STATIC_CHANNEL_ATTRS[channel] in ent.attrs


def channel_of(graph: ModelGraph, obj: str, channel: str) -> FCurve:
    """The object's curve for ``channel``.

    Without keys this is a one-key constant curve holding the static
    attribute, or the channel default (0 for position, 1 for scale and color).
    """
    check_channel(channel)
    ent = graph.entity(obj)
    keys = _object_keys(graph, obj, channel)
    if keys:
        return FCurve(obj, channel, tuple(k for _, k in keys))
    value = ent.attrs.get(STATIC_CHANNEL_ATTRS[channel], _CHANNEL_DEFAULTS[channel])
    return FCurve(obj, channel, (Keyframe(0.0, float(value), channel=channel),))


def keyed_end_time(graph: ModelGraph, obj: str) -> float:
    """Latest key time across all channels of ``obj`` (0 if unkeyed)."""
    end = 0.0
    for ch in CHANNELS:
        keys = _object_keys(graph, obj, ch)
        if keys:
            end = max(end, keys[-1][1].time)
    return end


def algorithm_record(graph: ModelGraph, ident: str) -> AlgorithmRecord:
    ent = graph.entity(ident)
    algorithms = graph.schema.resolve("Algorithms")
    if not graph.schema.is_a(ent.set_name, algorithms):
        raise SchemaMismatch(f"{ident} is not an algorithm")
    kind = "other"
    for anc in graph.schema.ancestors(ent.set_name):
        if anc in _KIND_BY_SET:
            kind = _KIND_BY_SET[anc]
            break
    derived = None
    if graph.schema.has_rel_set("Derived From"):
        rels = graph.incident(ident, "Derived From", role="derived")
        if rels:
            derived = rels[0].bindings["source"]
    return AlgorithmRecord(ident, ent.attrs["name"], kind, derived)


def authoring_tool_record(graph: ModelGraph, ident: str) -> AuthoringToolRecord:
    ent = graph.entity(ident)
    return AuthoringToolRecord(ent.attrs.get("name", ""), ent.attrs.get("model"),
                               ent.attrs.get("software_specifications"))
