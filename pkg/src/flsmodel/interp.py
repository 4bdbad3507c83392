"""Evaluate animation curves and sample animated objects into frames."""

from __future__ import annotations

import bisect
import math
import os

import numpy as np

from .animation import FCurve, Keyframe, channel_of, has_channel_data
from .errors import MissingGeometry, OutOfSegment
from .frames import FrameSequence, PointSet
from .graph import ModelGraph

MAX_BISECTION_STEPS = 64


def _check_segment(k0: Keyframe, k1: Keyframe, t: float) -> None:
    if not k0.time < k1.time:
        raise OutOfSegment(f"segment needs k0.time < k1.time, got {k0.time}, {k1.time}")
    if not k0.time <= t <= k1.time:
        raise OutOfSegment(f"t={t} outside [{k0.time}, {k1.time}]")


def eval_linear(k0: Keyframe, k1: Keyframe, t: float) -> float:
    _check_segment(k0, k1, t)
    if t == k1.time:
        return k1.value
    return k0.value + (k1.value - k0.value) * (t - k0.time) / (k1.time - k0.time)


def bezier_control_points(k0: Keyframe, k1: Keyframe) -> np.ndarray:
    """The four (time, value) control points, handle times clamped into the segment."""
    t0, t1 = k0.time, k1.time
    p1t = min(max(t0 + k0.handle_right[0], t0), t1)
    p2t = min(max(t1 + k1.handle_left[0], t0), t1)
    return np.array([
        (t0, k0.value),
        (p1t, k0.value + k0.handle_right[1]),
        (p2t, k1.value + k1.handle_left[1]),
        (t1, k1.value),
    ])


def _cubic(c0: float, c1: float, c2: float, c3: float, u: float) -> float:
    v = 1.0 - u
    return v * v * v * c0 + 3.0 * v * v * u * c1 + 3.0 * v * u * u * c2 + u * u * u * c3


def solve_bezier_u(k0: Keyframe, k1: Keyframe, t: float, tol: float | None = None):
    """Bisect for u with ``|x(u) - t| <= tol``; returns ``(u, steps)``.

    With both inner control times inside ``[t0, t1]`` the time polynomial is
    non-decreasing in u, so bisection is well defined.
    """
    _check_segment(k0, k1, t)
    if tol is None:
        tol = 1e-9 * (k1.time - k0.time)
    (x0, _), (x1, _), (x2, _), (x3, _) = bezier_control_points(k0, k1)
    lo, hi = 0.0, 1.0
    u = 0.5
    for step in range(1, MAX_BISECTION_STEPS + 1):
        u = 0.5 * (lo + hi)
        x = _cubic(x0, x1, x2, x3, u)
        if abs(x - t) <= tol:
            return u, step
        if x < t:
            lo = u
        else:
            hi = u
    return u, MAX_BISECTION_STEPS


def eval_bezier(k0: Keyframe, k1: Keyframe, t: float, tol: float | None = None) -> float:
    _check_segment(k0, k1, t)
    if t == k0.time:
        return k0.value
    if t == k1.time:
        return k1.value
    u, _ = solve_bezier_u(k0, k1, t, tol)
    (_, y0), (_, y1), (_, y2), (_, y3) = bezier_control_points(k0, k1)
    return _cubic(y0, y1, y2, y3, u)


def eval_channel(curve: FCurve, t: float) -> float:
    """Curve value at ``t``; constant outside the keyed range."""
    keys = curve.keys
    if t <= keys[0].time:
        return keys[0].value
    if t >= keys[-1].time:
        return keys[-1].value
    i = bisect.bisect_right(curve.times, t) - 1
    k0, k1 = keys[i], keys[i + 1]
    if t == k0.time:
        return k0.value
    if k0.interp == "bezier":
        return eval_bezier(k0, k1, t)
    return eval_linear(k0, k1, t)


def frame_count(t_start: float, t_end: float, fps: float) -> int:
    # tolerate representation error such as (0.7 - 0.4) * 10 == 2.9999999999999996
    return int(math.floor((t_end - t_start) * fps + 1e-9)) + 1


def load_geometry(graph: ModelGraph, obj: str):
    """Resolve an object's ``geometry`` attribute to a PointSet or FrameSequence.

    In-memory entries in ``graph.geometry_store`` win; otherwise the value is a
    frames-file path, relative to ``graph.base_dir`` when not absolute.
    """
    from .ingest import read_frames

    ref = graph.entity(obj).attrs.get("geometry")
    if not ref:
        raise MissingGeometry(f"{obj} has no geometry")
    if ref in graph.geometry_store:
        return graph.geometry_store[ref]
    path = ref
    if not os.path.isabs(path) and graph.base_dir:
        path = os.path.join(graph.base_dir, path)
    if not os.path.exists(path):
        raise MissingGeometry(f"{obj}: geometry {ref!r} not found")
    seq = read_frames(path)
    graph.geometry_store[ref] = seq
    return seq


def _base_points(graph: ModelGraph, obj: str, geometry) -> PointSet:
    if geometry is None:
        geometry = load_geometry(graph, obj)
    if isinstance(geometry, FrameSequence):
        if not geometry.frames:
            raise MissingGeometry(f"{obj}: geometry has no frames")
        geometry = geometry.frames[0]
    if len(geometry) == 0:
        raise MissingGeometry(f"{obj}: geometry is empty")
    return geometry


def sample_object(graph: ModelGraph, obj: str, fps: float, t_start: float, t_end: float,
                  geometry: PointSet | FrameSequence | None = None) -> FrameSequence:
    """Sample the object's animated channels onto its base points.

    Frame ``k`` is at ``t_start + k / fps``; each point becomes
    ``scale * p + position`` and keyed or statically set color channels
    replace the point colors.
    """
    if not (fps > 0 and math.isfinite(fps)):
        raise ValueError(f"fps must be > 0, got {fps}")
    if t_end < t_start:
        raise ValueError("t_end must be >= t_start")
    base = _base_points(graph, obj, geometry)
    pos = [channel_of(graph, obj, c) for c in ("position.l", "position.h", "position.d")]
    scale = channel_of(graph, obj, "scale")
    colors = [(i, channel_of(graph, obj, c))
              for i, c in enumerate(("color.r", "color.g", "color.b", "color.a"))
              if has_channel_data(graph, obj, c)]
    frames = []
    for k in range(frame_count(t_start, t_end, fps)):
        t = t_start + k / fps
        offset = np.array([eval_channel(c, t) for c in pos])
        coords = eval_channel(scale, t) * base.coords + offset
        rgba = base.colors.copy()
        for i, curve in colors:
            rgba[:, i] = min(max(eval_channel(curve, t), 0.0), 1.0)
        frames.append(PointSet(coords, rgba))
    return FrameSequence(fps, frames, t_start)
