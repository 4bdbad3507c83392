"""Compile frame sequences into per-FLS flight paths.

Consecutive frames are matched by a minimum total squared-distance
assignment, FLS trajectories are chained through those matchings, and each
FLS's per-frame samples are coalesced into segments: one segment per
distinct (coordinate, color) state, carrying every half-open interval
``[start, end)`` during which the FLS renders that state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyFrame
from .frames import FrameSequence, PointSet
from .records import DARK, ColorRGBA, Coordinate, FlsSpec

HUNGARIAN_CUTOFF = 256


@dataclass
class FlightSegment:
    intervals: list[tuple[float, float]]
    coord: Coordinate
    color: ColorRGBA


@dataclass
class FlightPathSet:
    fps: float
    fls_spec: FlsSpec | None
    paths: list[list[FlightSegment]] = field(default_factory=list)

    @property
    def fls_count(self) -> int:
        return len(self.paths)

    def same_paths(self, other: FlightPathSet) -> bool:
        """Equality ignoring the FlsSpec, which the binary file does not carry."""
        return self.fps == other.fps and self.paths == other.paths


@dataclass
class Assignment:
    """Bijection between two padded point sets.

    ``permutation[i]`` is the index in ``target`` matched to ``source[i]``.
    Padding points are dark copies appended after the real points.
    """

    permutation: np.ndarray
    total_cost: float
    source: PointSet
    target: PointSet


@dataclass
class FeasibilityReport:
    velocity_violations: list[tuple[int, int, float]]
    battery_waves: int
    max_required_speed: float
    span: float
    charging_time: float | None = None

    @property
    def ok(self) -> bool:
        return not self.velocity_violations


# -- assignment --------------------------------------------------------------

def hungarian(cost: np.ndarray) -> np.ndarray:
    """Minimum-cost assignment of rows to columns (rows <= columns).

    Shortest augmenting path with dual potentials, O(n^2 m). Returns, for
    each row, its column.
    """
    cost = np.asarray(cost, dtype=float)
    n, m = cost.shape
    if n > m:
        raise ValueError("hungarian() needs rows <= columns")
    u = np.zeros(n + 1)
    v = np.zeros(m + 1)
    match = np.zeros(m + 1, dtype=int)  # match[j] = 1-based row on column j
    way = np.zeros(m + 1, dtype=int)
    for i in range(1, n + 1):
        match[0] = i
        j0 = 0
        minv = np.full(m + 1, np.inf)
        used = np.zeros(m + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = match[j0]
            free = ~used[1:]
            reduced = cost[i0 - 1] - u[i0] - v[1:]
            better = free & (reduced < minv[1:])
            minv[1:][better] = reduced[better]
            way[1:][better] = j0
            masked = np.where(free, minv[1:], np.inf)
            j1 = int(np.argmin(masked)) + 1
            delta = masked[j1 - 1]
            u[match[used]] += delta
            v[used] -= delta
            minv[1:][free] -= delta
            j0 = j1
            if match[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            match[j0] = match[j1]
            j0 = j1
    rows = np.empty(n, dtype=int)
    for j in range(1, m + 1):
        if match[j]:
            rows[match[j] - 1] = j - 1
    return rows


def greedy_match(cost: np.ndarray) -> np.ndarray:
    """Repeatedly take the globally cheapest remaining pair; ties by (row, col)."""
    cost = np.asarray(cost, dtype=float)
    n, m = cost.shape
    order = np.argsort(cost, axis=None, kind="stable")
    rows = np.full(n, -1, dtype=int)
    col_used = np.zeros(m, dtype=bool)
    left = n
    for flat in order:
        i, j = divmod(int(flat), m)
        if rows[i] < 0 and not col_used[j]:
            rows[i] = j
            col_used[j] = True
            left -= 1
            if left == 0:
                break
    return rows


def _sqdist(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    diff = a[:, None, :] - b[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def _solve(cost: np.ndarray, method: str) -> np.ndarray:
    if method == "exact":
        return hungarian(cost)
    if method == "greedy":
        return greedy_match(cost)
    raise ValueError(f"method must be exact|greedy, got {method!r}")


def assign(a: PointSet, b: PointSet, method: str = "exact") -> Assignment:
    """Match two point sets minimising the total squared distance.

    When sizes differ the smaller side is padded with dark points; a pad
    matched to a point ``q`` of the larger side sits at the position of the
    smaller side's point nearest to ``q`` and costs that squared distance.
    """
    if len(a) == 0 or len(b) == 0:
        raise EmptyFrame("cannot assign an empty point set")
    na, nb = len(a), len(b)
    d = _sqdist(a.coords, b.coords)
    n = max(na, nb)
    cost = np.empty((n, n))
    cost[:na, :nb] = d
    if na < nb:
        cost[na:, :] = d.min(axis=0)[None, :]
    elif nb < na:
        cost[:, nb:] = d.min(axis=1)[:, None]
    perm = _solve(cost, method)

    src_coords, src_colors = a.coords, a.colors
    dst_coords, dst_colors = b.coords, b.colors
    if na < nb:
        # pad j (row na + r) is matched to target perm[na + r]; it starts at the
        # source point nearest that target
        pads = [int(np.argmin(d[:, perm[r]])) for r in range(na, n)]
        src_coords = np.vstack([a.coords, a.coords[pads]])
        src_colors = np.vstack([a.colors, np.tile(DARK, (n - na, 1))])
    elif nb < na:
        inv = np.empty(n, dtype=int)
        inv[perm] = np.arange(n)
        pads = [int(np.argmin(d[inv[c], :])) for c in range(nb, n)]
        dst_coords = np.vstack([b.coords, b.coords[pads]])
        dst_colors = np.vstack([b.colors, np.tile(DARK, (n - nb, 1))])
    total = math.fsum(float(cost[i, perm[i]]) for i in range(n))
    return Assignment(perm, total, PointSet(src_coords, src_colors),
                      PointSet(dst_coords, dst_colors))


# -- coalescing --------------------------------------------------------------

def _state_key(coord, color) -> tuple:
    return tuple(float(x) for x in coord) + tuple(float(x) for x in color)


def coalesce_intervals(samples, fps: float, eps_c: float = 0.0,
                       eps_k: float = 0.0) -> list[FlightSegment]:
    """Group time-sorted ``(t, coord, color)`` samples into segments.

    A sample joins the first segment whose state is within ``eps_c`` meters
    (Euclidean) and ``eps_k`` per color channel; each sample covers
    ``[t, t + 1/fps)`` and touching intervals merge.
    """
    dt = 1.0 / fps
    touch = 1e-9 * dt
    segments: list[FlightSegment] = []
    exact: dict[tuple, FlightSegment] = {}
    for t, coord, color in samples:
        t = float(t)
        coord = Coordinate(*map(float, coord))
        color = ColorRGBA(*map(float, color))
        seg = None
        if eps_c == 0 and eps_k == 0:
            seg = exact.get(_state_key(coord, color))
        else:
            for s in segments:
                if (math.dist(s.coord, coord) <= eps_c
                        and max(abs(x - y) for x, y in zip(s.color, color)) <= eps_k):
                    seg = s
                    break
        if seg is None:
            seg = FlightSegment([(t, t + dt)], coord, color)
            segments.append(seg)
            exact[_state_key(coord, color)] = seg
            continue
        start, end = seg.intervals[-1]
        if abs(end - t) <= touch:
            seg.intervals[-1] = (start, t + dt)
        elif t >= end:
            seg.intervals.append((t, t + dt))
        else:
            raise ValueError("samples must be time-sorted")
    segments.sort(key=lambda s: s.intervals[0][0])
    return segments


# -- compilation -------------------------------------------------------------

def chain_frames(frames: FrameSequence, method: str = "exact",
                 cutoff: int = HUNGARIAN_CUTOFF) -> list[PointSet]:
    """Per-frame FLS states; row ``i`` of every returned set is FLS ``i``.

    FLSs introduced by padding at frame ``k`` sit dark at their birth
    position in all earlier frames. ``exact`` falls back to ``greedy`` above
    ``cutoff`` points.
    """
    if not frames.frames:
        raise EmptyFrame("frame sequence has no frames")
    for k, f in enumerate(frames.frames):
        if len(f) == 0:
            raise EmptyFrame(f"frame {k} is empty")
    first = frames.frames[0]
    coords = [first.coords]
    colors = [first.colors]
    for k in range(1, len(frames.frames)):
        nxt = frames.frames[k]
        prev = PointSet(coords[-1], colors[-1])
        m = method
        if m == "exact" and max(len(prev), len(nxt)) > cutoff:
            m = "greedy"
        asg = assign(prev, nxt, m)
        born = len(asg.source) - len(prev)
        if born:
            # every earlier state has len(prev) rows; extend them all alike
            new_c = asg.source.coords[len(prev):]
            new_k = np.tile(DARK, (born, 1))
            coords = [np.vstack([c, new_c]) for c in coords]
            colors = [np.vstack([c, new_k]) for c in colors]
        coords.append(asg.target.coords[asg.permutation])
        colors.append(asg.target.colors[asg.permutation])
    return [PointSet(c, k) for c, k in zip(coords, colors)]


def compile_flight_paths(frames: FrameSequence, spec: FlsSpec | None, method: str = "exact",
                         eps_c: float = 0.0, eps_k: float = 0.0,
                         cutoff: int = HUNGARIAN_CUTOFF) -> FlightPathSet:
    states = chain_frames(frames, method, cutoff)
    times = [frames.time_of(k) for k in range(len(states))]
    paths = []
    for i in range(len(states[0])):
        samples = [(t, st.coords[i], st.colors[i]) for t, st in zip(times, states)]
        paths.append(coalesce_intervals(samples, frames.fps, eps_c, eps_k))
    return FlightPathSet(frames.fps, spec, paths)


def merge_path_sets(sets: list[FlightPathSet]) -> FlightPathSet:
    """Concatenate FLSs of several compiled objects (same fps)."""
    if not sets:
        raise EmptyFrame("nothing to merge")
    fps = sets[0].fps
    if any(s.fps != fps for s in sets):
        raise ValueError("cannot merge flight paths with different fps")
    paths = [p for s in sets for p in s.paths]
    return FlightPathSet(fps, sets[0].fls_spec, paths)


# -- reading compiled paths back ---------------------------------------------

def _origin(paths: FlightPathSet) -> float:
    starts = [iv[0] for p in paths.paths for seg in p for iv in seg.intervals]
    return min(starts) if starts else 0.0


def _span_end(paths: FlightPathSet) -> float:
    ends = [iv[1] for p in paths.paths for seg in p for iv in seg.intervals]
    return max(ends) if ends else 0.0


def fls_samples(paths: FlightPathSet, i: int, origin: float | None = None):
    """Frame-indexed samples ``(k, coord, color)`` of FLS ``i``, sorted by ``k``."""
    if origin is None:
        origin = _origin(paths)
    out = []
    for seg in paths.paths[i]:
        for s, e in seg.intervals:
            k0 = round((s - origin) * paths.fps)
            count = max(1, round((e - s) * paths.fps))
            out.extend((k0 + c, seg.coord, seg.color) for c in range(count))
    out.sort(key=lambda x: x[0])
    return out


def reconstruct_frames(paths: FlightPathSet) -> list[PointSet]:
    """Per-frame point sets (FLS order) recovered by sampling every segment."""
    origin = _origin(paths)
    n_frames = round((_span_end(paths) - origin) * paths.fps)
    rows: list[list] = [[] for _ in range(n_frames)]
    for i in range(paths.fls_count):
        for k, coord, color in fls_samples(paths, i, origin):
            if 0 <= k < n_frames:
                rows[k].append((*coord, *color))
    out = []
    for r in rows:
        arr = np.array(r, dtype=float).reshape(-1, 7)
        out.append(PointSet(arr[:, :3], arr[:, 3:]))
    return out


def state_at(paths: FlightPathSet, i: int, t: float) -> FlightSegment | None:
    """The segment FLS ``i`` renders at time ``t`` (half-open intervals)."""
    for seg in paths.paths[i]:
        for s, e in seg.intervals:
            if s <= t < e:
                return seg
    return None


def check_feasibility(paths: FlightPathSet, spec: FlsSpec | None = None) -> FeasibilityReport:
    """Speed each FLS needs between consecutive samples, against ``spec.nu``.

    Advisory only; also reports how many battery waves (``ceil(span / beta)``)
    the display time needs.
    """
    spec = spec or paths.fls_spec
    if spec is None:
        raise ValueError("check_feasibility needs an FlsSpec")
    origin = _origin(paths)
    violations = []
    top = 0.0
    for i in range(paths.fls_count):
        samples = fls_samples(paths, i, origin)
        for (ka, ca, _), (kb, cb, _) in zip(samples, samples[1:]):
            steps = kb - ka
            if steps <= 0:
                continue
            speed = math.dist(ca, cb) * paths.fps / steps
            top = max(top, speed)
            if speed > spec.nu:
                violations.append((i, kb, speed))
    span = _span_end(paths) - origin
    waves = math.ceil(span / spec.beta - 1e-9) if span > 0 else 0
    return FeasibilityReport(violations, waves, top, span, spec.omega)


def summarize(paths: FlightPathSet) -> dict:
    per = [(len(p), sum(len(s.intervals) for s in p)) for p in paths.paths]
    return {
        "fps": paths.fps,
        "fls_count": paths.fls_count,
        "segment_count": sum(a for a, _ in per),
        "interval_count": sum(b for _, b in per),
        "span_start": _origin(paths),
        "span_end": _span_end(paths),
        "per_fls": per,
    }


def lit_time(paths: FlightPathSet) -> float:
    """Total interval length over segments with alpha > 0."""
    return math.fsum(e - s for p in paths.paths for seg in p if seg.color.a > 0
                     for s, e in seg.intervals)
