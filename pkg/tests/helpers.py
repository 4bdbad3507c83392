"""Shared builders and independent oracles for the tests."""

from __future__ import annotations

import itertools
import math

import numpy as np

from flsmodel import CORE, FlsSpec, FrameSequence, ModelGraph, PointSet


def point_set(points, colors=None) -> PointSet:
    coords = np.array(points, dtype=float).reshape(-1, 3)
    if colors is None:
        return PointSet(coords)
    return PointSet(coords, np.array(colors, dtype=float).reshape(-1, 4))


def random_points(rng, n, lit=True, grid=None) -> PointSet:
    if grid:
        coords = rng.integers(0, grid, size=(n, 3)) / grid
    else:
        coords = rng.uniform(-1, 1, size=(n, 3))
    colors = rng.integers(0, 256, size=(n, 4)) / 255.0
    if lit:
        colors[:, 3] = rng.integers(1, 256, size=n) / 255.0
    return PointSet(coords, colors)


def brute_force_min(cost: np.ndarray) -> float:
    n = cost.shape[0]
    return min(math.fsum(cost[i, p[i]] for i in range(n))
               for p in itertools.permutations(range(n)))


def flood_fill(mask: np.ndarray) -> list[set[tuple[int, int, int]]]:
    """6-connected components of a boolean [i, j, k] array, ordered by x-fastest linear index."""
    nx, ny, nz = mask.shape
    seen = np.zeros_like(mask, dtype=bool)
    comps = []
    for k in range(nz):
        for j in range(ny):
            for i in range(nx):
                if not mask[i, j, k] or seen[i, j, k]:
                    continue
                comp = set()
                stack = [(i, j, k)]
                seen[i, j, k] = True
                while stack:
                    a, b, c = stack.pop()
                    comp.add((a, b, c))
                    for da, db, dc in ((1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0),
                                       (0, 0, 1), (0, 0, -1)):
                        p = (a + da, b + db, c + dc)
                        if (0 <= p[0] < nx and 0 <= p[1] < ny and 0 <= p[2] < nz
                                and mask[p] and not seen[p]):
                            seen[p] = True
                            stack.append(p)
                comps.append(comp)
    return comps


def dfs_reachable(adj: dict, start) -> set:
    seen, stack = set(), list(adj.get(start, ()))
    while stack:
        n = stack.pop()
        if n not in seen:
            seen.add(n)
            stack.extend(adj.get(n, ()))
    return seen


def bfs_levels(adj: dict, start, key=None) -> list:
    """Breadth-first order with each level sorted by ``key``."""
    seen = {start}
    out, level = [], [start]
    while level:
        nxt = sorted({c for n in level for c in adj.get(n, ()) if c not in seen}, key=key)
        seen.update(nxt)
        out.extend(nxt)
        level = nxt
    return out


def line_scan_coalesce(samples, fps):
    """Reference coalescing: one dict per exact state, merging touching intervals."""
    dt = 1.0 / fps
    states: dict = {}
    order = []
    for t, c, k in samples:
        key = tuple(map(float, c)) + tuple(map(float, k))
        if key not in states:
            states[key] = []
            order.append(key)
        ivs = states[key]
        if ivs and abs(ivs[-1][1] - t) <= 1e-9 * dt:
            ivs[-1] = (ivs[-1][0], t + dt)
        else:
            ivs.append((t, t + dt))
    return [(key, states[key]) for key in order]


def object_with_path(graph: ModelGraph, name: str, spec: FlsSpec | None = None) -> str:
    """An Objects entity already linked to one FLS through Flight Paths."""
    spec = spec or FlsSpec(1.0, 4.0, 1.0, 1.0)
    obj = graph.create_entity(graph.resolve_set("Objects"), {"name": name})
    fls = graph.create_entity("FLSs", spec.as_attrs())
    alg = graph.create_entity(graph.resolve_set("Algorithms"), {"name": "pathgen.exact"})
    graph.link("Flight Paths", {"object": obj, "fls": fls, "algorithm": alg},
               {"interval": [(0.0, 1.0)]})
    return obj


def random_dag(rng, n: int, p: float) -> dict[int, list[int]]:
    adj: dict[int, list[int]] = {i: [] for i in range(n)}
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                adj[i].append(j)
    return adj


def dag_graph(adj: dict[int, list[int]], rng=None) -> tuple[ModelGraph, dict[int, str]]:
    """Core graph whose Objects form ``adj`` via Consists-Of; ids assigned in shuffled order."""
    g = ModelGraph(CORE)
    nodes = list(adj)
    if rng is not None:
        rng.shuffle(nodes)
    ids = {n: g.create_entity("Objects", {"name": f"n{n}"}) for n in nodes}
    for a, children in adj.items():
        for b in children:
            g.link("Consists-Of", {"parent": ids[a], "child": ids[b]})
    return g, ids


def frames(fps, *point_sets, t0=0.0) -> FrameSequence:
    return FrameSequence(fps, list(point_sets), t0)


__all__ = ["point_set", "random_points", "brute_force_min", "flood_fill", "dfs_reachable",
           "bfs_levels", "line_scan_coalesce", "object_with_path", "random_dag", "dag_graph",
           "frames", "random_model_graph", "random_path_set"]


_TEXTS = ["petal", "a b", 'quote"d', "back\\slash", "tab\there", "line\nbreak", "",
          "eq=sign", "ünïcödé", "sep x", "#hash", "-"]


def random_model_graph(rng) -> ModelGraph:
    """A messy graph over one of the built-in schemas: odd text, deletions, annotations."""
    from flsmodel import ANIMATION, MRI, Keyframe, add_keyframe

    schema = [CORE, ANIMATION, MRI][int(rng.integers(0, 3))]
    g = ModelGraph(schema)
    objects = schema.resolve("Objects")

    def text():
        return _TEXTS[int(rng.integers(0, len(_TEXTS)))] + str(int(rng.integers(0, 9)))

    objs = []
    for _ in range(int(rng.integers(0, 7))):
        attrs = {"name": text(), "pos_l": float(rng.normal()) / 3.0}
        if schema is MRI:
            attrs["disease"] = list(dict.fromkeys(text() for _ in range(int(rng.integers(0, 3)))))
            attrs["size"] = int(rng.integers(1, 100))
        objs.append(g.create_entity(objects, attrs))
    algs = [g.create_entity(schema.resolve("Algorithms"), {"name": text()})
            for _ in range(int(rng.integers(1, 3)))]
    for obj in objs:
        for _ in range(int(rng.integers(0, 3))):
            fls = g.create_entity("FLSs", {"nu": float(rng.uniform(0.1, 5)), "beta": 60.0,
                                           "force_n": 0.0, "omega": 1.0 / 3.0,
                                           "fls_index": int(rng.integers(0, 50))})
            ivs = [(float(a), float(a) + float(rng.uniform(0.01, 1)))
                   for a in rng.uniform(0, 10, size=int(rng.integers(0, 4)))]
            if ivs and rng.random() < 0.3:
                ivs.append(ivs[0])
            g.link("Flight Paths", {"object": obj, "fls": fls,
                                    "algorithm": algs[int(rng.integers(0, len(algs)))]},
                   {"interval": ivs})
    for a, b in zip(objs, objs[1:]):
        if rng.random() < 0.5:
            g.link("Consists-Of", {"parent": a, "child": b})
        if rng.random() < 0.3:
            g.link("Interactions", {"source": a, "target": b},
                   {"start": 0.1, "end": 2.5, "description": text()})
    if objs and rng.random() < 0.5:
        snd = g.create_entity("Acoustics", {"sound_id": text(), "pitch": 440.0, "mood": text()})
        g.link("Make Noise", {"object": objs[0], "acoustic": snd}, {"trigger": text()})
    if schema is ANIMATION and objs:
        for t in rng.uniform(0, 5, size=int(rng.integers(0, 4))):
            add_keyframe(g, objs[-1], Keyframe(float(t), float(rng.normal()), "bezier",
                                               (-0.1, 0.3), (0.2, -1 / 7)), "position.h",
                         replace=True)
    for obj in objs:
        if rng.random() < 0.4:
            g.annotate(obj, "note", text(), text(), created_at="2024-05-01T12:00:00+00:00")
    if objs and rng.random() < 0.4:
        g.delete_entity(objs[int(rng.integers(0, len(objs)))], cascade=True)
    return g


def random_path_set(rng):
    from flsmodel import FlightPathSet, FlightSegment
    from flsmodel.records import ColorRGBA, Coordinate

    paths = []
    for _ in range(int(rng.integers(0, 5))):
        segs = []
        for _ in range(int(rng.integers(0, 4))):
            starts = np.sort(rng.uniform(0, 10, size=int(rng.integers(0, 4))))
            ivs = [(float(s), float(s) + float(rng.uniform(1e-3, 0.5))) for s in starts]
            segs.append(FlightSegment(ivs, Coordinate(*map(float, rng.normal(size=3))),
                                      ColorRGBA(*(rng.integers(0, 256, size=4) / 255.0))))
        paths.append(segs)
    return FlightPathSet(float(rng.choice([24.0, 30.0, 12.5])), None, paths)


def cube_corners(lo=0.0, hi=1.0):
    return np.array([[x, y, z] for x in (lo, hi) for y in (lo, hi) for z in (lo, hi)])


def closet_model():
    g = ModelGraph(CORE)
    shapes = {
        "closet": cube_corners(),
        "cat": np.array([[0.5, 0.5, 0.5]]),
        "ball": np.array([[0.0, 0.5, 0.5]]),
        "shelf": np.array([[0.5, 0.2, 0.5]]),
        "far": np.array([[3.0, 3.0, 3.0]]),
    }
    ids = {}
    for name, pts in shapes.items():
        ids[name] = g.create_entity("Objects", {"name": name, "geometry": name})
        g.geometry_store[name] = PointSet(pts)
    g.link("Consists-Of", {"parent": ids["closet"], "child": ids["shelf"]})
    return g, ids
