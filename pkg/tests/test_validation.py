import itertools

import pytest

from flsmodel import CORE, MRI, ModelGraph, validate
from helpers import object_with_path


def test_missing_flight_path_flagged_then_cleared(core_graph):
    obj = core_graph.create_entity("Objects", {"name": "petal"})
    report = validate(core_graph)
    assert not report.ok
    assert report.violations[0].message.startswith(
        "total participation: Objects⇄Flight Paths")
    fls = core_graph.create_entity("FLSs", {"nu": 1.0, "beta": 1.0, "force_n": 0.0, "omega": 1.0})
    alg = core_graph.create_entity("Algorithms", {"name": "pathgen.exact"})
    core_graph.link("Flight Paths", {"object": obj, "fls": fls, "algorithm": alg})
    assert validate(core_graph).ok


def test_object_without_noise_is_valid(core_graph):
    object_with_path(core_graph, "quiet")
    assert validate(core_graph).ok


def test_fls_total_participation(core_graph):
    core_graph.create_entity("FLSs", {"nu": 1.0, "beta": 1.0, "force_n": 0.0, "omega": 1.0})
    assert "total-participation" in validate(core_graph).kinds()


def test_two_link_cycle(core_graph):
    a = object_with_path(core_graph, "a")
    b = object_with_path(core_graph, "b")
    core_graph.link("Consists-Of", {"parent": a, "child": b})
    core_graph.link("Consists-Of", {"parent": b, "child": a})
    report = validate(core_graph)
    assert report.kinds() == {"containment-cycle"}
    assert report.violations[0].message.startswith("containment cycle")


def _has_cycle_bruteforce(nodes, edges):
    adj = {n: [b for a, b in edges if a == n] for n in nodes}
    for start in nodes:
        stack, seen = list(adj[start]), set()
        while stack:
            n = stack.pop()
            if n == start:
                return True
            if n not in seen:
                seen.add(n)
                stack.extend(adj[n])
    return False


def test_cycle_detection_matches_dfs_oracle(rng):
    for _ in range(60):
        g = ModelGraph(CORE)
        n = int(rng.integers(2, 7))
        nodes = [object_with_path(g, f"n{i}") for i in range(n)]
        pairs = [p for p in itertools.permutations(nodes, 2)]
        picked = [pairs[i] for i in rng.permutation(len(pairs))[:int(rng.integers(0, n + 2))]]
        edges = sorted(set(picked))
        for a, b in edges:
            g.link("Consists-Of", {"parent": a, "child": b})
        expected = _has_cycle_bruteforce(nodes, edges)
        assert ("containment-cycle" in validate(g).kinds()) == expected


def test_validate_is_pure(core_graph):
    core_graph.create_entity("Objects", {"name": "a"})
    before = core_graph.snapshot()
    r1, r2 = validate(core_graph), validate(core_graph)
    assert r1.lines() == r2.lines()
    assert core_graph == before


def test_dangling_reference_from_raw_edit(core_graph):
    a = object_with_path(core_graph, "a")
    b = object_with_path(core_graph, "b")
    rid = core_graph.link("Consists-Of", {"parent": a, "child": b})
    core_graph.relationships[rid].bindings["child"] = "obj:999"
    assert "dangling" in validate(core_graph).kinds()


def test_unilluminated_is_informational():
    g = ModelGraph(MRI)
    g.create_entity("Organs", {"name": "dark", "unilluminated": True})
    report = validate(g)
    assert report.ok
    assert report.info


def test_valid_graph_has_every_object_in_flight_paths(rng):
    g = ModelGraph(CORE)
    for i in range(10):
        object_with_path(g, f"o{i}")
    assert validate(g).ok
    for ent in g.entities_of("Objects"):
        assert g.incident(ent.id, "Flight Paths", role="object")
