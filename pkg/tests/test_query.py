import numpy as np
import pytest

from flsmodel import (CORE, MRI, FlsSpec, ModelGraph, PointSet, annotate, compile_model,
                      contained_at, find_by_annotation, hidden_in, interactions_during,
                      organs_with_disease, parts_of, triggered_sounds)
from flsmodel.errors import NotCompiled, SchemaMismatch, UnknownId
from flsmodel.graph import id_number
from helpers import bfs_levels, closet_model, dag_graph, dfs_reachable, random_dag


def test_direct_parts():
    g = ModelGraph(CORE)
    rose = g.create_entity("Objects", {"name": "rose"})
    stem = g.create_entity("Objects", {"name": "stem"})
    petal = g.create_entity("Objects", {"name": "petal"})
    g.link("Consists-Of", {"parent": rose, "child": stem})
    g.link("Consists-Of", {"parent": rose, "child": petal})
    assert parts_of(g, rose) == [stem, petal]
    with pytest.raises(UnknownId):
        parts_of(g, "obj:99")


def test_chain_closure():
    g, ids = dag_graph({0: [1], 1: [2], 2: []})
    assert parts_of(g, ids[0], transitive=True) == [ids[1], ids[2]]
    assert parts_of(g, ids[0]) == [ids[1]]


def test_closure_equals_dfs_on_random_dags(rng):
    for _ in range(20):
        n = int(rng.integers(2, 40))
        adj = random_dag(rng, n, float(rng.uniform(0.02, 0.3)))
        g, ids = dag_graph(adj, rng)
        by_id = {ids[a]: [ids[b] for b in bs] for a, bs in adj.items()}
        for node in adj:
            got = parts_of(g, ids[node], transitive=True)
            assert set(got) == dfs_reachable(by_id, ids[node])
            assert got == bfs_levels(by_id, ids[node], key=id_number)


@pytest.fixture
def pair():
    g = ModelGraph(CORE)
    a = g.create_entity("Objects", {"name": "a"})
    b = g.create_entity("Objects", {"name": "b"})
    return g, a, b


def test_interaction_windows(pair):
    g, a, b = pair
    rid = g.link("Interactions", {"source": a, "target": b},
                 {"start": 2.0, "end": 5.0, "interaction_id": "x1", "description": "chase"})
    assert [r.id for r in interactions_during(g, a, 4, 6)] == [rid]
    assert interactions_during(g, a, 5.1, 6) == []
    assert interactions_during(g, b, 5.0, 6) == []
    assert [r.id for r in interactions_during(g, b, 2, 5)] == [rid]
    assert [r.id for r in interactions_during(g, b, 4.9, 4.9)] == [rid]
    assert interactions_during(g, b, 5.0, 5.0) == []
    rec = interactions_during(g, a, 0, 10)[0]
    assert (rec.source, rec.target, rec.description) == (a, b, "chase")
    with pytest.raises(ValueError):
        interactions_during(g, a, 3, 1)


def test_contained_at_half_open():
    g = ModelGraph(CORE)
    room = g.create_entity("Subject", {"name": "room"})
    cat = g.create_entity("Objects", {"name": "cat"})
    dog = g.create_entity("Objects", {"name": "dog"})
    g.link("Contains", {"subject": room, "object": cat}, {"enter": 0.0, "exit": 10.0})
    g.link("Contains", {"subject": room, "object": dog}, {"enter": 3.0})
    assert contained_at(g, room, 5) == [cat, dog]
    assert contained_at(g, room, 10) == [dog]
    assert contained_at(g, room, 0) == [cat]
    empty = g.create_entity("Subject", {"name": "empty"})
    assert contained_at(g, empty, 1) == []
    with pytest.raises(UnknownId):
        contained_at(g, "subj:99", 1)


def test_closet_query():
    g, ids = closet_model()
    result = compile_model(g, FlsSpec(1.0, 10.0, 1.0, 1.0), 24)
    assert hidden_in(g, result.paths, ids["closet"], 0.0) == [ids["cat"]]
    # outside the compiled span nothing is lit
    with pytest.raises(NotCompiled):
        hidden_in(g, result.paths, ids["closet"], 5.0)


def test_hidden_in_needs_compilation():
    g, ids = closet_model()
    from flsmodel import FlightPathSet
    with pytest.raises(NotCompiled):
        hidden_in(g, FlightPathSet(24, None, []), ids["closet"], 0.0)
    with pytest.raises(UnknownId):
        hidden_in(g, FlightPathSet(24, None, []), "obj:99", 0.0)


def test_annotation_queries():
    g = ModelGraph(MRI)
    o1 = g.create_entity("Organs", {"name": "brain"})
    o3 = g.create_entity("Organs", {"name": "lung"})
    annotate(g, o3, "disease", "glioma", "dr")
    annotate(g, o1, "disease", "edema", "dr")
    assert find_by_annotation(g, "disease", "glioma") == [o3]
    assert find_by_annotation(g, "disease") == [o1, o3]
    assert find_by_annotation(g, "nonexistent") == []
    with pytest.raises(UnknownId):
        annotate(g, "organ:99", "k", "v")


def test_organs_with_disease():
    g = ModelGraph(MRI)
    a = g.create_entity("Organs", {"name": "a", "disease": ["glioma", "edema"]})
    g.create_entity("Organs", {"name": "b", "disease": []})
    assert organs_with_disease(g, "edema") == [a]
    assert organs_with_disease(g, "Edema") == []
    with pytest.raises(SchemaMismatch):
        organs_with_disease(ModelGraph(CORE), "edema")


def test_triggered_sounds():
    g = ModelGraph(CORE)
    dog = g.create_entity("Objects", {"name": "dog"})
    bark = g.create_entity("Acoustics", {"sound_id": "bark", "pitch": 300.0, "mood": "happy"})
    purr = g.create_entity("Acoustics", {"sound_id": "purr"})
    g.link("Make Noise", {"object": dog, "acoustic": bark}, {"trigger": "pat"})
    g.link("Make Noise", {"object": dog, "acoustic": purr}, {"time": 1.0})
    (rec,) = triggered_sounds(g, dog, "pat")
    assert rec.id == bark and rec.sound_id == "bark" and rec.extra == {"mood": "happy"}
    assert triggered_sounds(g, dog, "kick") == []
    with pytest.raises(UnknownId):
        triggered_sounds(g, "obj:99", "pat")


def test_queries_work_on_snapshots():
    g, ids = closet_model()
    snap = g.snapshot()
    assert parts_of(snap, ids["closet"]) == [ids["shelf"]]
