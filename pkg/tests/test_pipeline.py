from pathlib import Path

import numpy as np

from flsmodel import (ANIMATION, CORE, MRI, FlsSpec, FrameSequence, Keyframe, ModelGraph,
                      PointSet, add_keyframe, compile_model, ingest_scan, read_voxels, validate)
from flsmodel.pipeline import fls_indices, object_frames, resample
from helpers import random_points

DATA = Path(__file__).parent / "data"
SPEC = FlsSpec(1.0, 10.0, 1.0, 1.0)


def test_compile_links_every_object(rng):
    g = ModelGraph(CORE)
    a = g.create_entity("Objects", {"name": "a", "geometry": "a"})
    b = g.create_entity("Objects", {"name": "b", "geometry": "b"})
    g.geometry_store["a"] = FrameSequence(24, [random_points(rng, 3), random_points(rng, 4)])
    g.geometry_store["b"] = random_points(rng, 2)
    assert not validate(g).ok
    res = compile_model(g, SPEC, 24, source="out.flsp")
    assert validate(g).ok
    assert res.paths.fls_count == 6
    assert fls_indices(g, a) == [0, 1, 2, 3] and fls_indices(g, b) == [4, 5]
    fp = g.relationships_of("Flight Paths")[0]
    assert fp.attrs["source"] == "out.flsp"
    assert [e.attrs["name"] for e in g.entities_of("Algorithms")] == ["pathgen.exact"]


def test_recompile_replaces_fls_records(rng):
    g = ModelGraph(CORE)
    g.create_entity("Objects", {"name": "a", "geometry": "a"})
    g.geometry_store["a"] = random_points(rng, 3)
    compile_model(g, SPEC, 24)
    compile_model(g, SPEC, 24)
    assert len(g.entities_of("FLSs")) == 3
    assert len(g.relationships_of("Flight Paths")) == 3
    assert len(g.entities_of("Algorithms")) == 1
    assert validate(g).ok


def test_parent_without_geometry_flies_with_parts(rng):
    g = ModelGraph(CORE)
    rose = g.create_entity("Objects", {"name": "rose"})
    petal = g.create_entity("Objects", {"name": "petal", "geometry": "p"})
    g.geometry_store["p"] = random_points(rng, 2)
    g.link("Consists-Of", {"parent": rose, "child": petal})
    lonely = g.create_entity("Objects", {"name": "idea"})
    res = compile_model(g, SPEC, 24)
    assert fls_indices(g, rose) == fls_indices(g, petal) == [0, 1]
    assert res.skipped == [lonely]
    report = validate(g)
    assert [v.target for v in report.violations] == [lonely]


def test_resample_holds_frames(rng):
    seq = FrameSequence(24, [random_points(rng, 1) for _ in range(12)])
    half = resample(seq, 12)
    assert len(half.frames) == 6
    assert all(h == seq.frames[2 * k] for k, h in enumerate(half.frames))
    assert resample(seq, 24) is seq


def test_keyframed_object_frames():
    g = ModelGraph(ANIMATION)
    obj = g.create_entity("Objects", {"name": "petal", "geometry": "p"})
    g.geometry_store["p"] = PointSet(np.zeros((2, 3)))
    add_keyframe(g, obj, Keyframe(0.0, 2.0), "position.h")
    add_keyframe(g, obj, Keyframe(1.0, 0.0), "position.h")
    seq = object_frames(g, obj, 4)
    assert len(seq.frames) == 5
    assert [f.coords[0, 1] for f in seq.frames] == [2.0, 1.5, 1.0, 0.5, 0.0]


def test_frames_file_geometry_relative_to_model_dir():
    g = ModelGraph(CORE)
    g.base_dir = str(DATA)
    obj = g.create_entity("Objects", {"name": "petal", "geometry": "petal.frames"})
    seq = object_frames(g, obj, 24)
    assert len(seq.frames) == 12 and len(seq.frames[0]) == 6


def test_mri_scan_compiles_and_validates():
    g = ModelGraph(MRI)
    res = ingest_scan(g, read_voxels(DATA / "scan.vox"), {"name": "p"}, {"name": "mri"}, 0.5)
    assert len(res.organs) == 3
    out = compile_model(g, SPEC, 24)
    assert out.paths.fls_count == 4
    assert validate(g).ok
