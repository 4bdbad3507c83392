import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flsmodel import (ANIMATION, CORE, FCurve, Keyframe, ModelGraph, PointSet, add_keyframe,
                      eval_bezier, eval_channel, eval_linear, sample_object)
from flsmodel.errors import MissingGeometry, OutOfSegment
from flsmodel.interp import (MAX_BISECTION_STEPS, bezier_control_points, frame_count,
                             solve_bezier_u)


def test_eval_linear_examples():
    k0, k1 = Keyframe(0, 0), Keyframe(1, 10)
    assert eval_linear(k0, k1, 0.5) == 5.0
    assert eval_linear(k0, k1, 0.0) == 0.0
    assert eval_linear(k0, k1, 1.0) == 10.0
    assert eval_linear(Keyframe(2, 4), Keyframe(6, 4), 3.7) == 4.0


def test_out_of_segment():
    k0, k1 = Keyframe(0, 0), Keyframe(1, 10)
    with pytest.raises(OutOfSegment):
        eval_linear(k0, k1, 1.5)
    with pytest.raises(OutOfSegment):
        eval_bezier(k1, k0, 0.5)


def bez(t, v, hl=(0.0, 0.0), hr=(0.0, 0.0)):
    return Keyframe(t, v, "bezier", hl, hr)


def test_bezier_endpoints_exact():
    k0, k1 = bez(0.3, 1.7, hr=(0.2, 5.0)), bez(2.9, -4.1, hl=(-0.9, 3.0))
    assert eval_bezier(k0, k1, 0.3) == 1.7
    assert eval_bezier(k0, k1, 2.9) == -4.1


def test_collinear_handles_equal_linear():
    k0 = bez(0.0, 0.0, hr=(1 / 3, 1 / 3))
    k1 = bez(1.0, 1.0, hl=(-1 / 3, -1 / 3))
    for t in np.linspace(0, 1, 100):
        assert abs(eval_bezier(k0, k1, t) - eval_linear(k0, k1, t)) <= 1e-9


def test_symmetric_s_curve_midpoint():
    k0, k1 = bez(0, 0, hr=(1, 0)), bez(3, 3, hl=(-1, 0))
    assert abs(eval_bezier(k0, k1, 1.5) - 1.5) <= 1e-9 * 3


def test_handles_clamped_into_segment():
    k0, k1 = bez(0, 0, hr=(5, 1)), bez(1, 1, hl=(-5, -1))
    pts = bezier_control_points(k0, k1)
    assert pts[1, 0] == 1.0 and pts[2, 0] == 0.0
    # still time-monotone, so every t resolves
    for t in np.linspace(0, 1, 21):
        assert math.isfinite(eval_bezier(k0, k1, t))


seg = st.tuples(
    st.floats(0, 50), st.floats(0.01, 20), st.floats(-100, 100), st.floats(-100, 100),
    st.floats(0, 1), st.floats(-50, 50), st.floats(0, 1), st.floats(-50, 50), st.floats(0, 1),
)


@settings(max_examples=300, deadline=None)
@given(seg)
def test_bezier_convex_hull_and_step_bound(s):
    t0, dur, v0, v1, a, dva, b, dvb, frac = s
    t1 = t0 + dur
    if not t0 < t1:
        return
    k0 = bez(t0, v0, hr=(a * dur, dva))
    k1 = bez(t1, v1, hl=(-b * dur, dvb))
    t = min(t0 + frac * (t1 - t0), t1)
    y = eval_bezier(k0, k1, t)
    vs = bezier_control_points(k0, k1)[:, 1]
    span = max(1.0, float(np.abs(vs).max()))
    assert vs.min() - 1e-12 * span <= y <= vs.max() + 1e-12 * span
    if t0 < t < t1:
        _, steps = solve_bezier_u(k0, k1, t)
        assert steps <= MAX_BISECTION_STEPS


def test_tolerance_refinement_stays_close():
    k0, k1 = bez(0, 0, hr=(0.4, 2.0)), bez(2, 1, hl=(-0.1, -3.0))
    xs = np.linspace(0.01, 1.99, 50)
    tol = 1e-6
    # slope estimate from a fine difference of the converged curve
    ys = np.array([eval_bezier(k0, k1, x, tol=1e-13) for x in xs])
    slope = float(np.max(np.abs(np.gradient(ys, xs)))) * 2 + 1
    for x in xs:
        assert abs(eval_bezier(k0, k1, x, tol) - eval_bezier(k0, k1, x, tol / 10)) \
            <= 10 * tol * slope


def test_eval_channel_clamps_and_hits_keys():
    curve = FCurve(None, "position.h", (Keyframe(1.0, 7.0), Keyframe(2.0, 9.0)))
    assert eval_channel(curve, 0.0) == 7.0
    assert eval_channel(curve, 5.0) == 9.0
    keys = (Keyframe(0, 2.0, "bezier", (0, 0), (0.4, 0.5)),
            Keyframe(1.2, 1.6, "bezier", (-0.3, 0.2), (0.3, -0.2)),
            Keyframe(2.5, 1.7, "linear"),
            Keyframe(3.1, 0.5, "bezier", (-0.2, 0.0), (0.5, 0.0)),
            Keyframe(5.0, 0.0, "bezier", (-0.6, 0.1), (0.0, 0.0)))
    petal = FCurve(None, "position.h", keys)
    for k in keys:
        assert eval_channel(petal, k.time) == k.value


def test_mixed_curve_continuity():
    keys = (Keyframe(0.0, 0.0, "linear"),
            Keyframe(1.0, 2.0, "bezier", (-0.2, -0.1), (0.3, 0.5)),
            Keyframe(2.0, -1.0, "linear"))
    curve = FCurve(None, "scale", keys)
    for k in keys[1:2]:
        left = eval_channel(curve, k.time - 1e-6)
        right = eval_channel(curve, k.time + 1e-6)
        assert abs(left - k.value) <= 1e-4 and abs(right - k.value) <= 1e-4


def test_left_key_mode_decides():
    lin = FCurve(None, "scale", (Keyframe(0, 0, "linear"), bez(1, 1, hl=(-0.9, -0.9))))
    assert eval_channel(lin, 0.25) == 0.25


def test_frame_count():
    assert frame_count(0, 1, 24) == 25
    assert frame_count(0.4, 0.7, 10) == 4
    assert frame_count(0, 0, 24) == 1


def test_static_object_frames():
    g = ModelGraph(CORE)
    obj = g.create_entity("Objects", {"name": "o", "geometry": "mem"})
    g.geometry_store["mem"] = PointSet(np.array([[0.0, 1.0, 2.0], [3.0, 4.0, 5.0]]))
    seq = sample_object(g, obj, 24, 0.0, 1.0)
    assert len(seq.frames) == 25
    assert all(f == seq.frames[0] for f in seq.frames)


def test_position_keys_move_points():
    g = ModelGraph(ANIMATION)
    obj = g.create_entity("Objects", {"name": "o", "geometry": "mem"})
    g.geometry_store["mem"] = PointSet(np.zeros((1, 3)))
    add_keyframe(g, obj, Keyframe(0.0, 0.0), "position.h")
    add_keyframe(g, obj, Keyframe(1.0, 10.0), "position.h")
    seq = sample_object(g, obj, 2, 0.0, 1.0)
    assert [f.coords[0, 1] for f in seq.frames] == [0.0, 5.0, 10.0]


def test_scale_and_color_channels():
    g = ModelGraph(ANIMATION)
    obj = g.create_entity("Objects", {"name": "o", "geometry": "mem", "color_b": 0.25})
    g.geometry_store["mem"] = PointSet(np.array([[1.0, 1.0, 1.0]]),
                                       np.array([[0.5, 0.5, 0.5, 1.0]]))
    add_keyframe(g, obj, Keyframe(0.0, 1.0), "scale")
    add_keyframe(g, obj, Keyframe(1.0, 3.0), "scale")
    seq = sample_object(g, obj, 1, 0.0, 1.0)
    assert seq.frames[1].coords.tolist() == [[3.0, 3.0, 3.0]]
    assert seq.frames[0].colors.tolist() == [[0.5, 0.5, 0.25, 1.0]]


def test_empty_geometry():
    g = ModelGraph(CORE)
    obj = g.create_entity("Objects", {"name": "o", "geometry": "mem"})
    g.geometry_store["mem"] = PointSet()
    with pytest.raises(MissingGeometry):
        sample_object(g, obj, 24, 0.0, 1.0)
    bare = g.create_entity("Objects", {"name": "bare"})
    with pytest.raises(MissingGeometry):
        sample_object(g, bare, 24, 0.0, 1.0)


def test_fps_doubling_agrees_on_shared_times():
    g = ModelGraph(ANIMATION)
    obj = g.create_entity("Objects", {"name": "o", "geometry": "mem"})
    g.geometry_store["mem"] = PointSet(np.array([[0.1, 0.2, 0.3], [1.0, 0.0, 0.5]]))
    add_keyframe(g, obj, Keyframe(0.0, 0.0, "bezier", (0, 0), (0.3, 1.0)), "position.l")
    add_keyframe(g, obj, Keyframe(1.7, 2.0, "bezier", (-0.4, 0.3), (0, 0)), "position.l")
    add_keyframe(g, obj, Keyframe(0.5, 1.0), "scale")
    add_keyframe(g, obj, Keyframe(1.3, 0.5), "scale")
    a = sample_object(g, obj, 24, 0.0, 1.7)
    b = sample_object(g, obj, 48, 0.0, 1.7)
    for k, frame in enumerate(a.frames):
        assert np.array_equal(frame.coords, b.frames[2 * k].coords)
        assert np.array_equal(frame.colors, b.frames[2 * k].colors)
