"""
Keyframed motion
================

An object with one frame of geometry gets moved by f-curves. Each channel
is a list of keyframes; the left key's mode picks linear or Bezier.
"""

import numpy as np

from flsmodel import ANIMATION, Keyframe, ModelGraph, PointSet, add_keyframe, sample_object
from flsmodel import channel_of, eval_channel

g = ModelGraph(ANIMATION)
leaf = g.create_entity("Objects", {"name": "leaf", "geometry": "leaf"})
g.geometry_store["leaf"] = PointSet(np.array([[0.0, 1.0, 0.0], [0.02, 1.0, 0.0]]))

# fall one meter with an ease-in, ease-out Bezier
add_keyframe(g, leaf, Keyframe(0.0, 0.0, "bezier", handle_right=(0.5, 0.0)), "position.h")
add_keyframe(g, leaf, Keyframe(2.0, -1.0, "bezier", handle_left=(-0.5, 0.0)), "position.h")
# and fade out over the last second
add_keyframe(g, leaf, Keyframe(1.0, 1.0), "color.a")
add_keyframe(g, leaf, Keyframe(2.0, 0.0), "color.a")

curve = channel_of(g, leaf, "position.h")
for t in (0.0, 0.5, 1.0, 1.5, 2.0):
    print(f"t={t:.1f}  dh={eval_channel(curve, t):+.4f}")

seq = sample_object(g, leaf, fps=4, t_start=0.0, t_end=2.0)
print(len(seq.frames), "frames")
for k, f in enumerate(seq.frames):
    print(k, f.coords[0].round(4), "alpha", round(float(f.colors[0, 3]), 3))
