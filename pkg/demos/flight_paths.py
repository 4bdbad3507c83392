"""
From frames to flight paths
===========================

Consecutive frames are matched point to point, then each FLS's samples
are folded into segments. A hummingbird beating its wings between two
poses needs only two states per FLS, each lit in several intervals.
"""

import numpy as np

from flsmodel import (FlsSpec, FrameSequence, PointSet, check_feasibility,
                      compile_flight_paths, lit_time, reconstruct_frames, summarize)

red = np.array([[1.0, 0.0, 0.0, 1.0]] * 3)
up = PointSet(np.array([[0.0, 0.0, 0.0], [0.1, 0.3, 0.0], [-0.1, 0.3, 0.0]]), red)
down = PointSet(np.array([[0.0, 0.0, 0.0], [0.1, 0.2, 0.0], [-0.1, 0.2, 0.0]]), red)

spec = FlsSpec(nu=1.0, beta=4.0, force_n=0.5, omega=1.0)
seq = FrameSequence(24, [up, down] * 6)
paths = compile_flight_paths(seq, spec)

for i, path in enumerate(paths.paths):
    for seg in path:
        print(f"fls {i} at {tuple(seg.coord)}: {len(seg.intervals)} intervals")

print(summarize(paths))
print("lit time", lit_time(paths), "=", sum(len(f.lit()) for f in seq.frames) / 24)
assert all(a == b for a, b in zip(reconstruct_frames(paths), seq.frames))

# wings move 0.1 m per frame, far past 1 m/s at 24 fps
report = check_feasibility(paths)
print("max speed needed", report.max_required_speed, "violations", len(report.velocity_violations))
print("battery waves", report.battery_waves)

# exact matching keeps travel low; greedy can only do worse
rng = np.random.default_rng(3)
a = PointSet(rng.uniform(0, 1, (6, 3)))
b = PointSet(rng.uniform(0, 1, (6, 3)))
for method in ("exact", "greedy"):
    p = compile_flight_paths(FrameSequence(24, [a, b]), spec, method)
    print(method, check_feasibility(p).max_required_speed)
