"""
Saving models and flight paths
==============================

Models are a sorted text file; flight paths are a small binary file.
Writing what you read gives back the same bytes.
"""

import tempfile
from pathlib import Path

import numpy as np

from flsmodel import (CORE, FlsSpec, FrameSequence, ModelGraph, PointSet, compile_model,
                      read_flight_paths, read_model, write_flight_paths, write_model)

g = ModelGraph(CORE)
cup = g.create_entity("Objects", {"name": "tea cup", "geometry": "cup"})
g.geometry_store["cup"] = FrameSequence(24, [PointSet(np.eye(3)), PointSet(np.eye(3) * 0.9)])
g.annotate(cup, "note", "chipped rim\nleft side", author="sam")
result = compile_model(g, FlsSpec(1.0, 4.0, 0.5, 1.0), fps=24)

out = Path(tempfile.mkdtemp())
write_model(g, out / "cup.flsm")
write_flight_paths(result.paths, out / "cup.flsp")
print((out / "cup.flsm").read_text())
print((out / "cup.flsp").stat().st_size, "bytes of flight paths")

again = read_model(out / "cup.flsm")
write_model(again, out / "cup2.flsm")
print("model bytes equal:", (out / "cup.flsm").read_bytes() == (out / "cup2.flsm").read_bytes())
paths = read_flight_paths(out / "cup.flsp")
print("paths equal:", paths.same_paths(result.paths))
