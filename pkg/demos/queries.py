"""
Asking questions of a scene
===========================

Part hierarchies, who is in a room when, and what is hidden inside
what at a given moment.
"""

import numpy as np

from flsmodel import (CORE, FlsSpec, ModelGraph, PointSet, compile_model, contained_at,
                      find_by_annotation, hidden_in, interactions_during, parts_of)

g = ModelGraph(CORE)
house = g.create_entity("Subject", {"name": "house"})
shapes = {
    "closet": np.array([[x, y, z] for x in (0, 1) for y in (0, 2) for z in (0, 1)], float),
    "shelf": np.array([[0.5, 1.0, 0.5]]),
    "cat": np.array([[0.4, 0.3, 0.6]]),
    "dog": np.array([[3.0, 0.5, 0.5]]),
}
ids = {}
for name, pts in shapes.items():
    ids[name] = g.create_entity("Objects", {"name": name, "geometry": name})
    g.geometry_store[name] = PointSet(pts)
g.link("Consists-Of", {"parent": ids["closet"], "child": ids["shelf"]})

print("closet parts:", parts_of(g, ids["closet"], transitive=True))

# the cat is home from 8 until 18; the dog arrives at noon and stays
g.link("Contains", {"subject": house, "object": ids["cat"]}, {"enter": 8.0, "exit": 18.0})
g.link("Contains", {"subject": house, "object": ids["dog"]}, {"enter": 12.0})
for t in (7.9, 8.0, 12.0, 18.0):
    print(f"home at {t}:", contained_at(g, house, t))

g.link("Interactions", {"source": ids["dog"], "target": ids["cat"]},
       {"start": 13.0, "end": 13.5, "description": "chase"})
print("cat interactions 13-14:", [r.description for r in interactions_during(g, ids["cat"], 13, 14)])

paths = compile_model(g, FlsSpec(1.0, 10.0, 0.5, 1.0), fps=24).paths
print("hidden in the closet:", hidden_in(g, paths, ids["closet"], 0.0))

g.annotate(ids["cat"], "color", "ginger", author="ana")
print("ginger things:", find_by_annotation(g, "color", "ginger"))
