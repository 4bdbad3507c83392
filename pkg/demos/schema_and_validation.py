"""
Schemas as data, validation on demand
=====================================

A model graph follows one of the built-in schemas. Nothing is checked
globally until you ask, so a half-built graph is fine to hold in memory.
"""

from flsmodel import CORE, FlsSpec, ModelGraph, validate

# the core schema lists its sets; nothing here is hard-coded in the graph
print([s.name for s in CORE.entity_sets])
print([r.name for r in CORE.relationship_sets])

g = ModelGraph(CORE)
rose = g.create_entity("Objects", {"name": "rose"})
petal = g.create_entity("Objects", {"name": "petal"})
g.link("Consists-Of", {"parent": rose, "child": petal})

# both objects still lack flight paths
report = validate(g)
for v in report.violations:
    print(v.message)

# give each object one FLS, then the graph is valid
spec = FlsSpec(nu=1.0, beta=4.0, force_n=0.5, omega=1.0)
alg = g.create_entity("Algorithms", {"name": "hand-placed"})
for obj in (rose, petal):
    fls = g.create_entity("FLSs", spec.as_attrs())
    g.link("Flight Paths", {"object": obj, "fls": fls, "algorithm": alg})
print("valid:", validate(g).ok)

# a loop in Consists-Of is legal to build but is reported
g.link("Consists-Of", {"parent": petal, "child": rose})
print(validate(g).kinds())
