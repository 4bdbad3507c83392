"""
Organs from a voxel scan
========================

Voxels at or above a threshold are grouped into face-connected regions,
one organ each. A stiffness table maps intensity to the force an FLS
must push back with.
"""

import numpy as np

from flsmodel import (MRI, FlsSpec, ModelGraph, StiffnessTable, VoxelGrid, compile_model,
                      ingest_scan, label_organs, organs_with_disease, renderable_by, validate)

vol = np.zeros((6, 6, 4))
vol[1:3, 1:3, 0:2] = 0.9     # a dense lump
vol[4, 4, 3] = 0.6           # a faint spot
vol[3, 3, 2] = 0.6           # touches the lump only at a corner
grid = VoxelGrid.from_array(vol, spacing=(0.01, 0.01, 0.02))

for organ in label_organs(grid, threshold=0.5):
    print(organ.name, organ.size, "voxels, mean", round(organ.mean_intensity, 3))

table = StiffnessTable([(0.5, 0.7, 1.0), (0.7, 1.0, 3.0)])
g = ModelGraph(MRI)
scan = ingest_scan(g, grid, {"name": "patient 7"}, {"name": "1.5T scanner"}, 0.5, table)
spec = FlsSpec(nu=1.0, beta=4.0, force_n=2.0, omega=1.0)
for organ in scan.organs:
    stiff = g.entity(organ).attrs["stiffness"]
    print(organ, "stiffness", stiff, "renderable", renderable_by(spec, stiff))

g.entity(scan.organs[0]).attrs["disease"] = ["fibroma"]
print("with fibroma:", organs_with_disease(g, "fibroma"))

compile_model(g, spec, fps=24)
print("valid after compile:", validate(g).ok)
