"""MRI scans in the model: organ labeling, stiffness lookup and scan ingestion.

Axis convention: voxel index ``i`` runs along the display's length axis
(patient left is positive), ``j`` along height and ``k`` along depth.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import OutOfBounds, ParseError, SchemaMismatch, UnmappedIntensity
from .frames import FrameSequence
from .graph import ModelGraph
from .ingest import TransferTable, VoxelGrid, VoxelSequence, parse_number, voxels_to_points
from .records import Coordinate, FlsSpec

ORGAN_ANNOTATION_ALGORITHM = "label_organs.6conn"


@dataclass
class OrganRecord:
    organ_id: int
    geometry: frozenset[tuple[int, int, int]]
    size: int
    centroid: Coordinate
    mean_intensity: float
    name: str = ""
    disease: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.name:
            self.name = f"region-{self.organ_id}"
        if self.size != len(self.geometry) or self.size < 1:
            raise ValueError("organ size must equal its voxel count and be >= 1")
        if len(set(self.disease)) != len(self.disease):
            raise ValueError("organ diseases must be unique")


@dataclass
class StiffnessTable:
    """Rows ``(lo, hi, newtons)`` sorted and non-overlapping.

    Ranges are closed; where two rows share a boundary the later row wins.
    """

    rows: list[tuple[float, float, float]]

    def __post_init__(self):
        self.rows = [(float(lo), float(hi), float(n)) for lo, hi, n in self.rows]
        for lo, hi, n in self.rows:
            if not lo <= hi:
                raise ValueError(f"stiffness row has lo > hi: {lo} {hi}")
            if n < 0:
                raise ValueError(f"stiffness must be >= 0, got {n}")
        for (_, hi, _), (lo, _, _) in zip(self.rows, self.rows[1:]):
            if lo < hi:
                raise ValueError("stiffness rows must be sorted and non-overlapping")

    def lookup(self, intensity: float) -> float:
        for lo, hi, n in reversed(self.rows):
            if lo <= intensity <= hi:
                return n
        raise UnmappedIntensity(f"no stiffness row covers intensity {intensity}")


def parse_stiffness(text: str) -> StiffnessTable:
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        toks = line.split()
        if len(toks) != 3:
            raise ParseError("expected 'lo hi newtons'", lineno)
        rows.append(tuple(parse_number(t, lineno) for t in toks))
    try:
        return StiffnessTable(rows)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def read_stiffness(path) -> StiffnessTable:
    return parse_stiffness(Path(path).read_text(encoding="utf-8"))


def label_organs(grid: VoxelGrid, threshold: float) -> list[OrganRecord]:
    """6-connected components of voxels at or above ``threshold``.

    Components are ordered by their smallest linear voxel index.
    """
    nx, ny, nz = grid.dims
    mask = grid.intensities >= threshold
    label = np.zeros(grid.size, dtype=np.int64)
    organs = []
    steps = ((1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1))
    for seed in np.flatnonzero(mask):
        if label[seed]:
            continue
        k = len(organs) + 1
        label[seed] = k
        members = []
        queue = deque([int(seed)])
        while queue:
            idx = queue.popleft()
            members.append(idx)
            i, j, kk = idx % nx, (idx // nx) % ny, idx // (nx * ny)
            for di, dj, dk in steps:
                a, b, c = i + di, j + dj, kk + dk
                if 0 <= a < nx and 0 <= b < ny and 0 <= c < nz:
                    n = a + nx * (b + ny * c)
                    if mask[n] and not label[n]:
                        label[n] = k
                        queue.append(n)
        members.sort()
        ijk = [grid.unravel(m) for m in members]
        centers = np.array([grid.center(*v) for v in ijk])
        organs.append(OrganRecord(
            organ_id=k,
            geometry=frozenset(ijk),
            size=len(members),
            centroid=Coordinate(*map(float, centers.mean(axis=0))),
            mean_intensity=float(np.mean(grid.intensities[members])),
        ))
    return organs


def voxel_at(grid: VoxelGrid, p: Coordinate) -> tuple[int, int, int]:
    idx = []
    for x, s, n in zip(p, grid.spacing, grid.dims):
        if not (math.isfinite(x) and 0 <= x < n * s):
            raise OutOfBounds(f"point {tuple(p)} lies outside the grid")
        idx.append(min(int(x // s), n - 1))
    return tuple(idx)


def stiffness_at(grid: VoxelGrid, table: StiffnessTable, p: Coordinate) -> float:
    """Stiffness (N) of the voxel containing ``p``."""
    i, j, k = voxel_at(grid, p)
    return table.lookup(float(grid.intensities[grid.linear_index(i, j, k)]))


def renderable_by(spec: FlsSpec, stiffness: float) -> bool:
    """Whether an FLS can push back with at least ``stiffness`` newtons."""
    return stiffness <= spec.force_n


@dataclass
class ScanIngest:
    patient: str
    equipment: str
    organs: list[str]
    frames: FrameSequence | None = None


def ingest_scan(graph: ModelGraph, scan: VoxelGrid | VoxelSequence, patient_attrs: dict,
                equipment_attrs: dict, threshold: float,
                table: StiffnessTable | None = None,
                transfer: TransferTable | None = None) -> ScanIngest:
    """Populate an MRI-schema graph from a structural scan or an fMRI sequence.

    Organs come from labeling the first scan. Each organ is Contains-linked
    to the patient and Occupies one coordinate/color pair per voxel. For a
    sequence the returned ``frames`` hold one frame per scan at ``1/dt`` fps.
    """
    schema = graph.schema
    for needed in ("Patient", "Medical Imaging Equipment", "Organs", "Occupies"):
        if not (schema.has_entity_set(needed) or schema.has_rel_set(needed)):
            raise SchemaMismatch(f"schema {schema.name!r} lacks {needed!r}")
    if isinstance(scan, VoxelSequence):
        grids, dt = scan.frames, scan.dt
    else:
        grids, dt = [scan], None
    grid = grids[0]
    organs = label_organs(grid, threshold)

    patient = graph.create_entity("Patient", dict(patient_attrs))
    equipment = graph.create_entity("Medical Imaging Equipment", dict(equipment_attrs))
    graph.link("Scanned-By", {"subject": patient, "device": equipment})
    if not organs:
        graph.set_attr(patient, "unilluminated", True)

    algorithm = None
    if organs:
        existing = [e.id for e in graph.entities_of("Organ Annotation")
                    if e.attrs.get("name") == ORGAN_ANNOTATION_ALGORITHM]
        algorithm = existing[0] if existing else graph.create_entity(
            "Organ Annotation", {"name": ORGAN_ANNOTATION_ALGORITHM})

    exit_time = len(grids) * dt if dt is not None else None
    organ_ids = []
    for rec in organs:
        attrs = {
            "name": rec.name,
            "size": rec.size,
            "centroid_l": rec.centroid.l,
            "centroid_h": rec.centroid.h,
            "centroid_d": rec.centroid.d,
            "mean_intensity": rec.mean_intensity,
        }
        if table is not None:
            try:
                attrs["stiffness"] = table.lookup(rec.mean_intensity)
            except UnmappedIntensity:
                pass
        oid = graph.create_entity("Organs", attrs)
        organ_ids.append(oid)
        graph.link("Contains", {"subject": patient, "object": oid},
                   {"enter": 0.0, "exit": exit_time})
        graph.link("Labeled-By", {"organ": oid, "algorithm": algorithm})
        for i, j, k in sorted(rec.geometry, key=lambda v: grid.linear_index(*v)):
            idx = grid.linear_index(i, j, k)
            value = float(grid.intensities[idx])
            l, h, d = grid.center(i, j, k)
            color = transfer.color(value) if transfer is not None else None
            if color is None:
                g = min(max(value, 0.0), 1.0)
                color = (g, g, g, 1.0)
            cid = graph.create_entity("3D Coordinates",
                                      {"l": l, "h": h, "d": d, "voxel": idx, "intensity": value})
            kid = graph.create_entity("Colors", dict(zip("rgba", map(float, color))))
            graph.link("Occupies", {"organ": oid, "coordinate": cid, "color": kid})

    frames = None
    if dt is not None:
        frames = FrameSequence(1.0 / dt, [voxels_to_points(g, threshold, transfer)
                                          for g in grids])
        graph.geometry_store[patient] = frames
    return ScanIngest(patient, equipment, organ_ids, frames)
