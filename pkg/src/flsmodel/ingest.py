"""Text formats for frame sequences and voxel grids.

Frames file::

    fps 24
    # comment
    frame 0
    0.0 1.0 0.0 1 0.5 0.5 1
    frame 1
    ...

Each point line is ``l h d r g b a``. Voxel file: a header line
``dims nx ny nz spacing sx sy sz`` followed by ``nx*ny*nz`` whitespace
separated intensities, x varying fastest.

Numbers are parsed locale-independently: an optional sign, digits with a
``.`` decimal point and an optional exponent. No thousands separators.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import CountMismatch, MissingHeader, NonFiniteValue, ParseError
from .frames import FrameSequence, PointSet
from .records import ColorRGBA

_NUMBER = re.compile(r"[+-]?(?:[0-9]+(?:\.[0-9]*)?|\.[0-9]+)(?:[eE][+-]?[0-9]+)?")
_NONFINITE = re.compile(r"[+-]?(?:nan|inf|infinity)", re.IGNORECASE)
_CHANNEL_NAMES = ("red", "green", "blue", "alpha")


def parse_number(token: str, line: int | None = None) -> float:
    if _NUMBER.fullmatch(token):
        x = float(token)
        if not math.isfinite(x):
            raise NonFiniteValue(f"value {token!r} overflows", line)
        return x
    if _NONFINITE.fullmatch(token):
        raise NonFiniteValue(f"non-finite value {token!r}", line)
    raise ParseError(f"not a decimal number: {token!r}", line)


def _parse_int(token: str, line: int) -> int:
    if not re.fullmatch(r"[+-]?[0-9]+", token):
        raise ParseError(f"not an integer: {token!r}", line)
    return int(token)


def format_number(x: float) -> str:
    """Shortest round-tripping decimal form."""
    return repr(float(x))


def _read_text(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"not UTF-8 text: {exc.reason}") from None


# -- frames ------------------------------------------------------------------

def parse_frames(text: str) -> FrameSequence:
    fps = None
    frames: list[list[list[float]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        toks = line.split()
        if fps is None:
            if toks[0] != "fps" or len(toks) != 2:
                raise MissingHeader("expected header 'fps <float>'", lineno)
            fps = parse_number(toks[1], lineno)
            if fps <= 0:
                raise ParseError("fps must be > 0", lineno)
            continue
        if toks[0] == "frame":
            if len(toks) != 2:
                raise ParseError("expected 'frame <index>'", lineno)
            _parse_int(toks[1], lineno)
            frames.append([])
            continue
        if not frames:
            raise ParseError("point before any 'frame' line", lineno)
        if len(toks) != 7:
            raise ParseError(f"expected 7 values 'x y z r g b a', got {len(toks)}", lineno)
        vals = [parse_number(t, lineno) for t in toks]
        for name, v in zip(_CHANNEL_NAMES, vals[3:]):
            if not 0.0 <= v <= 1.0:
                raise ParseError(f"{name} out of [0,1]", lineno)
        frames[-1].append(vals)
    if fps is None:
        raise MissingHeader("empty frames file: missing 'fps' header", 1)
    seq = []
    for rows in frames:
        arr = np.array(rows, dtype=float).reshape(-1, 7)
        seq.append(PointSet(arr[:, :3], arr[:, 3:]))
    return FrameSequence(fps, seq)


def read_frames(path) -> FrameSequence:
    return parse_frames(_read_text(path))


def format_frames(seq: FrameSequence) -> str:
    out = [f"fps {format_number(seq.fps)}"]
    for k, frame in enumerate(seq.frames):
        out.append(f"frame {k}")
        for row in frame.rows():
            out.append(" ".join(format_number(x) for x in row))
    return "\n".join(out) + "\n"


def write_frames(seq: FrameSequence, path) -> None:
    Path(path).write_text(format_frames(seq), encoding="utf-8")


# -- voxels ------------------------------------------------------------------

@dataclass
class VoxelGrid:
    """Dense scalar volume; ``intensities`` is flat with x varying fastest."""

    dims: tuple[int, int, int]
    spacing: tuple[float, float, float]
    intensities: np.ndarray

    def __post_init__(self):
        self.dims = tuple(int(n) for n in self.dims)
        self.spacing = tuple(float(s) for s in self.spacing)
        self.intensities = np.asarray(self.intensities, dtype=float).ravel()
        if len(self.dims) != 3 or min(self.dims) <= 0:
            raise ValueError(f"dims must be three positive counts, got {self.dims}")
        if len(self.spacing) != 3 or not all(s > 0 and math.isfinite(s) for s in self.spacing):
            raise ValueError(f"spacing must be three positive values, got {self.spacing}")
        if self.intensities.size != self.size:
            raise CountMismatch(f"expected {self.size} intensities, got {self.intensities.size}")

    @classmethod
    def from_array(cls, volume, spacing=(1.0, 1.0, 1.0)) -> VoxelGrid:
        """Build from an array indexed ``[i, j, k]`` (x, y, z)."""
        vol = np.asarray(volume, dtype=float)
        return cls(vol.shape, spacing, vol.transpose(2, 1, 0).ravel())

    @property
    def size(self) -> int:
        nx, ny, nz = self.dims
        return nx * ny * nz

    def as_array(self) -> np.ndarray:
        """View indexed ``[i, j, k]``."""
        nx, ny, nz = self.dims
        return self.intensities.reshape(nz, ny, nx).transpose(2, 1, 0)

    def linear_index(self, i: int, j: int, k: int) -> int:
        nx, ny, _ = self.dims
        return i + nx * (j + ny * k)

    def unravel(self, idx: int) -> tuple[int, int, int]:
        nx, ny, _ = self.dims
        return idx % nx, (idx // nx) % ny, idx // (nx * ny)

    def center(self, i: int, j: int, k: int) -> tuple[float, float, float]:
        sx, sy, sz = self.spacing
        return (i + 0.5) * sx, (j + 0.5) * sy, (k + 0.5) * sz

    def __eq__(self, other) -> bool:
        if not isinstance(other, VoxelGrid):
            return NotImplemented
        return (self.dims == other.dims and self.spacing == other.spacing
                and np.array_equal(self.intensities, other.intensities))


@dataclass
class VoxelSequence:
    """Scans of one volume taken ``dt`` seconds apart (fMRI)."""

    frames: list[VoxelGrid]
    dt: float

    def __post_init__(self):
        if not self.frames:
            raise ValueError("a voxel sequence needs at least one scan")
        if not self.dt > 0:
            raise ValueError("dt must be > 0")
        first = self.frames[0]
        for g in self.frames[1:]:
            if g.dims != first.dims or g.spacing != first.spacing:
                raise ValueError("all scans must share dims and spacing")


def parse_voxels(text: str) -> VoxelGrid:
    header = None
    values: list[float] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        toks = line.split()
        if header is None:
            if len(toks) != 8 or toks[0] != "dims" or toks[4] != "spacing":
                raise MissingHeader("expected 'dims <nx> <ny> <nz> spacing <sx> <sy> <sz>'",
                                    lineno)
            dims = tuple(_parse_int(t, lineno) for t in toks[1:4])
            if min(dims) <= 0:
                raise ParseError("dims must be positive", lineno)
            spacing = tuple(parse_number(t, lineno) for t in toks[5:8])
            if min(spacing) <= 0:
                raise ParseError("spacing must be positive", lineno)
            header = (dims, spacing)
            continue
        values.extend(parse_number(t, lineno) for t in toks)
    if header is None:
        raise MissingHeader("empty voxel file: missing 'dims' header", 1)
    dims, spacing = header
    expected = dims[0] * dims[1] * dims[2]
    if len(values) != expected:
        raise CountMismatch(f"dims {dims} need {expected} values, got {len(values)}")
    return VoxelGrid(dims, spacing, np.array(values, dtype=float))


def read_voxels(path) -> VoxelGrid:
    return parse_voxels(_read_text(path))


def format_voxels(grid: VoxelGrid) -> str:
    nx, ny, nz = grid.dims
    sx, sy, sz = (format_number(s) for s in grid.spacing)
    lines = [f"dims {nx} {ny} {nz} spacing {sx} {sy} {sz}"]
    flat = grid.intensities
    for start in range(0, flat.size, nx):
        lines.append(" ".join(format_number(v) for v in flat[start:start + nx]))
    return "\n".join(lines) + "\n"


def write_voxels(grid: VoxelGrid, path) -> None:
    Path(path).write_text(format_voxels(grid), encoding="utf-8")


# -- transfer function -------------------------------------------------------

@dataclass
class TransferTable:
    """Intensity ranges ``[lo, hi)`` mapped to colors.

    Intensities no row covers fall back to grayscale.
    """

    rows: list[tuple[float, float, ColorRGBA]] = field(default_factory=list)

    def color(self, intensity: float) -> ColorRGBA:
        for lo, hi, c in self.rows:
            if lo <= intensity < hi:
                return ColorRGBA(*c)
        return grayscale(intensity)


def grayscale(intensity: float) -> ColorRGBA:
    g = min(max(float(intensity), 0.0), 1.0)
    return ColorRGBA(g, g, g, 1.0)


def voxels_to_points(grid: VoxelGrid, threshold: float,
                     transfer: TransferTable | None = None) -> PointSet:
    """One point per voxel at or above ``threshold``, placed at the voxel center."""
    if not math.isfinite(threshold):
        raise ValueError("threshold must be finite")
    idx = np.flatnonzero(grid.intensities >= threshold)
    if idx.size == 0:
        return PointSet()
    nx, ny, _ = grid.dims
    ijk = np.stack([idx % nx, (idx // nx) % ny, idx // (nx * ny)], axis=1).astype(float)
    coords = (ijk + 0.5) * np.array(grid.spacing)
    vals = grid.intensities[idx]
    if transfer is None or not transfer.rows:
        g = np.clip(vals, 0.0, 1.0)
        colors = np.stack([g, g, g, np.ones_like(g)], axis=1)
    else:
        colors = np.array([transfer.color(v) for v in vals], dtype=float)
    return PointSet(coords, colors)
