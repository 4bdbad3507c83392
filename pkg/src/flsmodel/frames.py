"""Point sets and frame sequences: the display-level view of an object over time."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .records import ColorRGBA, Coordinate


class PointSet:
    """Lit points of one frame as parallel ``(n, 3)`` coordinate and ``(n, 4)`` RGBA arrays."""

    __slots__ = ("coords", "colors")

    def __init__(self, coords=None, colors=None):
        coords = np.zeros((0, 3)) if coords is None else np.asarray(coords, dtype=float)
        coords = coords.reshape(-1, 3)
        if colors is None:
            colors = np.ones((len(coords), 4))
        colors = np.asarray(colors, dtype=float).reshape(-1, 4)
        if len(colors) != len(coords):
            raise ValueError(f"{len(coords)} coordinates but {len(colors)} colors")
        if not np.all(np.isfinite(coords)):
            raise ValueError("coordinates must be finite")
        if not (np.all(np.isfinite(colors)) and np.all(colors >= 0) and np.all(colors <= 1)):
            raise ValueError("color channels must lie in [0, 1]")
        self.coords = coords
        self.colors = colors

    @classmethod
    def from_points(cls, points) -> PointSet:
        """Build from an iterable of ``(Coordinate, ColorRGBA)`` pairs."""
        pts = list(points)
        if not pts:
            return cls()
        return cls([tuple(p[0]) for p in pts], [tuple(p[1]) for p in pts])

    def __len__(self) -> int:
        return len(self.coords)

    def __iter__(self) -> Iterator[tuple[Coordinate, ColorRGBA]]:
        for c, k in zip(self.coords, self.colors):
            yield Coordinate(*map(float, c)), ColorRGBA(*map(float, k))

    def __eq__(self, other) -> bool:
        if not isinstance(other, PointSet):
            return NotImplemented
        return (np.array_equal(self.coords, other.coords)
                and np.array_equal(self.colors, other.colors))

    def __repr__(self) -> str:
        return f"PointSet(n={len(self)})"

    @property
    def points(self) -> list[tuple[Coordinate, ColorRGBA]]:
        return list(self)

    def lit(self) -> PointSet:
        mask = self.colors[:, 3] > 0
        return PointSet(self.coords[mask], self.colors[mask])

    def rows(self) -> np.ndarray:
        """``(n, 7)`` array of ``l h d r g b a`` rows."""
        return np.hstack([self.coords, self.colors])

    def sorted_rows(self) -> np.ndarray:
        """Rows in lexicographic order, for order-insensitive comparison."""
        rows = self.rows()
        if len(rows) == 0:
            return rows
        return rows[np.lexsort(rows.T[::-1])]


@dataclass
class FrameSequence:
    fps: float
    frames: list[PointSet] = field(default_factory=list)
    t0: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.fps) and self.fps > 0):
            raise ValueError(f"fps must be > 0, got {self.fps!r}")

    def __len__(self) -> int:
        return len(self.frames)

    def time_of(self, k: int) -> float:
        return self.t0 + k / self.fps

    @property
    def span(self) -> float:
        """Display time covered, each frame lasting ``1/fps``."""
        return len(self.frames) / self.fps
