"""Plain value records used across the model, compiler and queries."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple


class Coordinate(NamedTuple):
    """Display position in meters: length, height, depth."""

    l: float
    h: float
    d: float


class ColorRGBA(NamedTuple):
    r: float
    g: float
    b: float
    a: float


DARK = ColorRGBA(0.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class FlsSpec:
    """Capabilities of one FLS model.

    ``nu`` max speed (m/s), ``beta`` flight time on a full charge (s),
    ``force_n`` max exertable force (N), ``omega`` charging time (s).
    """

    nu: float
    beta: float
    force_n: float
    omega: float
    id: str = "fls"

    def __post_init__(self):
        for name in ("nu", "beta", "force_n", "omega"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ValueError(f"FlsSpec.{name} must be a finite number, got {v!r}")
        if not self.nu > 0:
            raise ValueError("FlsSpec.nu must be > 0")
        if not self.beta > 0:
            raise ValueError("FlsSpec.beta must be > 0")
        if not self.force_n >= 0:
            raise ValueError("FlsSpec.force_n must be >= 0")
        if not self.omega > 0:
            raise ValueError("FlsSpec.omega must be > 0")

    def as_attrs(self) -> dict[str, float]:
        return {"nu": float(self.nu), "beta": float(self.beta),
                "force_n": float(self.force_n), "omega": float(self.omega)}


@dataclass(frozen=True)
class AcousticRecord:
    id: str
    sound_id: str | None = None
    pitch: float | None = None
    db: float | None = None
    frequency: float | None = None
    extra: dict[str, str] = field(default_factory=dict, hash=False)


@dataclass(frozen=True)
class InteractionRecord:
    id: str
    source: str
    target: str
    start: float
    end: float
    interaction_id: str | None = None
    description: str | None = None
