"""Per-kick trajectory records shared by the map and quantum engines.

CSV schema: header ``q,x,mean_p,mean_energy,scaled_current``, one row per
kick starting at q = 0, floats with 12 significant digits, empty
``scaled_current`` where the quantity is undefined (q = 0 or sin(gamma) = 0).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import KickParams
from .io import format_cell

TRAJECTORY_HEADER = ("q", "x", "mean_p", "mean_energy", "scaled_current")


@dataclass(frozen=True)
class TrajectoryPoint:
    q: int
    x: float
    mean_p: float
    mean_energy: float
    scaled_current: float | None


@dataclass(frozen=True)
class Trajectory:
    """Observable record of one run plus the parameter snapshot behind it."""

    points: tuple[TrajectoryPoint, ...]
    params: KickParams
    engine: str
    mode: str | None = None

    def __post_init__(self):
        qs = [p.q for p in self.points]
        if qs != list(range(len(qs))):
            raise ValueError("trajectory kicks must increase strictly from 0")

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def qs(self) -> np.ndarray:
        return np.array([p.q for p in self.points])

    def xs(self) -> np.ndarray:
        return np.array([p.x for p in self.points])

    def mean_ps(self) -> np.ndarray:
        return np.array([p.mean_p for p in self.points])

    def mean_energies(self) -> np.ndarray:
        return np.array([p.mean_energy for p in self.points])

    def scaled_series(self) -> list[tuple[float, float]]:
        """(x, scaled_current) pairs, skipping kicks where it is undefined."""
        return [
            (p.x, p.scaled_current) for p in self.points if p.scaled_current is not None
        ]

    def to_rows(self) -> list[tuple]:
        return [
            (p.q, p.x, p.mean_p, p.mean_energy, p.scaled_current) for p in self.points
        ]

    def to_csv(self) -> str:
        lines = [",".join(TRAJECTORY_HEADER)]
        for row in self.to_rows():
            lines.append(",".join(format_cell(v) for v in row))
        return "\n".join(lines) + "\n"
