"""Periodic grid primitives shared by the solvers, oracles and drivers.

Everything lives on the unit interval [0, 1] with ``I`` uniform cells,
cell centers ``x_i = (i - 1/2) dx`` and interfaces ``x_{i-1/2} = (i - 1) dx``.
Periodic indexing identifies cell 0 with cell I.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid on [0, 1] with ``ncells`` cells."""

    ncells: int

    def __post_init__(self):
        if self.ncells < 2:
            raise ValueError(f"need at least 2 cells, got {self.ncells}")

    @property
    def dx(self) -> float:
        return 1.0 / self.ncells

    def centers(self) -> np.ndarray:
        return (np.arange(self.ncells) + 0.5) * self.dx

    def interfaces(self) -> np.ndarray:
        """Left interfaces x_{i-1/2}, i = 1..I (the right-most one wraps)."""
        return np.arange(self.ncells) * self.dx


@dataclass(frozen=True)
class GridFunction:
    """Values of a periodic function on a uniform grid.

    ``kind`` records whether the entries are point samples at cell centers
    or cell averages; the distinction matters only when comparing against
    continuous reference solutions.
    """

    values: np.ndarray
    kind: str = "average"  # "average" | "point"

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if vals.ndim != 1 or vals.size < 2:
            raise ValueError("grid function needs a 1-d array of length >= 2")
        if self.kind not in ("average", "point"):
            raise ValueError(f"unknown grid function kind {self.kind!r}")

    @property
    def ncells(self) -> int:
        return self.values.size

    @property
    def dx(self) -> float:
        return 1.0 / self.values.size

    def mean(self) -> float:
        return float(np.mean(self.values))


@dataclass
class State:
    """Cell averages of the advected quantity at one instant."""

    u: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=float)
        if self.u.ndim != 1 or self.u.size < 2:
            raise ValueError("state needs a 1-d array of length >= 2")

    @property
    def ncells(self) -> int:
        return self.u.size
