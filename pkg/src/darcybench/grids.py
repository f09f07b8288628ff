"""Structured lattice descriptions and fields sampled on them."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_STEP_RTOL = 1e-12


def _node_count(length: float, dx: float, label: str) -> int:
    n = round(length / dx) + 1
    if abs((n - 1) * dx - length) > _STEP_RTOL * max(1.0, abs(length)):
        raise ValueError(f"step {dx} does not divide {label}={length}")
    if n < 3:
        raise ValueError(f"need at least 3 nodes along {label}, got {n}")
    return n


@dataclass(frozen=True)
class GridSpec:
    """Uniform 1D interval [0, lx] or 2D rectangle [0, lx] x [0, ly].

    The step is shared between directions in 2D.  Node j sits at j*dx, so
    lattice-based field evaluation and node coordinates agree exactly.
    """

    ndim: int
    lx: float
    dx: float
    nx: int
    ly: float | None = None
    ny: int | None = None

    @classmethod
    def interval(cls, length: float, dx: float) -> "GridSpec":
        return cls(ndim=1, lx=float(length), dx=float(dx),
                   nx=_node_count(length, dx, "lx"))

    @classmethod
    def box(cls, lx: float, ly: float, dx: float) -> "GridSpec":
        return cls(ndim=2, lx=float(lx), dx=float(dx),
                   nx=_node_count(lx, dx, "lx"),
                   ly=float(ly), ny=_node_count(ly, dx, "ly"))

    def with_dx(self, dx: float) -> "GridSpec":
        if self.ndim == 1:
            return GridSpec.interval(self.lx, dx)
        return GridSpec.box(self.lx, self.ly, dx)

    def x_nodes(self) -> np.ndarray:
        return np.arange(self.nx) * self.dx

    def y_nodes(self) -> np.ndarray:
        if self.ndim != 2:
            raise ValueError("y_nodes is only defined for 2D grids")
        return np.arange(self.ny) * self.dx

    def x_midpoints(self) -> np.ndarray:
        return (np.arange(self.nx - 1) + 0.5) * self.dx

    def y_midpoints(self) -> np.ndarray:
        if self.ndim != 2:
            raise ValueError("y_midpoints is only defined for 2D grids")
        return (np.arange(self.ny - 1) + 0.5) * self.dx


@dataclass
class HeadField:
    """A head solution sampled on a grid: shape (nx,) in 1D, (nx, ny) in 2D."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        expected = (self.grid.nx,) if self.grid.ndim == 1 else (self.grid.nx, self.grid.ny)
        if self.values.shape != expected:
            raise ValueError(f"values shape {self.values.shape} does not match grid {expected}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("head values must be finite")
