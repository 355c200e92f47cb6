"""Square-cell evaluation grids and density fields, with CSV/JSON export."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

FLOAT_FMT = ".17g"   # round-trip exact for doubles; keeps golden files stable


@dataclass(frozen=True)
class GridSpec:
    """Rectangular node lattice with endpoints included and square cells."""

    window: tuple      # (re_min, re_max, im_min, im_max)
    nx: int
    ny: int

    def __post_init__(self):
        re_min, re_max, im_min, im_max = map(float, self.window)
        object.__setattr__(self, "window", (re_min, re_max, im_min, im_max))
        if not (re_max > re_min and im_max > im_min):
            raise ValueError("window must be a nonempty rectangle")
        if self.nx < 2 or self.ny < 2:
            raise ValueError("nx and ny must be at least 2")
        hx = (re_max - re_min) / (self.nx - 1)
        hy = (im_max - im_min) / (self.ny - 1)
        if abs(hx - hy) > 1e-12 * max(hx, hy):
            raise ValueError(f"cells must be square: hx={hx!r} != hy={hy!r}")

    @property
    def h(self) -> float:
        re_min, re_max, _, _ = self.window
        return (re_max - re_min) / (self.nx - 1)

    def xs(self) -> np.ndarray:
        return np.linspace(self.window[0], self.window[1], self.nx)

    def ys(self) -> np.ndarray:
        return np.linspace(self.window[2], self.window[3], self.ny)

    def nodes(self) -> np.ndarray:
        """Complex node positions, shape (ny, nx)."""
        return self.xs()[None, :] + 1j * self.ys()[:, None]

    def interior(self) -> "GridSpec":
        """The grid shrunk by one cell on every side (5-point-stencil domain)."""
        re_min, re_max, im_min, im_max = self.window
        h = self.h
        return GridSpec((re_min + h, re_max - h, im_min + h, im_max - h),
                        self.nx - 2, self.ny - 2)


@dataclass
class DensityField:
    """Per-node density samples on a grid."""

    grid: GridSpec
    values: np.ndarray          # shape (ny, nx), real
    kind: str                   # "predicted" | "predicted_eps" | "empirical"
    eps: float | None = None
    samples: int | None = None
    flags: list = field(default_factory=list)   # (iy, ix) of non-evaluable nodes
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape != (self.grid.ny, self.grid.nx):
            raise ValueError(f"values shape {v.shape} != grid ({self.grid.ny}, {self.grid.nx})")
        self.values = v

    def mass(self) -> float:
        """Riemann-sum total mass, cell area h^2 per node."""
        return float(np.sum(self.values) * self.grid.h ** 2)

    def to_csv(self, path) -> None:
        """Rows "re,im,rho", row-major (y outer, x inner)."""
        xs, ys = self.grid.xs(), self.grid.ys()
        lines = ["re,im,rho"]
        for iy in range(self.grid.ny):
            for ix in range(self.grid.nx):
                lines.append(f"{xs[ix]:{FLOAT_FMT}},{ys[iy]:{FLOAT_FMT}},"
                             f"{self.values[iy, ix]:{FLOAT_FMT}}")
        Path(path).write_text("\n".join(lines) + "\n")

    def sidecar(self, **extra) -> dict:
        d = {
            "kind": self.kind,
            "eps": self.eps,
            "samples": self.samples,
            "grid": {"window": list(self.grid.window),
                     "nx": self.grid.nx, "ny": self.grid.ny, "h": self.grid.h},
            "flags": [list(t) for t in self.flags],
        }
        d.update(self.meta)
        d.update(extra)
        return d

    def to_json(self, path, **extra) -> None:
        Path(path).write_text(json.dumps(self.sidecar(**extra), indent=2, sort_keys=True) + "\n")


def read_field_csv(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Read back a field CSV as flat (re, im, rho) arrays."""
    rows = Path(path).read_text().strip().splitlines()
    data = np.array([[float(c) for c in r.split(",")] for r in rows[1:]])
    return data[:, 0], data[:, 1], data[:, 2]
