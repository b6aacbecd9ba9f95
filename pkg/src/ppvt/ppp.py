"""Homogeneous Poisson point process sampling on bounded windows.

The point count is Poisson(intensity * area); positions are i.i.d. uniform on
the window (disk positions via the sqrt-radius transform, no rejection).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import Disk, Rect, Window
from .rng import master_rng

__all__ = ["PppSample", "sample_ppp", "expected_count", "write_points_csv"]


def expected_count(intensity: float, window: Window) -> float:
    """Mean point count: intensity times window area."""
    return intensity * window.area


def _validate(intensity: float, window: Window) -> None:
    if not (math.isfinite(intensity) and intensity > 0):
        raise ValueError(f"intensity must be positive and finite, got {intensity}")
    if not isinstance(window, (Disk, Rect)):
        raise ValueError(f"window must be a Disk or Rect, got {type(window).__name__}")


def uniform_points(n: int, window: Window, rng: np.random.Generator) -> np.ndarray:
    """``n`` i.i.d. uniform positions on the window, as an (n, 2) array."""
    if isinstance(window, Disk):
        r = window.radius * np.sqrt(rng.random(n))
        theta = rng.random(n) * (2.0 * np.pi)
        return np.column_stack(
            [window.center.x + r * np.cos(theta), window.center.y + r * np.sin(theta)]
        )
    x = rng.uniform(window.xmin, window.xmax, n)
    y = rng.uniform(window.ymin, window.ymax, n)
    return np.column_stack([x, y])


def sample_points(intensity: float, window: Window, rng: np.random.Generator) -> np.ndarray:
    """One PPP draw as a bare (n, 2) array; the building block of every
    replication loop."""
    n = rng.poisson(expected_count(intensity, window))
    return uniform_points(int(n), window, rng)


@dataclass(frozen=True)
class PppSample:
    """A realized point process: (intensity, window, seed) fully determine
    ``points``, so a sample can be replayed from its record."""

    points: np.ndarray
    intensity: float
    window: Window
    seed: int

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError(f"points must be an (n, 2) array, got shape {pts.shape}")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.shape[0]


def sample_ppp(intensity: float, window: Window, seed: int) -> PppSample:
    """Draw a PPP realization; deterministic for fixed (intensity, window, seed)."""
    _validate(intensity, window)
    rng = master_rng(seed)
    pts = sample_points(intensity, window, rng)
    return PppSample(points=pts, intensity=intensity, window=window, seed=seed)


def write_points_csv(sample: PppSample, path: str) -> None:
    """Dump one point per row under an ``x,y`` header."""
    with open(path, "w", newline="") as fh:
        fh.write("x,y\n")
        for px, py in sample.points:
            fh.write(f"{px:.12g},{py:.12g}\n")
