"""Planar primitives: points, sampling windows, and the two membership
predicates (half-plane form and exterior-circle form) that define a Voronoi
cell around the origin.

All distance comparisons are made on squared distances, and both predicates
are inclusive on the boundary, so the half-plane product and the
exterior-circle test agree exactly, ties included.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "Point2",
    "Disk",
    "Rect",
    "Window",
    "in_half_plane_M0",
    "in_Bc_exterior",
    "boundary_distance_xy",
]


@dataclass(frozen=True)
class Point2:
    """A point of the plane; coordinates in meters, finite by contract."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"Point2 coordinates must be finite, got ({self.x}, {self.y})")

    def norm2(self) -> float:
        """Squared Euclidean norm."""
        return self.x * self.x + self.y * self.y

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y])


ORIGIN = Point2(0.0, 0.0)


def _dist2(a: Point2, b: Point2) -> float:
    dx = a.x - b.x
    dy = a.y - b.y
    return dx * dx + dy * dy


@dataclass(frozen=True)
class Disk:
    """Closed disk window: center plus radius (> 0)."""

    center: Point2
    radius: float

    def __post_init__(self):
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise ValueError(f"Disk radius must be positive and finite, got {self.radius}")

    @property
    def area(self) -> float:
        return math.pi * self.radius * self.radius

    def contains(self, p: Point2) -> bool:
        return _dist2(p, self.center) <= self.radius * self.radius

    def contains_xy(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        dx = x - self.center.x
        dy = y - self.center.y
        return dx * dx + dy * dy <= self.radius * self.radius

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        c, r = self.center, self.radius
        return (c.x - r, c.x + r, c.y - r, c.y + r)


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle window [xmin, xmax] x [ymin, ymax]."""

    xmin: float
    xmax: float
    ymin: float
    ymax: float

    def __post_init__(self):
        if not all(map(math.isfinite, (self.xmin, self.xmax, self.ymin, self.ymax))):
            raise ValueError("Rect bounds must be finite")
        if not (self.xmax > self.xmin and self.ymax > self.ymin):
            raise ValueError(
                f"Rect must have positive extent, got x:[{self.xmin}, {self.xmax}] "
                f"y:[{self.ymin}, {self.ymax}]"
            )

    @property
    def area(self) -> float:
        return (self.xmax - self.xmin) * (self.ymax - self.ymin)

    def contains(self, p: Point2) -> bool:
        return self.xmin <= p.x <= self.xmax and self.ymin <= p.y <= self.ymax

    def contains_xy(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return (x >= self.xmin) & (x <= self.xmax) & (y >= self.ymin) & (y <= self.ymax)

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        return (self.xmin, self.xmax, self.ymin, self.ymax)


Window = Union[Disk, Rect]


def boundary_distance_xy(window: Window, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Signed distance from (x, y) to the window boundary, positive inside.

    Used by the boundary-contamination checks: a point of the origin cell
    that sits too close to the edge of the sampling window signals that the
    window may be clipping the cell.
    """
    if isinstance(window, Disk):
        return window.radius - np.hypot(x - window.center.x, y - window.center.y)
    return np.minimum.reduce([
        np.asarray(x) - window.xmin,
        window.xmax - np.asarray(x),
        np.asarray(y) - window.ymin,
        window.ymax - np.asarray(y),
    ])


def in_half_plane_M0(x: Point2, r0: Point2, rk: Point2) -> bool:
    """True iff ``x`` is at least as close to ``r0`` as to ``rk``.

    This is the half-plane factor of the product-form cell membership:
    the cell of ``r0`` is the intersection over competitors ``rk`` of
    ``{x : dist(x, r0) <= dist(x, rk)}``.  Inclusive on the bisector.
    """
    return _dist2(x, r0) <= _dist2(x, rk)


def in_Bc_exterior(r: Point2, x: Point2) -> bool:
    """True iff site ``r`` lies outside the open disk centered at ``x``
    through the origin (radius ``|x|``).

    Equivalent to ``in_half_plane_M0(x, origin, r)`` for every input pair:
    ``x`` belongs to the origin's cell exactly when no site falls strictly
    inside that disk.
    """
    return _dist2(r, x) >= x.norm2()
