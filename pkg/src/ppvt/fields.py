"""Scalar test fields for the sum/product expectation identities.

A :class:`ScalarField` is a deterministic map from plane points to reals,
evaluable one point at a time or on whole coordinate arrays.  Fields with
a bounded nontrivial region extend past it by a role-dependent constant
(1 for product-type fields, 0 for sum-type fields), which the constructors
bake into the profile so evaluation is total on the plane.

The library constructors attach, where available, exact integrals
(``analytic``) so the quadrature layer can be tested against hand results
rather than against itself.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .geometry import Point2, Window

__all__ = [
    "ScalarField",
    "constant",
    "gaussian",
    "disk_indicator",
    "disk_patch",
    "far_ring",
]


@dataclass(frozen=True)
class ScalarField:
    """A real-valued field on the plane.

    ``fn`` takes coordinate arrays ``(x, y)`` and returns values of matching
    shape.  ``radial_profile``, when present, declares the field isotropic:
    ``fn(x, y) == radial_profile(hypot(x, y))``, which unlocks the fast
    radial quadrature path.  ``radial_breakpoints`` lists radii where the
    profile is non-smooth (jumps, kinks) so integration panels can align
    with them.  ``support`` is the window outside which the field is the
    constant baked in by its constructor (purely informational; ``fn`` is
    already total).
    """

    fn: Callable[[np.ndarray, np.ndarray], np.ndarray]
    label: str
    support: Window | None = None
    radial_profile: Callable[[float], float] | None = None
    radial_breakpoints: tuple[float, ...] = ()
    analytic: Mapping[str, float] = field(default_factory=dict)

    def __call__(self, p: Point2) -> float:
        return float(self.fn(np.asarray(p.x, dtype=float), np.asarray(p.y, dtype=float)))

    def values(self, pts: np.ndarray) -> np.ndarray:
        """Evaluate on an (n, 2) coordinate array; returns shape (n,)."""
        pts = np.asarray(pts, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError(f"expected an (n, 2) array of points, got shape {pts.shape}")
        out = np.asarray(self.fn(pts[:, 0], pts[:, 1]), dtype=float)
        if not np.all(np.isfinite(out)):
            bad = int(np.flatnonzero(~np.isfinite(out))[0])
            raise ValueError(
                f"field '{self.label}' evaluated to a non-finite value at "
                f"({pts[bad, 0]:.6g}, {pts[bad, 1]:.6g})"
            )
        return out

    def angular_average(self, r: float) -> float:
        """Mean of the field over the circle of radius ``r``.

        Radial fields short-circuit to their profile; the general case is
        resolved by quadrature in the identities module, not here.
        """
        if self.radial_profile is not None:
            return float(self.radial_profile(r))
        raise ValueError(
            f"field '{self.label}' declares no radial profile; "
            "use the 2-D integration path"
        )


def constant(value: float, label: str | None = None) -> ScalarField:
    """The constant field ``value`` on the whole plane."""
    v = float(value)
    return ScalarField(
        fn=lambda x, y: np.full_like(np.asarray(x, dtype=float), v),
        label=label or f"const({v:g})",
        radial_profile=lambda r: v,
        analytic={"value": v},
    )


def gaussian(alpha: float, label: str | None = None) -> ScalarField:
    """``exp(-alpha * r^2)``; plane integral pi/alpha."""
    a = float(alpha)
    if not a > 0:
        raise ValueError(f"gaussian decay rate must be positive, got {alpha}")
    return ScalarField(
        fn=lambda x, y: np.exp(-a * (np.asarray(x) ** 2 + np.asarray(y) ** 2)),
        label=label or f"gauss({a:g})",
        radial_profile=lambda r: math.exp(-a * r * r),
        analytic={"plane_integral": math.pi / a},
    )


def disk_indicator(radius: float, inside: float = 1.0, outside: float = 0.0,
                   label: str | None = None) -> ScalarField:
    """``inside`` on the closed disk of the given radius, ``outside`` beyond.

    With the defaults this is a sum-type field (vanishes off its support).
    """
    a = float(radius)
    if not a > 0:
        raise ValueError(f"disk radius must be positive, got {radius}")
    inside = float(inside)
    outside = float(outside)

    def fn(x, y):
        r2 = np.asarray(x) ** 2 + np.asarray(y) ** 2
        return np.where(r2 <= a * a, inside, outside)

    return ScalarField(
        fn=fn,
        label=label or f"disk({a:g};{inside:g}/{outside:g})",
        support=None,
        radial_profile=lambda r: inside if r <= a else outside,
        radial_breakpoints=(a,),
        analytic={"plane_integral_minus_outside": (inside - outside) * math.pi * a * a},
    )


def disk_patch(radius: float, level: float, label: str | None = None) -> ScalarField:
    """Product-type field: ``level`` inside the disk, 1 outside."""
    if not 0.0 < level <= 1.0:
        raise ValueError(f"patch level must lie in (0, 1], got {level}")
    return disk_indicator(radius, inside=level, outside=1.0,
                          label=label or f"patch({radius:g};{level:g})")


def far_ring(inner_radius: float, level: float, label: str | None = None) -> ScalarField:
    """Product-type field: 1 out to ``inner_radius``, ``level`` beyond."""
    if not 0.0 < level <= 1.0:
        raise ValueError(f"ring level must lie in (0, 1], got {level}")
    return disk_indicator(inner_radius, inside=1.0, outside=level,
                          label=label or f"ring({inner_radius:g};{level:g})")
