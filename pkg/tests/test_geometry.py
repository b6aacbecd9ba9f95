import math

import numpy as np
import pytest

from ppvt.geometry import (
    ORIGIN,
    Disk,
    Point2,
    Rect,
    boundary_distance_xy,
    in_Bc_exterior,
    in_half_plane_M0,
)


def test_point2_norms():
    p = Point2(3.0, 4.0)
    assert p.norm2() == 25.0
    assert p.norm() == 5.0
    assert np.array_equal(p.as_array(), np.array([3.0, 4.0]))
    assert ORIGIN.x == 0.0 and ORIGIN.y == 0.0


@pytest.mark.parametrize("x,y", [(math.nan, 0.0), (0.0, math.inf), (-math.inf, 1.0)])
def test_point2_rejects_nonfinite(x, y):
    with pytest.raises(ValueError):
        Point2(x, y)


def test_disk_basics():
    d = Disk(Point2(1.0, -2.0), 3.0)
    assert d.area == pytest.approx(9.0 * math.pi, rel=1e-15)
    assert d.contains(Point2(1.0, -2.0))
    assert d.contains(Point2(4.0, -2.0))  # boundary is inclusive
    assert not d.contains(Point2(4.0 + 1e-12, -2.0))
    assert d.bounds == (-2.0, 4.0, -5.0, 1.0)


def test_disk_contains_xy_vectorized():
    d = Disk(ORIGIN, 2.0)
    x = np.array([0.0, 2.0, 2.1, -1.9])
    y = np.zeros(4)
    assert np.array_equal(d.contains_xy(x, y), np.array([True, True, False, True]))


@pytest.mark.parametrize("r", [0.0, -1.0, math.inf, math.nan])
def test_disk_rejects_bad_radius(r):
    with pytest.raises(ValueError):
        Disk(ORIGIN, r)


def test_rect_basics():
    r = Rect(-1.0, 2.0, 0.0, 4.0)
    assert r.area == 12.0
    assert r.contains(Point2(-1.0, 4.0))  # corners included
    assert not r.contains(Point2(-1.1, 1.0))
    assert r.bounds == (-1.0, 2.0, 0.0, 4.0)
    got = r.contains_xy(np.array([0.0, 3.0]), np.array([1.0, 1.0]))
    assert np.array_equal(got, np.array([True, False]))


def test_rect_rejects_degenerate():
    with pytest.raises(ValueError):
        Rect(0.0, 0.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        Rect(0.0, 1.0, 2.0, 1.0)
    with pytest.raises(ValueError):
        Rect(0.0, math.inf, 0.0, 1.0)


def test_boundary_distance_disk():
    d = Disk(Point2(1.0, 0.0), 2.0)
    x = np.array([1.0, 3.0, 4.0, 1.0])
    y = np.array([0.0, 0.0, 0.0, 1.0])
    got = boundary_distance_xy(d, x, y)
    assert got[0] == pytest.approx(2.0)       # center
    assert got[1] == pytest.approx(0.0, abs=1e-15)  # on the boundary
    assert got[2] == pytest.approx(-1.0)      # outside -> negative
    assert got[3] == pytest.approx(1.0)


def test_boundary_distance_rect():
    r = Rect(0.0, 4.0, 0.0, 2.0)
    got = boundary_distance_xy(r, np.array([1.0, 0.5, 5.0]), np.array([1.0, 1.0, 1.0]))
    assert got[0] == pytest.approx(1.0)   # limited by y-edges
    assert got[1] == pytest.approx(0.5)   # limited by the near x-edge
    assert got[2] == pytest.approx(-1.0)  # outside


def test_half_plane_basic_cases():
    r0 = Point2(0.0, 0.0)
    rk = Point2(2.0, 0.0)
    assert in_half_plane_M0(Point2(0.5, 7.0), r0, rk)
    assert not in_half_plane_M0(Point2(1.5, -7.0), r0, rk)
    # the bisector itself is inclusive
    assert in_half_plane_M0(Point2(1.0, 3.0), r0, rk)
    assert in_half_plane_M0(Point2(1.0, 3.0), rk, r0)


def test_exterior_circle_matches_half_plane():
    # in_Bc_exterior(r, x) is the same predicate as in_half_plane_M0(x, 0, r):
    # |x - r| >= |x| <=> |x - 0|^2 <= |x - r|^2.
    rng = np.random.default_rng(7)
    for _ in range(500):
        x = Point2(*rng.uniform(-3, 3, 2))
        r = Point2(*rng.uniform(-3, 3, 2))
        assert in_Bc_exterior(r, x) == in_half_plane_M0(x, ORIGIN, r)


def test_exterior_circle_examples():
    # site on the circle through the origin centered at x: boundary counts
    # as exterior (inclusive), matching the inclusive half-plane.
    x = Point2(1.0, 0.0)
    assert in_Bc_exterior(Point2(2.0, 0.0), x)
    assert not in_Bc_exterior(Point2(1.0, 0.0), x)
    assert in_Bc_exterior(Point2(0.0, 0.0), x)
