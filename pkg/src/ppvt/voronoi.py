"""Typical-cell membership, cell statistics, and the gamma cell-size check.

Membership around the origin site comes in two equivalent forms: the direct
nearest-site rule and the product of half-plane indicators over competing
sites.  Ties (zero-probability under a point process) go to the lowest site
index in the direct form, which keeps every point in exactly one cell.

Cell statistics are replication-based: each replication drops a fresh site
process around the fixed origin site, then estimates the origin cell's area
by hit-counting uniform probes and, when a UE intensity is given, counts
the UE points of an independent process that land in the cell.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.stats import gamma as _gamma_dist
from scipy.stats import kstest

from ._kernels import lemma2_agree_block, origin_cell_mask
from .geometry import ORIGIN, Disk, Point2, Window, boundary_distance_xy, in_half_plane_M0
from .ppp import sample_points, uniform_points
from .rng import replication_rng
from .runner import run_replications

__all__ = [
    "CellStats",
    "GammaCellModel",
    "is_in_cell_direct",
    "is_in_cell_product",
    "membership_agreement",
    "count_ues_in_typical_cell",
    "typical_cell_stats",
    "typical_cell_area_mc",
    "write_cell_stats_csv",
    "GAMMA_SHAPE",
]

GAMMA_SHAPE = 3.575

# Window sizing and contamination rules shared by all typical-cell
# estimators: sampling window radius 8/sqrt(lambda_b), guard band
# 2/sqrt(lambda_b) from the window edge, at most 1% of replications flagged.
WINDOW_FACTOR = 8.0
GUARD_FACTOR = 2.0
MAX_FLAGGED_FRACTION = 0.01

# Probes are drawn from an origin disk of radius 2.5/sqrt(lambda_b): the
# expected cell area beyond that radius is exp(-2.5^2 * pi) / lambda_b,
# about 3e-9 of the mean, while the smaller probe region keeps the
# per-replication hit fraction (and thus the area resolution) high.
PROBE_FACTOR = 2.5
DEFAULT_N_PROBES = 10_000


@dataclass(frozen=True)
class CellStats:
    """Per-replication typical-cell statistics."""

    ue_counts: np.ndarray
    areas: np.ndarray
    lambda_b: float

    def __post_init__(self):
        counts = np.asarray(self.ue_counts, dtype=np.int64)
        areas = np.asarray(self.areas, dtype=float)
        if counts.shape != areas.shape or counts.ndim != 1:
            raise ValueError("ue_counts and areas must be 1-D and equal length")
        if counts.size and counts.min() < 0:
            raise ValueError("UE counts must be nonnegative")
        if areas.size and areas.min() < 0:
            raise ValueError("cell areas must be nonnegative")
        if not self.lambda_b > 0:
            raise ValueError(f"lambda_b must be positive, got {self.lambda_b}")
        object.__setattr__(self, "ue_counts", counts)
        object.__setattr__(self, "areas", areas)

    @property
    def n_replications(self) -> int:
        return int(self.areas.size)

    @property
    def mean_area(self) -> float:
        return float(self.areas.mean())

    @property
    def area_stderr(self) -> float:
        n = self.areas.size
        return float(self.areas.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0

    @property
    def mean_ue_count(self) -> float:
        return float(self.ue_counts.mean())

    @property
    def ue_count_stderr(self) -> float:
        n = self.ue_counts.size
        return float(self.ue_counts.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0


@dataclass(frozen=True)
class GammaCellModel:
    """Gamma approximation to the typical cell's area distribution."""

    shape: float = GAMMA_SHAPE
    scale: float = 1.0 / GAMMA_SHAPE

    def __post_init__(self):
        if not (self.shape > 0 and self.scale > 0):
            raise ValueError("shape and scale must be positive")

    @classmethod
    def for_intensity(cls, lambda_b: float) -> "GammaCellModel":
        """Model with mean area 1/lambda_b."""
        if not lambda_b > 0:
            raise ValueError(f"lambda_b must be positive, got {lambda_b}")
        return cls(shape=GAMMA_SHAPE, scale=1.0 / (GAMMA_SHAPE * lambda_b))

    @property
    def mean(self) -> float:
        return self.shape * self.scale

    def cdf(self, x):
        return _gamma_dist.cdf(x, a=self.shape, scale=self.scale)

    def ks_distance(self, areas: np.ndarray) -> float:
        """Kolmogorov–Smirnov distance between empirical areas and the model."""
        areas = np.asarray(areas, dtype=float)
        if areas.size == 0:
            raise ValueError("need at least one area sample")
        return float(kstest(areas, self.cdf).statistic)


def _sites_array(sites: Sequence[Point2] | np.ndarray) -> np.ndarray:
    if isinstance(sites, np.ndarray):
        arr = np.asarray(sites, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError(f"site array must have shape (n, 2), got {arr.shape}")
        return arr
    return np.array([[p.x, p.y] for p in sites], dtype=float).reshape(-1, 2)


def _check_idx(n: int, idx0: int) -> None:
    if n == 0:
        raise ValueError("sites must be nonempty")
    if not 0 <= idx0 < n:
        raise ValueError(f"idx0 must lie in [0, {n}), got {idx0}")


def is_in_cell_direct(x: Point2, sites: Sequence[Point2] | np.ndarray, idx0: int) -> bool:
    """True iff ``sites[idx0]`` is the nearest site to ``x`` (ties to the
    lowest index, so each point belongs to exactly one cell)."""
    arr = _sites_array(sites)
    _check_idx(arr.shape[0], idx0)
    d2 = (arr[:, 0] - x.x) ** 2 + (arr[:, 1] - x.y) ** 2
    return int(np.argmin(d2)) == idx0


def is_in_cell_product(x: Point2, sites: Sequence[Point2] | np.ndarray, idx0: int) -> bool:
    """Half-plane product form of cell membership: ``x`` is in the cell of
    ``sites[idx0]`` iff every factor ``in_half_plane_M0(x, sites[idx0],
    sites[k])`` is true; the scan stops at the first false factor."""
    arr = _sites_array(sites)
    _check_idx(arr.shape[0], idx0)
    home = Point2(float(arr[idx0, 0]), float(arr[idx0, 1]))
    for k in range(arr.shape[0]):
        if k == idx0:
            continue
        if not in_half_plane_M0(x, home, Point2(float(arr[k, 0]), float(arr[k, 1]))):
            return False
    return True


DEFAULT_SITE_COUNTS = (2, 3, 5, 10, 20, 50, 100, 200)


def membership_agreement(n_instances: int, seed: int,
                         site_counts: Sequence[int] = DEFAULT_SITE_COUNTS,
                         block_size: int = 5000) -> tuple[int, int]:
    """Batch equivalence check of the two membership routes.

    Draws ``n_instances`` random (probe, sites, idx0) configurations —
    coordinates uniform on [-1, 1]², site counts cycling through
    ``site_counts`` — and evaluates membership both ways (half-plane
    product with short-circuit, and nearest-site argmin).  Returns
    ``(n_agree, n_instances)``.  Ties have probability zero for continuous
    draws; the routes agree everywhere off ties.
    """
    if n_instances < 1:
        raise ValueError(f"n_instances must be >= 1, got {n_instances}")
    if not site_counts or any(n < 1 for n in site_counts):
        raise ValueError("site_counts must be positive")
    agree = 0
    done = 0
    block_idx = 0
    while done < n_instances:
        b = min(block_size, n_instances - done)
        n_sites = site_counts[block_idx % len(site_counts)]
        rng = replication_rng(seed, block_idx)
        xs = rng.uniform(-1.0, 1.0, size=(b, 2))
        sites = rng.uniform(-1.0, 1.0, size=(b, n_sites, 2))
        idx0 = rng.integers(0, n_sites, size=b)
        agree += int(lemma2_agree_block(xs, sites, idx0).sum())
        done += b
        block_idx += 1
    return agree, n_instances


def count_ues_in_typical_cell(bs, ues) -> int:
    """Number of UE points whose nearest BS is the origin site ``bs`` row 0.

    Accepts PppSample-like objects (with a ``points`` array) or plain
    (n, 2) arrays.  The BS list must be nonempty with the origin first.
    """
    bs_pts = np.asarray(getattr(bs, "points", bs), dtype=float)
    ue_pts = np.asarray(getattr(ues, "points", ues), dtype=float)
    if bs_pts.ndim != 2 or bs_pts.shape[0] == 0:
        raise ValueError("BS sample must contain at least the origin site")
    if not (bs_pts[0, 0] == 0.0 and bs_pts[0, 1] == 0.0):
        raise ValueError("BS site 0 must be the origin (typical-cell convention)")
    if ue_pts.shape[0] == 0:
        return 0
    return int(origin_cell_mask(ue_pts, bs_pts).sum())


def _origin_first(others: np.ndarray) -> np.ndarray:
    """Origin site prepended; competitors sorted near-to-far so membership
    scans reject points early."""
    order = np.argsort(np.einsum("ij,ij->i", others, others))
    return np.concatenate([np.zeros((1, 2)), others[order]], axis=0)


def typical_cell_stats(lambda_b: float, window: Window, n_rep: int, seed: int,
                       lambda_u: float = 0.0, n_probes: int = DEFAULT_N_PROBES,
                       threads: int | None = None) -> CellStats:
    """Replicated area and UE-count statistics of the origin cell.

    Each replication ``i`` draws, from substream ``(seed, i)``: the site
    process, then (if ``lambda_u > 0``) the UE process, then the area
    probes.  Probes are uniform on the origin disk of radius
    ``min(2.5/sqrt(lambda_b), d(origin, window boundary))``; the area
    estimate is the hit fraction times the probe-disk area.  A replication
    is flagged when an accepted point falls within ``2/sqrt(lambda_b)`` of
    the window edge; more than 1% flagged aborts with a window-size error.
    """
    if not lambda_b > 0:
        raise ValueError(f"lambda_b must be positive, got {lambda_b}")
    if lambda_u < 0:
        raise ValueError(f"lambda_u must be nonnegative, got {lambda_u}")
    if n_rep < 1:
        raise ValueError(f"n_rep must be >= 1, got {n_rep}")
    if n_probes < 0:
        raise ValueError(f"n_probes must be nonnegative, got {n_probes}")
    if not window.contains(ORIGIN):
        raise ValueError("window must contain the origin site")

    margin = float(boundary_distance_xy(window, np.array(0.0), np.array(0.0)))
    probe_radius = min(PROBE_FACTOR / math.sqrt(lambda_b), margin)
    probe_area = math.pi * probe_radius * probe_radius
    guard = GUARD_FACTOR / math.sqrt(lambda_b)
    probe_window = Disk(ORIGIN, probe_radius)

    def one(rep: int) -> tuple[int, float, bool]:
        rng = replication_rng(seed, rep)
        sites = _origin_first(sample_points(lambda_b, window, rng))
        count = 0
        flagged = False
        if lambda_u > 0:
            ue_pts = sample_points(lambda_u, window, rng)
            if ue_pts.shape[0]:
                mask = origin_cell_mask(ue_pts, sites)
                count = int(mask.sum())
                if count and np.any(boundary_distance_xy(
                        window, ue_pts[mask, 0], ue_pts[mask, 1]) < guard):
                    flagged = True
        area = 0.0
        if n_probes > 0:
            probes = uniform_points(n_probes, probe_window, rng)
            mask = origin_cell_mask(probes, sites)
            area = probe_area * float(mask.sum()) / n_probes
            if np.any(mask) and np.any(boundary_distance_xy(
                    window, probes[mask, 0], probes[mask, 1]) < guard):
                flagged = True
        return count, area, flagged

    rows = run_replications(one, n_rep, threads)
    n_flagged = sum(1 for _, _, f in rows if f)
    if n_flagged > MAX_FLAGGED_FRACTION * n_rep:
        raise RuntimeError(
            f"window too small: {n_flagged}/{n_rep} replications had cell points "
            f"within {guard:.3g} of the window edge")
    return CellStats(
        ue_counts=np.array([c for c, _, _ in rows], dtype=np.int64),
        areas=np.array([a for _, a, _ in rows], dtype=float),
        lambda_b=lambda_b,
    )


def typical_cell_area_mc(lambda_b: float, window: Window, n_rep: int, seed: int,
                         n_probes: int = DEFAULT_N_PROBES,
                         threads: int | None = None) -> CellStats:
    """Hit-counting estimate of the origin cell's area, one value per
    replication; the replication mean targets 1/lambda_b."""
    return typical_cell_stats(lambda_b, window, n_rep, seed,
                              lambda_u=0.0, n_probes=n_probes, threads=threads)


def write_cell_stats_csv(stats: CellStats, path: str) -> None:
    """Write per-replication rows as `replication,ue_count,cell_area`."""
    with open(path, "w", newline="") as fh:
        fh.write("replication,ue_count,cell_area\n")
        for i in range(stats.n_replications):
            fh.write(f"{i},{stats.ue_counts[i]},{stats.areas[i]:.12g}\n")
