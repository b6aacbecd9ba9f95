"""Pure-numpy reference implementations of the hot membership kernels.

These are the fallback path when numba is unavailable (or PPVT_BACKEND=numpy)
and the ground truth the compiled kernels are tested against.  All
comparisons are on squared distances; a point stays with site 0 on exact
ties (site 0 is the lowest index).
"""
from __future__ import annotations

import numpy as np

__all__ = ["origin_cell_mask", "nearest_site_index", "lemma2_agree_block"]


def origin_cell_mask(points: np.ndarray, sites: np.ndarray) -> np.ndarray:
    """Boolean mask of ``points`` whose nearest site is ``sites[0]``.

    Scans competitor sites one at a time while compacting the still-alive
    subset, so the work shrinks as points are knocked out (most points lose
    to a nearby competitor within a few scans).
    """
    pts = np.asarray(points, dtype=float)
    sts = np.asarray(sites, dtype=float)
    n = pts.shape[0]
    mask = np.ones(n, dtype=bool)
    if n == 0 or sts.shape[0] <= 1:
        return mask
    alive = np.arange(n)
    ax = pts[:, 0].copy()
    ay = pts[:, 1].copy()
    d0 = (ax - sts[0, 0]) ** 2 + (ay - sts[0, 1]) ** 2
    for j in range(1, sts.shape[0]):
        dj = (ax - sts[j, 0]) ** 2 + (ay - sts[j, 1]) ** 2
        keep = dj >= d0
        if not keep.all():
            lost = alive[~keep]
            mask[lost] = False
            alive = alive[keep]
            if alive.size == 0:
                break
            ax = ax[keep]
            ay = ay[keep]
            d0 = d0[keep]
    return mask


def nearest_site_index(points: np.ndarray, sites: np.ndarray) -> np.ndarray:
    """Lowest-index nearest site for each point (ties -> first minimizer)."""
    pts = np.asarray(points, dtype=float)
    sts = np.asarray(sites, dtype=float)
    dx = pts[:, 0][:, None] - sts[:, 0][None, :]
    dy = pts[:, 1][:, None] - sts[:, 1][None, :]
    return np.argmin(dx * dx + dy * dy, axis=1)


def lemma2_agree_block(
    xs: np.ndarray, sites: np.ndarray, idx0: np.ndarray
) -> np.ndarray:
    """Compare the two membership routes on a block of instances.

    ``xs``: (B, 2) query points; ``sites``: (B, n, 2) site configurations;
    ``idx0``: (B,) cell indices.  Returns a (B,) boolean array, True where
    the half-plane product and the lowest-index nearest-site test agree.
    """
    xs = np.asarray(xs, dtype=float)
    sites = np.asarray(sites, dtype=float)
    idx0 = np.asarray(idx0)
    dx = sites[:, :, 0] - xs[:, 0][:, None]
    dy = sites[:, :, 1] - xs[:, 1][:, None]
    d2 = dx * dx + dy * dy                      # (B, n)
    rows = np.arange(d2.shape[0])
    d_own = d2[rows, idx0]
    # product route: every half-plane factor with k != idx0 holds (inclusive)
    d_masked = d2.copy()
    d_masked[rows, idx0] = np.inf
    product = d_own <= d_masked.min(axis=1)
    # direct route: idx0 is the lowest-index minimizer
    direct = d2.argmin(axis=1) == idx0
    return product == direct
