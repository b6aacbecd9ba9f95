"""Downlink network Monte Carlo: SINR, truncated bandwidth allocation, and
typical-cell consumption.

Two distinct constructions live here and must not be merged:

* ``estimate_W_mc`` conditions on a base station at the origin and serves
  the UEs of the origin cell from it (typical-cell view).
* ``estimate_coverage_mc`` places the *UE* at the origin and serves it from
  the nearest base station of the plain process (typical-UE view).

Both sample on finite windows.  Interference from beyond the window is
lost, which biases SINRs upward; the estimators therefore enlarge the BS
sampling window internally (all extra sites are far interferers, membership
near the origin is unaffected) so the residual truncation bias sits well
inside Monte Carlo resolution at the accuracy targets used here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._kernels import origin_cell_mask
from .geometry import ORIGIN, Disk, boundary_distance_xy
from .identities import Estimate
from .ppp import sample_points
from .rng import master_rng, replication_rng
from .runner import run_replications
from .voronoi import GUARD_FACTOR, MAX_FLAGGED_FRACTION, typical_cell_stats

__all__ = [
    "NetworkScenario",
    "NetworkRealization",
    "realize_network",
    "sinr",
    "allocated_bandwidth",
    "typical_cell_consumption",
    "estimate_W_mc",
    "run_consumption_replications",
    "write_consumption_csv",
    "estimate_coverage_mc",
    "estimate_mean_ues",
]

_LN2 = math.log(2.0)

# Internal widening of the BS window (interference fidelity; see module
# docstring).  The membership/UE window keeps the scenario's factor.
W_MC_BS_WINDOW_MULT = 2.0
COVERAGE_BS_WINDOW_MULT = 3.0


@dataclass(frozen=True)
class NetworkScenario:
    """Static parameters of the downlink model.

    ``gamma_tx`` is the transmit SNR; ``inf`` means interference-limited
    (the noise term is exactly zero).  Rates are bits/s, bandwidths Hz,
    intensities points/m²; ``gamma`` is the linear SINR service threshold.
    """

    lambda_b: float
    lambda_u: float
    R: float
    gamma: float
    e: float = 4.0
    gamma_tx: float = math.inf
    window_radius_factor: float = 8.0

    def __post_init__(self):
        if not self.lambda_b > 0:
            raise ValueError(f"lambda_b must be positive, got {self.lambda_b}")
        if not self.lambda_u > 0:
            raise ValueError(f"lambda_u must be positive, got {self.lambda_u}")
        if not self.e > 2:
            raise ValueError(
                f"path-loss exponent must exceed 2 (interference integral diverges), got {self.e}")
        if not self.R > 0:
            raise ValueError(f"target rate R must be positive, got {self.R}")
        if not self.gamma > 0:
            raise ValueError(
                f"SINR threshold gamma must be positive (consumption diverges as "
                f"gamma -> 0), got {self.gamma}")
        if not self.gamma_tx > 0:
            raise ValueError(f"gamma_tx must be positive (possibly inf), got {self.gamma_tx}")
        if not self.window_radius_factor >= 6:
            raise ValueError(
                f"window_radius_factor must be >= 6 to control truncation bias, "
                f"got {self.window_radius_factor}")

    @property
    def window(self) -> Disk:
        """Origin disk of radius window_radius_factor / sqrt(lambda_b)."""
        return Disk(ORIGIN, self.window_radius_factor / math.sqrt(self.lambda_b))

    @property
    def interference_limited(self) -> bool:
        return math.isinf(self.gamma_tx)

    @property
    def noise_term(self) -> float:
        return 0.0 if self.interference_limited else 1.0 / self.gamma_tx


@dataclass(frozen=True)
class NetworkRealization:
    """One draw of the network: BS points (origin first), UE points, and the
    Exp(1) fading power gains ``fading[j, k]`` from BS j to UE k."""

    bs_points: np.ndarray
    ue_points: np.ndarray
    fading: np.ndarray

    def __post_init__(self):
        bs = np.asarray(self.bs_points, dtype=float)
        ue = np.asarray(self.ue_points, dtype=float)
        fad = np.asarray(self.fading, dtype=float)
        if bs.ndim != 2 or bs.shape[1] != 2 or bs.shape[0] == 0:
            raise ValueError("bs_points must be a nonempty (n, 2) array")
        if not (bs[0, 0] == 0.0 and bs[0, 1] == 0.0):
            raise ValueError("bs_points[0] must be the origin site")
        if ue.ndim != 2 or ue.shape[1] != 2:
            raise ValueError("ue_points must be an (m, 2) array")
        if fad.shape != (bs.shape[0], ue.shape[0]):
            raise ValueError(
                f"fading must have shape (n_bs, n_ue) = {(bs.shape[0], ue.shape[0])}, "
                f"got {fad.shape}")
        if fad.size and fad.min() <= 0:
            raise ValueError("fading gains must be strictly positive")
        object.__setattr__(self, "bs_points", bs)
        object.__setattr__(self, "ue_points", ue)
        object.__setattr__(self, "fading", fad)

    @property
    def n_bs(self) -> int:
        return self.bs_points.shape[0]

    @property
    def n_ue(self) -> int:
        return self.ue_points.shape[0]


def realize_network(scenario: NetworkScenario, seed: int) -> NetworkRealization:
    """Draw one network: origin BS plus BS PPP, UE PPP, fading matrix.

    Draw order (fixed for reproducibility): BS count and points, UE count
    and points, then the fading matrix row-major.
    """
    rng = master_rng(seed)
    window = scenario.window
    others = sample_points(scenario.lambda_b, window, rng)
    bs = np.concatenate([np.zeros((1, 2)), others], axis=0)
    ue = sample_points(scenario.lambda_u, window, rng)
    fading = rng.exponential(1.0, size=(bs.shape[0], ue.shape[0]))
    return NetworkRealization(bs_points=bs, ue_points=ue, fading=fading)


def sinr(ue_index: int, realization: NetworkRealization, scenario: NetworkScenario) -> float:
    """SINR of one UE served by the origin BS (index 0), all other BSs
    interfering; noise handled through the scenario's Tx-SNR."""
    if not 0 <= ue_index < realization.n_ue:
        raise ValueError(f"ue_index must lie in [0, {realization.n_ue}), got {ue_index}")
    x = realization.ue_points[ue_index]
    d2 = (realization.bs_points[:, 0] - x[0]) ** 2 + (realization.bs_points[:, 1] - x[1]) ** 2
    if d2[0] == 0.0:
        raise ValueError("UE coincides with the origin BS: path loss is singular")
    half_e = 0.5 * scenario.e
    num = realization.fading[0, ue_index] * d2[0] ** (-half_e)
    den = scenario.noise_term
    if d2.shape[0] > 1:
        with np.errstate(divide="ignore"):
            pl = d2[1:] ** (-half_e)
        den += float(np.dot(realization.fading[1:, ue_index], pl))
    if den == 0.0:
        return math.inf
    return float(num / den)


def allocated_bandwidth(sinr_value: float, R: float, gamma: float) -> float:
    """Bandwidth for one UE under the truncated allocation: R/log2(1+SINR)
    when the SINR clears the threshold, otherwise zero.

    Nonzero allocations are capped at w_th = R/log2(1+gamma), attained
    exactly on the threshold; an infinite SINR needs no bandwidth at all.
    """
    if not R > 0:
        raise ValueError(f"R must be positive, got {R}")
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    if not sinr_value >= gamma:
        return 0.0
    if math.isinf(sinr_value):
        return 0.0
    return R * _LN2 / math.log1p(sinr_value)


def _member_bandwidth_sum(bs: np.ndarray, members: np.ndarray, fading_members: np.ndarray,
                          scenario: NetworkScenario) -> tuple[float, int]:
    """Total allocation and served count for the in-cell UEs ``members``
    with fading rows restricted to those UEs (shape (n_bs, m))."""
    m = members.shape[0]
    if m == 0:
        return 0.0, 0
    d2 = ((bs[:, None, :] - members[None, :, :]) ** 2).sum(axis=2)
    if np.any(d2[0] == 0.0):
        raise ValueError("UE coincides with the origin BS: path loss is singular")
    half_e = 0.5 * scenario.e
    with np.errstate(divide="ignore"):
        pl = d2 ** (-half_e)
    num = fading_members[0] * pl[0]
    den = scenario.noise_term + (fading_members[1:] * pl[1:]).sum(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(den > 0.0, num / den, math.inf)
    served = s >= scenario.gamma
    finite_served = served & np.isfinite(s)
    total = scenario.R * _LN2 * float(np.sum(1.0 / np.log1p(s[finite_served])))
    return total, int(np.count_nonzero(served))


def typical_cell_consumption(realization: NetworkRealization,
                             scenario: NetworkScenario) -> float:
    """Sum of allocated bandwidth over the UEs whose nearest BS is the
    origin site."""
    if realization.n_ue == 0:
        return 0.0
    mask = origin_cell_mask(realization.ue_points, realization.bs_points)
    total, _ = _member_bandwidth_sum(realization.bs_points,
                                     realization.ue_points[mask],
                                     realization.fading[:, mask], scenario)
    return total


def run_consumption_replications(scenario: NetworkScenario, n_rep: int, seed: int,
                                 threads: int | None = None
                                 ) -> list[tuple[int, int, float]]:
    """Per-replication (n_ues_in_cell, n_served, consumption) rows.

    Each replication draws, from substream ``(seed, i)``: the BS process on
    a doubled-radius window (far interferers only — membership around the
    origin is unchanged), the UE process on the scenario window, then
    fading for the in-cell UEs only.  Raises when more than 1% of
    replications have cell UEs within the guard band of the window edge.
    """
    if n_rep < 1:
        raise ValueError(f"n_rep must be >= 1, got {n_rep}")
    window = scenario.window
    bs_window = Disk(ORIGIN, window.radius * W_MC_BS_WINDOW_MULT)
    guard = GUARD_FACTOR / math.sqrt(scenario.lambda_b)

    def one(rep: int) -> tuple[int, int, float, bool]:
        rng = replication_rng(seed, rep)
        others = sample_points(scenario.lambda_b, bs_window, rng)
        order = np.argsort(np.einsum("ij,ij->i", others, others))
        bs = np.concatenate([np.zeros((1, 2)), others[order]], axis=0)
        ue = sample_points(scenario.lambda_u, window, rng)
        if ue.shape[0] == 0:
            return 0, 0, 0.0, False
        mask = origin_cell_mask(ue, bs)
        members = ue[mask]
        m = members.shape[0]
        if m == 0:
            return 0, 0, 0.0, False
        flagged = bool(np.any(
            boundary_distance_xy(window, members[:, 0], members[:, 1]) < guard))
        fading_members = rng.exponential(1.0, size=(bs.shape[0], m))
        total, n_served = _member_bandwidth_sum(bs, members, fading_members, scenario)
        return m, n_served, total, flagged

    rows = run_replications(one, n_rep, threads)
    n_flagged = sum(1 for r in rows if r[3])
    if n_flagged > MAX_FLAGGED_FRACTION * n_rep:
        raise RuntimeError(
            f"window too small: {n_flagged}/{n_rep} replications had cell UEs "
            f"within {guard:.3g} of the window edge")
    return [(m, s, w) for m, s, w, _ in rows]


def estimate_W_mc(scenario: NetworkScenario, n_rep: int, seed: int,
                  threads: int | None = None) -> Estimate:
    """Replication mean/stderr of the typical cell's bandwidth consumption."""
    if n_rep < 1000:
        raise ValueError(f"n_rep must be >= 1000 for a usable stderr, got {n_rep}")
    rows = run_consumption_replications(scenario, n_rep, seed, threads)
    vals = np.array([w for _, _, w in rows])
    mean = float(vals.mean())
    stderr = float(vals.std(ddof=1) / math.sqrt(n_rep))
    return Estimate(mean=mean, stderr=stderr, n_replications=n_rep)


def write_consumption_csv(rows: Sequence[tuple[int, int, float]], path: str) -> None:
    """Write per-replication rows as `replication,n_ues_in_cell,n_served,consumption`."""
    with open(path, "w", newline="") as fh:
        fh.write("replication,n_ues_in_cell,n_served,consumption\n")
        for i, (m, s, w) in enumerate(rows):
            fh.write(f"{i},{m},{s},{w:.12g}\n")


def estimate_coverage_mc(scenario: NetworkScenario, n_rep: int, seed: int,
                         threads: int | None = None) -> Estimate:
    """Fraction of replications in which an origin UE, served by the
    *nearest* BS of the plain process, reaches SINR >= gamma.

    Note the construction differs from ``estimate_W_mc``: no BS is pinned
    at the origin; the serving site is the nearest sampled point and every
    other sampled BS interferes.
    """
    if n_rep < 100:
        raise ValueError(f"n_rep must be >= 100, got {n_rep}")
    bs_window = Disk(ORIGIN, scenario.window.radius * COVERAGE_BS_WINDOW_MULT)
    half_e = 0.5 * scenario.e
    gamma = scenario.gamma
    noise = scenario.noise_term

    def one(rep: int) -> float:
        rng = replication_rng(seed, rep)
        bs = sample_points(scenario.lambda_b, bs_window, rng)
        n = bs.shape[0]
        if n == 0:
            raise RuntimeError(
                "empty BS draw: window intensity too low for the coverage estimator")
        d2 = np.einsum("ij,ij->i", bs, bs)
        fading = rng.exponential(1.0, size=n)
        serving = int(np.argmin(d2))
        with np.errstate(divide="ignore"):
            pl = d2 ** (-half_e)
        num = fading[serving] * pl[serving]
        den = noise + float(np.dot(fading, pl)) - fading[serving] * pl[serving]
        value = math.inf if den == 0.0 else num / den
        return 1.0 if value >= gamma else 0.0

    vals = np.array(run_replications(one, n_rep, threads))
    mean = float(vals.mean())
    stderr = float(vals.std(ddof=1) / math.sqrt(n_rep))
    return Estimate(mean=mean, stderr=stderr, n_replications=n_rep)


def estimate_mean_ues(scenario: NetworkScenario, n_rep: int, seed: int,
                      threads: int | None = None) -> Estimate:
    """Replication mean/stderr of the typical cell's UE count."""
    if n_rep < 100:
        raise ValueError(f"n_rep must be >= 100, got {n_rep}")
    stats = typical_cell_stats(scenario.lambda_b, scenario.window, n_rep, seed,
                               lambda_u=scenario.lambda_u, n_probes=0, threads=threads)
    return Estimate(mean=stats.mean_ue_count, stderr=stats.ue_count_stderr,
                    n_replications=n_rep)
