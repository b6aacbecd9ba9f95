"""Sum/product expectation identities: closed forms next to their
Monte Carlo estimators.

Two families live here.  The finite-window identity

    E[ prod_k P(x_k) * sum_k S(x_k) ]
        = l1 * II_A S*P ds * exp( l1 * II_A (P - 1) ds )

holds exactly for a Poisson process of intensity ``l1`` on a window ``A``.
The typical-cell identities take expectations over points of a first
process that land in the origin cell of a second, origin-conditioned
process: the sum identity is exact,

    E[ sum_{k in cell} P(x_k) ] = l1 * II P(x) exp(-pi*l2*|x|^2) dx,

while the product counterpart evaluates
``exp( l1 * II (P(x) - 1) exp(-pi*l2*|x|^2) dx )``, which treats the
thinning of the cell interior to first order; its estimators are paired
with gently varying test fields where that approximation sits well inside
Monte Carlo resolution.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.stats import norm as _norm

from ._kernels import origin_cell_mask
from .fields import ScalarField, constant, disk_indicator, disk_patch, far_ring, gaussian
from .geometry import ORIGIN, Disk, Rect, Window, boundary_distance_xy
from .ppp import sample_points
from .quadrature import QuadratureSpec, integrate_1d, integrate_radial_2d
from .rng import replication_rng

__all__ = [
    "Estimate",
    "lemma1_closed_form",
    "lemma1_monte_carlo",
    "remark_sum_closed_form",
    "remark_sum_monte_carlo",
    "remark_product_closed_form",
    "remark_product_monte_carlo",
    "typical_cell_window",
    "LEMMA1_SUITE",
    "REMARK_SUM_SUITE",
    "REMARK_PRODUCT_SUITE",
]

# Sampling-window and contamination rules for typical-cell estimators: the
# window radius is WINDOW_FACTOR / sqrt(l2) and a replication is flagged
# when a cell point sits within GUARD_FACTOR / sqrt(l2) of the edge.
WINDOW_FACTOR = 8.0
GUARD_FACTOR = 2.0
MAX_FLAGGED_FRACTION = 0.01


@dataclass(frozen=True)
class Estimate:
    """Monte Carlo mean with its standard error."""

    mean: float
    stderr: float
    n_replications: int
    confidence_level: float = 0.997

    def __post_init__(self):
        if self.stderr < 0:
            raise ValueError("stderr must be nonnegative")
        if self.n_replications < 1:
            raise ValueError("n_replications must be >= 1")
        if not 0.0 < self.confidence_level < 1.0:
            raise ValueError("confidence_level must lie in (0, 1)")

    @property
    def halfwidth(self) -> float:
        z = _norm.ppf(0.5 * (1.0 + self.confidence_level))
        return float(z * self.stderr)

    def interval(self) -> tuple[float, float]:
        h = self.halfwidth
        return (self.mean - h, self.mean + h)

    def agrees_with(self, value: float, n_se: float = 3.0) -> bool:
        """|mean - value| within n_se standard errors (plus a tiny floor so
        an exactly-deterministic estimator still matches its closed form)."""
        tol = n_se * self.stderr + 1e-12 * max(1.0, abs(value))
        return abs(self.mean - value) <= tol


def _mean_stderr(values: np.ndarray) -> tuple[float, float]:
    values = np.asarray(values, dtype=float)
    n = values.size
    mean = float(values.mean())
    if n < 2:
        return mean, 0.0
    return mean, float(values.std(ddof=1) / math.sqrt(n))


def _stable_product(vals: np.ndarray) -> float:
    """Product of factors; log-space once any factor drops below 1e-3."""
    if vals.size == 0:
        return 1.0
    if np.any(vals == 0.0):
        return 0.0
    if np.any(vals < 0.0):
        return float(np.prod(vals))
    if np.any(vals < 1e-3):
        return math.exp(float(np.sum(np.log(vals))))
    return float(np.prod(vals))


# ---------------------------------------------------------------------------
# window integration helpers


def _inner_spec(spec: QuadratureSpec, extent: float) -> QuadratureSpec:
    return QuadratureSpec(
        abs_tol=0.1 * spec.abs_tol / max(extent, 1.0),
        rel_tol=max(0.1 * spec.rel_tol, 1e-13),
        max_subdivisions=spec.max_subdivisions,
    )


def _integrate_window(
    h_xy: Callable[[float, float], float],
    window: Window,
    spec: QuadratureSpec,
    h_radial: Callable[[float], float] | None = None,
    breakpoints: Sequence[float] = (),
) -> float:
    """Integral of a scalar function over a window.

    An origin-centered disk with a radial integrand collapses to a single
    1-D quadrature; otherwise the integral is iterated (angle inside radius
    for disks, x inside y for rectangles).
    """
    if isinstance(window, Disk):
        R = window.radius
        if h_radial is not None and window.center == ORIGIN:
            val, _ = integrate_1d(lambda r: h_radial(r) * r, 0.0, R, spec,
                                  points=[b for b in breakpoints if 0.0 < b < R])
            return 2.0 * math.pi * val
        cx, cy = window.center.x, window.center.y
        ispec = _inner_spec(spec, 2.0 * math.pi * R)

        def ring(r: float) -> float:
            inner, _ = integrate_1d(
                lambda th: h_xy(cx + r * math.cos(th), cy + r * math.sin(th)),
                0.0, 2.0 * math.pi, ispec)
            return inner * r

        val, _ = integrate_1d(ring, 0.0, R, spec,
                              points=[b for b in breakpoints if 0.0 < b < R])
        return val
    if isinstance(window, Rect):
        ispec = _inner_spec(spec, window.ymax - window.ymin)

        def strip(y: float) -> float:
            inner, _ = integrate_1d(lambda x: h_xy(x, y), window.xmin, window.xmax, ispec)
            return inner

        val, _ = integrate_1d(strip, window.ymin, window.ymax, spec)
        return val
    raise TypeError(f"unsupported window type {type(window).__name__}")


def _field_xy(field: ScalarField) -> Callable[[float, float], float]:
    return lambda x, y: float(field.fn(np.asarray(x, dtype=float), np.asarray(y, dtype=float)))


def _angular_mean(field: ScalarField, spec: QuadratureSpec) -> Callable[[float], float]:
    """Angular average of a field as a function of the radius."""
    if field.radial_profile is not None:
        return field.radial_profile
    f = _field_xy(field)
    ispec = _inner_spec(spec, 2.0 * math.pi)

    def mean(r: float) -> float:
        total, _ = integrate_1d(
            lambda th: f(r * math.cos(th), r * math.sin(th)), 0.0, 2.0 * math.pi, ispec)
        return total / (2.0 * math.pi)

    return mean


# ---------------------------------------------------------------------------
# finite-window identity


def lemma1_closed_form(P: ScalarField, S: ScalarField, intensity: float,
                       window: Window, quad: QuadratureSpec = QuadratureSpec()) -> float:
    """l1 * II_A S*P * exp(l1 * II_A (P - 1)) by quadrature over the window.

    Constant fields bypass quadrature entirely so the intensity-scaling
    identity (P==1, S==c gives c*l1*|A|) holds to the last bit.
    """
    if not intensity > 0:
        raise ValueError(f"intensity must be positive, got {intensity}")
    pv = P.analytic.get("value")
    sv = S.analytic.get("value")
    if pv is not None and sv is not None:
        area = window.area
        return intensity * area * pv * sv * math.exp(intensity * (pv - 1.0) * area)

    p_xy = _field_xy(P)
    s_xy = _field_xy(S)
    both_radial = P.radial_profile is not None and S.radial_profile is not None
    breaks = tuple(P.radial_breakpoints) + tuple(S.radial_breakpoints)

    sp_radial = None
    pm1_radial = None
    if both_radial:
        sp_radial = lambda r: S.radial_profile(r) * P.radial_profile(r)
    if P.radial_profile is not None:
        pm1_radial = lambda r: P.radial_profile(r) - 1.0

    integral_sp = _integrate_window(lambda x, y: s_xy(x, y) * p_xy(x, y), window, quad,
                                    h_radial=sp_radial, breakpoints=breaks)
    integral_pm1 = _integrate_window(lambda x, y: p_xy(x, y) - 1.0, window, quad,
                                     h_radial=pm1_radial,
                                     breakpoints=tuple(P.radial_breakpoints))
    return intensity * integral_sp * math.exp(intensity * integral_pm1)


def lemma1_monte_carlo(P: ScalarField, S: ScalarField, intensity: float, window: Window,
                       n_rep: int, seed: int) -> Estimate:
    """Empirical E[prod P * sum S] over fresh Poisson samples on the window.

    Empty samples contribute product 1, sum 0.  Each replication draws from
    its own counter-based substream, so results are independent of execution
    order and replication count.
    """
    if n_rep < 100:
        raise ValueError(f"n_rep must be at least 100, got {n_rep}")
    if not intensity > 0:
        raise ValueError(f"intensity must be positive, got {intensity}")
    vals = np.empty(n_rep)
    for rep in range(n_rep):
        rng = replication_rng(seed, rep)
        pts = sample_points(intensity, window, rng)
        if pts.shape[0] == 0:
            vals[rep] = 0.0
            continue
        pvals = P.values(pts)
        svals = S.values(pts)
        prod = _stable_product(pvals)
        vals[rep] = 0.0 if prod == 0.0 else prod * float(svals.sum())
    mean, stderr = _mean_stderr(vals)
    return Estimate(mean=mean, stderr=stderr, n_replications=n_rep)


# ---------------------------------------------------------------------------
# typical-cell identities


def typical_cell_window(lambda2: float) -> Disk:
    """Default sampling window for typical-cell estimators at site
    intensity ``lambda2``: an origin disk of radius 8 / sqrt(lambda2)."""
    if not lambda2 > 0:
        raise ValueError(f"site intensity must be positive, got {lambda2}")
    return Disk(ORIGIN, WINDOW_FACTOR / math.sqrt(lambda2))


def remark_sum_closed_form(P: ScalarField, lambda1: float, lambda2: float,
                           quad: QuadratureSpec = QuadratureSpec()) -> float:
    """l1 * 2*pi * int_0^inf Pbar(r) exp(-pi*l2*r^2) r dr."""
    if not (lambda1 > 0 and lambda2 > 0):
        raise ValueError("intensities must be positive")
    pbar = _angular_mean(P, quad)

    def g(r: float) -> float:
        kern = math.exp(-math.pi * lambda2 * r * r)
        if kern == 0.0:
            return 0.0
        return pbar(r) * kern

    return lambda1 * integrate_radial_2d(g, quad, points=P.radial_breakpoints)


def remark_product_closed_form(P: ScalarField, lambda1: float, lambda2: float,
                               quad: QuadratureSpec = QuadratureSpec()) -> float:
    """exp( l1 * 2*pi * int_0^inf (Pbar(r) - 1) exp(-pi*l2*r^2) r dr ).

    For bounded fields the integrand decays with the Gaussian kernel, so the
    exponent is finite; a hypothetical divergence to -inf simply yields 0.
    """
    if not (lambda1 > 0 and lambda2 > 0):
        raise ValueError("intensities must be positive")
    pbar = _angular_mean(P, quad)

    def g(r: float) -> float:
        kern = math.exp(-math.pi * lambda2 * r * r)
        if kern == 0.0:
            return 0.0
        return (pbar(r) - 1.0) * kern

    exponent = lambda1 * integrate_radial_2d(g, quad, points=P.radial_breakpoints)
    return math.exp(exponent)


def _cell_replications(P: ScalarField, lambda1: float, lambda2: float, window: Window,
                       n_rep: int, seed: int, reduce: str) -> Estimate:
    if n_rep < 100:
        raise ValueError(f"n_rep must be at least 100, got {n_rep}")
    if not (lambda1 > 0 and lambda2 > 0):
        raise ValueError("intensities must be positive")
    if not window.contains(ORIGIN):
        raise ValueError("typical-cell window must contain the origin")
    guard = GUARD_FACTOR / math.sqrt(lambda2)
    vals = np.empty(n_rep)
    n_flagged = 0
    for rep in range(n_rep):
        rng = replication_rng(seed, rep)
        others = sample_points(lambda2, window, rng)
        # origin site first; competitors sorted near-to-far so the
        # membership scan rejects points early
        order = np.argsort(np.einsum("ij,ij->i", others, others))
        sites = np.concatenate([np.zeros((1, 2)), others[order]], axis=0)
        pts = sample_points(lambda1, window, rng)
        mask = origin_cell_mask(pts, sites)
        members = pts[mask]
        if members.shape[0] and np.any(
                boundary_distance_xy(window, members[:, 0], members[:, 1]) < guard):
            n_flagged += 1
        if reduce == "sum":
            vals[rep] = float(P.values(members).sum()) if members.shape[0] else 0.0
        else:
            vals[rep] = _stable_product(P.values(members))
    if n_flagged > MAX_FLAGGED_FRACTION * n_rep:
        raise RuntimeError(
            f"boundary contamination: {n_flagged}/{n_rep} replications had cell "
            f"points within {guard:.3g} of the window edge; enlarge the window")
    mean, stderr = _mean_stderr(vals)
    return Estimate(mean=mean, stderr=stderr, n_replications=n_rep)


def remark_sum_monte_carlo(P: ScalarField, lambda1: float, lambda2: float, window: Window,
                           n_rep: int, seed: int) -> Estimate:
    """Empirical E[sum of P over first-process points in the origin cell]."""
    return _cell_replications(P, lambda1, lambda2, window, n_rep, seed, "sum")


def remark_product_monte_carlo(P: ScalarField, lambda1: float, lambda2: float, window: Window,
                               n_rep: int, seed: int) -> Estimate:
    """Empirical E[product of P over first-process points in the origin
    cell]; an empty cell contributes 1."""
    return _cell_replications(P, lambda1, lambda2, window, n_rep, seed, "product")


# ---------------------------------------------------------------------------
# named test suites (shared by the verification CLI and the test suite)

# (name, P, S, intensity, window)
LEMMA1_SUITE: tuple[tuple[str, ScalarField, ScalarField, float, Window], ...] = (
    ("constants", constant(0.7), constant(1.5), 1.0, Disk(ORIGIN, 2.0)),
    ("disk_indicators",
     disk_indicator(1.0, inside=0.5, outside=1.0),
     disk_indicator(1.0, inside=1.0, outside=0.0),
     1.0, Disk(ORIGIN, 2.0)),
    ("gaussians", gaussian(1.0), gaussian(1.0), 1.0, Disk(ORIGIN, 2.0)),
)

# (name, P, lambda1, lambda2)
REMARK_SUM_SUITE: tuple[tuple[str, ScalarField, float, float], ...] = (
    ("unit", constant(1.0), 10.0, 1.0),
    ("gaussian_kernel", gaussian(math.pi), 10.0, 1.0),
    ("disk", disk_indicator(0.6), 10.0, 1.0),
)

# (name, P, lambda1, lambda2)
REMARK_PRODUCT_SUITE: tuple[tuple[str, ScalarField, float, float], ...] = (
    ("unit", constant(1.0), 1.0, 1.0),
    ("patch", disk_patch(0.3, 0.85), 1.0, 1.0),
    ("far_ring", far_ring(WINDOW_FACTOR, 0.4), 1.0, 1.0),
)
