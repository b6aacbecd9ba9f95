"""Closed-form evaluators for the interference-limited, fourth-power
path-loss downlink: mean typical-cell bandwidth consumption, its
coarse approximation, coverage probability, and their building blocks.

Notation used throughout this module:

* ``T(x) = 1 + sqrt(x) * arctan(sqrt(x))`` — the interference kernel.
* ``eta(w) = 2^(R/w) - 1`` — the SINR needed to hit rate R in bandwidth w;
  it inverts the allocation rule, so ``eta(w_th) = gamma`` exactly.
* ``F(w) = 1 - 1/T(eta(w))`` is the CDF of the bandwidth demanded by a
  served UE, supported on (0, w_th] with an atom of mass ``1 - 1/T(gamma)``
  at zero accounting for unserved UEs.

The mean consumption follows by integrating the per-UE demand against the
cell's UE population:

    W(gamma) = (lambda_u/lambda_b) * [ w_th/T(gamma)
                                        - int_0^w_th dw / T(eta(w)) ],

the integration-by-parts form of ``(lambda_u/lambda_b) * int w dF(w)``.
A second family, ``W_double_gate``, answers a subtly different question:
the mean when each UE's service gate is decided by an independent SINR
draw rather than the one that sets its bandwidth.  Its integrand is the
ratio ``G(w) = (eta(w) - gamma) / (eta(w) T(eta(w)) - gamma T(gamma))``,
and the two families bracket the plausible readings of the allocation
policy; Monte Carlo (``netsim.estimate_W_mc``) discriminates and agrees
with ``W_closed_form``.

All integrals run in scaled units v = w/R (eta depends on w only through
R/w), which makes R-linearity and dependence on the intensity *ratio*
exact by construction rather than a quadrature accident.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .netsim import NetworkScenario
from .quadrature import QuadratureSpec, integrate_1d

__all__ = [
    "BandwidthCurve",
    "T",
    "T_prime",
    "eta",
    "w_threshold",
    "G",
    "G_prime",
    "W_closed_form",
    "W_closed_form_direct",
    "W_double_gate",
    "W_double_gate_direct",
    "W_approx",
    "coverage_closed_form",
    "mean_ues_closed_form",
    "divergence_scan",
]

_LN2 = math.log(2.0)
_DEFAULT_QUAD = QuadratureSpec()

# eta values above this are treated as the w -> 0 limit (integrands vanish
# there faster than any power; see the tail bounds in the tests).
_ETA_HUGE = 1e15
# relative |eta - gamma| below which the removable-limit series takes over
_NEAR_THRESHOLD = 1e-6


def T(x: float) -> float:
    """1 + sqrt(x) * arctan(sqrt(x)) for x >= 0."""
    if not x >= 0:
        raise ValueError(f"T is defined for x >= 0, got {x}")
    s = math.sqrt(x)
    return 1.0 + s * math.atan(s)


def T_prime(x: float) -> float:
    """Derivative of T: arctan(sqrt(x))/(2 sqrt(x)) + 1/(2(1+x)); value 1 at 0."""
    if not x >= 0:
        raise ValueError(f"T_prime is defined for x >= 0, got {x}")
    if x == 0.0:
        return 1.0
    s = math.sqrt(x)
    return math.atan(s) / (2.0 * s) + 1.0 / (2.0 * (1.0 + x))


def _T_second(x: float) -> float:
    # 1/(4x(1+x)) - arctan(sqrt(x))/(4 x^{3/2}) - 1/(2(1+x)^2), x > 0
    s = math.sqrt(x)
    return (1.0 / (4.0 * x * (1.0 + x))
            - math.atan(s) / (4.0 * x * s)
            - 1.0 / (2.0 * (1.0 + x) ** 2))


def eta(w: float, R: float) -> float:
    """2^(R/w) - 1: the SINR at which rate R exactly fills bandwidth w."""
    if not w > 0:
        raise ValueError(f"bandwidth w must be positive, got {w}")
    if not R > 0:
        raise ValueError(f"rate R must be positive, got {R}")
    return _eta_of_inv_v(R / w)


def _eta_of_inv_v(inv_v: float) -> float:
    # expm1 keeps eta(w_th) = gamma to the last bit; overflow -> inf
    a = _LN2 * inv_v
    if a > 700.0:
        return math.inf
    return math.expm1(a)


def w_threshold(R: float, gamma: float) -> float:
    """R / log2(1 + gamma): the bandwidth handed to a threshold-SINR UE."""
    if not R > 0:
        raise ValueError(f"rate R must be positive, got {R}")
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    return R * _LN2 / math.log1p(gamma)


def _G_of_eta(ev: float, gamma: float, tg: float) -> float:
    """Core ratio (ev - gamma) / (ev T(ev) - gamma T(gamma)) with its
    removable limit at ev == gamma; tg = T(gamma) precomputed."""
    if math.isinf(ev):
        return 0.0
    de = ev - gamma
    tt = tg + gamma * T_prime(gamma)
    if abs(de) <= _NEAR_THRESHOLD * max(gamma, 1e-300):
        # one series term past the limit 1/tt keeps the join C1-smooth
        b = 2.0 * T_prime(gamma) + (gamma * _T_second(gamma) if gamma > 0 else 0.0)
        return 1.0 / (tt + 0.5 * de * b)
    return de / (ev * T(ev) - gamma * tg)


def _dG_deta(ev: float, gamma: float, tg: float) -> float:
    if ev > _ETA_HUGE:
        return 0.0
    de = ev - gamma
    tt = tg + gamma * T_prime(gamma)
    if abs(de) <= _NEAR_THRESHOLD * max(gamma, 1e-300):
        b = 2.0 * T_prime(gamma) + (gamma * _T_second(gamma) if gamma > 0 else 0.0)
        return -b / (2.0 * tt * tt)
    d = ev * T(ev) - gamma * tg
    d_eta = T(ev) + ev * T_prime(ev)
    return (d - de * d_eta) / (d * d)


def _check_w_domain(w: float, gamma: float, R: float) -> float:
    wt = w_threshold(R, gamma)
    if not 0 < w <= wt * (1.0 + 1e-9):
        raise ValueError(f"w must lie in (0, w_th] = (0, {wt:.12g}], got {w}")
    return wt


def G(w: float, gamma: float, R: float) -> float:
    """(eta(w) - gamma) / (eta(w) T(eta(w)) - gamma T(gamma)) on (0, w_th],
    with the removable 0/0 at w_th replaced by 1/(T(gamma) + gamma T'(gamma))."""
    _check_w_domain(w, gamma, R)
    return _G_of_eta(eta(w, R), gamma, T(gamma))


def G_prime(w: float, gamma: float, R: float) -> float:
    """Analytic dG/dw via the chain rule through eta'(w) = -(R ln2 / w^2) 2^(R/w)."""
    _check_w_domain(w, gamma, R)
    ev = eta(w, R)
    if ev > _ETA_HUGE:
        return 0.0
    eta_prime = -(_LN2 * R / (w * w)) * (ev + 1.0)
    return _dG_deta(ev, gamma, T(gamma)) * eta_prime


def _require_closed_form(scenario: NetworkScenario) -> None:
    if scenario.e != 4.0:
        raise ValueError(
            f"closed forms are available only for path-loss exponent e = 4, got "
            f"e = {scenario.e}; use the Monte Carlo estimators instead")
    if not math.isinf(scenario.gamma_tx):
        raise ValueError(
            "closed forms assume the interference-limited regime (gamma_tx = inf); "
            f"got gamma_tx = {scenario.gamma_tx}")
    if not scenario.gamma > 0:
        raise ValueError("mean consumption diverges as gamma -> 0; gamma must be positive")


def _bracket_exact(gamma: float, quad: QuadratureSpec) -> float:
    """v_th/T(gamma) - int_0^v_th dv / T(eta(v)) in scaled units v = w/R."""
    v_th = _LN2 / math.log1p(gamma)
    tg = T(gamma)

    def psi(v: float) -> float:
        ev = _eta_of_inv_v(1.0 / v)
        t = T(ev)
        return 0.0 if math.isinf(t) else 1.0 / t

    integral, _ = integrate_1d(psi, 0.0, v_th, quad)
    return v_th / tg - integral


def W_closed_form(scenario: NetworkScenario,
                  quad: QuadratureSpec = _DEFAULT_QUAD) -> float:
    """Mean bandwidth consumption of the typical cell (exact form).

    (lambda_u/lambda_b) * [w_th/T(gamma) - int_0^w_th dw/T(eta(w))]: the
    integration-by-parts evaluation of the mean per-UE demand times the
    mean cell population.  Requires e = 4 and gamma_tx = inf.
    """
    _require_closed_form(scenario)
    ratio = scenario.lambda_u / scenario.lambda_b
    return ratio * scenario.R * _bracket_exact(scenario.gamma, quad)


def W_closed_form_direct(scenario: NetworkScenario,
                         quad: QuadratureSpec = _DEFAULT_QUAD) -> float:
    """Cross-check path for W_closed_form: direct quadrature of
    w * d/dw[1/T(eta(w))] instead of the by-parts form."""
    _require_closed_form(scenario)
    gamma = scenario.gamma
    v_th = _LN2 / math.log1p(gamma)

    def integrand(v: float) -> float:
        ev = _eta_of_inv_v(1.0 / v)
        if ev > _ETA_HUGE:
            return 0.0
        t = T(ev)
        eta_prime = -(_LN2 / (v * v)) * (ev + 1.0)
        return v * (-T_prime(ev) * eta_prime / (t * t))

    integral, _ = integrate_1d(integrand, 0.0, v_th, quad)
    return (scenario.lambda_u / scenario.lambda_b) * scenario.R * integral


def W_double_gate(scenario: NetworkScenario,
                  quad: QuadratureSpec = _DEFAULT_QUAD) -> float:
    """Mean consumption when each UE's service gate is decided by an
    independent SINR draw (so a UE can be allocated the bandwidth its first
    draw implies, yet gated on a second draw).

    Evaluates (lambda_u/lambda_b) * ([w G(w)] at w_th - int_0^w_th G(w) dw),
    the by-parts form of integrating w against dG/dw.
    """
    _require_closed_form(scenario)
    gamma = scenario.gamma
    tg = T(gamma)
    v_th = _LN2 / math.log1p(gamma)

    def g1(v: float) -> float:
        return _G_of_eta(_eta_of_inv_v(1.0 / v), gamma, tg)

    integral, _ = integrate_1d(g1, 0.0, v_th, quad)
    bracket = v_th * _G_of_eta(gamma, gamma, tg) - integral
    return (scenario.lambda_u / scenario.lambda_b) * scenario.R * bracket


def W_double_gate_direct(scenario: NetworkScenario,
                         quad: QuadratureSpec = _DEFAULT_QUAD) -> float:
    """Cross-check path for W_double_gate: direct quadrature of w * G'(w)."""
    _require_closed_form(scenario)
    gamma = scenario.gamma
    tg = T(gamma)
    v_th = _LN2 / math.log1p(gamma)

    def integrand(v: float) -> float:
        ev = _eta_of_inv_v(1.0 / v)
        if ev > _ETA_HUGE:
            return 0.0
        eta_prime = -(_LN2 / (v * v)) * (ev + 1.0)
        return v * _dG_deta(ev, gamma, tg) * eta_prime

    integral, _ = integrate_1d(integrand, 0.0, v_th, quad)
    return (scenario.lambda_u / scenario.lambda_b) * scenario.R * integral


def W_approx(scenario: NetworkScenario,
             quad: QuadratureSpec = _DEFAULT_QUAD) -> float:
    """Coarse approximation: mean cell population times mean demand times
    the service probability once more — i.e. W_closed_form scaled by
    1/T(gamma).  Accurate for moderate gamma, degrades at the extremes."""
    _require_closed_form(scenario)
    ratio = scenario.lambda_u / scenario.lambda_b
    return ratio * scenario.R * _bracket_exact(scenario.gamma, quad) / T(scenario.gamma)


def coverage_closed_form(gamma: float) -> float:
    """P(SINR >= gamma) for the typical UE served by its nearest BS:
    1/T(gamma), for e = 4 in the interference-limited regime."""
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    return 1.0 / T(gamma)


def mean_ues_closed_form(lambda_u: float, lambda_b: float) -> float:
    """Mean number of UEs in the typical cell: lambda_u / lambda_b."""
    if not (lambda_u > 0 and lambda_b > 0):
        raise ValueError("intensities must be positive")
    return lambda_u / lambda_b


@dataclass(frozen=True)
class BandwidthCurve:
    """A consumption curve over a gamma grid (stored in increasing gamma)."""

    gamma_grid: np.ndarray
    values: np.ndarray
    label: str

    def __post_init__(self):
        grid = np.asarray(self.gamma_grid, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        if grid.ndim != 1 or grid.shape != vals.shape:
            raise ValueError("gamma_grid and values must be 1-D and equal length")
        if grid.size and not np.all(grid > 0):
            raise ValueError("gamma grid must be strictly positive")
        if grid.size > 1 and not np.all(np.diff(grid) > 0):
            raise ValueError("gamma grid must be strictly increasing")
        if vals.size and not (np.all(np.isfinite(vals)) and np.all(vals >= 0)):
            raise ValueError("curve values must be finite and nonnegative")
        if not self.label:
            raise ValueError("curve label must be nonempty")
        object.__setattr__(self, "gamma_grid", grid)
        object.__setattr__(self, "values", vals)


def divergence_scan(scenario: NetworkScenario, gamma_list,
                    quad: QuadratureSpec = _DEFAULT_QUAD) -> BandwidthCurve:
    """W_closed_form along thresholds decreasing toward zero.

    The input must be strictly decreasing and positive; consumption must
    grow strictly along the scan (it diverges as gamma -> 0), which is
    verified before returning.  The curve is returned in increasing-gamma
    order.
    """
    gammas = [float(g) for g in gamma_list]
    if len(gammas) < 2:
        raise ValueError("need at least two thresholds to scan")
    if not all(g > 0 for g in gammas):
        raise ValueError("thresholds must be strictly positive")
    if not all(a > b for a, b in zip(gammas, gammas[1:])):
        raise ValueError("thresholds must be strictly decreasing")
    values = [W_closed_form(replace(scenario, gamma=g), quad) for g in gammas]
    if not all(b > a for a, b in zip(values, values[1:])):
        raise RuntimeError(
            "consumption failed to increase along decreasing thresholds; "
            f"values {values}")
    return BandwidthCurve(gamma_grid=np.array(gammas[::-1]),
                          values=np.array(values[::-1]), label="exact")
