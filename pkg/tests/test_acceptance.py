"""End-to-end acceptance criteria.

Each test implements one numbered criterion at its stated tolerance and
runtime budget and records a one-line verdict (printed in the terminal
summary).  Seeds are fixed so every run is reproducible.
"""
import math
import time
import warnings
from dataclasses import replace

import numpy as np
import pytest

from conftest import record_criterion
from ppvt import analysis, netsim
from ppvt.config import db_to_linear, parse_db_grid
from ppvt.geometry import ORIGIN, Disk
from ppvt.identities import (
    LEMMA1_SUITE,
    REMARK_PRODUCT_SUITE,
    REMARK_SUM_SUITE,
    lemma1_closed_form,
    lemma1_monte_carlo,
    remark_product_closed_form,
    remark_product_monte_carlo,
    remark_sum_closed_form,
    remark_sum_monte_carlo,
    typical_cell_window,
)
from ppvt.netsim import NetworkScenario
from ppvt.voronoi import GammaCellModel, membership_agreement, typical_cell_stats

pytestmark = pytest.mark.acceptance


def test_criterion_01_membership_equivalence_at_scale():
    membership_agreement(64, seed=1)  # warm the compiled kernels untimed
    t0 = time.perf_counter()
    agree, total = membership_agreement(1_000_000, seed=101)
    elapsed = time.perf_counter() - t0
    assert total == 1_000_000
    assert agree == total, f"{total - agree} disagreements out of {total}"
    assert elapsed < 30.0
    record_criterion(
        f"criterion 1: PASS ({agree}/{total} membership agreements, {elapsed:.1f}s)")


def test_criterion_02_mean_ue_population():
    details = []
    for (lam_u, lam_b), seed in zip([(10.0, 1.0), (1.0, 1.0), (5.0, 2.0)],
                                    (102, 202, 302)):
        sc = NetworkScenario(lambda_b=lam_b, lambda_u=lam_u, R=1e4, gamma=1.0)
        t0 = time.perf_counter()
        est = netsim.estimate_mean_ues(sc, n_rep=20_000, seed=seed)
        elapsed = time.perf_counter() - t0
        ratio = lam_u / lam_b
        assert abs(est.mean - ratio) <= 3.0 * est.stderr, \
            f"({lam_u},{lam_b}): {est.mean} vs {ratio} at SE {est.stderr}"
        assert est.stderr < 0.01 * est.mean, \
            f"({lam_u},{lam_b}): SE {est.stderr} not below 1% of mean {est.mean}"
        assert elapsed < 120.0
        details.append(f"{lam_u:g}/{lam_b:g} -> {est.mean:.4f}+-{est.stderr:.4f}")
    record_criterion("criterion 2: PASS (" + "; ".join(details) + ")")


def test_criterion_03_first_moment_identity():
    t0 = time.perf_counter()
    names = []
    for i, (name, P, S, intensity, window) in enumerate(LEMMA1_SUITE):
        closed = lemma1_closed_form(P, S, intensity, window)
        est = lemma1_monte_carlo(P, S, intensity, window, n_rep=100_000, seed=103 + i)
        assert est.agrees_with(closed), (name, est.mean, est.stderr, closed)
        names.append(name)
    elapsed = time.perf_counter() - t0
    assert elapsed < 120.0
    record_criterion(
        f"criterion 3: PASS ({', '.join(names)} at n=100000, {elapsed:.1f}s)")


def test_criterion_04_population_identities():
    t0 = time.perf_counter()
    checked = 0
    for i, (name, P, lam1, lam2) in enumerate(REMARK_SUM_SUITE):
        closed = remark_sum_closed_form(P, lam1, lam2)
        est = remark_sum_monte_carlo(P, lam1, lam2, typical_cell_window(lam2),
                                     n_rep=100_000, seed=104 + i)
        assert est.agrees_with(closed), ("sum", name, est.mean, est.stderr, closed)
        checked += 1
    for i, (name, P, lam1, lam2) in enumerate(REMARK_PRODUCT_SUITE):
        closed = remark_product_closed_form(P, lam1, lam2)
        est = remark_product_monte_carlo(P, lam1, lam2, typical_cell_window(lam2),
                                         n_rep=100_000, seed=114 + i)
        assert est.agrees_with(closed), ("product", name, est.mean, est.stderr, closed)
        checked += 1
    elapsed = time.perf_counter() - t0
    assert elapsed < 180.0
    record_criterion(
        f"criterion 4: PASS (sum and product identities, {checked} field sets "
        f"at n=100000, {elapsed:.1f}s)")


def test_criterion_05_coverage_probability():
    t0 = time.perf_counter()
    closed_at_1 = analysis.coverage_closed_form(1.0)
    assert abs(closed_at_1 - 1.0 / (1.0 + math.pi / 4.0)) < 1e-4
    zs = []
    for gamma, seed in ((0.1, 105), (1.0, 205), (10.0, 305)):
        sc = NetworkScenario(lambda_b=1.0, lambda_u=1.0, R=1e4, gamma=gamma)
        est = netsim.estimate_coverage_mc(sc, n_rep=60_000, seed=seed)
        closed = analysis.coverage_closed_form(gamma)
        assert est.agrees_with(closed), (gamma, est.mean, est.stderr, closed)
        zs.append(f"gamma={gamma:g}: z={(est.mean - closed) / est.stderr:+.2f}")
    elapsed = time.perf_counter() - t0
    assert elapsed < 120.0
    record_criterion(f"criterion 5: PASS ({'; '.join(zs)}, {elapsed:.1f}s)")


def test_criterion_06_consumption_mc_agrees_with_closed_form():
    t0 = time.perf_counter()
    zs = []
    for gamma, seed in zip((0.1, 0.5, 1.0, 2.0, 10.0), (106, 206, 306, 406, 506)):
        sc = NetworkScenario(lambda_b=1.0, lambda_u=10.0, R=1e4, gamma=gamma)
        closed = analysis.W_closed_form(sc)
        est = netsim.estimate_W_mc(sc, n_rep=20_000, seed=seed)
        assert est.agrees_with(closed), (gamma, est.mean, est.stderr, closed)
        zs.append(f"gamma={gamma:g}: z={(est.mean - closed) / est.stderr:+.2f}")
    elapsed = time.perf_counter() - t0
    assert elapsed < 600.0
    record_criterion(f"criterion 6: PASS ({'; '.join(zs)}, {elapsed:.1f}s)")


def test_criterion_07_approximation_gap_across_the_grid():
    t0 = time.perf_counter()
    grid_db = parse_db_grid("gamma_grid_db", "-20:1:30")
    assert len(grid_db) == 51 and grid_db[0] == -20.0 and grid_db[-1] == 30.0
    base = NetworkScenario(lambda_b=1.0, lambda_u=10.0, R=1e4, gamma=1.0)
    exact = np.array([analysis.W_closed_form(replace(base, gamma=db_to_linear(g)))
                      for g in grid_db])
    approx = np.array([analysis.W_approx(replace(base, gamma=db_to_linear(g)))
                       for g in grid_db])
    assert np.all(np.diff(exact) < 0.0), "exact curve not nonincreasing in gamma"
    assert np.all(np.diff(approx) < 0.0), "approx curve not nonincreasing in gamma"
    rel_gap = np.abs(approx - exact) / exact
    mid = grid_db.index(0.0)
    extreme_gap = max(rel_gap[0], rel_gap[-1])
    assert extreme_gap > rel_gap[mid], (rel_gap[0], rel_gap[mid], rel_gap[-1])
    elapsed = time.perf_counter() - t0
    assert elapsed < 60.0
    record_criterion(
        f"criterion 7: PASS (both curves decreasing; relative gap "
        f"{rel_gap[0]:.4f} @-20dB, {rel_gap[mid]:.4f} @0dB, {rel_gap[-1]:.4f} @+30dB, "
        f"{elapsed:.1f}s)")


def test_criterion_08_divergence_toward_small_thresholds():
    t0 = time.perf_counter()
    base = NetworkScenario(lambda_b=1.0, lambda_u=10.0, R=1e4, gamma=1.0)
    curve = analysis.divergence_scan(base, [1e-1, 1e-2, 1e-3, 1e-4])
    along_scan = curve.values[::-1]  # back to decreasing-gamma order
    assert np.all(np.diff(along_scan) > 0.0)
    elapsed = time.perf_counter() - t0
    assert elapsed < 60.0
    record_criterion(
        "criterion 8: PASS (W strictly increasing along gamma = 1e-1..1e-4: "
        + " < ".join(f"{v:.0f}" for v in along_scan) + f", {elapsed:.1f}s)")


def test_criterion_09_structural_invariants():
    # threshold inversion across six decades
    worst = 0.0
    for g in np.logspace(-3, 3, 121):
        g = float(g)
        got = analysis.eta(analysis.w_threshold(1e4, g), 1e4)
        worst = max(worst, abs(got - g) / g)
    assert worst < 1e-12, f"eta(w_th) relative error {worst:.3e}"
    # linearity of both reported forms in R and lambda_u
    base = NetworkScenario(lambda_b=1.0, lambda_u=10.0, R=1e4, gamma=1.0)
    worst_lin = 0.0
    for fn in (analysis.W_closed_form, analysis.W_approx):
        w1 = fn(base)
        worst_lin = max(worst_lin, abs(fn(replace(base, R=3e4)) / (3.0 * w1) - 1.0))
        worst_lin = max(worst_lin,
                        abs(fn(replace(base, lambda_u=25.0)) / (2.5 * w1) - 1.0))
    assert worst_lin < 1e-9, f"linearity relative error {worst_lin:.3e}"
    # by-parts vs direct quadrature, both integral families
    worst_quad = 0.0
    for g in (0.1, 1.0, 10.0):
        sc = replace(base, gamma=g)
        worst_quad = max(worst_quad, abs(
            analysis.W_closed_form_direct(sc) / analysis.W_closed_form(sc) - 1.0))
        worst_quad = max(worst_quad, abs(
            analysis.W_double_gate_direct(sc) / analysis.W_double_gate(sc) - 1.0))
    assert worst_quad < 1e-6, f"by-parts vs direct relative error {worst_quad:.3e}"
    record_criterion(
        f"criterion 9: PASS (inversion {worst:.2e}, linearity {worst_lin:.2e}, "
        f"quadrature routes {worst_quad:.2e})")


def test_criterion_10_cell_area_distribution():
    t0 = time.perf_counter()
    stats = typical_cell_stats(1.0, Disk(ORIGIN, 8.0), n_rep=10_000, seed=110)
    ks = GammaCellModel.for_intensity(1.0).ks_distance(stats.areas)
    elapsed = time.perf_counter() - t0
    assert ks < 0.05, f"KS={ks:.4f} is beyond even the soft band (>= 0.05)"
    if ks >= 0.02:
        warnings.warn(
            f"cell-area KS statistic {ks:.4f} sits in the soft band [0.02, 0.05): "
            "the fitted form is an approximation, treating as pass-with-warning")
        record_criterion(
            f"criterion 10: PASS with warning (KS={ks:.4f} in [0.02, 0.05), "
            f"{elapsed:.1f}s)")
    else:
        record_criterion(
            f"criterion 10: PASS (KS={ks:.4f} < 0.02 on 10000 areas, {elapsed:.1f}s)")
