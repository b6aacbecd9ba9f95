"""Backend selection, kernel equivalence, and the replication runner."""
import os
import subprocess
import sys

import numpy as np
import pytest

import ppvt
from ppvt import _backend, _kernels, _kernels_np
from ppvt.runner import run_replications


def test_active_backend_reports_a_valid_choice():
    assert ppvt.active_backend() in ("numba", "numpy")
    assert _kernels.BACKEND == ppvt.active_backend()


def _random_config(rng, n_points, n_sites):
    points = rng.uniform(-2, 2, size=(n_points, 2))
    sites = rng.uniform(-2, 2, size=(n_sites, 2))
    return points, sites


@pytest.mark.parametrize("n_points,n_sites", [(0, 1), (1, 1), (7, 2), (200, 5), (50, 40)])
def test_kernels_match_numpy_reference(n_points, n_sites):
    rng = np.random.default_rng(1234 + n_points + n_sites)
    points, sites = _random_config(rng, n_points, n_sites)
    assert np.array_equal(_kernels.origin_cell_mask(points, sites),
                          _kernels_np.origin_cell_mask(points, sites))
    if n_points:
        assert np.array_equal(_kernels.nearest_site_index(points, sites),
                              _kernels_np.nearest_site_index(points, sites))


def test_kernels_agree_on_exact_ties():
    # points on the perpendicular bisector of two sites: both backends must
    # keep them in cell 0 (inclusive comparison / lowest-index argmin)
    sites = np.array([[1.0, 0.0], [-1.0, 0.0]])
    points = np.array([[0.0, -3.0], [0.0, 0.0], [0.0, 2.5]])
    for mod in (_kernels, _kernels_np):
        assert np.all(mod.origin_cell_mask(points, sites))
        assert np.array_equal(mod.nearest_site_index(points, sites), np.zeros(3, dtype=int))


def test_agree_block_matches_numpy_reference():
    rng = np.random.default_rng(99)
    B, n = 300, 6
    xs = rng.uniform(-1, 1, size=(B, 2))
    sites = rng.uniform(-1, 1, size=(B, n, 2))
    idx0 = rng.integers(0, n, size=B)
    got = _kernels.lemma2_agree_block(xs, sites, idx0)
    ref = _kernels_np.lemma2_agree_block(xs, sites, idx0)
    assert np.array_equal(np.asarray(got, dtype=bool), np.asarray(ref, dtype=bool))
    assert ref.all()  # continuous draws: both membership routes agree


def _run_with_backend(value):
    env = dict(os.environ)
    env["PPVT_BACKEND"] = value
    return subprocess.run(
        [sys.executable, "-c", "import ppvt; print(ppvt.active_backend())"],
        capture_output=True, text=True, env=env)


def test_backend_env_numpy_forces_fallback():
    proc = _run_with_backend("numpy")
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.strip() == "numpy"


def test_backend_env_rejects_unknown_value():
    proc = _run_with_backend("fortran")
    assert proc.returncode != 0
    assert "PPVT_BACKEND" in proc.stderr


def test_thread_count_env(monkeypatch):
    monkeypatch.setenv("PPVT_THREADS", "3")
    assert _backend.thread_count() == 3
    monkeypatch.setenv("PPVT_THREADS", "0")
    assert _backend.thread_count() == min(4, os.cpu_count() or 1)
    monkeypatch.delenv("PPVT_THREADS")
    assert _backend.thread_count() == min(4, os.cpu_count() or 1)
    monkeypatch.setenv("PPVT_THREADS", "-2")
    with pytest.raises(ValueError):
        _backend.thread_count()
    monkeypatch.setenv("PPVT_THREADS", "many")
    with pytest.raises(ValueError):
        _backend.thread_count()


def test_run_replications_order_and_thread_invariance():
    serial = run_replications(lambda i: i * i, 200, threads=1)
    assert serial == [i * i for i in range(200)]
    threaded = run_replications(lambda i: i * i, 200, threads=3)
    assert threaded == serial


def test_run_replications_validation():
    with pytest.raises(ValueError):
        run_replications(lambda i: i, -1)
    with pytest.raises(ValueError):
        run_replications(lambda i: i, 10, threads=0)
    assert run_replications(lambda i: i, 0) == []
