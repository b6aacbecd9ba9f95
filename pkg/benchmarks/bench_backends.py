"""Compare the compiled (numba) and pure-numpy kernel backends.

Times the three hot kernels on Monte Carlo-shaped workloads: cell
membership masks and nearest-site queries at typical replication sizes,
and the batched two-route membership check.  The first call of each
compiled kernel is excluded (JIT compilation); reported numbers are
mean +- std over the timed repeats.

Run:  python3 benchmarks/bench_backends.py [--repeats N] [--seed S]
"""
from __future__ import annotations

import argparse
import math
import time

import numpy as np

from ppvt import _kernels, _kernels_np
from ppvt.geometry import ORIGIN, Disk
from ppvt.ppp import sample_points
from ppvt.rng import master_rng


def _workloads(seed: int):
    rng = master_rng(seed)
    window = Disk(ORIGIN, 16.0)
    sites = np.concatenate([np.zeros((1, 2)), sample_points(1.0, window, rng)])
    probes = sample_points(10.0, Disk(ORIGIN, 8.0), rng)
    batch = 5000
    n_sites = 50
    xs = rng.uniform(-1.0, 1.0, size=(batch, 2))
    block_sites = rng.uniform(-1.0, 1.0, size=(batch, n_sites, 2))
    idx0 = rng.integers(0, n_sites, size=batch)
    return [
        (f"origin_cell_mask ({probes.shape[0]} points x {sites.shape[0]} sites)",
         "origin_cell_mask", (probes, sites)),
        (f"nearest_site_index ({probes.shape[0]} points x {sites.shape[0]} sites)",
         "nearest_site_index", (probes, sites)),
        (f"lemma2_agree_block ({batch} instances x {n_sites} sites)",
         "lemma2_agree_block", (xs, block_sites, idx0)),
    ]


def _time(fn, args, repeats: int) -> tuple[float, float]:
    fn(*args)  # warm-up: JIT compilation / cache priming, untimed
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        samples.append(time.perf_counter() - t0)
    arr = np.array(samples)
    return float(arr.mean()), float(arr.std())


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5, help="timed runs per kernel")
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args()
    if args.repeats < 1:
        parser.error("--repeats must be >= 1")

    print(f"active backend: {_kernels.BACKEND}")
    have_compiled = _kernels.BACKEND == "numba"
    if not have_compiled:
        print("numba backend unavailable in this process "
              "(PPVT_BACKEND=numpy or numba not importable); timing numpy only")

    rows = []
    for label, name, wargs in _workloads(args.seed):
        np_fn = getattr(_kernels_np, name)
        np_mean, np_std = _time(np_fn, wargs, args.repeats)
        if have_compiled:
            nb_fn = getattr(_kernels, name)
            got = nb_fn(*wargs)
            expect = np_fn(*wargs)
            if not np.array_equal(got, expect):
                raise SystemExit(f"backend mismatch in {name}: outputs differ")
            nb_mean, nb_std = _time(nb_fn, wargs, args.repeats)
            rows.append((label, np_mean, np_std, nb_mean, nb_std, np_mean / nb_mean))
        else:
            rows.append((label, np_mean, np_std, None, None, None))

    width = max(len(r[0]) for r in rows)
    header = f"{'kernel / workload':<{width}}  {'numpy':>16}  {'numba':>16}  {'speedup':>8}"
    print()
    print(header)
    print("-" * len(header))
    for label, np_mean, np_std, nb_mean, nb_std, speedup in rows:
        np_cell = f"{np_mean * 1e3:8.2f}±{np_std * 1e3:.2f}ms"
        if nb_mean is None:
            print(f"{label:<{width}}  {np_cell:>16}  {'-':>16}  {'-':>8}")
        else:
            nb_cell = f"{nb_mean * 1e3:8.2f}±{nb_std * 1e3:.2f}ms"
            print(f"{label:<{width}}  {np_cell:>16}  {nb_cell:>16}  {speedup:7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
