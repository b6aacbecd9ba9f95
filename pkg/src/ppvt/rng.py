"""Seed handling for reproducible (optionally parallel) Monte Carlo.

Replication ``r`` of an experiment with master seed ``s`` draws from the
counter-based Philox stream keyed by ``SeedSequence([s, r])``, so results are
identical whether replications run serially or across workers.
"""
from __future__ import annotations

import numpy as np

__all__ = ["master_rng", "replication_rng", "replication_seed"]


def master_rng(seed: int) -> np.random.Generator:
    """Generator for single-stream (non-replicated) sampling."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed])))


def replication_rng(seed: int, rep: int, stream: int = 0) -> np.random.Generator:
    """Independent substream for replication ``rep`` of experiment ``seed``.

    ``stream`` separates independent draw purposes inside one replication
    (e.g. geometry vs fading) when they must not share a stream.
    """
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence([seed, rep, stream]))
    )


def replication_seed(seed: int, rep: int, stream: int = 0) -> int:
    """A 64-bit sub-seed derived from (seed, rep); feeds APIs that take a
    plain integer seed while preserving the substream contract."""
    ss = np.random.SeedSequence([seed, rep, stream])
    return int(ss.generate_state(1, dtype=np.uint64)[0])
