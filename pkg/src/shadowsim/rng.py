"""Seeded randomness helpers.

Everything stochastic in this package draws from numpy's PCG64 generator so
runs are reproducible from a single integer seed.  Independent substreams for
subtasks are derived with numpy's SeedSequence.spawn, keyed by task index,
which is the documented split function for this package.
"""

from __future__ import annotations

import numpy as np

RNG_NAME = "numpy-pcg64"


def make_rng(seed: int | None) -> np.random.Generator:
    return np.random.default_rng(seed)


def substream(seed: int | None, index: int) -> np.random.Generator:
    """Generator for subtask ``index`` of a run seeded with ``seed``."""
    root = np.random.SeedSequence(seed)
    return np.random.default_rng(root.spawn(index + 1)[index])
