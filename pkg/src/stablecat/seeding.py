"""Counter-based seed splitting.

Every stochastic routine takes an integer ``seed``. Independent sub-streams
(per sample, per path batch, per medium) are derived from ``(seed, index...)``
through :class:`numpy.random.SeedSequence` spawn keys, so results never depend
on the order in which streams are consumed.
"""

from __future__ import annotations

import numpy as np

SEED_MASK = (1 << 64) - 1


def child_rng(seed: int, *index: int) -> np.random.Generator:
    """Generator for the sub-stream ``index`` of ``seed``."""
    ss = np.random.SeedSequence(entropy=int(seed) & SEED_MASK, spawn_key=tuple(int(i) for i in index))
    return np.random.Generator(np.random.PCG64(ss))


def child_seed(seed: int, *index: int) -> int:
    """64-bit integer seed for the sub-stream ``index`` of ``seed``."""
    ss = np.random.SeedSequence(entropy=int(seed) & SEED_MASK, spawn_key=tuple(int(i) for i in index))
    return int(ss.generate_state(1, dtype=np.uint64)[0])
