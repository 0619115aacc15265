"""Counter-based random streams: one independent Philox stream per (seed, stream id)."""
from __future__ import annotations

import numpy as np


def stream(seed: int, *ids: int) -> np.random.Generator:
    """A Philox generator keyed by ``seed`` and any number of stream indices.

    The same ``(seed, ids)`` always yields the same sequence, regardless of the
    order or thread in which streams are created.
    """
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), *map(int, ids)])))
