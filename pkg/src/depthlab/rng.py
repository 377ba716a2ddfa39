"""Seed derivation.

Every stochastic component is driven by numpy's PCG64 generator.  Child seeds
are derived with :class:`numpy.random.SeedSequence`, using the master seed as
entropy and a tuple of non-negative integers (e.g. pair, opening, colour,
game index) as the spawn key, so disjoint cells never share a stream and any
cell can be recomputed in isolation.

Playout kernels use SplitMix64, seeded from one 64-bit draw of the owning
agent's generator per move decision (see ``depthlab.games._kernels``).
"""
from __future__ import annotations

import numpy as np


def derive_seed(master_seed: int, *key: int) -> int:
    """Return a 64-bit seed for the cell identified by ``key``."""
    if master_seed < 0 or any(k < 0 for k in key):
        raise ValueError("seed components must be non-negative integers")
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def make_generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))
