"""Deterministic substream derivation on a counter-based generator.

Every random draw in this package flows through a Philox generator keyed by
``(seed, stream)``, so any unit of work (a replication, a fold assignment)
gets its own independent stream that does not depend on execution order.
This is what makes parallel and serial benchmark runs produce identical
output.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def philox_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Generator for the ``stream``-th substream of ``seed``."""
    key = np.array([seed & _MASK64, stream & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def mix64(*parts: int) -> int:
    """Fold integers into one well-mixed 64-bit stream id (splitmix64 chain)."""
    h = 0x9E3779B97F4A7C15
    for part in parts:
        h = (h + (part & _MASK64)) & _MASK64
        h ^= h >> 30
        h = (h * 0xBF58476D1CE4E5B9) & _MASK64
        h ^= h >> 27
        h = (h * 0x94D049BB133111EB) & _MASK64
        h ^= h >> 31
    return h
