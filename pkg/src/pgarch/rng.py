"""
Counter-based innovation streams.

Draw number ``n`` of stream ``(seed, stream, index)`` is a pure function of
those four integers: a Philox generator keyed by the seed sequence is moved
straight to counter position ``n``.  Any block of draws can therefore be
produced independently, in any order or on any worker, with identical values.
Each draw consumes exactly one 64-bit word and is mapped to the innovation
law by its inverse CDF.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special

from pgarch.model import InnovationDist

__all__ = ["SIMULATION", "LYAPUNOV", "ERGODICITY", "uniforms", "innovations"]

# stream tags
SIMULATION = 0
LYAPUNOV = 1
ERGODICITY = 2

_WORDS_PER_COUNTER = 4


def _key(seed: int, stream: int, index: int) -> np.ndarray:
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(stream), int(index)))
    return ss.generate_state(2, dtype=np.uint64)


def uniforms(seed: int, stream: int, index: int, start: int, count: int) -> np.ndarray:
    """Open-interval uniforms for draw positions ``start .. start + count - 1``."""
    if start < 0 or count < 0:
        raise ValueError("start and count must be nonnegative")
    bg = np.random.Philox(key=_key(seed, stream, index))
    skip, offset = divmod(int(start), _WORDS_PER_COUNTER)
    if skip:
        bg.advance(skip)
    raw = bg.random_raw(offset + int(count))[offset:]
    return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


def innovations(
    dist: InnovationDist, seed: int, stream: int, index: int, start: int, count: int
) -> np.ndarray:
    """Innovations ``eps`` (not squared) for draw positions ``start ..``."""
    u = uniforms(seed, stream, index, start, count)
    if dist.kind == "gaussian":
        return special.ndtri(u)
    if dist.kind == "student_t":
        return special.stdtrit(dist.nu, u) * math.sqrt((dist.nu - 2.0) / dist.nu)
    return np.where(u < 0.5, -1.0, 1.0)
