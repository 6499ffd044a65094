"""Counter-based random number generation.

Every random quantity in the package is a pure function of (seed, counter),
so replications can run in any order, on any number of workers, and still
produce identical bits.  Uniform streams use the splitmix64 finalizer on
unsigned 64-bit counters; Gaussian streams use numpy's Philox generator
keyed by a derived seed.
"""
from __future__ import annotations

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_MASK = np.uint64(0xFFFFFFFFFFFFFFFF)

# 2^-53, converts the top 53 bits of a uint64 into a double in [0, 1)
_INV53 = 1.0 / float(np.uint64(1) << np.uint64(53))


def _mix(z: np.ndarray) -> np.ndarray:
    # splitmix64 finalizer; operates on uint64 arrays, wrap-around intended
    z = (z + _GOLDEN) & _MASK
    z = ((z ^ (z >> np.uint64(30))) * _MIX1) & _MASK
    z = ((z ^ (z >> np.uint64(27))) * _MIX2) & _MASK
    return z ^ (z >> np.uint64(31))


def counter_uniforms(seed: int, counters: np.ndarray) -> np.ndarray:
    """Uniform [0, 1) doubles keyed by (seed, counter), vectorized.

    The same (seed, counter) pair always yields the same double, on every
    platform; distinct counters give independent-quality streams.
    """
    c = np.asarray(counters, dtype=np.uint64)
    with np.errstate(over="ignore"):
        state = (c * _GOLDEN + np.uint64(seed & 0xFFFFFFFFFFFFFFFF)) & _MASK
        bits = _mix(state)
    return (bits >> np.uint64(11)).astype(np.float64) * _INV53


def derive_seed(*parts: int) -> int:
    """Mix integer parts into a single 63-bit seed, order-sensitive."""
    h = np.uint64(0x8E51_2F5C_3A1B_7D91)
    with np.errstate(over="ignore"):
        for p in parts:
            h = _mix(np.asarray((h ^ np.uint64(p & 0xFFFFFFFFFFFFFFFF)) & _MASK))
    return int(h) & 0x7FFFFFFFFFFFFFFF


def normal_generator(seed: int) -> np.random.Generator:
    """Philox-based Generator; used for limit-law sampling only."""
    return np.random.Generator(np.random.Philox(key=seed & 0xFFFFFFFFFFFFFFFF))
