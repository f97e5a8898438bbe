"""Counter-based deterministic random number generation.

The generator is the SplitMix64 output permutation applied to the state
``key + (counter + 1) * GOLDEN`` (all arithmetic mod 2**64).  Every draw is a
pure function of ``(key, counter)``, so values never depend on fill order,
thread count, or how many draws were taken before.  Keys for independent
streams are derived by absorbing 64-bit parts (seeds, name tags, indices)
through the same permutation.
"""

from __future__ import annotations

import hashlib

import numpy as np

_GOLDEN = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB
_MASK = 0xFFFFFFFFFFFFFFFF

_U64_GOLDEN = np.uint64(_GOLDEN)
_U64_MIX_A = np.uint64(_MIX_A)
_U64_MIX_B = np.uint64(_MIX_B)
_SHIFT_30 = np.uint64(30)
_SHIFT_27 = np.uint64(27)
_SHIFT_31 = np.uint64(31)
_SHIFT_11 = np.uint64(11)

# 2**-53: turns the top 53 bits of a u64 into a float in [0, 1)
_INV_2_53 = 1.0 / (1 << 53)


def mix64(z: np.ndarray) -> np.ndarray:
    """SplitMix64 finalizer on uint64 arrays (wrapping arithmetic)."""
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> _SHIFT_30)) * _U64_MIX_A
        z = (z ^ (z >> _SHIFT_27)) * _U64_MIX_B
        return z ^ (z >> _SHIFT_31)


def tag64(label: str) -> int:
    """Stable 64-bit tag for a stream label (first 8 bytes of blake2b)."""
    digest = hashlib.blake2b(label.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def derive_key(*parts: int) -> int:
    """Fold 64-bit parts into one stream key.

    Each part is absorbed as ``acc = mix64(acc ^ part) + GOLDEN`` so that
    distinct part tuples give (for all practical purposes) distinct keys.
    """
    acc = 0
    for part in parts:
        acc = _mix64_int(acc ^ (int(part) & _MASK))
        acc = (acc + _GOLDEN) & _MASK
    return acc


def _mix64_int(z: int) -> int:
    z = ((z ^ (z >> 30)) * _MIX_A) & _MASK
    z = ((z ^ (z >> 27)) * _MIX_B) & _MASK
    return z ^ (z >> 31)


def counter_values(key: int, counters: np.ndarray) -> np.ndarray:
    """Raw uint64 stream values at the given counters."""
    counters = np.asarray(counters, dtype=np.uint64)
    with np.errstate(over="ignore"):
        state = np.uint64(key) + (counters + np.uint64(1)) * _U64_GOLDEN
    return mix64(state)


def counter_uniforms(key: int, counters: np.ndarray) -> np.ndarray:
    """Uniform [0, 1) floats at the given counters (53-bit resolution)."""
    return (counter_values(key, counters) >> _SHIFT_11) * _INV_2_53


class CounterStream:
    """Sequential view over a counter stream.

    Advances an internal counter so repeated calls never reuse positions,
    while staying a pure function of ``(key, positions consumed)``.
    """

    def __init__(self, key: int):
        self.key = int(key) & _MASK
        self.counter = 0

    def uniforms(self, count: int) -> np.ndarray:
        counters = np.arange(self.counter, self.counter + count, dtype=np.uint64)
        self.counter += count
        return counter_uniforms(self.key, counters)

    def uniform_pairs(self, count: int) -> tuple[np.ndarray, np.ndarray]:
        """Two independent uniform vectors, consuming 2*count counters."""
        base = np.arange(self.counter, self.counter + 2 * count, 2, dtype=np.uint64)
        self.counter += 2 * count
        return counter_uniforms(self.key, base), counter_uniforms(self.key, base + np.uint64(1))
