"""Seeded 64-bit PRNG shared by the dataset split and the scenario generator.

xorshift64* is pinned here (shifts 12/25/27, multiplier 0x2545F4914F6CDD1D)
so that splits and generated bundles are reproducible bit-for-bit from a
seed alone, independent of interpreter or platform.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1
_MULTIPLIER = 0x2545F4914F6CDD1D
# xorshift state must never be zero; seed 0 maps to this odd constant.
_ZERO_SEED_SUBSTITUTE = 0x9E3779B97F4A7C15


class XorShift64Star:
    """xorshift64* generator with helpers for bounded ints and unit floats."""

    def __init__(self, seed: int):
        self._state = seed & _MASK
        if self._state == 0:
            self._state = _ZERO_SEED_SUBSTITUTE

    def next_u64(self) -> int:
        x = self._state
        x ^= x >> 12
        x = (x ^ (x << 25)) & _MASK
        x ^= x >> 27
        self._state = x
        return (x * _MULTIPLIER) & _MASK

    def next_below(self, n: int) -> int:
        """Uniform-ish integer in [0, n) by modulo reduction (documented, deterministic)."""
        if n <= 0:
            raise ValueError("n must be positive")
        return self.next_u64() % n

    def next_float(self) -> float:
        """Float in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * 2.0**-53

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.next_float()

    def shuffle(self, items: list) -> list:
        """In-place Fisher-Yates shuffle; returns the list for convenience."""
        for i in range(len(items) - 1, 0, -1):
            j = self.next_below(i + 1)
            items[i], items[j] = items[j], items[i]
        return items
