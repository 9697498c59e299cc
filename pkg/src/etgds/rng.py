"""Tiny deterministic pseudo-random generator for reproducible constructions.

SplitMix64 is used instead of the stdlib Mersenne Twister so that seeded
artifacts (random trees, sampled permutations, weight matrices in the test
suite) are a pure function of the seed and stay stable across Python
versions and across reimplementations in other languages.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1


class SplitMix64:
    """SplitMix64 stream: 64-bit state, one multiply-xorshift round per draw."""

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4B07B5) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return (z ^ (z >> 31)) & _MASK

    def below(self, bound: int) -> int:
        """Draw an integer in [0, bound). Modulo bias is irrelevant here:
        outputs only need to be deterministic, not statistically uniform."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        return self.next_u64() % bound

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle driven by this stream."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]
