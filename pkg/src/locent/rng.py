"""SplitMix64 pseudorandom streams.

All randomness in the package flows through this module so that runs are
reproducible from (seed, key) pairs alone, without storing generator state.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def mix64(x: int) -> int:
    """SplitMix64 output scrambler (finalizer)."""
    z = x & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_key(*parts: int) -> int:
    """Fold integer components into a single 64-bit stream key."""
    h = 0x243F6A8885A308D3
    for p in parts:
        h = mix64((h + (p & MASK64) * GOLDEN) & MASK64)
    return h


class SplitMix64:
    """Sequential SplitMix64 generator."""

    def __init__(self, seed: int):
        self._state = seed & MASK64

    def next_uint64(self) -> int:
        self._state = (self._state + GOLDEN) & MASK64
        return mix64(self._state)

    def next_float(self) -> float:
        """Uniform double in [0, 1)."""
        return (self.next_uint64() >> 11) * (2.0 ** -53)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        return int(self.next_float() * n)

    def integers(self, a: int, b: int) -> int:
        """Uniform integer in [a, b)."""
        return a + self.below(b - a)

    def exponential(self, rate: float) -> float:
        """Inverse-CDF exponential draw."""
        import math

        return -math.log(1.0 - self.next_float()) / rate

    def choice(self, pool) -> int:
        """One element drawn uniformly; sets are iterated in ascending order
        before indexing so draws are order-stable."""
        items = sorted(pool)
        return items[self.below(len(items))]

    def choice_distinct(self, pool, k: int) -> list:
        """k distinct elements drawn uniformly (partial Fisher-Yates)."""
        items = sorted(pool)
        for i in range(k):
            j = i + self.below(len(items) - i)
            items[i], items[j] = items[j], items[i]
        return items[:k]

    def permutation(self, n: int) -> list[int]:
        """Fisher-Yates permutation of range(n)."""
        perm = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.below(i + 1)
            perm[i], perm[j] = perm[j], perm[i]
        return perm
