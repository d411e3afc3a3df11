"""Deterministic RNG for the evaluation protocol.

SplitMix64 with the published constants. The stream is fully specified by
the seed, so evaluation reports are reproducible across implementations
and platforms (no dependence on a library RNG's internal state layout).
"""

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4B7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class SplitMix64:
    """64-bit SplitMix generator.

    `below(n)` maps the raw stream by modulo; the small modulo bias is
    irrelevant here, determinism is what matters.
    """

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_uint64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        if n <= 0:
            raise ValueError("n must be positive")
        return self.next_uint64() % n

    def sample(self, n: int, k: int) -> list[int]:
        """First k entries of a Fisher-Yates shuffle of range(n)."""
        if not 0 <= k <= n:
            raise ValueError(f"cannot sample {k} of {n}")
        idx = list(range(n))
        for j in range(k):
            swap = j + self.below(n - j)
            idx[j], idx[swap] = idx[swap], idx[j]
        return idx[:k]
