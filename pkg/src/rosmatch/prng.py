"""Deterministic pseudo-random numbers for stream orders and generators.

The generator is xorshift64* (Vigna, 2014): a 64-bit xorshift state
(shifts 12, 25, 27) whose output is multiplied by 0x2545F4914F6CDD1D.
Seeds are expanded with one round of splitmix64 so that small or zero
seeds still give a non-degenerate state.  Everything is pure integer
arithmetic, so a given seed produces the same sequence on any platform.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
_XS_MULT = 0x2545F4914F6CDD1D


def splitmix64(x: int) -> int:
    """One splitmix64 step applied to ``x`` (used for seeding)."""
    z = (x + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def trial_seed(base_seed: int, trial_index: int) -> int:
    """Seed for trial ``trial_index`` of an experiment: ``base_seed XOR index``."""
    return (base_seed ^ trial_index) & MASK64


class XorShift64Star:
    """xorshift64* generator seeded through splitmix64."""

    __slots__ = ("state",)

    def __init__(self, seed: int = 0):
        state = splitmix64(seed & MASK64)
        self.state = state or 0x9E3779B97F4A7C15

    def next_u64(self) -> int:
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & MASK64
        x ^= x >> 27
        self.state = x
        return (x * _XS_MULT) & MASK64

    def below(self, bound: int) -> int:
        """Uniform integer in ``[0, bound)`` by rejection sampling."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % bound

    def random(self) -> float:
        """Uniform float in ``[0, 1)`` with 53 bits of precision."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle (back to front)."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]
