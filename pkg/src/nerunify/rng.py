"""SplitMix64, the fixed pseudo-random generator behind every shuffle.

SplitMix64 (Steele, Lea & Flood 2014; reference C code by S. Vigna) is a
counter-based generator: the n-th output is ``mix(seed + n * GAMMA)`` where
``GAMMA = 0x9E3779B97F4A7C15`` and ``mix`` is the finaliser below. It is
fully specified with 64-bit wrap-around arithmetic, so any implementation
reproduces the same stream.

Bounded draws use rejection sampling (``r % bound`` after discarding the
lowest ``2**64 % bound`` values), and shuffles are Fisher-Yates running
from the last index down to 1. Named streams (e.g. one per split
assignment) are keyed by ``mix(seed ^ fnv1a64(name))``.
"""

from __future__ import annotations

from typing import List, MutableSequence, TypeVar

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3

T = TypeVar("T")


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def fnv1a64(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * _FNV_PRIME) & MASK64
    return h


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    @classmethod
    def for_stream(cls, seed: int, *names: str) -> "SplitMix64":
        key = "\x1f".join(names).encode("utf-8")
        return cls(mix64((seed & MASK64) ^ fnv1a64(key)))

    def next_u64(self) -> int:
        self.state = (self.state + GAMMA) & MASK64
        return mix64(self.state)

    def below(self, bound: int) -> int:
        """Uniform integer in ``[0, bound)``."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        threshold = (1 << 64) % bound
        while True:
            r = self.next_u64()
            if r >= threshold:
                return r % bound

    def shuffle(self, items: MutableSequence[T]) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]

    def permutation(self, n: int) -> List[int]:
        order = list(range(n))
        self.shuffle(order)
        return order
