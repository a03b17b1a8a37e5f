"""Linear algebra over the two-element field with vectors packed into Python ints.

Bit ``i`` of an int is the coefficient of basis vector ``i``.
"""

from __future__ import annotations

from typing import Iterable


class Basis:
    """Incrementally reduced span. ``pivots`` maps leading bit to a vector."""

    def __init__(self, vectors: Iterable[int] = ()):
        self.pivots: dict[int, int] = {}
        for v in vectors:
            self.add(v)

    def reduce(self, v: int) -> int:
        while v:
            top = v.bit_length() - 1
            p = self.pivots.get(top)
            if p is None:
                return v
            v ^= p
        return 0

    def add(self, v: int) -> bool:
        v = self.reduce(v)
        if v:
            self.pivots[v.bit_length() - 1] = v
            return True
        return False

    def __len__(self) -> int:
        return len(self.pivots)

    def __contains__(self, v: int) -> bool:
        return self.reduce(v) == 0


def rank(vectors: Iterable[int]) -> int:
    return len(Basis(vectors))


def kernel(images: list[int]) -> list[int]:
    """Basis of {c : sum_i c_i images[i] = 0}, as ints over the source index."""
    pivots: dict[int, tuple[int, int]] = {}
    out = []
    for i, v in enumerate(images):
        combo = 1 << i
        while v:
            top = v.bit_length() - 1
            hit = pivots.get(top)
            if hit is None:
                break
            v ^= hit[0]
            combo ^= hit[1]
        if v:
            pivots[v.bit_length() - 1] = (v, combo)
        else:
            out.append(combo)
    return out


def apply(images: list[int], combo: int) -> int:
    """Image of the source vector ``combo`` under the map with columns ``images``."""
    out = 0
    i = 0
    while combo:
        if combo & 1:
            out ^= images[i]
        combo >>= 1
        i += 1
    return out
