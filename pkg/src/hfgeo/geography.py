"""Geography predicates on F[U]-module decompositions."""

from __future__ import annotations

from collections import Counter
from functools import lru_cache
from typing import Sequence

from .ualgebra import ModuleDecomp, annihilator_exponent


def lin_check(m: ModuleDecomp) -> bool:
    """No torsion at all, or at least one F[U]/U summand."""
    return not m.torsion or 1 in m.torsion


def strong_check(m: ModuleDecomp) -> bool:
    """Every height 1..l occurs, l the annihilator exponent of the torsion."""
    present = set(m.torsion)
    return all(k in present for k in range(1, annihilator_exponent(m) + 1))


def missing_heights(m: ModuleDecomp) -> list[int]:
    present = set(m.torsion)
    return [k for k in range(1, annihilator_exponent(m) + 1) if k not in present]


def skyline_witness(a: ModuleDecomp, b: ModuleDecomp) -> list[tuple[int, int]] | None:
    """Matching of a's torsion heights to b's, or None if the skylines differ.

    Each pair is ``(h, h')`` with ``|h - h'| <= 1``; ``h' = 0`` means the
    summand disappears. Every b-summand left unmatched must have height 1.
    """
    if a.free_rank != b.free_rank:
        return None
    hs = tuple(sorted(a.torsion, reverse=True))
    avail = Counter(b.torsion)
    keys = sorted(avail)

    @lru_cache(maxsize=None)
    def solve(i: int, state: tuple[int, ...]) -> tuple | None:
        left = dict(zip(keys, state))
        if i == len(hs):
            return () if all(n == 0 for k, n in left.items() if k != 1) else None
        h = hs[i]
        for target in (h + 1, h, h - 1):
            if target == 0:
                rest = solve(i + 1, state)
                if rest is not None:
                    return ((h, 0),) + rest
            elif left.get(target, 0) > 0:
                nxt = tuple(n - (k == target) for k, n in zip(keys, state))
                rest = solve(i + 1, nxt)
                if rest is not None:
                    return ((h, target),) + rest
        return None

    got = solve(0, tuple(avail[k] for k in keys))
    return list(got) if got is not None else None


def skyline_similar(a: ModuleDecomp, b: ModuleDecomp) -> bool:
    return skyline_witness(a, b) is not None


def intermediate_value_check(seq: Sequence[ModuleDecomp]) -> bool:
    """Adjacent members similar, and heights below the first's maximum all show up
    whenever the sequence ends torsion-free."""
    if any(not skyline_similar(x, y) for x, y in zip(seq, seq[1:])):
        return False
    if not seq or seq[-1].torsion:
        return True
    seen = {k for m in seq for k in m.torsion}
    return all(all(i in seen for i in range(1, n)) for n in seq[0].torsion)
