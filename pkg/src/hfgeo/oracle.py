"""Independent brute-force checks and random instance generators.

Nothing here uses Smith normal form: homology is recovered from the F-vector
space dimensions of H(C/U^k), which only need ranks of matrices over F.
"""

from __future__ import annotations

import random
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction

from . import gf2
from .errors import TruncationTooLow
from .knot_complex import (
    FlipSpec,
    KnotComplex,
    box,
    box_pair,
    direct_sum,
    figure_eight,
    find_involution,
    staircase,
    torus_2,
)
from .knot_surgery import rational_surgery, red_fastpath
from .link_complex import LinkComplex, hopf_sum
from .ualgebra import FreeUComplex, ModuleDecomp


# --- field homology of C/U^k ------------------------------------------------


@dataclass(frozen=True)
class TruncatedComplex:
    """C/U^N with F-basis (generator, k), 0 <= k < N, in degree grading - 2k."""

    source: FreeUComplex
    N: int

    def degrees(self) -> list[Fraction]:
        return sorted({g - 2 * k for g in self.source.gradings for k in range(self.N)}, reverse=True)

    def basis(self, d: Fraction) -> list[tuple[int, int]]:
        out = []
        for i, g in enumerate(self.source.gradings):
            k = (g - d) / 2
            if k.denominator == 1 and 0 <= k < self.N:
                out.append((i, int(k)))
        return out

    def dimensions(self) -> list[int]:
        """dim over F of H(C/U^k) for k = 0..N.

        U^(N-k) C/U^N is a subcomplex isomorphic to C/U^k, so adding the
        columns of d in order of decreasing U-power to one running
        elimination per degree yields every rank at once.
        """
        cols = defaultdict(list)
        for (r, col), e in self.source.d.entries.items():
            cols[col].append((r, e))
        index = {d: {b: n for n, b in enumerate(self.basis(d))} for d in self.degrees()}
        gained = [0] * (self.N + 1)  # rank gained by columns at U-power j
        for d, src in index.items():
            tgt = index.get(d - 1, {})
            span = gf2.Basis()
            for i, k in sorted(src, key=lambda b: -b[1]):
                v = 0
                for r, e in cols[i]:
                    if k + e < self.N:
                        v ^= 1 << tgt[(r, k + e)]
                if v and span.add(v):
                    gained[k] += 1
        dims, rank = [0], 0
        for k in range(1, self.N + 1):
            rank += gained[self.N - k]
            dims.append(k * self.source.rank - 2 * rank)
        return dims


def _decomp_from_dimensions(dims: list[int], N: int) -> ModuleDecomp:
    """For H = F[U]^f + sum F[U]/U^t, dim H(C/U^k) = f k + 2 sum min(t, k).

    The first differences are f + 2 #{t >= k}; their drops count summands of
    each height. Heights above N are invisible, hence the confirmation at 2N.
    """
    diff = [dims[k] - dims[k - 1] for k in range(1, N + 2)]  # diff[k - 1] is the k-th difference
    torsion = []
    for k in range(1, N + 1):
        drop = diff[k - 1] - diff[k]
        if drop % 2 or drop < 0:
            raise TruncationTooLow(f"dimension sequence {dims[:N + 2]} is not that of an F[U]-module")
        torsion.extend([k] * (drop // 2))
    return ModuleDecomp(diff[N], tuple(torsion))


def truncated_field_homology(c: FreeUComplex, N: int | None = None, retries: int = 3) -> ModuleDecomp:
    """H(C) as an F[U]-module, read off from the dimensions of H(C/U^k), k <= N + 1.

    The answer is confirmed at 2N; on disagreement N doubles.
    """
    if N is None:
        N = max(c.d.entries.values(), default=0) + 4
    last = None
    for _ in range(retries + 1):
        dims = TruncatedComplex(c, 2 * N + 1).dimensions()
        try:
            got = _decomp_from_dimensions(dims, N)
            deeper = _decomp_from_dimensions(dims, 2 * N)
        except TruncationTooLow as exc:
            last = exc
        else:
            if got == deeper:
                return deeper
            last = TruncationTooLow(f"N = {N} gives {got}, N = {2 * N} gives {deeper}")
        N *= 2
    raise last


# --- V_s of staircases from the Alexander polynomial ------------------------------


def alexander_polynomial(k: KnotComplex) -> dict[int, int]:
    """Graded Euler characteristic sum (-1)^M t^A over generators."""
    out: Counter = Counter()
    for g in k.generators:
        out[g.alexander] += -1 if g.maslov % 2 else 1
    return {a: n for a, n in out.items() if n}


def torsion_coefficients(k: KnotComplex, s: int) -> int:
    """sum_{j >= 1} j a_{s+j}; equals V_s when k is a staircase."""
    poly = alexander_polynomial(k)
    return sum((a - s) * n for a, n in poly.items() if a > s)


# --- random knot complexes ----------------------------------------------------


def _random_staircase(rng: random.Random, max_half: int) -> KnotComplex:
    m = rng.randint(0, max_half)
    half = [rng.randint(1, 2) for _ in range(m)]
    k = staircase(half + half[::-1])
    return k.mirror() if rng.random() < 0.5 else k


def _random_acyclic(rng: random.Random) -> KnotComplex:
    n = rng.randint(1, 2)
    mu = rng.randint(-3, 3)
    if rng.random() < 0.5:
        return box(n, mu, 0)
    return box_pair(n, mu, rng.choice([-2, -1, 1, 2]))


def _pairs_to_dict(pairs) -> dict[str, str]:
    out = {}
    for a, b in pairs:
        out[a], out[b] = b, a
    return out


def _change_basis(arrows: dict[str, dict[str, int]], x: str, y: str, k: int) -> None:
    """Replace generator x by x + U^k y, rewriting the differential in place."""
    for t, e in list(arrows[y].items()):
        _toggle(arrows, x, t, e + k)
    for z in list(arrows):
        e = arrows[z].get(x)
        if e is not None and z != x:
            _toggle(arrows, z, y, e + k)


def _toggle(arrows: dict[str, dict[str, int]], src: str, dst: str, e: int) -> None:
    row = arrows[src]
    if dst in row:
        if row[dst] != e:
            raise AssertionError("inhomogeneous basis change")
        del row[dst]
    else:
        row[dst] = e


def deform(k: KnotComplex, rng: random.Random, steps: int) -> KnotComplex:
    """Random flip-equivariant filtered basis changes x <- x + U^k y."""
    flip = k.flip.pairs if k.flip is not None and k.flip.pairs is not None else find_involution(k)
    inv = _pairs_to_dict(flip)
    gens = {g.id: g for g in k.generators}
    arrows: dict[str, dict[str, int]] = {g.id: {} for g in k.generators}
    for s, d, u in k.arrows:
        arrows[s][d] = u
    ids = [g.id for g in k.generators]
    for _ in range(steps):
        moves = []
        for x in ids:
            if inv[x] == x:
                continue
            for y in ids:
                if {x, inv[x]} & {y, inv[y]}:
                    continue
                diff = gens[y].maslov - gens[x].maslov
                if diff < 0 or diff % 2:
                    continue
                power = int(diff) // 2
                if gens[y].alexander - power <= gens[x].alexander:
                    moves.append((x, y, power))
        if not moves:
            break
        x, y, power = rng.choice(moves)
        _change_basis(arrows, x, y, power)
        mirrored = power + gens[x].alexander - gens[y].alexander
        _change_basis(arrows, inv[x], inv[y], mirrored)
    flat = tuple((s, d, e) for s in ids for d, e in sorted(arrows[s].items()))
    return KnotComplex(k.generators, flat, FlipSpec(pairs=tuple(flip)))


def random_knot_complex(seed: int, max_parts: int = 3, max_half: int = 2, deformations: int = 3) -> KnotComplex:
    """One staircase plus acyclic boxes, then random filtered basis changes."""
    rng = random.Random(seed)
    parts = [_random_staircase(rng, max_half)]
    parts += [_random_acyclic(rng) for _ in range(rng.randint(0, max_parts - 1))]
    base = direct_sum(parts) if len(parts) > 1 else parts[0]
    if base.flip is None:
        base = base.with_flip(FlipSpec(pairs=find_involution(base)))
    return deform(base, rng, deformations) if deformations else base


def random_base(seed: int, max_parts: int = 3, max_half: int = 2) -> KnotComplex:
    return random_knot_complex(seed, max_parts, max_half, deformations=0)


_LINK_FACTORS = (None, "T23", "mT23", "fig8")


def _factor(name: str | None) -> KnotComplex | None:
    if name is None:
        return None
    if name == "fig8":
        return figure_eight()
    k = torus_2(3)
    return k.mirror() if name == "mT23" else k


def random_link_complex(seed: int) -> LinkComplex:
    """Hopf link with small knots summed onto each component."""
    rng = random.Random(seed)
    return hopf_sum(_factor(rng.choice(_LINK_FACTORS)), _factor(rng.choice(_LINK_FACTORS)))


# --- surgery cross-check --------------------------------------------------------


@dataclass
class CrosscheckReport:
    p: int
    q: int
    match: bool
    labels: dict[int, dict] = field(default_factory=dict)
    first_mismatch: dict | None = None

    def to_dict(self) -> dict:
        return {"slope": f"{self.p}/{self.q}", "match": self.match, "labels": self.labels, "first_mismatch": self.first_mismatch}


def crosscheck_surgery(k: KnotComplex, p: int, q: int = 1) -> CrosscheckReport:
    """Cone torsion against the reduced fast path, label by label."""
    cone = rational_surgery(k, p, q)
    fast = red_fastpath(k, p, q)
    report = CrosscheckReport(p, q, True)
    for s in sorted(cone):
        a, b = list(cone[s].torsion), list(fast[s].torsion)
        report.labels[s] = {"cone": a, "fastpath": b}
        if a != b and report.match:
            report.match = False
            report.first_mismatch = {"label": s, "cone": a, "fastpath": b, "free_rank": cone[s].free_rank}
    return report
