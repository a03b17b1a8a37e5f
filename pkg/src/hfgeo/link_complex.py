"""Multi-filtered link complexes over F2[U_1..U_l] and their A_s pieces.

Alexander gradings live in the lattice H(L), whose i-th coordinate is in
Z + lk_i/2 with lk_i the total linking of component i with the others.
They are stored doubled so everything stays integral.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from . import gf2
from .errors import InvalidComplex, TruncationUnstable
from .knot_complex import Check, Generator, KnotComplex, ValidationReport, validate_knot_complex
from .ualgebra import ModuleDecomp

Vec = tuple[int, ...]


@dataclass(frozen=True)
class LinkGenerator:
    id: str
    maslov: Fraction
    alex2: Vec  # doubled Alexander multi-grading

    def __post_init__(self):
        object.__setattr__(self, "maslov", Fraction(self.maslov))
        object.__setattr__(self, "alex2", tuple(int(a) for a in self.alex2))

    @property
    def alexander(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(a, 2) for a in self.alex2)


@dataclass(frozen=True)
class LinkComplex:
    components: int
    linking: tuple[tuple[int, ...], ...]
    generators: tuple[LinkGenerator, ...]
    arrows: tuple[tuple[str, str, Vec], ...]  # (src, dst, exponent vector)

    def __post_init__(self):
        object.__setattr__(self, "linking", tuple(tuple(int(x) for x in row) for row in self.linking))
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(self, "arrows", tuple((s, d, tuple(int(x) for x in u)) for s, d, u in self.arrows))
        ids = [g.id for g in self.generators]
        if len(set(ids)) != len(ids):
            raise InvalidComplex("duplicate generator ids")

    @cached_property
    def index(self) -> dict[str, int]:
        return {g.id: i for i, g in enumerate(self.generators)}

    @property
    def rank(self) -> int:
        return len(self.generators)

    def parity(self, i: int) -> int:
        """Parity of doubled coordinates allowed in component i."""
        return sum(self.linking[i][j] for j in range(self.components) if j != i) % 2


def in_lattice(c: LinkComplex, s2: Sequence[int]) -> bool:
    return len(s2) == c.components and all((x - c.parity(i)) % 2 == 0 for i, x in enumerate(s2))


def from_knot(k: KnotComplex) -> LinkComplex:
    """One-component wrapper of a knot complex."""
    gens = tuple(LinkGenerator(g.id, g.maslov, (2 * g.alexander,)) for g in k.generators)
    return LinkComplex(1, ((0,),), gens, tuple((s, d, (u,)) for s, d, u in k.arrows))


def to_knot(c: LinkComplex) -> KnotComplex:
    if c.components != 1:
        raise InvalidComplex("only one-component complexes are knot complexes")
    gens = []
    for g in c.generators:
        if g.alex2[0] % 2:
            raise InvalidComplex(f"generator {g.id} has a half-integer Alexander grading")
        gens.append(Generator(g.id, g.maslov, g.alex2[0] // 2))
    return KnotComplex(tuple(gens), tuple((s, d, u[0]) for s, d, u in c.arrows))


# --- validation -------------------------------------------------------------


def _square(c: LinkComplex) -> list[tuple[str, str, Vec]]:
    out_arrows = defaultdict(list)
    for s, d, u in c.arrows:
        out_arrows[s].append((d, u))
    bad = []
    for g in c.generators:
        acc = Counter()
        for mid, u in out_arrows[g.id]:
            for dst, w in out_arrows[mid]:
                acc[(dst, tuple(a + b for a, b in zip(u, w)))] += 1
        bad.extend((g.id, dst, e) for (dst, e), n in acc.items() if n % 2)
    return bad


def validate_link_complex(c: LinkComplex) -> ValidationReport:
    checks: list[Check] = []
    l = c.components
    lk = c.linking
    shape = len(lk) == l and all(len(r) == l for r in lk)
    sym = shape and all(lk[i][j] == lk[j][i] for i in range(l) for j in range(l)) and all(lk[i][i] == 0 for i in range(l))
    checks.append(Check("linking_matrix", "pass" if sym else "fail", "" if sym else "linking matrix must be symmetric with zero diagonal"))
    if not sym:
        return ValidationReport(tuple(checks))

    idx = c.index
    bad_arrow = next((a for a in c.arrows if a[0] not in idx or a[1] not in idx or len(a[2]) != l), None)
    checks.append(Check("arrows", "pass" if bad_arrow is None else "fail", "" if bad_arrow is None else f"bad arrow {bad_arrow}"))
    if bad_arrow is not None:
        return ValidationReport(tuple(checks))

    bad_gen = next((g for g in c.generators if not in_lattice(c, g.alex2)), None)
    checks.append(Check(
        "lattice", "pass" if bad_gen is None else "fail",
        "" if bad_gen is None else f"{bad_gen.id} has alexander {bad_gen.alexander} outside the lattice",
    ))

    neg = next((a for a in c.arrows if min(a[2], default=0) < 0), None)
    checks.append(Check("exponents", "pass" if neg is None else "fail", "" if neg is None else f"negative exponent on {neg[0]}->{neg[1]}"))

    gens = {g.id: g for g in c.generators}
    drop = next((a for a in c.arrows if gens[a[1]].maslov - 2 * sum(a[2]) != gens[a[0]].maslov - 1), None)
    checks.append(Check("maslov_drop", "pass" if drop is None else "fail", "" if drop is None else f"arrow {drop[0]}->{drop[1]} breaks the Maslov drop"))

    filt = None
    for s, d, u in c.arrows:
        for i in range(l):
            if gens[d].alex2[i] - 2 * u[i] > gens[s].alex2[i]:
                filt = (s, d, i)
                break
        if filt:
            break
    checks.append(Check(
        "filtration", "pass" if filt is None else "fail",
        "" if filt is None else f"arrow {filt[0]}->{filt[1]} raises filtration {filt[2] + 1}",
    ))

    sq = _square(c) if neg is None else []
    checks.append(Check("d_squared_zero", "pass" if not sq else "fail", "" if not sq else f"d^2({sq[0][0]}) hits {sq[0][1]} U^{sq[0][2]}"))

    if l == 1:
        try:
            knot = validate_knot_complex(to_knot(c))
        except InvalidComplex as exc:
            checks.append(Check("knot_axioms", "fail", str(exc)))
        else:
            failed = knot.failed
            checks.append(Check("knot_axioms", "pass" if not failed else "fail", "" if not failed else "; ".join(f"{x.name}: {x.witness}" for x in failed)))
    return ValidationReport(tuple(checks))


# --- hat flavor -------------------------------------------------------------


@dataclass(frozen=True)
class HyperBox:
    q2: Vec  # doubled half-widths

    def __post_init__(self):
        if any(x < 0 for x in self.q2):
            raise ValueError("box half-widths must be non-negative")

    @property
    def q(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(x, 2) for x in self.q2)

    def contains(self, s2: Sequence[int]) -> bool:
        return all(-q <= x <= q for x, q in zip(s2, self.q2))


def hat_polytope(c: LinkComplex) -> tuple[frozenset[Vec], HyperBox]:
    """Support of the hat homology over Alexander multi-degrees, and its box."""
    by_degree: dict[Vec, list[int]] = defaultdict(list)
    for i, g in enumerate(c.generators):
        by_degree[g.alex2].append(i)
    idx = c.index
    support = set()
    for deg, members in by_degree.items():
        local = {gi: n for n, gi in enumerate(members)}
        by_maslov: dict[Fraction, list[int]] = defaultdict(list)
        for gi in members:
            by_maslov[c.generators[gi].maslov].append(gi)
        # associated graded: arrows with all exponents zero that keep the multi-degree
        images = {gi: 0 for gi in members}
        for s, d, u in c.arrows:
            si, di = idx[s], idx[d]
            if not any(u) and si in local and di in local:
                images[si] ^= 1 << local[di]
        total = 0
        for m, gs in by_maslov.items():
            rank_out = gf2.rank(images[g] for g in gs)
            rank_in = gf2.rank(images[g] for g in by_maslov.get(m + 1, ()))
            total += len(gs) - rank_out - rank_in
        if total:
            support.add(deg)
    if not support:
        return frozenset(), HyperBox(tuple(0 for _ in range(c.components)))
    q2 = tuple(max(abs(p[i]) for p in support) for i in range(c.components))
    return frozenset(support), HyperBox(q2)


def clamp_to_box(c: LinkComplex, s2: Sequence[int], box: HyperBox) -> Vec:
    """Move each coordinate into [-q_i, q_i], one coordinate at a time."""
    out = list(s2)
    for i, q in enumerate(box.q2):
        out[i] = max(-q, min(q, out[i]))
    return tuple(out)


# --- A_s and its homology -----------------------------------------------------


@dataclass(frozen=True)
class AMinus:
    """The subcomplex spanned by U^m x with m >= 0 and F_i(x) - m_i <= s_i.

    ``floor[x]`` is the smallest admissible exponent vector of generator x.
    The F[U]-action is that of U_1. ``depth`` is the number of U_1-steps
    explored below the top degree.
    """

    complex: LinkComplex
    s2: Vec
    floor: tuple[Vec, ...]
    depth: int

    @property
    def top(self) -> Fraction:
        return max(g.maslov - 2 * sum(f) for g, f in zip(self.complex.generators, self.floor))


def a_minus_link(c: LinkComplex, s2: Sequence[int], depth: int | None = None) -> AMinus:
    s2 = tuple(s2)
    if not in_lattice(c, s2):
        raise ValueError(f"{s2} (doubled) is not a lattice point for this link")
    floor = tuple(tuple(max(0, (a - s) // 2) for a, s in zip(g.alex2, s2)) for g in c.generators)
    if depth is None:
        _, box = hat_polytope(c)
        # longest single arrow as the torsion estimate, plus the box diameter
        longest = max((sum(u) for _, _, u in c.arrows), default=0)
        depth = longest + sum(box.q2) + 2
    return AMinus(c, s2, floor, depth)


def _compositions(total: int, parts: int) -> Iterable[Vec]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


class _Graded:
    """Degree-wise F-basis of an A_s complex."""

    def __init__(self, a: AMinus):
        self.a = a
        c = a.complex
        self.idx = c.index
        self.out: dict[int, list[tuple[int, Vec]]] = defaultdict(list)
        for s, d, u in c.arrows:
            self.out[self.idx[s]].append((self.idx[d], u))
        self._basis: dict[Fraction, tuple[list, dict]] = {}
        self._boundary: dict[Fraction, list[int]] = {}
        self._hom: dict[Fraction, _Homology] = {}
        self._umap: dict[Fraction, list[int]] = {}
        # plain ints hash much faster than Fractions
        integral = all(g.maslov.denominator == 1 for g in c.generators)
        self.maslov = [int(g.maslov) if integral else g.maslov for g in c.generators]
        top = max(m - 2 * sum(f) for m, f in zip(self.maslov, a.floor))
        self.classes = sorted({top - ((top - m) % 2) for m in self.maslov}, reverse=True)

    def basis(self, d: Fraction) -> tuple[list, dict]:
        if d not in self._basis:
            items = []
            for gi, (mas, f) in enumerate(zip(self.maslov, self.a.floor)):
                k = mas - d
                if k < 0 or k % 2:
                    continue
                extra = int(k) // 2 - sum(f)
                if extra < 0:
                    continue
                for m in _compositions(extra, self.a.complex.components):
                    items.append((gi, tuple(x + y for x, y in zip(f, m))))
            self._basis[d] = (items, {it: n for n, it in enumerate(items)})
        return self._basis[d]

    def boundary(self, d: Fraction) -> list[int]:
        """Images of the degree-d basis in degree d - 1, as bitsets."""
        if d in self._boundary:
            return self._boundary[d]
        src, _ = self.basis(d)
        _, dst = self.basis(d - 1)
        images = []
        for gi, m in src:
            v = 0
            for gj, u in self.out[gi]:
                v ^= 1 << dst[(gj, tuple(x + y for x, y in zip(m, u)))]
            images.append(v)
        self._boundary[d] = images
        return images

    def homology(self, d: Fraction) -> "_Homology":
        if d not in self._hom:
            self._hom[d] = _Homology(gf2.kernel(self.boundary(d)), self.boundary(d + 1))
        return self._hom[d]

    def umap(self, d: Fraction) -> list[int]:
        """U_1 from H_d to H_{d-2}, in representative coordinates."""
        if d not in self._umap:
            lower = self.homology(d - 2)
            self._umap[d] = [lower.coordinates(self.shift(d, z, 1)) for z in self.homology(d).reps]
        return self._umap[d]

    def shift(self, d: Fraction, vec: int, steps: int) -> int:
        """U_1^steps applied to a degree-d vector."""
        src, _ = self.basis(d)
        _, dst = self.basis(d - 2 * steps)
        out = 0
        n = 0
        while vec:
            if vec & 1:
                gi, m = src[n]
                out ^= 1 << dst[(gi, (m[0] + steps,) + m[1:])]
            vec >>= 1
            n += 1
        return out


class _Homology:
    """Homology of one degree: chosen cycle representatives and a way to
    write any cycle in terms of them (modulo boundaries)."""

    def __init__(self, cycles: list[int], boundaries: list[int]):
        self._pivots: dict[int, tuple[int, int]] = {}
        for b in boundaries:
            self._insert(b, 0)
        self.reps: list[int] = []
        for z in cycles:
            v, combo = self._reduce(z)
            if v:
                self._pivots[v.bit_length() - 1] = (v, 1 << len(self.reps))
                self.reps.append(z)

    def _insert(self, v: int, combo: int) -> None:
        v, combo = self._reduce(v, combo)
        if v:
            self._pivots[v.bit_length() - 1] = (v, combo)

    def _reduce(self, v: int, combo: int = 0) -> tuple[int, int]:
        while v:
            hit = self._pivots.get(v.bit_length() - 1)
            if hit is None:
                break
            v ^= hit[0]
            combo ^= hit[1]
        return v, combo

    def coordinates(self, cycle: int) -> int:
        v, combo = self._reduce(cycle)
        if v:
            raise InvalidComplex("vector is not a cycle of this degree")
        return combo


def _decomp_at_depth(g: _Graded, depth: int) -> ModuleDecomp:
    free = 0
    torsion: list[int] = []
    tower_gr: list[Fraction] = []
    torsion_gr: list[Fraction] = []
    for ctop in g.classes:
        degrees = [ctop - 2 * j for j in range(depth + 1)]
        bottom = degrees[-1]
        hom = {d: g.homology(d) for d in degrees}
        umap = {d: g.umap(d) for d in degrees[:-1]}
        memo: dict[tuple[Fraction, int], int] = {}

        def r(d: Fraction, steps: int) -> int:
            """Rank of U^steps from H_d to H_{d - 2 steps}."""
            if d > ctop or d - 2 * steps < bottom:
                return 0
            key = (d, steps)
            if key not in memo:
                vecs = [1 << i for i in range(len(hom[d].reps))]
                for j in range(steps):
                    images = umap[d - 2 * j]
                    vecs = [gf2.apply(images, v) for v in vecs]
                memo[key] = gf2.rank(vecs)
            return memo[key]

        def tops(d: Fraction, length: int) -> int:
            """Summands with top class in degree d and at least ``length`` classes."""
            return r(d, length - 1) - r(d + 2, length)

        for d in degrees:
            reach = int((d - bottom) / 2) + 1  # classes from d down to the bottom
            for length in range(1, reach):
                n = tops(d, length) - tops(d, length + 1)
                torsion.extend([length] * n)
                torsion_gr.extend([d] * n)
            n = tops(d, reach)
            free += n
            tower_gr.extend([d] * n)
    return ModuleDecomp(free, tuple(torsion), tuple(map(Fraction, tower_gr)), tuple(map(Fraction, torsion_gr)))


def link_homology_decomp(a: AMinus, retries: int = 3) -> ModuleDecomp:
    """H(A_s) as an F[U_1]-module, confirmed at twice the exploration depth."""
    depth = a.depth
    g = _Graded(a)
    for _ in range(retries + 1):
        deeper = _decomp_at_depth(g, 2 * depth)
        got = _decomp_at_depth(g, depth)
        if got == deeper and got.tower_gradings == deeper.tower_gradings:
            return got
        depth *= 2
    raise TruncationUnstable(f"depth {depth // 2} and {depth} still disagree at s = {a.s2}")


# --- model builders -----------------------------------------------------------


def hopf() -> LinkComplex:
    """Positive Hopf link: four generators at (+-1/2, +-1/2)."""
    gens = (
        LinkGenerator("a", 0, (1, 1)),
        LinkGenerator("b", -1, (-1, 1)),
        LinkGenerator("c", -2, (-1, -1)),
        LinkGenerator("d", -1, (1, -1)),
    )
    arrows = (("b", "a", (1, 0)), ("b", "c", (0, 0)), ("d", "a", (0, 1)), ("d", "c", (0, 0)))
    return LinkComplex(2, ((0, 1), (1, 0)), gens, arrows)


def connected_sum(c: LinkComplex, k: KnotComplex, component: int, sep: str = "*") -> LinkComplex:
    """Connected sum of a knot onto one component: the tensor product over F[U_i]."""
    l = c.components
    gens = []
    for g in c.generators:
        for h in k.generators:
            a2 = list(g.alex2)
            a2[component] += 2 * h.alexander
            gens.append(LinkGenerator(f"{g.id}{sep}{h.id}", g.maslov + h.maslov, tuple(a2)))
    arrows = []
    for s, d, u in c.arrows:
        for h in k.generators:
            arrows.append((f"{s}{sep}{h.id}", f"{d}{sep}{h.id}", u))
    for g in c.generators:
        for s, d, u in k.arrows:
            e = [0] * l
            e[component] = u
            arrows.append((f"{g.id}{sep}{s}", f"{g.id}{sep}{d}", tuple(e)))
    return LinkComplex(l, c.linking, tuple(gens), tuple(arrows))


def hopf_sum(k1: KnotComplex | None = None, k2: KnotComplex | None = None) -> LinkComplex:
    """Hopf link with k1 summed onto the first component and k2 onto the second."""
    c = hopf()
    if k1 is not None:
        c = connected_sum(c, k1, 0, "|")
    if k2 is not None:
        c = connected_sum(c, k2, 1, "/")
    return c
