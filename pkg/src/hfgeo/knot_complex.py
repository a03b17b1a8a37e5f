"""Knot-type complexes, south-west regions and the A_s / B complexes.

Planar convention: the F-generator ``U**m * x`` sits at
``(i, j) = (alexander(x) - m, -m)``. ``i`` is the Alexander coordinate and
``j`` the algebraic one. Everything here is minus flavor:

* ``B = C{i <= 0}``, with F[U]-basis ``U**alexander(x) * x``;
* ``A_s = C{i <= 0, j <= s}``;
* ``v_s`` is the inclusion ``A_s -> B``;
* ``h_s`` is ``A_s -> C{j <= s} --U^s--> C{j <= 0} --flip--> B``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .errors import BadSteps, FlipUndefined, HFError, InvalidComplex, NotNested, NotSouthWest
from .ualgebra import (
    FreeUComplex,
    UMonomialMatrix,
    check_chain_map,
    homology_decomp,
    mapping_cone,
    polynomial_product,
)

INF = math.inf


@dataclass(frozen=True)
class Generator:
    id: str
    maslov: Fraction
    alexander: int

    def __post_init__(self):
        object.__setattr__(self, "maslov", Fraction(self.maslov))


@dataclass(frozen=True)
class FlipSpec:
    """Either an involution on generator ids or an explicit matrix.

    The matrix maps the basis ``x`` of ``C{j <= 0}`` (columns) to the basis
    ``U**alexander(y) * y`` of ``C{i <= 0}`` (rows), both in generator order.
    """

    pairs: tuple[tuple[str, str], ...] | None = None
    matrix: UMonomialMatrix | None = None

    def __post_init__(self):
        if (self.pairs is None) == (self.matrix is None):
            raise ValueError("give exactly one of pairs or matrix")


@dataclass(frozen=True)
class KnotComplex:
    generators: tuple[Generator, ...]
    arrows: tuple[tuple[str, str, int], ...]  # (src, dst, u_exp)
    flip: FlipSpec | None = None

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(self, "arrows", tuple((s, d, int(u)) for s, d, u in self.arrows))
        ids = [g.id for g in self.generators]
        if len(set(ids)) != len(ids):
            raise InvalidComplex("duplicate generator ids")

    @cached_property
    def index(self) -> dict[str, int]:
        return {g.id: i for i, g in enumerate(self.generators)}

    @property
    def rank(self) -> int:
        return len(self.generators)

    @property
    def genus_bound(self) -> int:
        """Largest |alexander| over generators; bounds the Seifert genus."""
        return max((abs(g.alexander) for g in self.generators), default=0)

    def with_flip(self, flip: FlipSpec | None) -> "KnotComplex":
        return KnotComplex(self.generators, self.arrows, flip)

    def mirror(self) -> "KnotComplex":
        """Dual complex: negated gradings, reversed arrows."""
        if self.flip is not None and self.flip.pairs is None:
            raise FlipUndefined("mirroring needs an involution flip")
        gens = tuple(Generator(g.id, -g.maslov, -g.alexander) for g in self.generators)
        arrows = tuple((d, s, u) for s, d, u in self.arrows)
        return KnotComplex(gens, arrows, self.flip)

    @cached_property
    def flip_matrix(self) -> UMonomialMatrix:
        if self.flip is not None and self.flip.matrix is not None:
            return self.flip.matrix
        pairs = self.flip.pairs if self.flip is not None else find_involution(self)
        if pairs is None:
            raise FlipUndefined("no flip given and no filtration-swap involution found")
        inv = _involution_dict(pairs)
        if set(inv) != set(self.index):
            raise FlipUndefined("flip pairs must cover every generator exactly once")
        n = self.rank
        return UMonomialMatrix(n, n, {(self.index[inv[g.id]], self.index[g.id]): 0 for g in self.generators})


def _involution_dict(pairs: Iterable[tuple[str, str]]) -> dict[str, str]:
    inv: dict[str, str] = {}
    for a, b in pairs:
        for x, y in ((a, b), (b, a)):
            if inv.get(x, y) != y:
                raise FlipUndefined(f"generator {x} flipped twice")
            inv[x] = y
    return inv


def find_involution(k: KnotComplex, limit: int = 5000) -> tuple[tuple[str, str], ...] | None:
    """Search for the filtration-swap involution of a symmetric complex."""
    buckets: dict[tuple, list[Generator]] = {}
    for g in k.generators:
        buckets.setdefault((g.alexander, g.maslov), []).append(g)
    partner_key = {g.id: (-g.alexander, g.maslov - 2 * g.alexander) for g in k.generators}
    for key, gs in buckets.items():
        mate = (-key[0], key[1] - 2 * key[0])
        if len(buckets.get(mate, ())) != len(gs):
            return None
    exps = {(s, d): u for s, d, u in k.arrows}

    def consistent(inv: dict[str, str]) -> bool:
        alex = {g.id: g.alexander for g in k.generators}
        for (s, d), u in exps.items():
            if s in inv and d in inv:
                want = u + alex[s] - alex[d]
                if exps.get((inv[s], inv[d])) != want:
                    return False
        return True

    order = sorted(k.generators, key=lambda g: (g.alexander, g.maslov, g.id))
    tried = 0

    def search(i: int, inv: dict[str, str]):
        nonlocal tried
        tried += 1
        if tried > limit:
            return None
        if i == len(order):
            return dict(inv)
        g = order[i]
        if g.id in inv:
            return search(i + 1, inv)
        for cand in buckets.get(partner_key[g.id], ()):
            if cand.id in inv:
                continue
            inv[g.id] = cand.id
            inv[cand.id] = g.id
            if consistent(inv):
                found = search(i + 1, inv)
                if found is not None:
                    return found
            del inv[g.id]
            inv.pop(cand.id, None)
        return None

    found = search(0, {})
    if found is None:
        return None
    return tuple(sorted({tuple(sorted((a, b))) for a, b in found.items()}))


# --- south-west regions -----------------------------------------------------


@dataclass(frozen=True)
class SouthWest:
    """Union of quadrants ``{i <= a, j <= b}``; a bound may be ``INF``."""

    corners: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if not self.corners:
            raise NotSouthWest("a south-west region must be non-empty")
        for a, b in self.corners:
            if a == -INF or b == -INF:
                raise NotSouthWest("corner bounds must be finite or +inf")
            if a == INF and b == INF:
                raise NotSouthWest("the whole plane does not give a finitely generated complex")

    @classmethod
    def half_plane_i(cls, bound: int) -> "SouthWest":
        return cls(((bound, INF),))

    @classmethod
    def half_plane_j(cls, bound: int) -> "SouthWest":
        return cls(((INF, bound),))

    @classmethod
    def quadrant(cls, i_bound: float, j_bound: float) -> "SouthWest":
        return cls(((i_bound, j_bound),))

    @classmethod
    def from_points(cls, points: Iterable[tuple[int, int]], window: int = 50) -> "SouthWest":
        """Region generated by lattice points, after checking they are closed under decrease.

        The point set is read inside the box ``[-window, window]^2``.
        """
        pts = set(points)
        if not pts:
            raise NotSouthWest("empty region")
        for i, j in pts:
            for p in ((i - 1, j), (i, j - 1)):
                if -window <= p[0] and -window <= p[1] and p not in pts:
                    raise NotSouthWest(f"{(i, j)} is in the region but {p} is not")
        maximal = [p for p in pts if (p[0] + 1, p[1]) not in pts and (p[0], p[1] + 1) not in pts]
        return cls(tuple(sorted(maximal)))

    def intersect(self, other: "SouthWest") -> "SouthWest":
        return SouthWest(
            tuple(sorted({(min(a, c), min(b, d)) for a, b in self.corners for c, d in other.corners}))
        )

    def union(self, other: "SouthWest") -> "SouthWest":
        return SouthWest(tuple(sorted(set(self.corners) | set(other.corners))))

    def contains(self, i: int, j: int) -> bool:
        return any(i <= a and j <= b for a, b in self.corners)

    def includes(self, other: "SouthWest") -> bool:
        return all(
            any(a2 <= a and b2 <= b for a, b in self.corners) for a2, b2 in other.corners
        )

    def min_power(self, alexander: int) -> int:
        """Least m with U^m x inside the region, for a generator of this alexander grading."""
        return int(min(max(alexander - a, -b) for a, b in self.corners))


@dataclass(frozen=True)
class Difference:
    """``outer \\ inner`` with ``inner`` a south-west subregion of ``outer``."""

    outer: SouthWest
    inner: SouthWest

    def __post_init__(self):
        if not self.outer.includes(self.inner):
            raise NotNested("difference needs the removed region inside the outer one")


def region_basis(k: KnotComplex, s: SouthWest) -> list[int]:
    return [s.min_power(g.alexander) for g in k.generators]


def _subcomplex(k: KnotComplex, mins: Sequence[int]) -> FreeUComplex:
    idx = k.index
    entries = {}
    for src, dst, u in k.arrows:
        e = mins[idx[src]] + u - mins[idx[dst]]
        if e < 0:
            raise NotSouthWest(f"arrow {src}->{dst} leaves the region")
        entries[(idx[dst], idx[src])] = e
    n = k.rank
    return FreeUComplex(
        tuple(g.id for g in k.generators),
        tuple(g.maslov - 2 * m for g, m in zip(k.generators, mins)),
        UMonomialMatrix(n, n, entries),
    )


def inclusion_map(k: KnotComplex, inner: SouthWest, outer: SouthWest) -> UMonomialMatrix:
    a = region_basis(k, inner)
    b = region_basis(k, outer)
    if any(x < y for x, y in zip(a, b)):
        raise NotNested("inner region is not contained in the outer one")
    return UMonomialMatrix(k.rank, k.rank, {(i, i): x - y for i, (x, y) in enumerate(zip(a, b))})


def region_complex(k: KnotComplex, s: SouthWest | Difference) -> FreeUComplex:
    """Free F[U]-complex computing the homology of the region's piece of C.

    A south-west region gives the subcomplex itself, one basis element per
    generator (its lowest-power translate inside the region). A difference
    gives the quotient, presented freely as the cone of the inclusion of the
    inner subcomplex; it has the quotient's homology.
    """
    if isinstance(s, Difference):
        inner = _subcomplex(k, region_basis(k, s.inner))
        outer = _subcomplex(k, region_basis(k, s.outer))
        return mapping_cone(inclusion_map(k, s.inner, s.outer), inner, outer)
    return _subcomplex(k, region_basis(k, s))


def b_region() -> SouthWest:
    return SouthWest.half_plane_i(0)


def a_region(s: int) -> SouthWest:
    return SouthWest.quadrant(0, s)


def a_complex(k: KnotComplex, s: int) -> FreeUComplex:
    return region_complex(k, a_region(s))


def b_complex(k: KnotComplex) -> FreeUComplex:
    return region_complex(k, b_region())


def j_complex(k: KnotComplex) -> FreeUComplex:
    return region_complex(k, SouthWest.half_plane_j(0))


@dataclass(frozen=True)
class EdgeMaps:
    s: int
    a: FreeUComplex
    b: FreeUComplex
    v: UMonomialMatrix
    h: UMonomialMatrix


def edge_maps(k: KnotComplex, s: int, check: bool = False) -> EdgeMaps:
    a = a_complex(k, s)
    b = b_complex(k)
    v = inclusion_map(k, a_region(s), b_region())
    # A_s inside C{j <= s}; U^s carries that basis onto the basis of C{j <= 0}
    to_j = inclusion_map(k, a_region(s), SouthWest.half_plane_j(s))
    h = k.flip_matrix @ to_j
    if check:
        check_chain_map(v, a, b)
        check_chain_map(h, a, b)
    return EdgeMaps(s, a, b, v, h)


# --- validation -------------------------------------------------------------


@dataclass(frozen=True)
class Check:
    name: str
    status: str  # "pass" | "fail" | "skip"
    witness: str = ""


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[Check, ...]

    @property
    def ok(self) -> bool:
        return all(c.status != "fail" for c in self.checks)

    @property
    def failed(self) -> list[Check]:
        return [c for c in self.checks if c.status == "fail"]

    def to_dict(self) -> dict:
        return {"ok": self.ok, "checks": [c.__dict__ for c in self.checks]}


def _square_check(k: KnotComplex) -> Check:
    n = k.rank
    idx = k.index
    entries = {}
    for s, t, u in k.arrows:
        if s not in idx or t not in idx:
            return Check("d_squared_zero", "fail", f"arrow {s}->{t} names an unknown generator")
        if (idx[t], idx[s]) in entries:
            return Check("d_squared_zero", "fail", f"duplicate arrow {s}->{t}")
        if u < 0:
            return Check("d_squared_zero", "fail", f"negative exponent on {s}->{t}")
        entries[(idx[t], idx[s])] = u
    d = UMonomialMatrix(n, n, entries)
    sq = polynomial_product(d, d)
    if sq:
        (r, c), exps = min(sq.items())
        return Check("d_squared_zero", "fail", f"d^2({k.generators[c].id}) hits {k.generators[r].id} with U^{sorted(exps)}")
    return Check("d_squared_zero", "pass")


def validate_knot_complex(k: KnotComplex) -> ValidationReport:
    checks = [_square_check(k)]
    gens = {g.id: g for g in k.generators}
    basic_ok = checks[0].status == "pass"

    bad = None
    if basic_ok:
        for s, t, u in k.arrows:
            if gens[t].maslov - 2 * u != gens[s].maslov - 1:
                bad = f"{s}->{t} (U^{u}): maslov {gens[s].maslov} -> {gens[t].maslov}"
                break
    checks.append(Check("maslov_drop", "pass" if basic_ok and bad is None else ("fail" if basic_ok else "skip"), bad or ""))

    bad = None
    if basic_ok:
        for s, t, u in k.arrows:
            if gens[t].alexander - u > gens[s].alexander:
                bad = f"{s}->{t} (U^{u}): alexander {gens[s].alexander} -> {gens[t].alexander}"
                break
    checks.append(Check("filtration", "pass" if basic_ok and bad is None else ("fail" if basic_ok else "skip"), bad or ""))

    graded_ok = all(c.status == "pass" for c in checks)
    if graded_ok:
        h = homology_decomp(j_complex(k))
        good = h.free_rank == 1 and h.is_free and h.tower_gradings[0].denominator == 1 and h.tower_gradings[0] % 2 == 0
        checks.append(Check("homology_axiom", "pass" if good else "fail", "" if good else f"H(C{{j<=0}}) = {h} with tower grading {h.tower_gradings}"))
    else:
        checks.append(Check("homology_axiom", "skip", "earlier check failed"))

    if graded_ok:
        checks.append(_flip_check(k))
    else:
        checks.append(Check("flip", "skip", "earlier check failed"))
    return ValidationReport(tuple(checks))


def _flip_check(k: KnotComplex) -> Check:
    try:
        f = k.flip_matrix
        src = j_complex(k)
        dst = b_complex(k)
        deg = f.degree(dst.gradings, src.gradings)
        if deg not in (None, 0):
            return Check("flip", "fail", f"flip shifts the grading by {deg}")
        check_chain_map(f, src, dst)
        cone = homology_decomp(mapping_cone(f, src, dst), check=False)
        if cone.free_rank or cone.torsion:
            return Check("flip", "fail", f"flip is not a quasi-isomorphism (cone homology {cone})")
    except HFError as exc:
        return Check("flip", "fail", f"{exc.name}: {exc}")
    return Check("flip", "pass")


# --- model library ----------------------------------------------------------


def staircase(steps: Sequence[int]) -> KnotComplex:
    """Staircase of an L-space knot; ``steps`` alternate horizontal and vertical lengths.

    An empty list gives the unknot. Lengths must be positive and come in
    pairs; the palindromic ones carry the standard involution.
    """
    steps = list(steps)
    if any(int(x) != x or x <= 0 for x in steps):
        raise BadSteps(f"step lengths must be positive integers: {steps}")
    if len(steps) % 2:
        raise BadSteps("a staircase needs an even number of steps")
    g = sum(steps[0::2])
    if g != sum(steps[1::2]):
        raise BadSteps("horizontal and vertical step lengths must have the same total")
    # positions (i, j) of the generators drawn as in the plane
    pos = [(0, g)]
    for n, step in enumerate(steps):
        i, j = pos[-1]
        pos.append((i + step, j) if n % 2 == 0 else (i, j - step))
    # the generator drawn at (i, j) is U^{-j} x with alexander(x) = i - j
    alex = [i - j for i, j in pos]
    jpos = [j for _, j in pos]
    arrows = []
    for n in range(1, len(pos), 2):
        arrows.append((f"x{n}", f"x{n - 1}", jpos[n] - jpos[n - 1]))
        arrows.append((f"x{n}", f"x{n + 1}", jpos[n] - jpos[n + 1]))
    maslov = [Fraction(0)]
    for n in range(1, len(pos)):
        if n % 2:
            maslov.append(maslov[n - 1] - 2 * (jpos[n] - jpos[n - 1]) + 1)
        else:
            maslov.append(maslov[n - 1] - 1 + 2 * (jpos[n - 1] - jpos[n]))
    # the end of the staircase at alexander = g carries Maslov grading 0
    maslov = [m - maslov[-1] for m in maslov]
    gens = tuple(Generator(f"x{n}", maslov[n], alex[n]) for n in range(len(pos)))
    last = len(pos) - 1
    pairs = tuple(sorted({tuple(sorted((f"x{n}", f"x{last - n}"))) for n in range(len(pos))}))
    return KnotComplex(gens, tuple(arrows), FlipSpec(pairs=pairs))


def box(size: int = 1, maslov: int = 0, offset: int = 0) -> KnotComplex:
    """Acyclic square of side ``size`` with top-right corner at ``(offset, 0)``.

    Only ``offset == 0`` is symmetric under the standard involution; use
    :func:`box_pair` for an off-diagonal box together with its reflection.
    """
    if size <= 0:
        raise BadSteps("box size must be positive")
    n, o = size, offset
    # a at (o, 0); U^n b at (o, -n); c at (o - n, 0); U^n d at (o - n, -n)
    gens = (
        Generator("a", maslov, o),
        Generator("b", maslov + 2 * n - 1, o + n),
        Generator("c", maslov - 1, o - n),
        Generator("d", maslov + 2 * n - 2, o),
    )
    arrows = (("a", "b", n), ("a", "c", 0), ("b", "d", 0), ("c", "d", n))
    flip = FlipSpec(pairs=(("a", "a"), ("b", "c"), ("d", "d"))) if o == 0 else None
    return KnotComplex(gens, arrows, flip)


def box_pair(size: int, maslov: int, offset: int) -> KnotComplex:
    """An off-diagonal box plus its mirror image across the diagonal."""
    first = box(size, maslov, offset)
    second = box(size, maslov - 2 * offset, -offset)
    k = direct_sum([first, second], ["u.", "v."])
    pairs = (("u.a", "v.a"), ("u.b", "v.c"), ("u.c", "v.b"), ("u.d", "v.d"))
    return k.with_flip(FlipSpec(pairs=pairs))


def direct_sum(parts: Sequence[KnotComplex], prefixes: Sequence[str] | None = None) -> KnotComplex:
    prefixes = list(prefixes) if prefixes is not None else [f"p{i}." for i in range(len(parts))]
    gens, arrows, pairs = [], [], []
    have_pairs = True
    for k, pre in zip(parts, prefixes):
        gens.extend(Generator(pre + g.id, g.maslov, g.alexander) for g in k.generators)
        arrows.extend((pre + s, pre + d, u) for s, d, u in k.arrows)
        if k.flip is None or k.flip.pairs is None:
            have_pairs = False
        else:
            pairs.extend((pre + a, pre + b) for a, b in k.flip.pairs)
    flip = FlipSpec(pairs=tuple(pairs)) if have_pairs else None
    return KnotComplex(tuple(gens), tuple(arrows), flip)


def grading_shift(k: KnotComplex, maslov: int = 0, alexander: int = 0) -> KnotComplex:
    """Translate every generator; the involution survives only for ``alexander == 0``."""
    gens = tuple(Generator(g.id, g.maslov + maslov, g.alexander + alexander) for g in k.generators)
    return KnotComplex(gens, k.arrows, k.flip if alexander == 0 else None)


def build_model(kind: str, *args, **kwargs) -> KnotComplex:
    builders = {
        "staircase": staircase,
        "box": box,
        "direct_sum": direct_sum,
        "grading_shift": grading_shift,
    }
    if kind not in builders:
        raise ValueError(f"unknown model kind {kind!r}")
    return builders[kind](*args, **kwargs)


def unknot() -> KnotComplex:
    return staircase([])


def torus_2(n: int) -> KnotComplex:
    """T(2, n) for odd n >= 1."""
    return staircase([1] * (n - 1))


def figure_eight() -> KnotComplex:
    return direct_sum([unknot(), box(1)], ["", "q."])


def corpus() -> dict[str, KnotComplex]:
    return {
        "unknot": unknot(),
        "T23": torus_2(3),
        "T25": torus_2(5),
        "T27": torus_2(7),
        "T34": staircase([1, 2, 2, 1]),
        "fig8": figure_eight(),
    }
