"""Exact linear algebra over F2[U] for monomial (Maslov-homogeneous) matrices.

Every map in this package is homogeneous, so each matrix entry is either zero
or a single monomial ``U**e``; a matrix is stored as ``{(row, col): e}``.
Graded Smith normal form then only needs unit-coefficient pivots and the
whole reduction stays inside monomial matrices.
"""

from __future__ import annotations

import heapq
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Hashable, Iterable, Mapping, Sequence

from .errors import InvalidComplex, NonMonomialPivot, NoTower, ZeroOnTower

# Observers called with every complex passed to ``homology_decomp``; the
# acceptance suite uses this to replay the oracle on everything it touched.
DECOMP_OBSERVERS: list[Callable[["FreeUComplex", "ModuleDecomp"], None]] = []


@dataclass(frozen=True)
class UMonomialMatrix:
    nrows: int
    ncols: int
    entries: Mapping[tuple[int, int], int] = field(default_factory=dict)

    def __post_init__(self):
        for (r, c), e in self.entries.items():
            if not (0 <= r < self.nrows and 0 <= c < self.ncols):
                raise ValueError(f"entry {(r, c)} outside {self.nrows}x{self.ncols}")
            if e < 0:
                raise ValueError(f"negative exponent {e} at {(r, c)}")

    @classmethod
    def identity(cls, n: int) -> "UMonomialMatrix":
        return cls(n, n, {(i, i): 0 for i in range(n)})

    @classmethod
    def zero(cls, nrows: int, ncols: int) -> "UMonomialMatrix":
        return cls(nrows, ncols, {})

    def __matmul__(self, other: "UMonomialMatrix") -> "UMonomialMatrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        by_row: dict[int, list[tuple[int, int]]] = defaultdict(list)
        for (r, c), e in other.entries.items():
            by_row[r].append((c, e))
        acc: Counter = Counter()
        for (r, k), e in self.entries.items():
            for c, f in by_row.get(k, ()):
                acc[(r, c, e + f)] += 1
        return UMonomialMatrix(self.nrows, other.ncols, _collapse(acc))

    def polynomial_entries(self) -> dict[tuple[int, int], frozenset[int]]:
        return {k: frozenset([e]) for k, e in self.entries.items()}

    def is_zero(self) -> bool:
        return not self.entries

    def degree(self, row_gradings: Sequence[Fraction], col_gradings: Sequence[Fraction]) -> Fraction | None:
        """Common value of row_grading - 2e - col_grading, or None for the zero map."""
        degs = {Fraction(row_gradings[r]) - 2 * e - Fraction(col_gradings[c]) for (r, c), e in self.entries.items()}
        if len(degs) > 1:
            raise NonMonomialPivot(f"map is not homogeneous: degrees {sorted(degs)}")
        return degs.pop() if degs else None


def _collapse(acc: Counter) -> dict[tuple[int, int], int]:
    odd: dict[tuple[int, int], list[int]] = defaultdict(list)
    for (r, c, e), n in acc.items():
        if n % 2:
            odd[(r, c)].append(e)
    out = {}
    for key, exps in odd.items():
        if len(exps) > 1:
            raise NonMonomialPivot(f"entry {key} is the polynomial sum of U^{sorted(exps)}")
        out[key] = exps[0]
    return out


def polynomial_product(a: UMonomialMatrix, b: UMonomialMatrix) -> dict[tuple[int, int], frozenset[int]]:
    """Product without the monomial assumption: entries as sets of exponents mod 2."""
    by_row: dict[int, list[tuple[int, int]]] = defaultdict(list)
    for (r, c), e in b.entries.items():
        by_row[r].append((c, e))
    acc: Counter = Counter()
    for (r, k), e in a.entries.items():
        for c, f in by_row.get(k, ()):
            acc[(r, c, e + f)] += 1
    out: dict[tuple[int, int], set[int]] = defaultdict(set)
    for (r, c, e), n in acc.items():
        if n % 2:
            out[(r, c)].add(e)
    return {k: frozenset(v) for k, v in out.items()}


@dataclass(frozen=True)
class FreeUComplex:
    """Finitely generated free chain complex over F2[U]; rows of ``d`` are targets."""

    ids: tuple[Hashable, ...]
    gradings: tuple[Fraction, ...]
    d: UMonomialMatrix

    def __post_init__(self):
        n = len(self.ids)
        if len(self.gradings) != n or self.d.nrows != n or self.d.ncols != n:
            raise ValueError("generator count, gradings and differential disagree")
        object.__setattr__(self, "gradings", tuple(Fraction(g) for g in self.gradings))

    @property
    def rank(self) -> int:
        return len(self.ids)

    @classmethod
    def build(cls, gens: Iterable[tuple[Hashable, Any]], arrows: Iterable[tuple[Hashable, Hashable, int]]) -> "FreeUComplex":
        gens = list(gens)
        index = {g: i for i, (g, _) in enumerate(gens)}
        entries = {}
        for src, dst, e in arrows:
            key = (index[dst], index[src])
            if key in entries:
                raise InvalidComplex(f"duplicate arrow {src}->{dst}")
            entries[key] = e
        n = len(gens)
        return cls(tuple(g for g, _ in gens), tuple(Fraction(m) for _, m in gens), UMonomialMatrix(n, n, entries))

    def check(self) -> None:
        for (r, c), e in self.d.entries.items():
            if self.gradings[r] - 2 * e != self.gradings[c] - 1:
                raise InvalidComplex(
                    f"arrow {self.ids[c]}->{self.ids[r]} (U^{e}) is not homogeneous of degree -1"
                )
        sq = polynomial_product(self.d, self.d)
        if sq:
            (r, c), exps = next(iter(sorted(sq.items(), key=lambda kv: kv[0])))
            raise InvalidComplex(f"d^2 != 0: coefficient of {self.ids[r]} in d^2({self.ids[c]}) has U^{sorted(exps)}")


@dataclass(frozen=True)
class ModuleDecomp:
    """F[U]^free_rank plus F[U]/U^k for each k in ``torsion``.

    Gradings are relative to the complex they came from and are ignored by
    equality. ``torsion_gradings`` aligns with ``torsion`` and records the
    grading of each summand's generator (its top class).
    """

    free_rank: int
    torsion: tuple[int, ...] = ()
    tower_gradings: tuple[Fraction, ...] | None = field(default=None, compare=False)
    torsion_gradings: tuple[Fraction, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("negative free rank")
        if any(k < 0 for k in self.torsion):
            raise ValueError("torsion exponents must be non-negative")
        if self.torsion_gradings is not None:
            pairs = sorted(
                ((k, g) for k, g in zip(self.torsion, self.torsion_gradings) if k > 0),
                key=lambda kg: (-kg[0], -kg[1]),
            )
            object.__setattr__(self, "torsion", tuple(k for k, _ in pairs))
            object.__setattr__(self, "torsion_gradings", tuple(g for _, g in pairs))
        else:
            object.__setattr__(self, "torsion", tuple(sorted((k for k in self.torsion if k > 0), reverse=True)))
        if self.tower_gradings is not None:
            object.__setattr__(self, "tower_gradings", tuple(sorted(self.tower_gradings, reverse=True)))

    @property
    def is_free(self) -> bool:
        return not self.torsion

    def __add__(self, other: "ModuleDecomp") -> "ModuleDecomp":
        return ModuleDecomp(self.free_rank + other.free_rank, self.torsion + other.torsion)

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"free_rank": self.free_rank, "torsion": list(self.torsion)}
        if self.tower_gradings is not None:
            out["tower_gradings"] = [str(g) for g in self.tower_gradings]
        if self.torsion_gradings is not None:
            out["torsion_gradings"] = [str(g) for g in self.torsion_gradings]
        return out

    @classmethod
    def from_dict(cls, data: Mapping) -> "ModuleDecomp":
        tg = data.get("tower_gradings")
        sg = data.get("torsion_gradings")
        return cls(
            int(data["free_rank"]),
            tuple(int(k) for k in data.get("torsion", ())),
            tuple(Fraction(g) for g in tg) if tg is not None else None,
            tuple(Fraction(g) for g in sg) if sg is not None else None,
        )

    def __str__(self) -> str:
        parts = []
        if self.free_rank:
            parts.append("F[U]" if self.free_rank == 1 else f"F[U]^{self.free_rank}")
        for k, n in sorted(Counter(self.torsion).items(), reverse=True):
            t = "F" if k == 1 else f"F[U]/U^{k}"
            parts.append(t if n == 1 else f"({t})^{n}")
        return " + ".join(parts) or "0"


def direct_sum(decomps: Iterable[ModuleDecomp]) -> ModuleDecomp:
    out = ModuleDecomp(0)
    for m in decomps:
        out = out + m
    return out


@dataclass(frozen=True)
class SNFResult:
    exponents: tuple[int, ...]
    pivots: tuple[tuple[int, int, int], ...]  # (row, col, exponent), in pivot order
    row_transform: UMonomialMatrix | None
    col_transform: UMonomialMatrix | None


def graded_snf(m: UMonomialMatrix, track: bool = True) -> SNFResult:
    """Smith normal form over F2[U] of a monomial matrix.

    Returns invertible L, R with ``L @ m @ R`` zero except ``U**e`` at each
    pivot; exponents come out in non-decreasing order, so they form the
    invariant-factor divisibility chain. Pivots are taken at a globally minimal
    exponent, which divides every remaining entry, so unit pivots go first.
    """
    rows: dict[int, dict[int, int]] = defaultdict(dict)
    cols: dict[int, set[int]] = defaultdict(set)
    heap: list[tuple[int, int, int]] = []
    for (r, c), e in m.entries.items():
        rows[r][c] = e
        cols[c].add(r)
        heap.append((e, c, r))
    heapq.heapify(heap)

    L: dict[int, dict[int, int]] = {r: {r: 0} for r in range(m.nrows)} if track else {}
    R: dict[int, dict[int, int]] = {c: {c: 0} for c in range(m.ncols)} if track else {}

    def toggle(r: int, c: int, e: int) -> None:
        row = rows[r]
        old = row.get(c)
        if old is None:
            row[c] = e
            cols[c].add(r)
            heapq.heappush(heap, (e, c, r))
        elif old == e:
            del row[c]
            cols[c].discard(r)
        else:
            raise NonMonomialPivot(f"entry ({r}, {c}) would become U^{old} + U^{e}")

    def add_shifted(target: dict[int, int], source: dict[int, int], k: int, what: str) -> None:
        for j, e in source.items():
            old = target.get(j)
            if old is None:
                target[j] = e + k
            elif old == e + k:
                del target[j]
            else:
                raise NonMonomialPivot(f"{what} transform entry would become U^{old} + U^{e + k}")

    pivots = []
    while heap:
        e, c, r = heapq.heappop(heap)
        if rows.get(r, {}).get(c) != e:
            continue
        pivot_row = dict(rows[r])
        for r2 in sorted(cols[c] - {r}):
            k = rows[r2][c] - e
            for c2, e2 in pivot_row.items():
                toggle(r2, c2, k + e2)
            if track:
                add_shifted(L[r2], L[r], k, "row")
        for c2 in sorted(set(rows[r]) - {c}):
            k = rows[r][c2] - e
            del rows[r][c2]
            cols[c2].discard(r)
            if track:
                add_shifted(R[c2], R[c], k, "column")
        del rows[r]
        del cols[c]
        pivots.append((r, c, e))

    if track:
        Lm = UMonomialMatrix(m.nrows, m.nrows, {(r, k): e for r, row in L.items() for k, e in row.items()})
        Rm = UMonomialMatrix(m.ncols, m.ncols, {(k, c): e for c, col in R.items() for k, e in col.items()})
    else:
        Lm = Rm = None
    return SNFResult(tuple(p[2] for p in pivots), tuple(pivots), Lm, Rm)


def homology_decomp(c: FreeUComplex, check: bool = True) -> ModuleDecomp:
    """Homology of ``c`` as an F[U]-module, with relative generator gradings."""
    if check:
        c.check()
    snf = graded_snf(c.d, track=False)
    pivot_rows = {r for r, _, _ in snf.pivots}
    pivot_cols = {col for _, col, _ in snf.pivots}
    kernel = Counter(c.gradings[j] for j in range(c.rank) if j not in pivot_cols)
    saturated = Counter(c.gradings[r] for r in pivot_rows)
    towers = kernel - saturated
    if sum(towers.values()) != c.rank - 2 * len(snf.pivots):
        raise InvalidComplex("kernel gradings do not account for the image; is d^2 = 0?")
    torsion = [(e, c.gradings[r]) for r, _, e in snf.pivots if e > 0]
    out = ModuleDecomp(
        c.rank - 2 * len(snf.pivots),
        tuple(e for e, _ in torsion),
        tuple(towers.elements()),
        tuple(g for _, g in torsion),
    )
    for observer in DECOMP_OBSERVERS:
        observer(c, out)
    return out


def annihilator_exponent(m: ModuleDecomp) -> int:
    return max(m.torsion, default=0)


def check_chain_map(f: UMonomialMatrix, src: FreeUComplex, dst: FreeUComplex) -> None:
    if f.nrows != dst.rank or f.ncols != src.rank:
        raise InvalidComplex("chain map shape does not match its complexes")
    lhs = polynomial_product(dst.d, f)
    rhs = polynomial_product(f, src.d)
    keys = set(lhs) | set(rhs)
    bad = [k for k in keys if lhs.get(k, frozenset()) != rhs.get(k, frozenset())]
    if bad:
        r, col = min(bad)
        raise InvalidComplex(f"not a chain map at ({dst.ids[r]}, {src.ids[col]})")


def mapping_cone(f: UMonomialMatrix, src: FreeUComplex, dst: FreeUComplex) -> FreeUComplex:
    """Cone of a homogeneous chain map; source generators come first."""
    delta = f.degree(dst.gradings, src.gradings)
    shift = (delta if delta is not None else 0) + 1
    n = src.rank
    entries = dict(src.d.entries)
    entries.update({(r + n, c + n): e for (r, c), e in dst.d.entries.items()})
    entries.update({(r + n, c): e for (r, c), e in f.entries.items()})
    total = n + dst.rank
    return FreeUComplex(
        tuple(("src", i) for i in src.ids) + tuple(("dst", i) for i in dst.ids),
        tuple(g + shift for g in src.gradings) + dst.gradings,
        UMonomialMatrix(total, total, entries),
    )


def induced_tower_exponent(
    f: UMonomialMatrix,
    src: FreeUComplex,
    dst: FreeUComplex,
    src_decomp: ModuleDecomp | None = None,
    dst_decomp: ModuleDecomp | None = None,
) -> int:
    """Exponent V with f_* equal to multiplication by U^V on the towers.

    f_* is non-zero on towers exactly when its cone has no free part; the
    exponent then follows from the tower gradings and the degree of f.
    """
    src_decomp = src_decomp or homology_decomp(src)
    dst_decomp = dst_decomp or homology_decomp(dst)
    if src_decomp.free_rank != 1 or dst_decomp.free_rank != 1:
        raise NoTower(f"expected one tower on each side, got {src_decomp.free_rank} and {dst_decomp.free_rank}")
    check_chain_map(f, src, dst)
    cone = homology_decomp(mapping_cone(f, src, dst), check=False)
    if cone.free_rank != 0:
        raise ZeroOnTower("induced map vanishes on the tower")
    delta = f.degree(dst.gradings, src.gradings)
    v = (dst_decomp.tower_gradings[0] - src_decomp.tower_gradings[0] - delta) / 2
    if v.denominator != 1 or v < 0:
        raise InvalidComplex(f"tower exponent {v} is not a non-negative integer")
    return int(v)


def tower_exponent_or_inf(*args, **kwargs) -> float:
    try:
        return induced_tower_exponent(*args, **kwargs)
    except ZeroOnTower:
        return math.inf
