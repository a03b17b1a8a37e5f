"""Surgery on knots via the truncated mapping cone of D: A -> B.

Positive slopes are computed directly; a negative slope ``-p/q`` is computed
as ``p/q`` surgery on the mirror complex (the two manifolds differ by
orientation, which leaves torsion multisets and tower counts unchanged).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

from .errors import InvariantViolation, NotLarge, WindowUnstable, ZeroOnTower, ZeroSurgery
from .knot_complex import EdgeMaps, KnotComplex, a_complex, edge_maps
from .ualgebra import FreeUComplex, ModuleDecomp, UMonomialMatrix, homology_decomp, induced_tower_exponent


# --- spin^c labels -----------------------------------------------------------


def integer_labels(n: int) -> list[int]:
    """Labels s with -|n|/2 < s <= |n|/2."""
    m = abs(n)
    return list(range(-((m - 1) // 2), m // 2 + 1))


def residue_labels(p: int) -> list[int]:
    return list(range(abs(p)))


def residue_of(label: int, p: int) -> int:
    return label % abs(p)


def _normalize_slope(p: int, q: int) -> tuple[int, int]:
    if q == 0:
        raise ValueError("slope denominator must be non-zero")
    if q < 0:
        p, q = -p, -q
    if p == 0:
        raise ZeroSurgery("0-surgery has b1 > 0 and is not supported")
    if math.gcd(p, q) != 1:
        raise ValueError(f"slope {p}/{q} is not in lowest terms")
    return p, q


# --- edge data shared across labels -----------------------------------------


class _Edges:
    """Lazily computed A_t complexes, homologies and edge maps of one knot."""

    def __init__(self, k: KnotComplex):
        self.k = k
        self._maps: dict[int, EdgeMaps] = {}
        self._homology: dict[int, ModuleDecomp] = {}

    def maps(self, t: int) -> EdgeMaps:
        if t not in self._maps:
            self._maps[t] = edge_maps(self.k, t)
        return self._maps[t]

    def homology(self, t: int) -> ModuleDecomp:
        if t not in self._homology:
            self._homology[t] = homology_decomp(self.maps(t).a, check=False)
        return self._homology[t]


# --- the cone ---------------------------------------------------------------


@dataclass(frozen=True)
class SurgeryCone:
    """Truncated cone for one spin^c label of p/q surgery (p, q > 0).

    A-part ``s`` (lo <= s <= hi) is ``A_{t(s)}`` with ``t(s) = floor((label + p*s)/q)``.
    B-parts run over lo < s <= hi; ``v`` maps A-part s to B-part s and ``h``
    maps it to B-part s + 1.
    """

    p: int
    q: int
    label: int
    window: int
    lo: int
    hi: int
    a_indices: tuple[tuple[int, int], ...]  # (s, t(s))
    complex: FreeUComplex = field(repr=False)

    def homology(self) -> ModuleDecomp:
        return homology_decomp(self.complex, check=False)


def _t(label: int, p: int, q: int, s: int) -> int:
    return (label + p * s) // q


def cone_bounds(label: int, p: int, q: int, window: int) -> tuple[int, int]:
    """Smallest hi with t(hi) >= window and largest lo with t(lo) <= -window."""
    hi = -((label - window * q) // p)
    lo = ((1 - window) * q - 1 - label) // p
    return lo, hi


def surgery_cone(k: KnotComplex, p: int, q: int, label: int, window: int | None = None, _edges: _Edges | None = None) -> SurgeryCone:
    if p <= 0 or q <= 0:
        raise ValueError("surgery_cone expects a positive slope")
    edges = _edges or _Edges(k)
    b = window if window is not None else k.genus_bound + 1
    lo, hi = cone_bounds(label, p, q, b)
    n = k.rank
    a_idx = [(s, _t(label, p, q, s)) for s in range(lo, hi + 1)]
    na = len(a_idx)
    b_base = na * n

    def a_off(s: int) -> int:
        return (s - lo) * n

    def b_off(s: int) -> int:
        return b_base + (s - lo - 1) * n

    total = b_base + (hi - lo) * n
    ids: list = [None] * total
    grads: list = [None] * total
    entries: dict[tuple[int, int], int] = {}
    b_complex = edges.maps(0).b
    # shift(A_s) = tau(s); shift(B_s) = tau(s) - 1 = tau(s-1) + 2 t(s-1) - 1
    tau = 0
    for s, t in a_idx:
        em = edges.maps(t)
        base = a_off(s)
        for j in range(n):
            ids[base + j] = ("A", s, em.a.ids[j])
            grads[base + j] = em.a.gradings[j] + tau
        for (r, c), e in em.a.d.entries.items():
            entries[(base + r, base + c)] = e
        if s > lo:
            bb = b_off(s)
            for j in range(n):
                ids[bb + j] = ("B", s, b_complex.ids[j])
                grads[bb + j] = b_complex.gradings[j] + tau - 1
            for (r, c), e in b_complex.d.entries.items():
                entries[(bb + r, bb + c)] = e
            for (r, c), e in em.v.entries.items():
                entries[(bb + r, base + c)] = e
        if s < hi:
            bb = b_off(s + 1)
            for (r, c), e in em.h.entries.items():
                entries[(bb + r, base + c)] = e
        tau += 2 * t
    cx = FreeUComplex(tuple(ids), tuple(grads), UMonomialMatrix(total, total, entries))
    return SurgeryCone(p, q, label, b, lo, hi, tuple(a_idx), cx)


def _positive_family(
    k: KnotComplex, p: int, q: int, labels: Iterable[int], window: int | None, stability: bool
) -> dict[int, ModuleDecomp]:
    edges = _Edges(k)
    b = window if window is not None else k.genus_bound + 1
    if b < k.genus_bound + 1:
        raise ValueError(f"window {b} is below max |alexander| + 1 = {k.genus_bound + 1}")
    out = {}
    for label in labels:
        cone = surgery_cone(k, p, q, label, b, edges)
        cone.complex.check()
        got = cone.homology()
        if stability:
            wider = surgery_cone(k, p, q, label, b + 2, edges).homology()
            if wider != got:
                raise WindowUnstable(f"label {label}: window {b} gives {got}, window {b + 2} gives {wider}")
        out[label] = got
    return out


def integer_surgery(
    k: KnotComplex, n: int, window: int | None = None, stability: bool = True
) -> dict[int, ModuleDecomp]:
    """HF^- of n-surgery per label s, -|n|/2 < s <= |n|/2."""
    if n == 0:
        raise ZeroSurgery("0-surgery has b1 > 0 and is not supported")
    src = k if n > 0 else k.mirror()
    return _positive_family(src, abs(n), 1, integer_labels(n), window, stability)


def rational_surgery(
    k: KnotComplex, p: int, q: int = 1, window: int | None = None, stability: bool = True
) -> dict[int, ModuleDecomp]:
    """HF^- of p/q-surgery per residue label 0 <= s < |p|."""
    p, q = _normalize_slope(p, q)
    src = k if p > 0 else k.mirror()
    return _positive_family(src, abs(p), q, residue_labels(p), window, stability)


def large_integer_surgery(k: KnotComplex, n: int) -> dict[int, ModuleDecomp]:
    """Large surgery: label s is computed by A_s alone."""
    if n == 0:
        raise ZeroSurgery("0-surgery has b1 > 0 and is not supported")
    g = k.genus_bound
    if n < 2 * g - 1:
        raise NotLarge(f"n = {n} is below 2g - 1 = {2 * g - 1}")
    return {s: homology_decomp(a_complex(k, s)) for s in integer_labels(n)}


# --- V, H, M ---------------------------------------------------------------


@dataclass(frozen=True)
class VHMTable:
    lo: int
    hi: int
    V: tuple[int, ...]
    H: tuple[int, ...]
    h_diverges: bool  # H keeps growing at the top of the range
    v_diverges: bool  # V keeps growing at the bottom of the range

    @property
    def M(self) -> tuple[int, ...]:
        return tuple(min(v, h) for v, h in zip(self.V, self.H))

    def m(self, s: int) -> int:
        """M_s, zero outside the computed range."""
        if self.lo <= s <= self.hi:
            return self.M[s - self.lo]
        return 0

    def v(self, s: int) -> int:
        if s > self.hi:
            return 0
        if s < self.lo:
            return self.V[0] + (self.lo - s)
        return self.V[s - self.lo]

    def h(self, s: int) -> int:
        return self.v(-s) if not (self.lo <= s <= self.hi) else self.H[s - self.lo]

    def to_dict(self) -> dict:
        return {
            "range": [self.lo, self.hi],
            "V": list(self.V),
            "H": list(self.H),
            "M": list(self.M),
            "h_diverges": self.h_diverges,
            "v_diverges": self.v_diverges,
        }


def check_m_sequence(m: dict[int, int]) -> None:
    """Symmetry, unit step bound and eventual vanishing of M on a symmetric range."""
    keys = sorted(m)
    for s in keys:
        if -s in m and m[s] != m[-s]:
            raise InvariantViolation(f"symmetry: M_{s} = {m[s]} but M_{-s} = {m[-s]}")
        if m[s] < 0:
            raise InvariantViolation(f"non-negativity: M_{s} = {m[s]}")
    for s in keys:
        if s >= 0 and s + 1 in m and not (m[s] >= m[s + 1] >= max(m[s] - 1, 0)):
            raise InvariantViolation(f"step bound: M_{s} = {m[s]}, M_{s + 1} = {m[s + 1]}")
        if s <= 0 and s - 1 in m and not (m[s] >= m[s - 1] >= max(m[s] - 1, 0)):
            raise InvariantViolation(f"step bound: M_{s} = {m[s]}, M_{s - 1} = {m[s - 1]}")
    if m[keys[0]] != 0 or m[keys[-1]] != 0:
        raise InvariantViolation("eventual vanishing: M is non-zero at the edge of the range")


def vhm_table(k: KnotComplex, check: bool = True) -> VHMTable:
    """V_s, H_s and M_s for s in [-S, S], S = max |alexander| + 1."""
    S = k.genus_bound + 1
    edges = _Edges(k)
    b_dec = homology_decomp(edges.maps(0).b)
    V, H = [], []
    for s in range(-S, S + 1):
        em = edges.maps(s)
        a_dec = edges.homology(s)
        try:
            V.append(induced_tower_exponent(em.v, em.a, em.b, a_dec, b_dec))
            H.append(induced_tower_exponent(em.h, em.a, em.b, a_dec, b_dec))
        except ZeroOnTower as exc:
            raise InvariantViolation(f"edge map at s = {s} vanishes on the tower") from exc
    table = VHMTable(-S, S, tuple(V), tuple(H), H[-1] > H[-2], V[0] > V[1])
    if check:
        check_m_sequence({s: table.M[s + S] for s in range(-S, S + 1)})
        if not (table.h_diverges and table.v_diverges):
            raise InvariantViolation("divergence: H does not grow upward or V does not grow downward")
        for s in range(-S, S + 1):
            if s >= k.genus_bound and table.V[s + S] != 0:
                raise InvariantViolation(f"eventual vanishing: V_{s} = {table.V[s + S]} above the genus bound")
    return table


# --- reduced fast path --------------------------------------------------------


def distinguished_index(label: int, p: int, q: int, candidates: Iterable[int]) -> int:
    """An index i minimizing |floor((label + i p)/q)|; ties go to the smaller i."""
    return min(candidates, key=lambda i: (abs(_t(label, p, q, i)), i))


def red_fastpath(k: KnotComplex, p: int, q: int = 1, table: VHMTable | None = None) -> dict[int, ModuleDecomp]:
    """Reduced part per residue label, assembled from A_t torsion and M.

    For label s it is the torsion of every H(A_{t(i)}), t(i) = floor((s + i p)/q),
    together with one F[U]/U^{M_{t(i)}} for every i except one minimizing |t(i)|.
    """
    p, q = _normalize_slope(p, q)
    src = k if p > 0 else k.mirror()
    p = abs(p)
    table = table or vhm_table(src)
    edges = _Edges(src)
    b = src.genus_bound + 1
    out = {}
    for label in residue_labels(p):
        lo, hi = cone_bounds(label, p, q, b)
        idx = range(lo, hi + 1)
        i0 = distinguished_index(label, p, q, idx)
        torsion: list[int] = []
        for i in idx:
            t = _t(label, p, q, i)
            torsion.extend(edges.homology(t).torsion)
            if i != i0:
                torsion.append(table.m(t))
        out[label] = ModuleDecomp(0, tuple(torsion))
    return out


def total_free_rank(result: dict[int, ModuleDecomp]) -> int:
    return sum(m.free_rank for m in result.values())
