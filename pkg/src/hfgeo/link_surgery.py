"""Lattice geometry of the linking matrix and large surgeries on links.

Lattice points are doubled-integer vectors, as in ``link_complex``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Hashable, Mapping, Sequence

import sympy

from .errors import DegenerateFraming, InvalidComplex, NotComparable, NotLarge
from .geography import lin_check, missing_heights, skyline_witness, strong_check
from .link_complex import HyperBox, LinkComplex, Vec, a_minus_link, hat_polytope, link_homology_decomp
from .ualgebra import ModuleDecomp, direct_sum


@dataclass(frozen=True)
class LinkingMatrix:
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("linking matrix must be square")
        if any(rows[i][j] != rows[j][i] for i in range(n) for j in range(n)):
            raise ValueError("linking matrix must be symmetric")

    @classmethod
    def from_flat(cls, values: Sequence[int]) -> "LinkingMatrix":
        n = int(round(len(values) ** 0.5))
        if n * n != len(values):
            raise ValueError(f"{len(values)} entries do not form a square matrix")
        return cls(tuple(tuple(values[i * n:(i + 1) * n]) for i in range(n)))

    @classmethod
    def for_link(cls, c: LinkComplex, framings: Sequence[int]) -> "LinkingMatrix":
        l = c.components
        return cls(tuple(tuple(framings[i] if i == j else c.linking[i][j] for j in range(l)) for i in range(l)))

    @property
    def size(self) -> int:
        return len(self.rows)

    @property
    def framings(self) -> tuple[int, ...]:
        return tuple(self.rows[i][i] for i in range(self.size))

    def parity(self, i: int) -> int:
        return sum(self.rows[i][j] for j in range(self.size) if j != i) % 2

    @cached_property
    def det(self) -> int:
        return int(sympy.Matrix(self.rows).det())

    @cached_property
    def inverse(self) -> tuple[tuple[Fraction, ...], ...]:
        if self.det == 0:
            raise DegenerateFraming("linking matrix is singular; the surgery has b1 > 0")
        inv = sympy.Matrix(self.rows).inv()
        return tuple(
            tuple(Fraction(int(inv[i, j].p), int(inv[i, j].q)) for j in range(self.size)) for i in range(self.size)
        )

    def matches(self, c: LinkComplex) -> bool:
        l = self.size
        return l == c.components and all(
            self.rows[i][j] == c.linking[i][j] for i in range(l) for j in range(l) if i != j
        )


def _in_domain(lam: LinkingMatrix, s2: Sequence[int]) -> bool:
    half = Fraction(1, 2)
    for row in lam.inverse:
        t = sum(Fraction(x, 2) * r for x, r in zip(s2, row))
        if not (-half < t <= half):
            return False
    return True


def spinc_enumerate(lam: LinkingMatrix) -> list[Vec]:
    """Lattice points s = Lambda t with t in (-1/2, 1/2]^l, in sorted order."""
    if lam.det == 0:
        raise DegenerateFraming("linking matrix is singular; the surgery has b1 > 0")
    ranges = []
    for i, row in enumerate(lam.rows):
        bound = sum(abs(x) for x in row)  # doubled half-width of the bounding box
        p = lam.parity(i)
        lo = -bound - ((-bound - p) % 2)
        ranges.append(range(lo, bound + 1, 2))
    pts = [s for s in itertools.product(*ranges) if _in_domain(lam, s)]
    if len(pts) != abs(lam.det):
        raise InvalidComplex(f"found {len(pts)} points in the fundamental domain, expected {abs(lam.det)}")
    return sorted(pts)


def closure(lam: LinkingMatrix, points: Sequence[Vec] | None = None) -> frozenset[Vec]:
    """Lattice points within coordinate distance one of the fundamental domain."""
    points = spinc_enumerate(lam) if points is None else points
    steps = list(itertools.product((-2, 0, 2), repeat=lam.size))
    return frozenset(tuple(x + d for x, d in zip(p, step)) for p in points for step in steps)


def box_points(lam: LinkingMatrix, box: HyperBox) -> list[Vec]:
    ranges = []
    for i, q in enumerate(box.q2):
        p = lam.parity(i)
        lo = -q + ((q - p) % 2)
        ranges.append(range(lo, q + 1, 2))
    return list(itertools.product(*ranges))


def is_large(lam: LinkingMatrix, box: HyperBox) -> bool:
    """Q inside the lattice closure of P(Lambda), with every framing n_i >= 2 q_i - 1."""
    if lam.det == 0:
        raise DegenerateFraming("linking matrix is singular; the surgery has b1 > 0")
    if any(n < q2 - 1 for n, q2 in zip(lam.framings, box.q2)):
        return False
    near = closure(lam)
    return all(p in near for p in box_points(lam, box))


def large_link_surgery(c: LinkComplex, lam: LinkingMatrix) -> dict[Vec, ModuleDecomp]:
    if not lam.matches(c):
        raise InvalidComplex("off-diagonal entries must be the linking numbers of the complex")
    _, box = hat_polytope(c)
    if not is_large(lam, box):
        raise NotLarge(f"framings {lam.framings} are not large for box {tuple(map(str, box.q))}")
    return {s: link_homology_decomp(a_minus_link(c, s)) for s in spinc_enumerate(lam)}


def lattice_path(start: Sequence[int], end: Sequence[int], step: int = 1) -> list[tuple[int, ...]]:
    """Raise every coordinate still below ``end`` by ``step`` until it is reached."""
    if len(start) != len(end) or any(a > b for a, b in zip(start, end)):
        raise NotComparable(f"{tuple(end)} is not above {tuple(start)}")
    path = [tuple(start)]
    while path[-1] != tuple(end):
        path.append(tuple(min(x + step, y) for x, y in zip(path[-1], end)))
    return path


# --- audit -------------------------------------------------------------------


@dataclass
class AuditReport:
    total: ModuleDecomp
    lin: bool
    strong: bool
    per_label: dict[str, dict] = field(default_factory=dict)
    path: list | None = None
    path_similar: bool | None = None
    sphere_shape: bool | None = None
    findings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.findings

    def to_dict(self) -> dict:
        return {
            "total": self.total.to_dict(),
            "lspace": self.total.is_free,
            "lin": self.lin,
            "strong": self.strong,
            "per_label": self.per_label,
            "path": [list(p) for p in self.path] if self.path is not None else None,
            "path_similar": self.path_similar,
            "sphere_shape": self.sphere_shape,
            "findings": list(self.findings),
        }


def _label(key: Hashable) -> str:
    if isinstance(key, tuple):
        return "(" + ",".join(str(Fraction(x, 2)) for x in key) + ")"
    return str(key)


def geography_audit(
    result: Mapping[Hashable, ModuleDecomp],
    homology_at: "LinkHomology | None" = None,
    det: int | None = None,
) -> AuditReport:
    """Lin/strong verdicts, a skyline walk, and the homology-sphere shape test.

    The walk starts at a label of maximal torsion and raises every coordinate
    towards the corner of the box, where A_s is a single tower; it needs
    ``homology_at`` to evaluate points that are not labels.
    """
    total = direct_sum(result.values())
    report = AuditReport(total, lin_check(total), strong_check(total))
    for key in sorted(result):
        m = result[key]
        report.per_label[_label(key)] = {"lin": lin_check(m), "strong": strong_check(m)}
    if not report.lin:
        report.findings.append("lin: torsion present but no F[U]/U summand")
    if not report.strong:
        report.findings.append(f"strong: missing heights {missing_heights(total)}")
    if det is not None and abs(det) == 1:
        m = next(iter(result.values()))
        report.sphere_shape = m.free_rank == 1 and all(k == 1 for k in m.torsion)
        if not report.sphere_shape:
            report.findings.append(f"homology sphere with reduced part {m}")
    if homology_at is not None and result and all(isinstance(k, tuple) for k in result):
        start = max(sorted(result), key=lambda k: max(result[k].torsion, default=0))
        end = tuple(max(a, b) for a, b in zip(start, homology_at.corner))
        path = lattice_path(start, end, step=2)
        seq = [result[start]] + [homology_at(p) for p in path[1:]]
        report.path = path
        report.path_similar = all(skyline_witness(x, y) is not None for x, y in zip(seq, seq[1:]))
        if not report.path_similar:
            report.findings.append("skyline: adjacent points along the walk are not similar")
        if seq[-1].torsion:
            report.findings.append(f"walk ended at {end} with torsion {seq[-1]}")
    return report


class LinkHomology:
    """Cached s -> H(A_s) for one complex; ``corner`` is the top corner of its box."""

    def __init__(self, c: LinkComplex):
        self.c = c
        _, self.box = hat_polytope(c)
        self.corner = tuple(self.box.q2)
        self._cache: dict[Vec, ModuleDecomp] = {}

    def __call__(self, s2: Vec) -> ModuleDecomp:
        s2 = tuple(s2)
        if s2 not in self._cache:
            self._cache[s2] = link_homology_decomp(a_minus_link(self.c, s2))
        return self._cache[s2]
