"""Reader and writer for ``hfcx v1`` complex files.

    hfcx v1 components=2
    # comments run to the end of the line
    gen a maslov=0 alex=1/2,1/2
    dif b a u=1,0
    lk 1 2 1
    flip a c

Alexander values may be written as halves (``a/2``); components in ``lk`` are
numbered from 1. ``flip`` lines only make sense for one-component files.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .errors import InvalidComplex, ParseError
from .knot_complex import FlipSpec, KnotComplex
from .link_complex import LinkComplex, LinkGenerator, from_knot, to_knot

_HEADER = re.compile(r"^hfcx\s+v(\d+)\s+components=(\d+)$")
_ID = re.compile(r"^[A-Za-z0-9_.|/*+\-]+$")


@dataclass
class ParsedComplex:
    components: int
    generators: list[LinkGenerator] = field(default_factory=list)
    arrows: list[tuple[str, str, tuple[int, ...]]] = field(default_factory=list)
    linking: dict[tuple[int, int], int] = field(default_factory=dict)
    flips: list[tuple[str, str]] = field(default_factory=list)
    digest: str = ""

    def link(self) -> LinkComplex:
        l = self.components
        rows = [[0] * l for _ in range(l)]
        for (i, j), v in self.linking.items():
            rows[i][j] = rows[j][i] = v
        return LinkComplex(l, tuple(map(tuple, rows)), tuple(self.generators), tuple(self.arrows))

    def knot(self) -> KnotComplex:
        k = to_knot(self.link())
        return k.with_flip(FlipSpec(pairs=tuple(self.flips))) if self.flips else k


def _fields(tokens: list[str], lineno: int) -> dict[str, str]:
    out = {}
    for tok in tokens:
        key, sep, value = tok.partition("=")
        if not sep or not value:
            raise ParseError(f"line {lineno}: expected key=value, got {tok!r}")
        if key in out:
            raise ParseError(f"line {lineno}: repeated field {key!r}")
        out[key] = value
    return out


def _half(text: str, lineno: int) -> int:
    try:
        v = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"line {lineno}: {text!r} is not a number") from None
    if (2 * v).denominator != 1:
        raise ParseError(f"line {lineno}: alexander value {text} is not a half-integer")
    return int(2 * v)


def _int(text: str, lineno: int) -> int:
    try:
        return int(text)
    except ValueError:
        raise ParseError(f"line {lineno}: {text!r} is not an integer") from None


def _vector(text: str, size: int, lineno: int, conv) -> tuple[int, ...]:
    parts = text.split(",")
    if len(parts) != size:
        raise ParseError(f"line {lineno}: expected {size} values, got {len(parts)}")
    return tuple(conv(p.strip(), lineno) for p in parts)


def parse_complex(text: str) -> ParsedComplex:
    lines = [(n, raw.split("#", 1)[0].strip()) for n, raw in enumerate(text.splitlines(), 1)]
    lines = [(n, line) for n, line in lines if line]
    if not lines:
        raise ParseError("empty file")
    n0, head = lines[0]
    m = _HEADER.match(" ".join(head.split()))
    if not m:
        raise ParseError(f"line {n0}: expected header 'hfcx v1 components=<l>'")
    if m.group(1) != "1":
        raise ParseError(f"line {n0}: unsupported version v{m.group(1)}")
    l = int(m.group(2))
    if l < 1:
        raise ParseError(f"line {n0}: need at least one component")
    out = ParsedComplex(l, digest=hashlib.sha256(text.encode()).hexdigest())
    seen: set[str] = set()
    for n, line in lines[1:]:
        kind, *rest = line.split()
        if kind == "gen":
            if len(rest) < 3:
                raise ParseError(f"line {n}: gen needs an id, maslov= and alex=")
            gid, f = rest[0], _fields(rest[1:], n)
            if not _ID.match(gid):
                raise ParseError(f"line {n}: bad generator id {gid!r}")
            if gid in seen:
                raise ParseError(f"line {n}: generator {gid} defined twice")
            if set(f) != {"maslov", "alex"}:
                raise ParseError(f"line {n}: gen takes exactly maslov= and alex=")
            try:
                maslov = Fraction(f["maslov"])
            except (ValueError, ZeroDivisionError):
                raise ParseError(f"line {n}: bad maslov value {f['maslov']!r}") from None
            seen.add(gid)
            out.generators.append(LinkGenerator(gid, maslov, _vector(f["alex"], l, n, _half)))
        elif kind == "dif":
            if len(rest) != 3:
                raise ParseError(f"line {n}: dif needs src, dst and u=")
            src, dst, f = rest[0], rest[1], _fields(rest[2:], n)
            if set(f) != {"u"}:
                raise ParseError(f"line {n}: dif takes exactly u=")
            for g in (src, dst):
                if g not in seen:
                    raise ParseError(f"line {n}: unknown generator {g}")
            out.arrows.append((src, dst, _vector(f["u"], l, n, _int)))
        elif kind == "lk":
            if len(rest) != 3:
                raise ParseError(f"line {n}: lk needs i j value")
            i, j, v = (_int(x, n) for x in rest)
            if not (1 <= i <= l and 1 <= j <= l) or i == j:
                raise ParseError(f"line {n}: lk components must be distinct and in 1..{l}")
            key = (min(i, j) - 1, max(i, j) - 1)
            if key in out.linking and out.linking[key] != v:
                raise ParseError(f"line {n}: conflicting linking number for {i},{j}")
            out.linking[key] = v
        elif kind == "flip":
            if len(rest) != 2:
                raise ParseError(f"line {n}: flip needs two generator ids")
            for g in rest:
                if g not in seen:
                    raise ParseError(f"line {n}: unknown generator {g}")
            out.flips.append((rest[0], rest[1]))
        else:
            raise ParseError(f"line {n}: unknown record {kind!r}")
    if not out.generators:
        raise ParseError("no generators")
    if out.flips and l != 1:
        raise ParseError("flip records are only allowed for one-component complexes")
    return out


def read_complex(path: str | Path) -> ParsedComplex:
    try:
        text = Path(path).read_text()
    except (OSError, UnicodeDecodeError) as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    return parse_complex(text)


def _fmt_half(x: int) -> str:
    return str(x // 2) if x % 2 == 0 else f"{x}/2"


def write_complex(c: KnotComplex | LinkComplex, comment: str | None = None) -> str:
    flips: tuple = ()
    if isinstance(c, KnotComplex):
        if c.flip is not None and c.flip.pairs is not None:
            flips = c.flip.pairs
        elif c.flip is not None:
            raise InvalidComplex("explicit flip matrices cannot be written in hfcx v1")
        c = from_knot(c)
    lines = [f"hfcx v1 components={c.components}"]
    if comment:
        lines += [f"# {line}" for line in comment.splitlines()]
    for i in range(c.components):
        for j in range(i + 1, c.components):
            lines.append(f"lk {i + 1} {j + 1} {c.linking[i][j]}")
    for g in c.generators:
        lines.append(f"gen {g.id} maslov={g.maslov} alex={','.join(_fmt_half(a) for a in g.alex2)}")
    for s, d, u in c.arrows:
        lines.append(f"dif {s} {d} u={','.join(map(str, u))}")
    for a, b in flips:
        lines.append(f"flip {a} {b}")
    return "\n".join(lines) + "\n"
