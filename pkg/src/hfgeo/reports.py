"""Report assembly shared by the command line and the HTTP service."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from .errors import HFError, ParseError
from .fileformat import ParsedComplex, parse_complex, write_complex
from .geography import lin_check, skyline_similar, strong_check
from .knot_complex import validate_knot_complex
from .knot_surgery import (
    integer_labels,
    integer_surgery,
    rational_surgery,
    residue_of,
    vhm_table,
)
from .link_complex import hat_polytope, validate_link_complex
from .link_surgery import LinkHomology, LinkingMatrix, geography_audit, is_large, large_link_surgery
from .oracle import crosscheck_surgery, random_knot_complex, random_link_complex
from .ualgebra import ModuleDecomp, direct_sum

EXIT_OK, EXIT_DOMAIN, EXIT_PARSE = 0, 1, 2


@dataclass
class Report:
    command: str
    exit_code: int = EXIT_OK
    input_digest: str | None = None
    body: dict[str, Any] = field(default_factory=dict)
    error: dict[str, str] | None = None
    timings: dict[str, float] = field(default_factory=dict)

    def to_dict(self, timings: bool = True) -> dict:
        out = {
            "command": self.command,
            "exit_code": self.exit_code,
            "input_digest": self.input_digest,
            "body": self.body,
            "error": self.error,
        }
        if timings:
            out["timings"] = self.timings
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "Report":
        return cls(
            data["command"],
            data.get("exit_code", EXIT_OK),
            data.get("input_digest"),
            data.get("body", {}),
            data.get("error"),
            data.get("timings", {}),
        )

    def machine(self) -> str:
        return json.dumps(self.to_dict(timings=False), sort_keys=True, indent=2) + "\n"

    def human(self) -> str:
        return render_human(self)


def _fail(report: Report, exc: HFError, code: int = EXIT_DOMAIN) -> Report:
    report.exit_code = EXIT_PARSE if isinstance(exc, ParseError) else code
    report.error = {"name": exc.name, "message": str(exc)}
    return report


def _decomp_entry(label: str, m: ModuleDecomp, **extra) -> dict:
    return {"label": label, **extra, "decomp": m.to_dict(), "module": str(m), "lin": lin_check(m), "strong": strong_check(m)}


def _verdicts(total: ModuleDecomp) -> dict:
    return {"lspace": total.is_free, "lin": lin_check(total), "strong": strong_check(total)}


# --- validate -----------------------------------------------------------------


def validate_report(text: str) -> Report:
    report = Report("validate")
    try:
        parsed = parse_complex(text)
    except ParseError as exc:
        return _fail(report, exc)
    report.input_digest = parsed.digest
    link = parsed.link()
    checks = validate_link_complex(link)
    body = checks.to_dict()
    if parsed.components == 1 and parsed.flips:
        try:
            knot = validate_knot_complex(parsed.knot())
        except HFError as exc:
            body["checks"].append({"name": "flip", "status": "fail", "witness": str(exc)})
            body["ok"] = False
        else:
            flip = [c for c in knot.checks if c.name == "flip"]
            body["checks"].extend(c.__dict__ for c in flip)
            body["ok"] = body["ok"] and all(c.status != "fail" for c in flip)
    report.body = {"components": parsed.components, "generators": len(parsed.generators), **body}
    report.exit_code = EXIT_OK if body["ok"] else EXIT_DOMAIN
    return report


# --- surgery ------------------------------------------------------------------


def _parse_slope(slope: str) -> tuple[int, int]:
    num, _, den = slope.partition("/")
    try:
        p, q = int(num), int(den) if den else 1
    except ValueError:
        raise ParseError(f"bad slope {slope!r}; expected p/q") from None
    if q == 0:
        raise ParseError("slope denominator is zero")
    if q < 0:
        p, q = -p, -q
    return p, q


def _knot_surgery_body(parsed: ParsedComplex, p: int, q: int, window: int | None, crosscheck: bool) -> dict:
    k = parsed.knot()
    if q == 1:
        result = integer_surgery(k, p, window)
        labels = [_decomp_entry(str(s), result[s], residue=residue_of(s, p)) for s in integer_labels(p)]
    else:
        result = rational_surgery(k, p, q, window)
        labels = [_decomp_entry(str(s), result[s], residue=s) for s in sorted(result)]
    total = direct_sum(result.values())
    body = {
        "kind": "knot",
        "slope": f"{p}/{q}",
        "labels": labels,
        "total": total.to_dict(),
        "h1_order": abs(p),
        "verdicts": _verdicts(total),
    }
    g = k.genus_bound
    if q == 1 and p >= 2 * g - 1:
        order = [result[s] for s in integer_labels(p)]
        body["verdicts"]["skyline_chain"] = all(skyline_similar(a, b) for a, b in zip(order, order[1:]))
    if crosscheck:
        body["crosscheck"] = crosscheck_surgery(k, p, q).to_dict()
    return body


def _link_surgery_body(parsed: ParsedComplex, framing: Sequence[int]) -> dict:
    c = parsed.link()
    l = c.components
    if len(framing) == l:
        lam = LinkingMatrix.for_link(c, framing)
    else:
        lam = LinkingMatrix.from_flat(framing)
    result = large_link_surgery(c, lam)
    audit = geography_audit(result, LinkHomology(c), lam.det)
    labels = [
        _decomp_entry("(" + ",".join(str(Fraction(x, 2)) for x in s) + ")", result[s]) for s in sorted(result)
    ]
    total = direct_sum(result.values())
    verdicts = _verdicts(total)
    verdicts["skyline_walk"] = audit.path_similar
    if audit.sphere_shape is not None:
        verdicts["sphere_shape"] = audit.sphere_shape
    return {
        "kind": "link",
        "framing": [list(r) for r in lam.rows],
        "labels": labels,
        "total": total.to_dict(),
        "h1_order": abs(lam.det),
        "verdicts": verdicts,
        "audit": audit.to_dict(),
    }


def surgery_report(
    text: str,
    slope: str | None = None,
    framing: Sequence[int] | None = None,
    window: int | None = None,
    crosscheck: bool = False,
) -> Report:
    report = Report("surgery")
    t0 = time.perf_counter()
    try:
        if (slope is None) == (framing is None):
            raise ParseError("give exactly one of a slope or a framing")
        parsed = parse_complex(text)
        report.input_digest = parsed.digest
        if slope is not None:
            if parsed.components != 1:
                raise ParseError("slopes apply to one-component complexes; use a framing for links")
            p, q = _parse_slope(slope)
            report.body = _knot_surgery_body(parsed, p, q, window, crosscheck)
        else:
            report.body = _link_surgery_body(parsed, framing)
    except HFError as exc:
        return _fail(report, exc)
    except ValueError as exc:
        return _fail(report, ParseError(str(exc)))
    report.timings["surgery"] = time.perf_counter() - t0
    return report


# --- invariants -----------------------------------------------------------------


def invariants_report(text: str) -> Report:
    report = Report("invariants")
    t0 = time.perf_counter()
    try:
        parsed = parse_complex(text)
        report.input_digest = parsed.digest
        c = parsed.link()
        support, box = hat_polytope(c)
        body: dict[str, Any] = {
            "components": c.components,
            "polytope": sorted([str(Fraction(x, 2)) for x in p] for p in support),
            "box": [str(q) for q in box.q],
            "large_thresholds": [str(2 * q - 1) for q in box.q],
        }
        if c.components == 1:
            k = parsed.knot()
            table = vhm_table(k)
            body["vhm"] = table.to_dict()
            body["large_threshold"] = 2 * k.genus_bound - 1
            body["large_framings"] = [
                n for n in range(-8, 9) if n != 0 and is_large(LinkingMatrix(((n,),)), box)
            ]
        report.body = body
    except HFError as exc:
        return _fail(report, exc)
    report.timings["invariants"] = time.perf_counter() - t0
    return report


# --- random -------------------------------------------------------------------


def random_report(seed: int, kind: str = "knot", parts: int = 3, deform: int = 3) -> Report:
    report = Report("random")
    if kind == "knot":
        c = random_knot_complex(seed, max_parts=parts, deformations=deform)
    elif kind == "link":
        c = random_link_complex(seed)
    else:
        return _fail(report, ParseError(f"unknown kind {kind!r}"))
    text = write_complex(c, comment=f"random {kind} complex, seed {seed}")
    report.body = {"kind": kind, "seed": seed, "complex": text}
    return report


# --- human rendering ------------------------------------------------------------


def render_human(r: Report) -> str:
    out = [f"{r.command}: " + ("ok" if r.exit_code == 0 else f"failed (exit {r.exit_code})")]
    if r.error:
        out.append(f"  error {r.error['name']}: {r.error['message']}")
    b = r.body
    if r.command == "validate" and b:
        for c in b.get("checks", []):
            line = f"  {c['status']:>4}  {c['name']}"
            if c.get("witness"):
                line += f"  ({c['witness']})"
            out.append(line)
    elif r.command == "surgery" and b:
        head = f"slope {b['slope']}" if b["kind"] == "knot" else f"framing {b['framing']}"
        out.append(f"  {head}, |H1| = {b['h1_order']}")
        for e in b["labels"]:
            res = f" (residue {e['residue']})" if "residue" in e else ""
            out.append(f"  s = {e['label']}{res}: {e['module']}")
        v = b["verdicts"]
        out.append("  " + ", ".join(f"{k} {'yes' if val else 'no' if val is not None else 'n/a'}" for k, val in sorted(v.items())))
        if "crosscheck" in b:
            out.append(f"  crosscheck: {'match' if b['crosscheck']['match'] else 'MISMATCH'}")
    elif r.command == "invariants" and b:
        out.append(f"  box q = ({', '.join(b['box'])}); large needs n_i >= ({', '.join(b['large_thresholds'])})")
        if "vhm" in b:
            t = b["vhm"]
            lo, hi = t["range"]
            out.append("  s  " + " ".join(f"{s:>3}" for s in range(lo, hi + 1)))
            for name in ("V", "H", "M"):
                out.append(f"  {name}  " + " ".join(f"{x:>3}" for x in t[name]))
    elif r.command == "random" and b:
        out.append(b["complex"].rstrip())
    return "\n".join(out) + "\n"
