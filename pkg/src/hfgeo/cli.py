"""Command line front end.

Runs computations in-process by default; with ``--server URL`` it posts the
request to a running ``hfgeo serve`` instance and prints the returned report.
Exit codes: 0 success, 1 domain failure, 2 parse or I/O failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import ParseError
from .reports import EXIT_PARSE, Report, invariants_report, random_report, surgery_report, validate_report


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except (OSError, UnicodeDecodeError) as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc


def _framing(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"framing must be comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hfgeo", description="Floer homology of knot and link surgeries")
    parser.add_argument("--format", choices=("human", "machine"), default="human")
    parser.add_argument("--server", metavar="URL", help="send the request to a running service")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a complex file against the axioms")
    p.add_argument("path")

    p = sub.add_parser("surgery", help="HF^- of a surgery, per spin^c label")
    p.add_argument("path")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--slope", help="p/q for knots")
    g.add_argument("--framing", type=_framing, help="diagonal framings, or the full matrix row-major")
    p.add_argument("--window", type=int, help="cone truncation bound (default max|A| + 1)")
    p.add_argument("--crosscheck", action="store_true", help="compare against the reduced fast path")

    p = sub.add_parser("invariants", help="V/H/M table, polytope and largeness thresholds")
    p.add_argument("path")

    p = sub.add_parser("random", help="emit a random complex file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--kind", choices=("knot", "link"), default="knot")
    p.add_argument("--parts", type=int, default=3)
    p.add_argument("--deform", type=int, default=3)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    return parser


def _local(args: argparse.Namespace) -> Report:
    if args.command == "random":
        return random_report(args.seed, args.kind, args.parts, args.deform)
    text = _read(args.path)
    if args.command == "validate":
        return validate_report(text)
    if args.command == "surgery":
        return surgery_report(text, args.slope, args.framing, args.window, args.crosscheck)
    return invariants_report(text)


def _remote(args: argparse.Namespace) -> Report:
    import httpx

    if args.command == "random":
        payload = {"seed": args.seed, "kind": args.kind, "parts": args.parts, "deform": args.deform}
    else:
        payload = {"text": _read(args.path)}
        if args.command == "surgery":
            payload.update(slope=args.slope, framing=args.framing, window=args.window, crosscheck=args.crosscheck)
    try:
        resp = httpx.post(f"{args.server.rstrip('/')}/{args.command}", json=payload, timeout=600)
    except httpx.HTTPError as exc:
        raise ParseError(f"cannot reach {args.server}: {exc}") from exc
    if resp.status_code == 422:
        raise ParseError(f"service rejected the request: {resp.text}")
    resp.raise_for_status()
    return Report.from_dict(resp.json())


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        import uvicorn

        uvicorn.run("hfgeo.service.app:app", host=args.host, port=args.port)
        return 0
    try:
        report = _remote(args) if args.server else _local(args)
    except ParseError as exc:
        report = Report(args.command, EXIT_PARSE, error={"name": exc.name, "message": str(exc)})
    sys.stdout.write(report.machine() if args.format == "machine" else report.human())
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
