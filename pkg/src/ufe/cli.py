"""``ufe`` command line: ``analyze`` a CSV or replay a ``golden`` example.

Exit status: 0 on completion, 1 on input or usage error, 2 when residual
diagnostics reject and the pipeline halts before estimation.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .design import parse_csv
from .errors import UFEError
from .golden import EXAMPLES, EXPECTED, KNOWN_DISCREPANCIES, compare, run
from .report import StageError, analyze, input_digest, render_text, to_json

EXIT_OK, EXIT_INPUT, EXIT_HALTED = 0, 1, 2


def _alpha(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 < v < 1.0:
        raise argparse.ArgumentTypeError("alpha must lie in (0, 1)")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ufe", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="run the full pipeline on a CSV file")
    a.add_argument("--input", required=True, type=Path)
    a.add_argument("--design", required=True, choices=("single", "two"))
    a.add_argument("--interaction", action="store_true")
    a.add_argument("--alpha", type=_alpha, default=0.05)
    a.add_argument("--objective", choices=("larger", "smaller"))
    a.add_argument("--format", choices=("text", "json"), default="text")
    a.add_argument("--output", type=Path, help="write the report here instead of stdout")
    a.add_argument("--decimals", type=int, default=None,
                   help="round fitted constants to this many decimals before reuse")

    g = sub.add_parser("golden", help="replay a built-in example against its published values")
    g.add_argument("name", choices=tuple(EXAMPLES))
    return p


def _emit(text: str, output: Path | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        output.write_text(text, encoding="utf-8")


def cmd_analyze(args) -> int:
    if args.interaction and args.design != "two":
        print("error [arguments]: --interaction requires --design two", file=sys.stderr)
        return EXIT_INPUT
    if args.objective and not args.interaction:
        print("error [arguments]: --objective requires --interaction", file=sys.stderr)
        return EXIT_INPUT
    try:
        raw = args.input.read_bytes()
    except OSError as exc:
        print(f"error [input]: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        data = parse_csv(raw, args.design)
    except UFEError as exc:
        print(f"error [parse]: {args.input}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        report = analyze(data, interaction=args.interaction, alpha=args.alpha,
                         objective=args.objective, decimals=args.decimals,
                         provenance={"input": str(args.input), "digest": input_digest(raw)})
    except StageError as exc:
        print(f"error [{exc.stage}]: {exc.cause}", file=sys.stderr)
        return EXIT_INPUT

    _emit(to_json(report) if args.format == "json" else render_text(report), args.output)
    if report.status != "complete":
        print(f"halted [{report.halted_at}]: residual diagnostics rejected", file=sys.stderr)
        return EXIT_HALTED
    return EXIT_OK


def cmd_golden(args) -> int:
    try:
        flat, _ = run(args.name)
    except UFEError as exc:
        print(f"error [golden]: {exc}", file=sys.stderr)
        return EXIT_INPUT
    expected = EXPECTED[args.name]
    bad = compare(flat, expected)
    for m in bad:
        print(f"MISMATCH {m}")
    for key, (value, why) in KNOWN_DISCREPANCIES[args.name].items():
        got = flat.get(key)
        print(f"known    {key}: published {value:.3f}, computed {got:.3f} ({why})")
    status = "FAIL" if bad else "ok"
    print(f"{args.name}: {len(expected) - len(bad)}/{len(expected)} values match  {status}")
    return EXIT_INPUT if bad else EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "analyze":
        return cmd_analyze(args)
    return cmd_golden(args)


if __name__ == "__main__":
    sys.exit(main())
