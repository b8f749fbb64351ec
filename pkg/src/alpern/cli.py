"""Command-line front end.

Exit status: 0 success, 1 verification failure, 2 invalid input,
3 infeasible construction.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from .construction import build_tower
from .errors import CONSTRUCTION_ERRORS, AlpernError, ExhaustedError, GridTooLargeError
from .ingestion import RotationSpec, build_cyclic, build_rotation, parse_labels, parse_system, serialize_system
from .model import PartitionSpec
from .oracle import DEFAULT_GRID_LIMIT, build_grid, oracle_verify
from .render import parse_levels, render_ascii, render_svg
from .report import ReportFormatError, dumps_report, loads_report
from .richness import enrich_rotation, equal_breakpoints
from .verification import ORACLE_CHECKS, verify_tower

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_INFEASIBLE = 0, 1, 2, 3


class InputError(Exception):
    pass


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _load_system(path: str):
    return parse_system(_read(path))


def _partition(cells: int | None, names: str | None, labels=None) -> PartitionSpec:
    if names:
        parts = names.split(",")
        if cells is not None and cells != len(parts):
            raise InputError(f"--cells {cells} but {len(parts)} names given")
        return PartitionSpec(tuple(parts))
    if cells is None:
        cells = max(labels) if labels else 1
    return PartitionSpec.default(cells)


def cmd_build(args) -> int:
    if args.kind == "cyclic":
        digits_t = args.cells if args.cells is not None else 9
        try:
            labels = parse_labels(args.labels, digits_t)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        system = build_cyclic(labels, _partition(args.cells, args.names, labels))
    elif args.kind == "rotation":
        try:
            breaks = tuple(Fraction(x) for x in args.breaks.split(","))
        except (ValueError, ZeroDivisionError):
            raise InputError(f"bad breakpoints {args.breaks!r}") from None
        names = args.names.split(",") if args.names else None
        system = build_rotation(RotationSpec(args.p, args.q, breaks), names)
    else:
        try:
            terms = [int(x) for x in args.terms.split(",") if x.strip()]
        except ValueError:
            raise InputError(f"bad terms {args.terms!r}") from None
        system = enrich_rotation(terms, equal_breakpoints, args.N, args.cells)
    _emit(serialize_system(system), args.out)
    return EXIT_OK


def cmd_construct(args) -> int:
    system = _load_system(args.system)
    result = build_tower(system, args.N, allow_small_M=args.allow_small_M)
    _emit(dumps_report(system, result), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    system = _load_system(args.system)
    result = loads_report(_read(args.selection))
    unknown = set(result.selections) - {c.id for c in system.columns}
    if unknown:
        raise InputError(f"report mentions unknown column(s) {sorted(unknown)}")
    lines = []
    report = verify_tower(system, result)
    lines += [c.line() for c in report.checks]
    ok = report.passed
    if args.oracle:
        grid = build_grid(system, result.params.N, result.params.b, args.grid_limit)
        oracle = oracle_verify(grid, result)
        comb = report.verdicts(ORACLE_CHECKS)
        for name in ORACLE_CHECKS:
            status = "pass" if oracle.verdicts[name] else "FAIL"
            lines.append(f"{status} oracle.{name}")
        agree = comb == oracle.verdicts
        lines.append(f"{'pass' if agree else 'FAIL'} oracle_agreement (G={grid.G} atoms)")
        ok = ok and oracle.passed and agree
    lines.append("verdict: " + ("PASS" if ok else "FAIL"))
    print("\n".join(lines))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_render(args) -> int:
    system = _load_system(args.system)
    result = loads_report(_read(args.selection)) if args.selection else None
    try:
        col = system.column(args.column) if args.column else system.columns[0]
    except KeyError:
        raise InputError(f"unknown column {args.column!r}") from None
    try:
        levels = parse_levels(args.levels, col.R) if args.levels else None
        render = render_svg if args.format == "svg" else render_ascii
        text = render(system, result, col.id, levels, args.block, args.N)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    _emit(text, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="alpern", description="Alpern towers with partition-independent base.")
    sub = ap.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="write an alpern-system v1 file")
    b.add_argument("kind", choices=["cyclic", "rotation", "rotation-cf"])
    b.add_argument("--labels", help="cyclic labels: compact 1212 or comma form with RLE, e.g. 1x770,2x770")
    b.add_argument("--cells", type=int, help="number of partition cells")
    b.add_argument("--names", help="comma-separated cell names")
    b.add_argument("--p", type=int)
    b.add_argument("--q", type=int)
    b.add_argument("--breaks", help="breakpoints on the 1/q grid, e.g. 0,1/2")
    b.add_argument("--terms", help="continued-fraction terms a1,a2,... of the angle")
    b.add_argument("--N", type=int, default=1, help="tower height the system must be rich for")
    b.add_argument("--out")
    b.set_defaults(func=cmd_build)

    c = sub.add_parser("construct", help="build the tower and write a JSON report")
    c.add_argument("system")
    c.add_argument("--N", type=int, required=True)
    c.add_argument("--allow-small-M", action="store_true", help="skip the richness requirement")
    c.add_argument("--out")
    c.set_defaults(func=cmd_construct)

    v = sub.add_parser("verify", help="check a report against its system")
    v.add_argument("system")
    v.add_argument("selection")
    v.add_argument("--oracle", action="store_true", help="also run the brute-force atom oracle")
    v.add_argument("--grid-limit", type=int, default=DEFAULT_GRID_LIMIT)
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("render", help="draw selected rungs")
    r.add_argument("system")
    r.add_argument("--selection")
    r.add_argument("--format", choices=["ascii", "svg"], default="ascii")
    r.add_argument("--levels", help="inclusive range, e.g. 0..15 or R-16..R-1")
    r.add_argument("--column")
    r.add_argument("--block", type=int)
    r.add_argument("--N", type=int, help="subcolumns per block when no selection is given")
    r.add_argument("--out")
    r.set_defaults(func=cmd_render)
    return ap


def _check_build_args(args) -> None:
    need = {"cyclic": ["labels"], "rotation": ["p", "q", "breaks"], "rotation-cf": ["terms", "cells"]}
    missing = [f"--{k}" for k in need[args.kind] if getattr(args, k) is None]
    if missing:
        raise InputError(f"build {args.kind} needs {', '.join(missing)}")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "build":
            _check_build_args(args)
        return args.func(args)
    except CONSTRUCTION_ERRORS as exc:
        print(exc, file=sys.stderr)
        return EXIT_INFEASIBLE
    except GridTooLargeError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INPUT
    except (AlpernError, ExhaustedError, ReportFormatError, InputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
