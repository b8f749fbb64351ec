"""System builders and the ``alpern-system v1`` text format.

Format (UTF-8, ``#`` starts a comment)::

    alpern-system v1
    cells 2 P1 P2
    column c0 1/4 1212
    edge c0 0 c0 1/4

Labels are a compact digit string (only when ``t <= 9``) or comma-separated
integers where ``<cell>x<count>`` repeats a cell.
"""

from __future__ import annotations

import re
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

from .errors import BreakpointOffGridError, FormatSyntaxError, ValidationError, ZeroCellError
from .model import (
    Column,
    ColumnSystem,
    PartitionSpec,
    SeamEdge,
    cell_measures,
    format_ratio,
    ratio,
    validate_system,
)

HEADER = "alpern-system v1"

_RATIO_RE = re.compile(r"^-?\d+(/\d+)?$")
_ITEM_RE = re.compile(r"^(\d+)(?:x(\d+))?$")


def _partition(partition: PartitionSpec | int | None, labels: Sequence[int]) -> PartitionSpec:
    if partition is None:
        return PartitionSpec.default(max(labels))
    if isinstance(partition, int):
        return PartitionSpec.default(partition)
    return partition


def build_cyclic(labels: Sequence[int], partition: PartitionSpec | int | None = None) -> ColumnSystem:
    """One column of height ``len(labels)`` whose top returns to its base."""
    labels = tuple(int(x) for x in labels)
    if not labels:
        raise ValueError("labels must be nonempty")
    part = _partition(partition, labels)
    bad = sorted({x for x in labels if not 1 <= x <= part.t})
    if bad:
        raise ValueError(f"labels {bad} outside 1..{part.t}")
    missing = [j for j in part.cells if j not in set(labels)]
    if missing:
        raise ZeroCellError(f"cell(s) {missing} never appear in the labels")
    width = Fraction(1, len(labels))
    col = Column("c0", width, labels)
    return ColumnSystem(part, (col,), (SeamEdge("c0", 0, "c0", width),))


@dataclass(frozen=True)
class RotationSpec:
    p: int
    q: int
    breakpoints: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "breakpoints", tuple(ratio(x) for x in self.breakpoints))

    @property
    def t(self) -> int:
        return len(self.breakpoints)


def build_rotation(spec: RotationSpec, names: Sequence[str] | None = None) -> ColumnSystem:
    """Rotation by ``p/q`` on the circle, cells cut at the breakpoints.

    Level ``r`` of the single column is the grid interval containing
    ``frac(r * p / q)``.
    """
    p, q, br = spec.p, spec.q, spec.breakpoints
    if q <= 0:
        raise ValueError("q must be positive")
    if gcd(p, q) != 1:
        raise ValueError(f"gcd({p}, {q}) != 1")
    if not br or br[0] != 0:
        raise ValueError("breakpoints must start at 0")
    if any(a >= b for a, b in zip(br, br[1:])) or br[-1] >= 1:
        raise ValueError("breakpoints must be strictly increasing in [0, 1)")
    off = [x for x in br if q % x.denominator]
    if off:
        raise BreakpointOffGridError(
            f"breakpoints {[format_ratio(x) for x in off]} are not on the 1/{q} grid"
        )

    grid_starts = [int(x * q) for x in br]
    seen = [False] * q
    labels = []
    for r in range(q):
        k = (r * p) % q
        seen[k] = True
        labels.append(bisect_right(grid_starts, k))
    assert all(seen), "orbit of 0 must visit every grid interval"

    part = PartitionSpec(tuple(names)) if names else PartitionSpec.default(spec.t)
    missing = [j for j in part.cells if j not in set(labels)]
    if missing:
        raise ZeroCellError(f"cell(s) {missing} capture no grid point")
    width = Fraction(1, q)
    system = ColumnSystem(part, (Column("c0", width, labels),), (SeamEdge("c0", 0, "c0", width),))
    cell_measures(system)
    return system


def parse_labels(text: str, t: int) -> tuple[int, ...]:
    """Decode a label field: compact digits (t <= 9) or comma form with RLE."""
    if t <= 9 and text.isdigit() and "0" not in text:
        return tuple(int(ch) for ch in text)
    out: list[int] = []
    for item in text.split(","):
        m = _ITEM_RE.match(item.strip())
        if not m:
            raise ValueError(f"bad label item {item!r}")
        cell = int(m.group(1))
        count = int(m.group(2)) if m.group(2) is not None else 1
        out.extend([cell] * count)
    return tuple(out)


def format_labels(labels: Sequence[int], t: int) -> str:
    if t <= 9:
        return "".join(str(x) for x in labels)
    parts = []
    k = 0
    while k < len(labels):
        run = 1
        while k + run < len(labels) and labels[k + run] == labels[k]:
            run += 1
        parts.append(f"{labels[k]}x{run}" if run >= 3 else ",".join([str(labels[k])] * run))
        k += run
    return ",".join(parts)


def _parse_ratio(token: str, lineno: int) -> Fraction:
    if not _RATIO_RE.match(token):
        raise FormatSyntaxError(f"expected a ratio p/q, got {token!r}", lineno)
    try:
        return Fraction(token)
    except ZeroDivisionError:
        raise FormatSyntaxError(f"zero denominator in {token!r}", lineno) from None


def _parse_int(token: str, lineno: int) -> int:
    if not token.isdigit():
        raise FormatSyntaxError(f"expected a nonnegative integer, got {token!r}", lineno)
    return int(token)


def parse_system(text: str) -> ColumnSystem:
    partition: PartitionSpec | None = None
    columns: list[Column] = []
    edges: list[SeamEdge] = []
    header_seen = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if not header_seen:
            if line != HEADER:
                raise FormatSyntaxError(f"expected header {HEADER!r}", lineno)
            header_seen = True
            continue

        kind = tokens[0]
        if kind == "cells":
            if partition is not None:
                raise FormatSyntaxError("duplicate 'cells' line", lineno)
            if len(tokens) < 2:
                raise FormatSyntaxError("'cells' needs a count", lineno)
            t = _parse_int(tokens[1], lineno)
            names = tokens[2:]
            if len(names) != t:
                raise FormatSyntaxError(f"'cells {t}' lists {len(names)} names", lineno)
            partition = PartitionSpec(tuple(names))
        elif kind == "column":
            if partition is None:
                raise FormatSyntaxError("'column' before 'cells'", lineno)
            if len(tokens) != 4:
                raise FormatSyntaxError("expected 'column <id> <width> <labels>'", lineno)
            try:
                labels = parse_labels(tokens[3], partition.t)
            except ValueError as exc:
                raise FormatSyntaxError(str(exc), lineno) from None
            columns.append(Column(tokens[1], _parse_ratio(tokens[2], lineno), labels))
        elif kind == "edge":
            if len(tokens) != 5:
                raise FormatSyntaxError("expected 'edge <from> <order> <to> <width>'", lineno)
            edges.append(
                SeamEdge(tokens[1], _parse_int(tokens[2], lineno), tokens[3], _parse_ratio(tokens[4], lineno))
            )
        else:
            raise FormatSyntaxError(f"unknown directive {kind!r}", lineno)

    if not header_seen:
        raise FormatSyntaxError(f"missing header {HEADER!r}", 1)
    if partition is None:
        raise FormatSyntaxError("missing 'cells' line", lineno if text else 1)

    system = ColumnSystem(partition, tuple(columns), tuple(edges))
    report = validate_system(system)
    if report:
        raise ValidationError(report)
    return system


def serialize_system(system: ColumnSystem) -> str:
    t = system.t
    lines = [HEADER, " ".join(["cells", str(t), *system.partition.names])]
    for col in system.columns:
        lines.append(f"column {col.id} {format_ratio(col.width)} {format_labels(col.labels, t)}")
    for e in system.edges:
        lines.append(f"edge {e.source} {e.order} {e.target} {format_ratio(e.width)}")
    return "\n".join(lines) + "\n"
