"""Staircase diagrams of selected rungs, one character (or stroke) per rung."""

from __future__ import annotations

import re
from xml.sax.saxutils import escape

from .construction import TowerResult
from .model import ColumnSystem

_BOUND = re.compile(r"^\s*(?:(R)\s*(?:([+-])\s*(\d+))?|(\d+))\s*$")


def parse_levels(spec: str, R: int) -> range:
    """Inclusive range ``a..b`` where each end is ``k``, ``R``, ``R-k`` or ``R+k``."""
    if ".." not in spec:
        raise ValueError(f"level range {spec!r} must look like a..b")
    lo_s, hi_s = spec.split("..", 1)

    def bound(text: str) -> int:
        m = _BOUND.match(text)
        if not m:
            raise ValueError(f"bad level bound {text!r}")
        if m.group(4) is not None:
            return int(m.group(4))
        k = int(m.group(3) or 0)
        return R - k if m.group(2) == "-" else R + k

    lo, hi = bound(lo_s), bound(hi_s)
    if not 0 <= lo <= hi < R:
        raise ValueError(f"level range {lo}..{hi} outside 0..{R - 1}")
    return range(lo, hi + 1)


def _marks(result: TowerResult | None, cid: str) -> dict[tuple[int, int, int], str]:
    marks: dict[tuple[int, int, int], str] = {}
    if result is None:
        return marks
    for sel in result.selections.get(cid, ()):
        for rung in sel.a_rungs:
            marks[rung] = "A"
        for rung in sel.b_rungs:
            marks[rung] = "#"
    return marks


def _layout(system, column_id, result, N, block):
    if column_id is None:
        column_id = system.columns[0].id
    try:
        col = system.column(column_id)
    except KeyError:
        raise ValueError(f"unknown column {column_id!r}") from None
    if result is not None:
        N = result.params.N
    if N is None:
        raise ValueError("N is required when no selection is given")
    blocks = list(range(1, system.t + 1))
    if block is not None:
        if block not in blocks:
            raise ValueError(f"block {block} outside 1..{system.t}")
        blocks = [block]
    return col, N, blocks


def render_ascii(
    system: ColumnSystem,
    result: TowerResult | None = None,
    column_id: str | None = None,
    levels: range | None = None,
    block: int | None = None,
    N: int | None = None,
) -> str:
    """Rows top-down (level 0 last): ``#`` B-rung, ``A`` A-rung, ``-`` neither."""
    col, N, blocks = _layout(system, column_id, result, N, block)
    levels = range(col.R) if levels is None else levels
    marks = _marks(result, col.id)
    pad = len(str(col.R - 1))
    lines = [f"column {col.id}  N={N}  levels {levels.start}..{levels.stop - 1} of {col.R}"]
    lines.append(" " * (pad + 4) + " ".join(str(i).ljust(N) for i in blocks).rstrip())
    for l in reversed(levels):
        cells = " ".join(
            "".join(marks.get((i, j, l), "-") for j in range(1, N + 1)) for i in blocks
        )
        lines.append(f"{l:>{pad}} {system.partition.names[col.labels[l] - 1][:2]:<2} {cells}")
    return "\n".join(lines) + "\n"


def render_svg(
    system: ColumnSystem,
    result: TowerResult | None = None,
    column_id: str | None = None,
    levels: range | None = None,
    block: int | None = None,
    N: int | None = None,
) -> str:
    """Same layout as :func:`render_ascii`; selected rungs get thick strokes."""
    col, N, blocks = _layout(system, column_id, result, N, block)
    levels = range(col.R) if levels is None else levels
    marks = _marks(result, col.id)
    rung_w, gap, block_gap, row_h, margin = 20, 8, 24, 10, 40
    block_w = N * rung_w + (N - 1) * gap
    width = 2 * margin + len(blocks) * block_w + (len(blocks) - 1) * block_gap
    height = 2 * margin + len(levels) * row_h
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f"<title>{escape(f'column {col.id}, levels {levels.start}..{levels.stop - 1}, N={N}')}</title>",
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    style = {
        "-": 'stroke="#999" stroke-width="1"',
        "#": 'stroke="black" stroke-width="4"',
        "A": 'stroke="#c33" stroke-width="3" stroke-dasharray="4 2"',
    }
    for bi, i in enumerate(blocks):
        x0 = margin + bi * (block_w + block_gap)
        for j in range(1, N + 1):
            x = x0 + (j - 1) * (rung_w + gap)
            for row, l in enumerate(levels):
                y = height - margin - row * row_h - row_h / 2
                kind = marks.get((i, j, l), "-")
                out.append(f'<line x1="{x}" y1="{y}" x2="{x + rung_w}" y2="{y}" {style[kind]}/>')
            out.append(
                f'<text x="{x + rung_w / 2}" y="{height - margin / 3}" font-size="10" '
                f'text-anchor="middle">C({i})_{j}</text>'
            )
    out.append("</svg>")
    return "\n".join(out) + "\n"
