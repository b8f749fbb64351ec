from __future__ import annotations

import dataclasses
from fractions import Fraction

import pytest

from alpern.construction import TowerResult
from alpern.ingestion import build_cyclic
from alpern.model import Column, ColumnSystem, PartitionSpec, SeamEdge

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def two_column_system(labels0, labels1, t=2) -> ColumnSystem:
    """Columns of widths 2w and w whose tops are cut unevenly across both bases.

    Edge widths are chosen so sub-base boundaries of the two columns do not
    line up at the seams.
    """
    R0, R1 = len(labels0), len(labels1)
    w1 = Fraction(1, 2 * R0 + R1)
    w0 = 2 * w1
    x = Fraction(5, 4) * w1
    edges = (
        SeamEdge("c0", 0, "c0", x),
        SeamEdge("c0", 1, "c1", w0 - x),
        SeamEdge("c1", 0, "c1", w1 - (w0 - x)),
        SeamEdge("c1", 1, "c0", w0 - x),
    )
    return ColumnSystem(
        PartitionSpec.default(t), (Column("c0", w0, labels0), Column("c1", w1, labels1)), edges
    )


def toggle_rung(result: TowerResult, cid: str, i: int, j: int, level: int, kind: str = "b_levels") -> TowerResult:
    """Copy of ``result`` with one rung added to or removed from B (or A / E)."""
    blocks = list(result.selections[cid])
    for k, sel in enumerate(blocks):
        if sel.block == i:
            per_sub = [list(x) for x in getattr(sel, kind)]
            while len(per_sub) < j:
                per_sub.append([])
            levels = per_sub[j - 1]
            if level in levels:
                levels.remove(level)
            else:
                levels.append(level)
                levels.sort()
            blocks[k] = dataclasses.replace(sel, **{kind: tuple(tuple(x) for x in per_sub)})
    selections = dict(result.selections)
    selections[cid] = tuple(blocks)
    return dataclasses.replace(result, selections=selections)


@pytest.fixture(scope="session")
def alternating_1540() -> ColumnSystem:
    return build_cyclic([1, 2] * 770)


@pytest.fixture(scope="session")
def runs_1540() -> ColumnSystem:
    return build_cyclic([1] * 1000 + [2] * 540)


@pytest.fixture(scope="session")
def two_columns() -> ColumnSystem:
    labels0 = [1, 2, 2, 1, 2] * 12
    labels1 = [2, 1, 1] * 20 + [2]
    return two_column_system(labels0, labels1)
