"""Exact-arithmetic column systems.

A :class:`ColumnSystem` is a finite-rank picture of an invertible
measure-preserving map: each column is a stack of ``R`` levels of equal
width, ``T`` moves a point one level up, and the top level of a column is
cut left to right by its outgoing seam edges and glued onto column bases.

All measures are :class:`fractions.Fraction`; nothing here touches floats.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import ZeroCellError

Ratio = Fraction


def ratio(value) -> Fraction:
    """Coerce ``value`` (int, Fraction or ``"p/q"`` string) to a Fraction.

    Floats are rejected: they would silently smuggle rounding into the model.
    """
    if isinstance(value, float):
        raise TypeError("floats are not accepted as measures; use 'p/q' strings")
    return Fraction(value)


def format_ratio(value: Fraction) -> str:
    """Reduced ``p/q`` form, integers included (``1`` -> ``"1/1"``)."""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class PartitionSpec:
    names: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))

    @property
    def t(self) -> int:
        return len(self.names)

    @property
    def cells(self) -> range:
        return range(1, self.t + 1)

    @classmethod
    def default(cls, t: int) -> "PartitionSpec":
        return cls(tuple(f"P{k}" for k in range(1, t + 1)))


@dataclass(frozen=True)
class Column:
    id: str
    width: Fraction
    labels: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "width", ratio(self.width))
        object.__setattr__(self, "labels", tuple(int(x) for x in self.labels))

    @property
    def R(self) -> int:
        return len(self.labels)

    @property
    def mass(self) -> Fraction:
        return self.width * self.R


@dataclass(frozen=True)
class SeamEdge:
    source: str
    order: int
    target: str
    width: Fraction

    def __post_init__(self):
        object.__setattr__(self, "width", ratio(self.width))


@dataclass(frozen=True)
class ColumnSystem:
    partition: PartitionSpec
    columns: tuple[Column, ...]
    edges: tuple[SeamEdge, ...] = ()
    _index: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "columns", tuple(self.columns))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "_index", {c.id: c for c in self.columns})

    @property
    def t(self) -> int:
        return self.partition.t

    def column(self, column_id: str) -> Column:
        return self._index[column_id]

    def outgoing(self, column_id: str) -> list[SeamEdge]:
        """Edges leaving ``column_id``, left to right along its top level."""
        return sorted((e for e in self.edges if e.source == column_id), key=lambda e: e.order)

    def incoming(self, column_id: str) -> list[SeamEdge]:
        """Edges entering ``column_id``, left to right along its base.

        Incoming pieces are stacked in the order the edges are declared.
        """
        return [e for e in self.edges if e.target == column_id]


def occurrences(column: Column, cell: int) -> int:
    return sum(1 for x in column.labels if x == cell)


def _raw_cell_measures(system: ColumnSystem) -> list[Fraction]:
    m = [Fraction(0)] * system.t
    for col in system.columns:
        for cell, count in Counter(col.labels).items():
            if 1 <= cell <= system.t:
                m[cell - 1] += col.width * count
    return m


def cell_measures(system: ColumnSystem) -> list[Fraction]:
    """Measure of every partition cell, ``m_j = sum_c width(c) * occ(c, j)``."""
    m = _raw_cell_measures(system)
    empty = [j for j, mj in enumerate(m, start=1) if mj == 0]
    if empty:
        names = ", ".join(system.partition.names[j - 1] for j in empty)
        raise ZeroCellError(f"cell(s) {names} have measure 0")
    return m


def validate_system(system: ColumnSystem) -> list[str]:
    """Return every violated invariant as a human-readable line (empty if valid)."""
    out: list[str] = []
    t = system.t
    if t < 1:
        out.append("partition must have at least one cell")
    if len(set(system.partition.names)) != t:
        out.append("cell names must be distinct")
    if not system.columns:
        out.append("system has no columns")

    ids = [c.id for c in system.columns]
    for cid, n in Counter(ids).items():
        if n > 1:
            out.append(f"column id {cid} declared {n} times")
    for col in system.columns:
        if col.width <= 0:
            out.append(f"column {col.id}: width {col.width} is not positive")
        if col.R < 1:
            out.append(f"column {col.id}: no levels")
        bad = sorted({x for x in col.labels if not 1 <= x <= t})
        if bad:
            out.append(f"column {col.id}: labels {bad} outside 1..{t}")

    known = set(ids)
    orders: dict[str, list[int]] = {}
    for e in system.edges:
        if e.source not in known:
            out.append(f"edge from unknown column {e.source}")
        if e.target not in known:
            out.append(f"edge {e.source}#{e.order} into unknown column {e.target}")
        if e.width <= 0:
            out.append(f"edge {e.source}#{e.order}: width {e.width} is not positive")
        orders.setdefault(e.source, []).append(e.order)
    for src, seen in orders.items():
        if sorted(seen) != list(range(len(seen))):
            out.append(f"column {src}: edge orders {sorted(seen)} are not 0..{len(seen) - 1}")

    total = sum((c.mass for c in system.columns), Fraction(0))
    if total != 1:
        out.append(f"total mass {total} ≠ 1")

    for col in system.columns:
        flow_out = sum((e.width for e in system.edges if e.source == col.id), Fraction(0))
        flow_in = sum((e.width for e in system.edges if e.target == col.id), Fraction(0))
        if flow_out != col.width:
            out.append(f"column {col.id}: outflow {flow_out} ≠ width {col.width}")
        if flow_in != col.width:
            out.append(f"column {col.id}: inflow {flow_in} ≠ width {col.width}")

    if t >= 1:
        for j, mj in enumerate(_raw_cell_measures(system), start=1):
            if mj == 0:
                out.append(f"cell {j} ({system.partition.names[j - 1]}) has measure 0")
    return out


@dataclass(frozen=True)
class SplitColumn:
    """A column whose base is cut into ``t * N`` sub-bases ``(i, j)``.

    Sub-base ``(i, j)`` has width ``width * b_i / N``; they are laid out left
    to right by ascending block ``i`` then subcolumn ``j``.
    """

    column: Column
    N: int
    b: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "b", tuple(ratio(x) for x in self.b))

    @property
    def t(self) -> int:
        return len(self.b)

    def sub_width(self, i: int) -> Fraction:
        return self.column.width * self.b[i - 1] / self.N

    def sub_bases(self) -> list[tuple[int, int, Fraction, Fraction]]:
        """``(i, j, lo, hi)`` for every sub-base, in layout order."""
        out = []
        lo = Fraction(0)
        for i in range(1, self.t + 1):
            w = self.sub_width(i)
            for j in range(1, self.N + 1):
                out.append((i, j, lo, lo + w))
                lo += w
        return out


def split_column(column: Column, N: int, b: Sequence[Fraction]) -> SplitColumn:
    split = SplitColumn(column, N, tuple(b))
    total = sum((split.sub_width(i) * N for i in range(1, split.t + 1)), Fraction(0))
    if total != column.width:
        raise ValueError(f"sub-base widths sum to {total}, not {column.width}")
    return split


def make_system(
    names: Iterable[str] | int,
    columns: Iterable[Column],
    edges: Iterable[SeamEdge] = (),
) -> ColumnSystem:
    partition = PartitionSpec.default(names) if isinstance(names, int) else PartitionSpec(tuple(names))
    return ColumnSystem(partition, tuple(columns), tuple(edges))
