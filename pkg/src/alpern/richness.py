"""Richness: every column name must visit every cell at least ``M`` times.

The existence argument that produces such a base in an abstract ergodic
system is not reproduced here. For a finite-rank system the property is
simply counted, and :func:`enrich_rotation` searches continued-fraction
convergents of a rotation angle until the resulting cyclic system is rich
enough.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import floor
from typing import Callable, Iterable, Iterator, Sequence

from .errors import ExhaustedError, ZeroCellError
from .ingestion import RotationSpec, build_rotation
from .model import ColumnSystem, cell_measures, occurrences


def required_M(N: int, t: int, m1: Fraction) -> int:
    """Smallest integer strictly greater than ``3 N^3 t / m1``."""
    m1 = Fraction(m1)
    if not 0 < m1 <= 1:
        raise ValueError(f"m1 must lie in (0, 1], got {m1}")
    return floor(Fraction(3 * N**3 * t) / m1) + 1


@dataclass(frozen=True)
class RichnessReport:
    M: int
    min_occurrences: dict[str, int]

    @property
    def failing(self) -> list[str]:
        return [cid for cid, n in self.min_occurrences.items() if n < self.M]

    @property
    def rich(self) -> bool:
        return not self.failing

    def __bool__(self) -> bool:
        return self.rich


def is_rich(system: ColumnSystem, M: int) -> RichnessReport:
    mins = {
        col.id: min(occurrences(col, j) for j in system.partition.cells)
        for col in system.columns
    }
    return RichnessReport(M, mins)


def convergents(terms: Iterable[int]) -> Iterator[Fraction]:
    """Convergents of ``[0; a1, a2, ...]`` in order (``1/a1`` first)."""
    p_prev, p = 1, 0
    q_prev, q = 0, 1
    for a in terms:
        if a <= 0:
            raise ValueError("continued fraction terms must be positive")
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        yield Fraction(p, q)


def equal_breakpoints(q: int, t: int) -> tuple[Fraction, ...]:
    """``t`` nearly equal cells on the ``1/q`` grid: ``floor(k q / t) / q``."""
    return tuple(Fraction((k * q) // t, q) for k in range(t))


BreakpointRule = Callable[[int, int], Sequence[Fraction]]


def enrich_rotation(
    cf_terms: Sequence[int],
    breakpoint_rule: BreakpointRule = equal_breakpoints,
    N: int = 1,
    t: int = 2,
) -> ColumnSystem:
    """First convergent rotation that is rich for ``required_M(N, t, m1)``."""
    for conv in convergents(cf_terms):
        p, q = conv.numerator, conv.denominator
        breaks = tuple(breakpoint_rule(q, t))
        if len(set(breaks)) < t:
            continue
        try:
            system = build_rotation(RotationSpec(p, q, breaks))
        except ZeroCellError:
            continue
        m1 = min(cell_measures(system))
        if is_rich(system, required_M(N, t, m1)):
            return system
    raise ExhaustedError(
        f"none of the {len(cf_terms)} supplied convergents is rich for N={N}, t={t}"
    )
