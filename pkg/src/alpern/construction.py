"""Alpern tower of height {N, N+1} with base independent of the partition.

For every column ``C`` of height ``R`` the base is cut into ``t`` blocks
``C^(i)`` of relative mass ``b_i``, each cut into ``N`` equal subcolumns.
Inside block ``i`` a B-rung is picked in every subcolumn at level 0, then a
staircase climbs the block with gaps ``N`` or ``N+1``. Skipped middle
levels are chosen so that the net skips (appearances minus selections) of
every cell hit exact targets: ``gamma`` for cell ``i`` and ``delta`` for the
others. The leftover rungs, ``gamma`` of cell ``i`` and ``delta`` of each
other cell, form the companion set ``A``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil
from typing import Sequence

from .errors import (
    AQuotaUnmetError,
    MisalignedHandoffError,
    NegativeMassError,
    NotRichError,
    QuotaNegativeError,
    QuotaUnmetError,
    TooShortError,
    ValidationError,
)
from .model import Column, ColumnSystem, SplitColumn, cell_measures, split_column, validate_system
from .richness import is_rich, required_M


def compute_delta(N: int) -> int:
    """Net-skip target for cells other than the block's own cell.

    ``2(N-1)(N-2)`` is raised to ``N(N-1)`` when smaller (N = 2, 3): the two
    outer staircases each leave ``N(N-1)/2`` empty levels, which may all
    belong to one cell.
    """
    if N < 1:
        raise ValueError("N must be positive")
    if N == 1:
        return 0
    return max(2 * (N - 1) * (N - 2), N * (N - 1))


def compute_gamma(R: int, N: int, t: int, delta: int, m1: Fraction) -> int:
    """Unique integer in ``[delta/m1, delta/m1 + N)`` with ``(t-1)delta + gamma = R (mod N)``."""
    m1 = Fraction(m1)
    if m1 <= 0:
        raise ValueError("m1 must be positive")
    lower = ceil(Fraction(delta) / m1)
    residue = (R - (t - 1) * delta) % N
    return lower + (residue - lower) % N


def compute_b(m: Sequence[Fraction], gamma: int, delta: int, t: int | None = None) -> tuple[Fraction, ...]:
    """Relative block masses ``b_j = (m_j (gamma + (t-1) delta) - delta) / (gamma - delta)``.

    Falls back to ``b = m`` when ``t == 1`` or ``gamma == delta == 0``, where
    the quotient is 0/0.
    """
    m = tuple(Fraction(x) for x in m)
    t = len(m) if t is None else t
    if t != len(m):
        raise ValueError(f"t={t} but {len(m)} cell measures given")
    if t == 1 or gamma == delta == 0:
        return m
    if gamma <= delta:
        raise NegativeMassError(f"gamma={gamma} must exceed delta={delta}")
    total = gamma + (t - 1) * delta
    b = tuple((mj * total - delta) / (gamma - delta) for mj in m)
    negative = [j for j, bj in enumerate(b, start=1) if bj < 0]
    if negative:
        raise NegativeMassError(f"b_{negative[0]} = {b[negative[0] - 1]} < 0 (gamma={gamma} below window)")
    assert sum(b) == 1
    return b


def bottom_staircase(N: int) -> tuple[tuple[int, ...], ...]:
    """Selected levels of subcolumns 1..N at the bottom of a block.

    Subcolumn ``j`` starts at level 0 and climbs ``N-j`` gaps of ``N`` then
    ``j-1`` gaps of ``N+1``, ending at level ``N^2 - N + j - 1``.
    """
    out = []
    for j in range(1, N + 1):
        levels = [0]
        for gap in [N] * (N - j) + [N + 1] * (j - 1):
            levels.append(levels[-1] + gap)
        out.append(tuple(levels))
    return tuple(out)


def top_staircase(N: int, R: int) -> tuple[tuple[int, ...], ...]:
    """Mirror image of the bottom staircase hanging from level ``R``.

    Subcolumn ``j`` takes ``R - l`` for the nonzero levels ``l`` of bottom
    subcolumn ``N + 1 - j``.
    """
    if N >= 2 and R < 2 * N * N + N:
        raise TooShortError(f"height {R} < 2N^2 + N = {2 * N * N + N}")
    bottom = bottom_staircase(N)
    return tuple(
        tuple(sorted(R - l for l in bottom[N - j] if l >= N)) for j in range(1, N + 1)
    )


@dataclass(frozen=True)
class RungSelection:
    """Selections inside one block ``i`` of one column.

    Level tuples are indexed by subcolumn ``j - 1`` and sorted ascending.
    """

    column_id: str
    block: int
    b_levels: tuple[tuple[int, ...], ...]
    a_levels: tuple[tuple[int, ...], ...] = ()
    e_levels: tuple[tuple[int, ...], ...] = ()
    net_skips: dict[int, int] = field(default_factory=dict)
    skips: tuple[int, ...] = ()

    @property
    def b_rungs(self) -> frozenset[tuple[int, int, int]]:
        return _triples(self.block, self.b_levels)

    @property
    def a_rungs(self) -> frozenset[tuple[int, int, int]]:
        return _triples(self.block, self.a_levels)

    @property
    def e_rungs(self) -> frozenset[tuple[int, int, int]]:
        return _triples(self.block, self.e_levels)


def _triples(i: int, per_sub: Sequence[Sequence[int]]) -> frozenset[tuple[int, int, int]]:
    return frozenset((i, j, l) for j, levels in enumerate(per_sub, start=1) for l in levels)


@dataclass(frozen=True)
class ConstructionParams:
    N: int
    M: int
    delta: int
    gamma: dict[str, int]
    b: dict[str, tuple[Fraction, ...]]
    allow_small_M: bool = False


@dataclass(frozen=True)
class Measures:
    B: Fraction
    A: Fraction
    E: Fraction
    B_N: Fraction
    B_N1: Fraction
    A_union_B: Fraction
    B_cap: tuple[Fraction, ...]
    A_cap: tuple[Fraction, ...]


@dataclass(frozen=True)
class TowerResult:
    params: ConstructionParams
    selections: dict[str, tuple[RungSelection, ...]]
    measures: Measures | None = None


def outer_net_skips(labels: Sequence[int], t: int, N: int, bottom, top) -> list[int]:
    """Net skips per cell contributed by the two staircases alone."""
    R = len(labels)
    per_level = Counter(l for levels in (*bottom, *top) for l in levels)
    outer = [0] * t
    for l in (*range(0, min(N * N, R)), *range(max(R - N * N + 1, N * N), R)):
        outer[labels[l] - 1] += 1 - per_level[l]
    return outer


def net_skip_ledger(labels: Sequence[int], t: int, b_levels: Sequence[Sequence[int]]) -> dict[int, int]:
    """Appearances minus selections for every cell, over one block."""
    ledger = Counter(labels)
    for levels in b_levels:
        for l in levels:
            ledger[labels[l]] -= 1
    return {j: ledger[j] for j in range(1, t + 1)}


def _check_gaps(column_id: str, block: int, N: int, R: int, b_levels) -> None:
    for j, levels in enumerate(b_levels, start=1):
        if not levels or levels[0] != 0:
            raise MisalignedHandoffError(f"block {block} subcolumn {j}: level 0 not selected", column_id)
        for lo, hi in zip(levels, levels[1:]):
            if hi - lo not in (N, N + 1):
                raise MisalignedHandoffError(
                    f"block {block} subcolumn {j}: gap {hi - lo} between levels {lo} and {hi}", column_id
                )
        if R - levels[-1] not in (N, N + 1):
            raise MisalignedHandoffError(
                f"block {block} subcolumn {j}: top gap {R - levels[-1]} above level {levels[-1]}", column_id
            )


def select_block(column: Column, t: int, N: int, block: int, delta: int, gamma: int) -> RungSelection:
    """B-rungs of one block: staircases at both ends, greedy skips in between."""
    labels, R, cid = column.labels, column.R, column.id
    bottom = bottom_staircase(N)
    top = top_staircase(N, R)
    selected = [list(levels) for levels in bottom]

    target = [delta] * t
    target[block - 1] = gamma
    outer = outer_net_skips(labels, t, N, bottom, top)
    quota = [tg - o for tg, o in zip(target, outer)]
    for j, q in enumerate(quota, start=1):
        if q < 0:
            raise QuotaNegativeError(
                f"block {block} cell {j}: outer staircases already skip {outer[j - 1]} > target {target[j - 1]}",
                cid,
            )

    # Skips are at least N+1 apart so no subcolumn gap exceeds N+1, and stop
    # N levels short of the middle's end so the top staircase lines up.
    due = 0
    last_skip = None
    skips = []
    last_skippable = R - N * N - N
    for l in range(N * N, R - N * N + 1):
        c = labels[l] - 1
        if quota[c] > 0 and l <= last_skippable and (last_skip is None or l - last_skip > N):
            quota[c] -= 1
            skips.append(l)
            last_skip = l
            continue
        selected[due].append(l)
        due = (due + 1) % N

    if any(quota):
        missing = {j: q for j, q in enumerate(quota, start=1) if q}
        raise QuotaUnmetError(f"block {block}: skips still owed per cell {missing}", cid)
    if due != 0:
        raise MisalignedHandoffError(f"block {block}: middle ends before subcolumn {due + 1}", cid)

    b_levels = tuple(tuple(sel + list(top[j])) for j, sel in enumerate(selected))
    _check_gaps(cid, block, N, R, b_levels)
    ledger = net_skip_ledger(labels, t, b_levels)
    if [ledger[j] for j in range(1, t + 1)] != target:
        raise MisalignedHandoffError(f"block {block}: net skips {ledger} miss targets {target}", cid)

    e_levels = tuple(
        tuple(l + N for l, nxt in zip(levels, (*levels[1:], R)) if nxt - l == N + 1) for levels in b_levels
    )
    return RungSelection(cid, block, b_levels, (), e_levels, ledger, tuple(skips))


def select_A(split: SplitColumn, block: int, b_levels: Sequence[Sequence[int]], gamma: int, delta: int):
    """``gamma`` unselected rungs of cell ``block`` and ``delta`` of every other cell.

    Scans levels bottom-up, subcolumns left to right, taking the first free
    rung whose cell still needs one.
    """
    labels, N, t = split.column.labels, split.N, split.t
    quota = [delta] * t
    quota[block - 1] = gamma
    remaining = sum(quota)
    taken = [set(levels) for levels in b_levels]
    chosen: list[list[int]] = [[] for _ in range(N)]
    for l, cell in enumerate(labels):
        if not remaining:
            break
        for j in range(N):
            if quota[cell - 1] and l not in taken[j]:
                quota[cell - 1] -= 1
                remaining -= 1
                chosen[j].append(l)
    if remaining:
        missing = {j: q for j, q in enumerate(quota, start=1) if q}
        raise AQuotaUnmetError(f"block {block}: A-rungs still owed per cell {missing}", split.column.id)
    return tuple(tuple(levels) for levels in chosen)


def select_column(split: SplitColumn, params: ConstructionParams) -> tuple[RungSelection, ...]:
    col = split.column
    gamma, delta = params.gamma[col.id], params.delta
    out = []
    for i in range(1, split.t + 1):
        sel = select_block(col, split.t, split.N, i, delta, gamma)
        a_levels = select_A(split, i, sel.b_levels, gamma, delta)
        out.append(
            RungSelection(col.id, i, sel.b_levels, a_levels, sel.e_levels, sel.net_skips, sel.skips)
        )
    return tuple(out)


def tower_measures(system: ColumnSystem, N: int, b: dict, selections: dict) -> Measures:
    """Aggregate rung widths into the global measures of B, A, E and friends."""
    t = system.t
    zero = Fraction(0)
    tot = dict(B=zero, A=zero, E=zero, B_N=zero, B_N1=zero, AB=zero)
    b_cap = [zero] * t
    a_cap = [zero] * t
    for col in system.columns:
        labels, R = col.labels, col.R
        for sel in selections[col.id]:
            w = col.width * b[col.id][sel.block - 1] / N
            nb = sum(len(x) for x in sel.b_levels)
            na = sum(len(x) for x in sel.a_levels)
            ne = sum(len(x) for x in sel.e_levels)
            n_long = sum(
                1 for levels in sel.b_levels for l, nxt in zip(levels, (*levels[1:], R)) if nxt - l == N + 1
            )
            tot["B"] += w * nb
            tot["A"] += w * na
            tot["E"] += w * ne
            tot["B_N1"] += w * n_long
            tot["B_N"] += w * (nb - n_long)
            union = sum(len(set(x) | set(y)) for x, y in zip(sel.b_levels, sel.a_levels or [()] * N))
            tot["AB"] += w * union
            for cell, n in Counter(labels[l] for levels in sel.b_levels for l in levels).items():
                b_cap[cell - 1] += w * n
            for cell, n in Counter(labels[l] for levels in sel.a_levels for l in levels).items():
                a_cap[cell - 1] += w * n
    return Measures(
        tot["B"], tot["A"], tot["E"], tot["B_N"], tot["B_N1"], tot["AB"], tuple(b_cap), tuple(a_cap)
    )


def build_tower(system: ColumnSystem, N: int, allow_small_M: bool = False) -> TowerResult:
    """Run the whole construction on ``system`` for tower height ``{N, N+1}``.

    ``N == 1`` needs no richness: every level is selected and ``E`` is empty.
    """
    if N < 1:
        raise ValueError("N must be positive")
    violations = validate_system(system)
    if violations:
        raise ValidationError(violations)
    t = system.t
    m = cell_measures(system)
    m1 = min(m)
    M = required_M(N, t, m1)

    if N >= 2 and not allow_small_M:
        report = is_rich(system, M)
        if not report.rich:
            worst = min(report.min_occurrences.values())
            raise NotRichError(
                f"column(s) {', '.join(report.failing)} show some cell only {worst} times; need M = {M}"
            )
    if N >= 2:
        for col in system.columns:
            if col.R < 2 * N * N + N:
                raise TooShortError(f"height {col.R} < 2N^2 + N = {2 * N * N + N}", col.id)

    delta = compute_delta(N)
    gamma = {col.id: compute_gamma(col.R, N, t, delta, m1) for col in system.columns}
    b = {cid: compute_b(m, g, delta, t) for cid, g in gamma.items()}
    params = ConstructionParams(N, M, delta, gamma, b, allow_small_M)

    selections = {
        col.id: select_column(split_column(col, N, b[col.id]), params) for col in system.columns
    }
    return TowerResult(params, selections, tower_measures(system, N, b, selections))
