"""Brute-force oracle: ``T`` as a permutation of equal-mass atoms.

Every column base is cut into ``width * G`` atoms of mass ``1/G``, where
``G`` is the lcm of all sub-base and edge denominators. ``T`` moves an atom
one level up; top atoms cross the seam edges in order, keeping their
left-to-right position. All tower properties are then recounted atom by
atom, without reference to rungs, gaps or staircases.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import numpy as np

from .errors import GridTooLargeError
from .model import ColumnSystem, SplitColumn
from .construction import TowerResult
from .verification import ORACLE_CHECKS, compare_reported, rung_sets

DEFAULT_GRID_LIMIT = 10**6


@dataclass
class GridModel:
    """Atoms in column-major blocks: atom ``off[c] + level * n_base[c] + k``.

    The per-atom arrays (``column``, ``level``, ``base``, ``block``, ``sub``,
    ``label``) describe where each atom lives; ``perm[x]`` is ``T(x)``.
    """

    G: int
    N: int
    t: int
    column_ids: list[str]
    offset: dict[str, int]
    n_base: dict[str, int]
    height: dict[str, int]
    sub_atoms: dict[str, dict[tuple[int, int], tuple[int, int]]]
    column: np.ndarray
    level: np.ndarray
    base: np.ndarray
    block: np.ndarray
    sub: np.ndarray
    label: np.ndarray
    perm: np.ndarray

    def rung_atoms(self, cid: str, i: int, j: int, l: int) -> range:
        lo, hi = self.sub_atoms[cid][(i, j)]
        start = self.offset[cid] + l * self.n_base[cid]
        return range(start + lo, start + hi)


def grid_size(system: ColumnSystem, N: int, b) -> int:
    dens = []
    for col in system.columns:
        dens.append(col.width.denominator)
        dens.extend((col.width * Fraction(bi) / N).denominator for bi in b[col.id])
    dens.extend(e.width.denominator for e in system.edges)
    return lcm(*dens)


def build_grid(system: ColumnSystem, N: int, b, limit: int = DEFAULT_GRID_LIMIT) -> GridModel:
    G = grid_size(system, N, b)
    if G > limit:
        raise GridTooLargeError(f"grid needs {G} atoms, limit is {limit}")

    ids = [c.id for c in system.columns]
    offset, n_base, height, sub_atoms = {}, {}, {}, {}
    pos = 0
    for col in system.columns:
        offset[col.id] = pos
        n_base[col.id] = int(col.width * G)
        height[col.id] = col.R
        pos += n_base[col.id] * col.R
        bounds = {}
        for i, j, lo, hi in SplitColumn(col, N, tuple(b[col.id])).sub_bases():
            bounds[(i, j)] = (int(lo * G), int(hi * G))
        sub_atoms[col.id] = bounds
    if pos != G:
        raise ValueError(f"columns hold {pos} atoms, expected {G}")

    parts = {k: [] for k in ("column", "level", "base", "block", "sub", "label")}
    for idx, col in enumerate(system.columns):
        n, R = n_base[col.id], col.R
        blk = np.zeros(n, dtype=np.int32)
        sb = np.zeros(n, dtype=np.int32)
        for (i, j), (lo, hi) in sub_atoms[col.id].items():
            blk[lo:hi] = i
            sb[lo:hi] = j
        parts["column"].append(np.full(n * R, idx, dtype=np.int32))
        parts["level"].append(np.repeat(np.arange(R, dtype=np.int64), n))
        parts["base"].append(np.tile(np.arange(n, dtype=np.int64), R))
        parts["block"].append(np.tile(blk, R))
        parts["sub"].append(np.tile(sb, R))
        parts["label"].append(np.repeat(np.asarray(col.labels, dtype=np.int32), n))
    arrays = {k: np.concatenate(v) if v else np.zeros(0, dtype=np.int64) for k, v in parts.items()}

    perm = np.arange(G, dtype=np.int64) + 0
    in_fill = {cid: 0 for cid in ids}
    out_start = {}
    for col in system.columns:
        k = 0
        for e in system.outgoing(col.id):
            out_start[(e.source, e.order)] = k
            k += int(e.width * G)
    for col in system.columns:
        n, R, off = n_base[col.id], col.R, offset[col.id]
        perm[off : off + n * (R - 1)] += n
    for e in system.edges:
        count = int(e.width * G)
        src = offset[e.source] + (height[e.source] - 1) * n_base[e.source] + out_start[(e.source, e.order)]
        dst = offset[e.target] + in_fill[e.target]
        in_fill[e.target] += count
        perm[src : src + count] = np.arange(dst, dst + count)
    if not np.array_equal(np.bincount(perm, minlength=G), np.ones(G, dtype=np.int64)):
        raise ValueError("seam edges do not define a bijection on atoms")

    return GridModel(G, N, system.t, ids, offset, n_base, height, sub_atoms, perm=perm, **arrays)


@dataclass(frozen=True)
class OracleReport:
    verdicts: dict[str, bool]
    measures: dict[str, object]
    details: dict[str, str]

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())


def _mask(grid: GridModel, rungs: dict[str, set]) -> np.ndarray:
    mask = np.zeros(grid.G, dtype=bool)
    for cid, triples in rungs.items():
        if cid not in grid.offset:
            continue
        for i, j, l in triples:
            if (i, j) in grid.sub_atoms[cid] and 0 <= l < grid.height[cid]:
                r = grid.rung_atoms(cid, i, j, l)
                mask[r.start : r.stop] = True
    return mask


def check_atoms(grid: GridModel, B: np.ndarray, A: np.ndarray, E: np.ndarray, reported=None) -> OracleReport:
    """Recount every tower property from atom masks of B, A and E."""
    G, N, t, T = grid.G, grid.N, grid.t, grid.perm
    inv = np.empty_like(T)
    inv[T] = np.arange(G)

    cover = np.zeros(G, dtype=np.int64)
    back = np.arange(G)
    for _ in range(N):
        cover += B[back]
        back = inv[back]
    expected_e = B[back] & ~B
    fwd = np.arange(G)
    for _ in range(N):
        fwd = T[fwd]
    long_ = B & ~B[fwd]
    n_b, n_long = int(B.sum()), int(long_.sum())
    union = A | B

    verdicts = {
        "cover": bool(np.all(cover + E == 1)),
        "e_matches": bool(np.array_equal(E, expected_e)),
        "te_in_b": bool(np.all(B[T[E]])),
        "measure_identity": (n_b - n_long) * N + n_long * (N + 1) == G,
        "ab_disjoint": not bool(np.any(A & B)),
    }
    density = True
    for idx, cid in enumerate(grid.column_ids):
        in_col = grid.column == idx
        density &= int(np.count_nonzero(union & in_col)) * N == int(np.count_nonzero(in_col))
    verdicts["union_density"] = bool(density)

    cell_atoms = np.bincount(grid.label, minlength=t + 1)[1:]
    caps = {}
    for name, S in (("B", B), ("A", A), ("AuB", union)):
        cap = np.bincount(grid.label[S], minlength=t + 1)[1:]
        size = int(S.sum())
        verdicts[f"independent_{name}"] = all(int(cap[k]) * G == size * int(cell_atoms[k]) for k in range(t))
        caps[name] = tuple(Fraction(int(x), G) for x in cap)

    measures = {
        "B": Fraction(n_b, G),
        "A": Fraction(int(A.sum()), G),
        "E": Fraction(int(E.sum()), G),
        "B_N": Fraction(n_b - n_long, G),
        "B_N1": Fraction(n_long, G),
        "A_union_B": Fraction(int(union.sum()), G),
        "B_cap": caps["B"],
        "A_cap": caps["A"],
    }
    mismatch = compare_reported(reported, measures) if reported is not None else []
    verdicts["report_measures"] = not mismatch
    details = {"report_measures": "; ".join(mismatch)} if mismatch else {}
    assert tuple(verdicts) == ORACLE_CHECKS
    return OracleReport(verdicts, measures, details)


def oracle_verify(grid: GridModel, result: TowerResult) -> OracleReport:
    B = _mask(grid, rung_sets(result, "B"))
    A = _mask(grid, rung_sets(result, "A"))
    E = _mask(grid, rung_sets(result, "E"))
    return check_atoms(grid, B, A, E, result)
