"""Combinatorial verifier for towers produced by :mod:`alpern.construction`.

Everything is recomputed from the rung sets alone; the greedy's own ledger
(``net_skips``, ``skips``) and the reported measures are never trusted.

A point ``x`` is judged by the B-membership of ``T^-N x, ..., x, T x``.
Rungs at least ``N`` levels above the base and below the top are handled
level by level. Near a seam the window crosses into other columns, whose
sub-bases need not line up with this one, so those rungs are cut into exact
rational pieces by following the seam edges.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .construction import ConstructionParams, RungSelection, TowerResult
from .model import ColumnSystem, SplitColumn, cell_measures

Rung = tuple[int, int, int]

# verdict names shared with the grid oracle
ORACLE_CHECKS = (
    "cover",
    "e_matches",
    "te_in_b",
    "measure_identity",
    "ab_disjoint",
    "union_density",
    "independent_B",
    "independent_A",
    "independent_AuB",
    "report_measures",
)

_MAX_DETAILS = 25


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    details: tuple[str, ...] = ()

    def line(self) -> str:
        status = "pass" if self.passed else "FAIL"
        text = f"{status} {self.name}"
        if self.details:
            text += ": " + "; ".join(self.details)
        return text


def _check(name: str, failures: list[str], total: int | None = None) -> Check:
    details = failures[:_MAX_DETAILS]
    extra = (total if total is not None else len(failures)) - len(details)
    if extra > 0:
        details = [*details, f"... {extra} more"]
    return Check(name, not failures, tuple(details))


@dataclass(frozen=True)
class IndependenceReport:
    """Per-cell pairs ``(mu(S & P_j), mu(S) * m_j)`` for one rung set ``S``.

    ``column_ratios[c][j]`` is the relative mass of cell ``j`` inside
    ``S`` restricted to column ``c``.
    """

    label: str
    measure: Fraction
    pairs: tuple[tuple[Fraction, Fraction], ...]
    column_ratios: dict[str, tuple[Fraction, ...]] = field(default_factory=dict)

    @property
    def verdicts(self) -> tuple[bool, ...]:
        return tuple(lhs == rhs for lhs, rhs in self.pairs)

    @property
    def independent(self) -> bool:
        return all(self.verdicts)

    @property
    def discrepancy(self) -> Fraction:
        return max((abs(lhs - rhs) for lhs, rhs in self.pairs), default=Fraction(0))


@dataclass(frozen=True)
class NetSkipAudit:
    ledger: dict[int, int]
    targets: dict[int, int]

    @property
    def ok(self) -> bool:
        return self.ledger == self.targets


@dataclass(frozen=True)
class VerificationReport:
    checks: tuple[Check, ...]
    independence: dict[str, IndependenceReport]
    measures: dict[str, object]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def verdicts(self, names: Iterable[str] | None = None) -> dict[str, bool]:
        table = {c.name: c.passed for c in self.checks}
        return table if names is None else {n: table[n] for n in names}

    def check(self, name: str) -> Check:
        return next(c for c in self.checks if c.name == name)


def rung_sets(result: TowerResult, kind: str) -> dict[str, set[Rung]]:
    """``{column: {(i, j, level)}}`` for ``kind`` in ``"B"``, ``"A"``, ``"E"``."""
    attr = {"B": "b_levels", "A": "a_levels", "E": "e_levels"}[kind]
    out: dict[str, set[Rung]] = {}
    for cid, blocks in result.selections.items():
        s = out.setdefault(cid, set())
        for sel in blocks:
            for j, levels in enumerate(getattr(sel, attr), start=1):
                s.update((sel.block, j, l) for l in levels)
    return out


def audit_net_skips(labels, block: int, selection: RungSelection, t: int, delta: int, gamma: int) -> NetSkipAudit:
    """Appearances minus B-selections per cell inside one block, against the targets."""
    ledger = Counter(labels)
    for levels in selection.b_levels:
        for l in levels:
            ledger[labels[l]] -= 1
    targets = {j: (gamma if j == block else delta) for j in range(1, t + 1)}
    return NetSkipAudit({j: ledger[j] for j in range(1, t + 1)}, targets)


def _widths(system: ColumnSystem, N: int, b: Mapping[str, tuple]) -> dict[str, list[Fraction]]:
    return {c.id: [c.width * Fraction(bi) / N for bi in b[c.id]] for c in system.columns}


def verify_independence(
    system: ColumnSystem,
    N: int,
    b: Mapping[str, tuple],
    rungs: Mapping[str, Iterable[Rung]],
    label: str,
) -> IndependenceReport:
    """Exact ``mu(S & P_j)`` against ``mu(S) * m_j`` for the rung set ``S``."""
    t = system.t
    m = cell_measures(system)
    widths = _widths(system, N, b)
    cap = [Fraction(0)] * t
    ratios = {}
    for col in system.columns:
        counts: Counter = Counter()
        for i, j, l in rungs.get(col.id, ()):
            if 1 <= i <= t and 1 <= j <= N and 0 <= l < col.R:
                counts[(i, col.labels[l])] += 1
        col_cap = [Fraction(0)] * t
        for (i, cell), n in counts.items():
            col_cap[cell - 1] += widths[col.id][i - 1] * n
        col_total = sum(col_cap, Fraction(0))
        ratios[col.id] = tuple(x / col_total if col_total else Fraction(0) for x in col_cap)
        for k in range(t):
            cap[k] += col_cap[k]
    total = sum(cap, Fraction(0))
    pairs = tuple((cap[k], total * m[k]) for k in range(t))
    return IndependenceReport(label, total, pairs, ratios)


class _Seams:
    """Exact seam geometry: sub-base intervals and edge translations."""

    def __init__(self, system: ColumnSystem, N: int, b: Mapping[str, tuple]):
        self.height = {c.id: c.R for c in system.columns}
        self.subs = {
            c.id: [(lo, hi, i, j) for i, j, lo, hi in SplitColumn(c, N, tuple(b[c.id])).sub_bases()]
            for c in system.columns
        }
        self.out_links: dict[str, list] = {}
        self.in_links: dict[str, list] = {c.id: [] for c in system.columns}
        in_offset = {c.id: Fraction(0) for c in system.columns}
        out_start = {}
        for c in system.columns:
            lo = Fraction(0)
            for e in system.outgoing(c.id):
                out_start[(e.source, e.order)] = lo
                lo += e.width
        for e in system.edges:
            o = out_start[(e.source, e.order)]
            p = in_offset[e.target]
            in_offset[e.target] += e.width
            self.out_links.setdefault(e.source, []).append((o, o + e.width, e.target, p - o))
            self.in_links[e.target].append((p, p + e.width, e.source, o - p))

    def _enter(self, lo, hi, shift, col, level):
        out = []
        for slo, shi, i, j in self.subs[col]:
            a = max(lo + shift, slo)
            z = min(hi + shift, shi)
            if a < z:
                out.append((a - shift, z - shift, shift, col, level, i, j))
        return out

    def step(self, piece, direction: int):
        lo, hi, shift, col, level, i, j = piece
        R = self.height[col]
        if direction > 0 and level < R - 1:
            return [(lo, hi, shift, col, level + 1, i, j)]
        if direction < 0 and level > 0:
            return [(lo, hi, shift, col, level - 1, i, j)]
        links = self.out_links.get(col, []) if direction > 0 else self.in_links.get(col, [])
        out = []
        for s, e, other, delta in links:
            a = max(lo + shift, s)
            z = min(hi + shift, e)
            if a < z:
                new_level = 0 if direction > 0 else self.height[other] - 1
                out.extend(self._enter(a - shift, z - shift, shift + delta, other, new_level))
        return out

    def windows(self, col: str, i: int, j: int, level: int, back: int):
        """Pieces of rung ``(i, j, level)`` with their states at offsets ``0, -1, .., -back`` and ``+1``.

        Yields ``(width, back_states, forward_state)``; a state is
        ``(column, i, j, level)``.
        """
        start = None
        for slo, shi, si, sj in self.subs[col]:
            if (si, sj) == (i, j):
                start = (slo, shi, Fraction(0), col, level, i, j)
        if start is None or start[0] == start[1]:
            return
        traced = [(start, [_state(start)])]
        for _ in range(back):
            nxt = []
            for piece, hist in traced:
                for p in self.step(piece, -1):
                    nxt.append((p, hist + [_state(p)]))
            traced = nxt
        forward = self.step(start, +1)
        for piece, hist in traced:
            for f in forward:
                a = max(piece[0], f[0])
                z = min(piece[1], f[1])
                if a < z:
                    yield z - a, hist, _state(f)


def _state(piece) -> tuple[str, int, int, int]:
    _, _, _, col, level, i, j = piece
    return col, i, j, level


def _structural_checks(system, params: ConstructionParams, result: TowerResult) -> list[Check]:
    N, t = params.N, system.t
    b_fail, range_fail, base_fail, gap_fail, top_fail = [], [], [], [], []
    for col in system.columns:
        b = params.b.get(col.id)
        if b is None or len(b) != t:
            b_fail.append(f"column {col.id}: expected {t} block masses")
        elif any(Fraction(x) < 0 for x in b) or sum(Fraction(x) for x in b) != 1:
            b_fail.append(f"column {col.id}: b = {[str(x) for x in b]} is not a probability vector")

    for kind in ("B", "A", "E"):
        for cid, rungs in rung_sets(result, kind).items():
            R = system.column(cid).R
            for i, j, l in sorted(rungs):
                if not (1 <= i <= t and 1 <= j <= N and 0 <= l < R):
                    range_fail.append(f"{kind} rung {cid}/{i}/{j}/{l} out of range")

    b_rungs = rung_sets(result, "B")
    for col in system.columns:
        per_sub: dict[tuple[int, int], list[int]] = {(i, j): [] for i in range(1, t + 1) for j in range(1, N + 1)}
        for i, j, l in b_rungs.get(col.id, ()):
            if (i, j) in per_sub and 0 <= l < col.R:
                per_sub[(i, j)].append(l)
        for (i, j), levels in per_sub.items():
            levels.sort()
            where = f"column {col.id} block {i} subcolumn {j}"
            if not levels or levels[0] != 0:
                base_fail.append(f"{where}: level 0 not in B")
            for lo, hi in zip(levels, levels[1:]):
                if hi - lo not in (N, N + 1):
                    gap_fail.append(f"{where}: gap {hi - lo} from level {lo} to {hi}")
            if levels and col.R - levels[-1] not in (N, N + 1):
                top_fail.append(f"{where}: top gap {col.R - levels[-1]} above level {levels[-1]}")
    return [
        _check("b_coherent", b_fail),
        _check("level_range", range_fail),
        _check("base_selected", base_fail),
        _check("gaps", gap_fail),
        _check("top_gap", top_fail),
    ]


def verify_alpern(system: ColumnSystem, result: TowerResult) -> tuple[list[Check], dict[str, Fraction]]:
    """Alpern-tower checks plus the recomputed B/E measures.

    Checks: level 0 of every subcolumn in B, subcolumn gaps and top gaps in
    ``{N, N+1}``, exact cover of X by ``B, TB, .., T^(N-1)B, E``, declared
    ``E == T^N B_(N+1)``, ``T(E) ⊂ B``, and
    ``mu(B_N) N + mu(B_(N+1)) (N+1) = 1``.
    """
    params = result.params
    N, t = params.N, system.t
    checks = _structural_checks(system, params, result)
    if not checks[0].passed:
        for name in ("cover", "e_matches", "te_in_b", "measure_identity"):
            checks.append(Check(name, False, ("block masses incoherent",)))
        return checks, {}

    seams = _Seams(system, N, params.b)
    widths = _widths(system, N, params.b)
    b_rungs = rung_sets(result, "B")
    e_rungs = rung_sets(result, "E")
    cover_fail, match_fail, te_fail = [], [], []
    mu_b = mu_e = mu_long = Fraction(0)

    for col in system.columns:
        R = col.R
        B = b_rungs.get(col.id, set())
        E = e_rungs.get(col.id, set())
        for i in range(1, t + 1):
            w = widths[col.id][i - 1]
            if w == 0:
                continue
            for j in range(1, N + 1):
                bl = bytearray(R)
                el = bytearray(R)
                for l in range(R):
                    bl[l] = (i, j, l) in B
                    el[l] = (i, j, l) in E
                mu_b += w * sum(bl)
                mu_e += w * sum(el)
                where = f"{col.id}/{i}/{j}"

                # interior levels: the whole window stays in this subcolumn
                run = sum(bl[1:N])
                for l in range(N, R - 1):
                    run += bl[l]
                    cov_b = run
                    run -= bl[l - N + 1]
                    e0 = el[l]
                    expected_e = bl[l - N] and not bl[l]
                    if expected_e:
                        mu_long += w
                    if cov_b + e0 != 1:
                        cover_fail.append(f"{where}/{l} covered {cov_b + e0} times")
                    if bool(e0) != bool(expected_e):
                        match_fail.append(f"{where}/{l} E={bool(e0)} but T^N B_(N+1) says {bool(expected_e)}")
                    if e0 and not bl[l + 1]:
                        te_fail.append(f"{where}/{l} in E but level {l + 1} not in B")

                # seam levels: trace exact pieces through the edges
                for l in sorted({*range(0, min(N, R)), R - 1}):
                    if N <= l < R - 1:
                        continue
                    e0 = el[l]
                    bad_cover = bad_match = bad_te = False
                    for width, hist, fwd in seams.windows(col.id, i, j, l, N):
                        inb = [(s[1], s[2], s[3]) in b_rungs.get(s[0], ()) for s in hist]
                        cov_b = sum(inb[:N])
                        expected_e = inb[N] and not inb[0]
                        if expected_e:
                            mu_long += width
                        bad_cover |= cov_b + e0 != 1
                        bad_match |= bool(e0) != bool(expected_e)
                        bad_te |= bool(e0) and (fwd[1], fwd[2], fwd[3]) not in b_rungs.get(fwd[0], ())
                    if bad_cover:
                        cover_fail.append(f"{where}/{l} not covered exactly once")
                    if bad_match:
                        match_fail.append(f"{where}/{l} E disagrees with T^N B_(N+1)")
                    if bad_te:
                        te_fail.append(f"{where}/{l} in E but its image is not in B")

    mu_short = mu_b - mu_long
    identity = mu_short * N + mu_long * (N + 1)
    checks += [
        _check("cover", cover_fail),
        _check("e_matches", match_fail),
        _check("te_in_b", te_fail),
        _check("measure_identity", [] if identity == 1 else [f"mu(B_N)N + mu(B_N+1)(N+1) = {identity}"]),
    ]
    return checks, {"B": mu_b, "E": mu_e, "B_N": mu_short, "B_N1": mu_long}


def verify_tower(system: ColumnSystem, result: TowerResult) -> VerificationReport:
    """All combinatorial checks, including independence of B, A and A ∪ B."""
    params = result.params
    N, t = params.N, system.t
    checks, measures = verify_alpern(system, result)
    if not measures:
        for name in ORACLE_CHECKS[4:]:
            checks.append(Check(name, False, ("block masses incoherent",)))
        return VerificationReport(tuple(checks), {}, {})

    B = rung_sets(result, "B")
    A = rung_sets(result, "A")
    AB = {cid: B.get(cid, set()) | A.get(cid, set()) for cid in set(A) | set(B)}
    overlap = sorted(f"{cid}/{i}/{j}/{l}" for cid in B for (i, j, l) in B[cid] & A.get(cid, set()))

    reports = {
        "B": verify_independence(system, N, params.b, B, "B"),
        "A": verify_independence(system, N, params.b, A, "A"),
        "A∪B": verify_independence(system, N, params.b, AB, "A∪B"),
    }
    widths = _widths(system, N, params.b)
    density_fail = []
    for col in system.columns:
        mass = sum(
            (widths[col.id][i - 1] for i, j, l in AB.get(col.id, ()) if 1 <= i <= t and 1 <= j <= N and 0 <= l < col.R),
            Fraction(0),
        )
        if mass * N != col.mass:
            density_fail.append(f"column {col.id}: mu(A∪B) = {mass}, expected {col.mass / N}")

    def indep(label):
        rep = reports[label]
        return [
            f"cell {k}: {lhs} ≠ {rhs}" for k, (lhs, rhs) in enumerate(rep.pairs, start=1) if lhs != rhs
        ]

    recomputed = {
        "B": measures["B"],
        "A": reports["A"].measure,
        "E": measures["E"],
        "B_N": measures["B_N"],
        "B_N1": measures["B_N1"],
        "A_union_B": reports["A∪B"].measure,
        "B_cap": tuple(lhs for lhs, _ in reports["B"].pairs),
        "A_cap": tuple(lhs for lhs, _ in reports["A"].pairs),
    }
    checks += [
        _check("ab_disjoint", [f"rung {r} in both A and B" for r in overlap]),
        _check("union_density", density_fail),
        _check("independent_B", indep("B")),
        _check("independent_A", indep("A")),
        _check("independent_AuB", indep("A∪B")),
        _check("report_measures", compare_reported(result, recomputed)),
    ]
    return VerificationReport(tuple(checks), reports, recomputed)


def compare_reported(result: TowerResult, recomputed: Mapping[str, object]) -> list[str]:
    if result.measures is None:
        return []
    out = []
    for name, value in recomputed.items():
        claimed = getattr(result.measures, name)
        same = tuple(claimed) == value if isinstance(value, tuple) else claimed == value
        if not same:
            out.append(f"{name}: reported {_fmt(claimed)}, recomputed {_fmt(value)}")
    return out


def _fmt(value) -> str:
    if isinstance(value, tuple):
        return "(" + ", ".join(str(x) for x in value) + ")"
    return str(value)
