"""JSON report for a constructed tower (also the input of ``verify``).

Rationals are written as reduced ``"p/q"`` strings and rungs as
``[block, subcolumn, level]`` triples, so reports diff cleanly and survive
a round trip bit for bit.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction

from .construction import ConstructionParams, Measures, RungSelection, TowerResult
from .model import ColumnSystem, format_ratio

FORMAT = "alpern-report v1"

_MEASURE_KEYS = (
    ("B", "B"),
    ("A", "A"),
    ("E", "E"),
    ("B_N", "B_N"),
    ("B_N1", "B_N+1"),
    ("A_union_B", "A∪B"),
)

_INNER_ARRAY = re.compile(r"\[\s*(-?\d+(?:,\s*-?\d+)*)\s*\]")


class ReportFormatError(ValueError):
    code = "ReportFormat"


def _triples(block: int, per_sub) -> list[list[int]]:
    return [[block, j, l] for j, levels in enumerate(per_sub, start=1) for l in levels]


def report_dict(system: ColumnSystem, result: TowerResult) -> dict:
    p = result.params
    order = [c.id for c in system.columns]
    selections = {}
    for cid in order:
        blocks = result.selections[cid]
        selections[cid] = {
            "B": sorted(r for sel in blocks for r in _triples(sel.block, sel.b_levels)),
            "A": sorted(r for sel in blocks for r in _triples(sel.block, sel.a_levels)),
            "E": sorted(r for sel in blocks for r in _triples(sel.block, sel.e_levels)),
            "net_skips": {str(sel.block): {str(k): v for k, v in sorted(sel.net_skips.items())} for sel in blocks},
            "skips": {str(sel.block): list(sel.skips) for sel in blocks},
        }
    out = {
        "format": FORMAT,
        "params": {
            "N": p.N,
            "M": p.M,
            "delta": p.delta,
            "allow_small_M": p.allow_small_M,
            "gamma": {cid: p.gamma[cid] for cid in order},
            "b": {cid: [format_ratio(x) for x in p.b[cid]] for cid in order},
        },
        "selections": selections,
    }
    if result.measures is not None:
        m = result.measures
        measures = {key: format_ratio(getattr(m, attr)) for attr, key in _MEASURE_KEYS}
        measures["B∩P"] = [format_ratio(x) for x in m.B_cap]
        measures["A∩P"] = [format_ratio(x) for x in m.A_cap]
        out["measures"] = measures
    return out


def dumps_report(system: ColumnSystem, result: TowerResult) -> str:
    text = json.dumps(report_dict(system, result), indent=2, ensure_ascii=False)
    return _INNER_ARRAY.sub(lambda m: "[" + ", ".join(m.group(1).replace(",", " ").split()) + "]", text) + "\n"


def _ratio(value) -> Fraction:
    if not isinstance(value, str):
        raise ReportFormatError(f"expected a 'p/q' string, got {value!r}")
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError):
        raise ReportFormatError(f"bad ratio {value!r}") from None


def _levels_by_block(triples, N: int) -> dict[int, list[list[int]]]:
    out: dict[int, list[list[int]]] = {}
    for item in triples:
        if not (isinstance(item, list) and len(item) == 3 and all(isinstance(x, int) for x in item)):
            raise ReportFormatError(f"rung must be [block, subcolumn, level], got {item!r}")
        i, j, l = item
        if i < 1 or j < 1:
            raise ReportFormatError(f"rung {item} has a nonpositive block or subcolumn")
        subs = out.setdefault(i, [[] for _ in range(N)])
        while len(subs) < j:
            subs.append([])
        subs[j - 1].append(l)
    return out


def loads_report(text: str) -> TowerResult:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ReportFormatError(f"invalid JSON: {exc}") from None
    if not isinstance(data, dict) or data.get("format") != FORMAT:
        raise ReportFormatError(f"not an {FORMAT!r} document")
    try:
        p = data["params"]
        N = int(p["N"])
        b = {cid: tuple(_ratio(x) for x in v) for cid, v in p["b"].items()}
        params = ConstructionParams(
            N, int(p["M"]), int(p["delta"]), {k: int(v) for k, v in p["gamma"].items()}, b, bool(p["allow_small_M"])
        )
        selections = {}
        for cid, sel in data["selections"].items():
            t = len(b.get(cid, ()))
            kinds = {k: _levels_by_block(sel.get(k, []), N) for k in ("B", "A", "E")}
            blocks = sorted(set(range(1, t + 1)).union(*[set(v) for v in kinds.values()]))
            out = []
            for i in blocks:
                def per_sub(kind):
                    subs = kinds[kind].get(i, [[] for _ in range(N)])
                    return tuple(tuple(sorted(x)) for x in subs)

                net = {int(k): int(v) for k, v in sel.get("net_skips", {}).get(str(i), {}).items()}
                skips = tuple(sel.get("skips", {}).get(str(i), ()))
                out.append(RungSelection(cid, i, per_sub("B"), per_sub("A"), per_sub("E"), net, skips))
            selections[cid] = tuple(out)
        measures = None
        if "measures" in data:
            m = data["measures"]
            measures = Measures(
                *(_ratio(m[key]) for _, key in _MEASURE_KEYS),
                tuple(_ratio(x) for x in m["B∩P"]),
                tuple(_ratio(x) for x in m["A∩P"]),
            )
    except (KeyError, TypeError, AttributeError) as exc:
        raise ReportFormatError(f"malformed report: {exc!r}") from None
    return TowerResult(params, selections, measures)
