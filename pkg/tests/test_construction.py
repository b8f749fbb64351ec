from collections import Counter
from fractions import Fraction
from math import ceil

import pytest
from hypothesis import HealthCheck, assume, given, settings, strategies as st

from alpern.construction import (
    ConstructionParams,
    bottom_staircase,
    build_tower,
    compute_b,
    compute_delta,
    compute_gamma,
    outer_net_skips,
    select_A,
    select_block,
    select_column,
    top_staircase,
)
from alpern.errors import (
    AlpernError,
    NegativeMassError,
    NotRichError,
    QuotaNegativeError,
    QuotaUnmetError,
    TooShortError,
    ValidationError,
)
from alpern.ingestion import RotationSpec, build_cyclic, build_rotation
from alpern.model import Column, cell_measures, split_column


# -- targets ---------------------------------------------------------------


def empty_outer_levels(N):
    """Levels of the two staircase regions that no subcolumn selects (R large)."""
    R = 10 * N * N + 50
    used = Counter(l for levels in (*bottom_staircase(N), *top_staircase(N, R)) for l in levels)
    region = [*range(N * N), *range(R - N * N + 1, R)]
    return [l for l in region if used[l] == 0]


@pytest.mark.parametrize("N, expected", [(1, 0), (2, 2), (4, 12), (5, 24), (6, 40)])
def test_delta_values(N, expected):
    assert compute_delta(N) == expected


def test_delta_at_three_covers_staircase_gaps():
    # 2(N-1)(N-2) = 4 here, smaller than the N(N-1) = 6 empty outer levels.
    assert compute_delta(3) == 6


@pytest.mark.parametrize("N", range(2, 8))
def test_delta_dominates_empty_outer_levels(N):
    empty = empty_outer_levels(N)
    assert len(empty) == N * (N - 1)
    assert compute_delta(N) >= len(empty)


def n3_adversarial_labels(R=120):
    """Cell 1 exactly on the empty outer levels, cell 2 on every staircase rung."""
    labels = [1 + (k % 2) for k in range(R)]
    for l in [*range(9), *range(R - 8, R)]:
        labels[l] = 2
    for l in (1, 2, 5, R - 5, R - 2, R - 1):
        labels[l] = 1
    return labels


def test_smaller_delta_fails_at_three():
    labels = n3_adversarial_labels()
    R = len(labels)
    col = Column("c0", Fraction(1, R), labels)
    assert outer_net_skips(labels, 2, 3, bottom_staircase(3), top_staircase(3, R))[0] == 6
    m1 = Fraction(labels.count(1), R)
    with pytest.raises(QuotaNegativeError):
        select_block(col, 2, 3, 2, 4, compute_gamma(R, 3, 2, 4, m1))
    sel = select_block(col, 2, 3, 2, 6, compute_gamma(R, 3, 2, 6, m1))
    assert sel.net_skips[1] == 6


def gamma_by_search(R, N, t, delta, m1):
    lo = Fraction(delta) / m1
    hits = [g for g in range(int(lo) - 1, int(lo) + N + 2) if lo <= g < lo + N and (g + (t - 1) * delta - R) % N == 0]
    assert len(hits) == 1
    return hits[0]


@pytest.mark.parametrize(
    "R, N, t, delta, m1, expected",
    [(1540, 4, 2, 12, Fraction(1, 2), 24), (1540, 4, 2, 12, Fraction(1, 3), 36), (99, 3, 1, 6, Fraction(1), 6)],
)
def test_gamma_examples(R, N, t, delta, m1, expected):
    assert compute_gamma(R, N, t, delta, m1) == expected == gamma_by_search(R, N, t, delta, m1)


@given(
    st.integers(1, 5000), st.integers(1, 7), st.integers(1, 5),
    st.fractions(min_value=Fraction(1, 50), max_value=1),
)
def test_gamma_matches_window_search(R, N, t, m1):
    delta = compute_delta(N)
    assert compute_gamma(R, N, t, delta, m1) == gamma_by_search(R, N, t, delta, m1)


def test_b_examples():
    assert compute_b((Fraction(1, 3), Fraction(2, 3)), 36, 12) == (Fraction(1, 6), Fraction(5, 6))
    assert compute_b((Fraction(1, 2), Fraction(1, 2)), 24, 12) == (Fraction(1, 2), Fraction(1, 2))
    assert compute_b((Fraction(1),), 6, 6) == (Fraction(1),)
    assert compute_b((Fraction(1, 4), Fraction(3, 4)), 0, 0) == (Fraction(1, 4), Fraction(3, 4))


def test_b_negative_mass():
    with pytest.raises(NegativeMassError):
        compute_b((Fraction(1, 3), Fraction(2, 3)), 20, 12)
    with pytest.raises(NegativeMassError):
        compute_b((Fraction(1, 3), Fraction(2, 3)), 12, 12)


@given(
    st.lists(st.integers(1, 40), min_size=2, max_size=5),
    st.integers(2, 6),
    st.integers(1, 3000),
)
def test_b_is_a_probability_vector_inside_the_window(weights, N, R):
    total = sum(weights)
    m = [Fraction(w, total) for w in weights]
    t, delta = len(m), compute_delta(N)
    gamma = compute_gamma(R, N, t, delta, min(m))
    b = compute_b(m, gamma, delta)
    assert sum(b) == 1 and all(x >= 0 for x in b)
    # Solving back: cell j gets gamma from block j and delta from the others.
    for j in range(t):
        assert b[j] * gamma + (1 - b[j]) * delta == m[j] * (gamma + (t - 1) * delta)


# -- staircases ------------------------------------------------------------


def test_bottom_staircase_n4():
    assert bottom_staircase(4) == ((0, 4, 8, 12), (0, 4, 8, 13), (0, 4, 9, 14), (0, 5, 10, 15))


def test_top_staircase_n4():
    R = 1540
    assert top_staircase(4, R) == (
        (R - 15, R - 10, R - 5),
        (R - 14, R - 9, R - 4),
        (R - 13, R - 8, R - 4),
        (R - 12, R - 8, R - 4),
    )


@pytest.mark.parametrize("N, expected", [(2, ((0, 2), (0, 3))), (3, ((0, 3, 6), (0, 3, 7), (0, 4, 8)))])
def test_bottom_staircase_small(N, expected):
    assert bottom_staircase(N) == expected


@pytest.mark.parametrize("N", range(1, 8))
def test_staircases_hand_off_in_cyclic_order(N):
    R = 2 * N * N + N + 7
    bottom, top = bottom_staircase(N), top_staircase(N, R)
    for j, levels in enumerate(bottom, start=1):
        assert all(b - a in (N, N + 1) for a, b in zip(levels, levels[1:]))
        # Next rung after the staircase is N^2 + j - 1: the middle cycles 1..N.
        assert levels[-1] + N == N * N + j - 1
    for j, levels in enumerate(top, start=1):
        assert all(b - a in (N, N + 1) for a, b in zip(levels, levels[1:]))
        if N > 1:
            assert levels[0] == R - N * N + j
            assert R - levels[-1] in (N, N + 1)


def test_top_staircase_too_short():
    assert top_staircase(4, 36)
    with pytest.raises(TooShortError):
        top_staircase(4, 35)


# -- greedy middle and A -----------------------------------------------------


def test_alternating_n4_net_skips(alternating_1540):
    col = alternating_1540.columns[0]
    split = split_column(col, 4, (Fraction(1, 2), Fraction(1, 2)))
    params = ConstructionParams(4, 769, 12, {"c0": 24}, {"c0": split.b})
    s1, s2 = select_column(split, params)
    assert s1.net_skips == {1: 24, 2: 12}
    assert s2.net_skips == {1: 12, 2: 24}
    assert len(s1.skips) == 24 + 12 - 3
    assert all(b - a > 4 for a, b in zip(s1.skips, s1.skips[1:]))
    assert sum(map(len, s1.b_levels)) == 1540 - 36


def test_quota_unmet_on_short_column():
    col = Column("c0", Fraction(1, 40), [1, 2] * 20)
    with pytest.raises(QuotaUnmetError):
        select_block(col, 2, 2, 1, 2, 30)


def test_select_A_counts_and_disjointness(alternating_1540):
    col = alternating_1540.columns[0]
    split = split_column(col, 4, (Fraction(1, 2), Fraction(1, 2)))
    sel = select_block(col, 2, 4, 1, 12, 24)
    a = select_A(split, 1, sel.b_levels, 24, 12)
    assert a == select_A(split, 1, sel.b_levels, 24, 12)
    per_cell = Counter(col.labels[l] for levels in a for l in levels)
    assert per_cell == {1: 24, 2: 12}
    for b_lv, a_lv in zip(sel.b_levels, a):
        assert not set(b_lv) & set(a_lv)


# -- whole construction ----------------------------------------------------


def test_n1_selects_everything():
    s = build_cyclic([1, 2, 2, 1, 2])
    r = build_tower(s, 1)
    assert r.params.delta == 0 and r.params.gamma == {"c0": 0}
    assert r.params.b["c0"] == tuple(cell_measures(s))
    assert r.measures.B == 1 and r.measures.E == 0 and r.measures.B_N1 == 0


def test_single_cell_partition():
    r = build_tower(build_cyclic([1] * 99), 3)
    assert r.params.gamma == {"c0": 6} and r.params.b == {"c0": (Fraction(1),)}
    assert r.measures.B * 3 + r.measures.B_N1 == 1


def test_not_rich_rotation():
    s = build_rotation(RotationSpec(2, 5, (0, Fraction(3, 5))))
    with pytest.raises(NotRichError):
        build_tower(s, 2)


def test_too_short_column():
    s = build_cyclic([1, 2] * 10)
    with pytest.raises(NotRichError):
        build_tower(s, 4)
    with pytest.raises(TooShortError):
        build_tower(s, 4, allow_small_M=True)


def test_invalid_system_is_rejected(two_columns):
    import dataclasses

    col = dataclasses.replace(two_columns.columns[0], width=Fraction(1, 3))
    broken = dataclasses.replace(two_columns, columns=(col, two_columns.columns[1]))
    with pytest.raises(ValidationError):
        build_tower(broken, 2)


@settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.filter_too_much])
@given(st.integers(2, 3), st.lists(st.integers(1, 3), min_size=90, max_size=200), st.integers(2, 3))
def test_successful_builds_meet_every_target(N, raw, t):
    labels = [1 + (x - 1) % t for x in raw]
    assume(len(set(labels)) == t)
    s = build_cyclic(labels)
    try:
        r = build_tower(s, N, allow_small_M=True)
    except AlpernError:
        assume(False)
    m = cell_measures(s)
    gamma, delta = r.params.gamma["c0"], r.params.delta
    assert gamma >= ceil(Fraction(delta) / min(m))
    for sel in r.selections["c0"]:
        target = {j: (gamma if j == sel.block else delta) for j in range(1, t + 1)}
        assert sel.net_skips == target
        assert Counter(labels[l] for levels in sel.a_levels for l in levels) == Counter(
            {j: n for j, n in target.items() if n}
        )
    meas = r.measures
    assert meas.A_union_B == Fraction(1, N)
    assert meas.B_N * N + meas.B_N1 * (N + 1) == 1
    for j in range(t):
        assert meas.B_cap[j] == meas.B * m[j]
        assert meas.A_cap[j] == meas.A * m[j]
