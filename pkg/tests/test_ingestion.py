from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from alpern.errors import BreakpointOffGridError, FormatSyntaxError, ValidationError, ZeroCellError
from alpern.ingestion import (
    RotationSpec,
    build_cyclic,
    build_rotation,
    format_labels,
    parse_labels,
    parse_system,
    serialize_system,
)
from alpern.model import cell_measures, occurrences

from conftest import two_column_system


def orbit_labels(p, q, breaks):
    """Label sequence straight from the orbit of 0, compared as rationals."""
    out = []
    for r in range(q):
        x = Fraction(r * p, q) % 1
        out.append(max(k for k, b in enumerate(breaks, start=1) if b <= x))
    return out


def test_build_cyclic():
    s = build_cyclic([1, 2, 1, 2])
    (col,) = s.columns
    assert col.width == Fraction(1, 4)
    assert tuple(cell_measures(s)) == (Fraction(1, 2), Fraction(1, 2))
    assert tuple(cell_measures(build_cyclic([1, 1, 2]))) == (Fraction(2, 3), Fraction(1, 3))


def test_build_cyclic_alternating_1540():
    labels = [1, 2] * 770
    s = build_cyclic(labels)
    assert s.columns[0].width == Fraction(1, 1540)
    counts = [occurrences(s.columns[0], j) for j in (1, 2)]
    assert counts == [770, 770]
    assert cell_measures(s) == [Fraction(c, 1540) for c in counts]


def test_build_cyclic_missing_cell():
    with pytest.raises(ZeroCellError):
        build_cyclic([1, 1, 1], 2)


def test_rotation_quarter():
    s = build_rotation(RotationSpec(1, 4, (0, Fraction(1, 2))))
    assert s.columns[0].labels == (1, 1, 2, 2)


def test_rotation_two_fifths():
    breaks = (Fraction(0), Fraction(3, 5))
    s = build_rotation(RotationSpec(2, 5, breaks))
    assert list(s.columns[0].labels) == orbit_labels(2, 5, breaks) == [1, 1, 2, 1, 2]


def test_rotation_off_grid():
    with pytest.raises(BreakpointOffGridError):
        build_rotation(RotationSpec(1, 4, (0, Fraction(1, 3))))


@given(st.integers(2, 60).flatmap(lambda q: st.tuples(
    st.just(q),
    st.integers(1, q - 1).filter(lambda p: __import__("math").gcd(p, q) == 1),
    st.sets(st.integers(1, q - 1), max_size=4),
)))
def test_rotation_matches_orbit_and_interval_lengths(args):
    q, p, cuts = args
    breaks = (Fraction(0),) + tuple(Fraction(c, q) for c in sorted(cuts))
    s = build_rotation(RotationSpec(p, q, breaks))
    assert list(s.columns[0].labels) == orbit_labels(p, q, breaks)
    ends = list(breaks[1:]) + [Fraction(1)]
    assert cell_measures(s) == [e - b for b, e in zip(breaks, ends)]


def test_parse_and_serialize_round_trip():
    s = build_cyclic([1, 2, 1, 2])
    text = serialize_system(s)
    assert text == "alpern-system v1\ncells 2 P1 P2\ncolumn c0 1/4 1212\nedge c0 0 c0 1/4\n"
    assert parse_system(text) == s


def test_round_trip_multi_column(two_columns):
    text = serialize_system(two_columns)
    assert parse_system(text) == two_columns
    assert serialize_system(parse_system(text)) == text


def test_rle_and_comments():
    text = """# a comment
alpern-system v1
cells 2 left right   # names
column c0 1/1000 1x500,2x500
edge c0 0 c0 1/1000
"""
    s = parse_system(text)
    assert s.columns[0].labels == (1,) * 500 + (2,) * 500
    assert s.partition.names == ("left", "right")


def test_wide_partitions_use_comma_form():
    labels = [1, 1, 1, 2, 10, 11, 11, 3, 4, 5, 6, 7, 8, 9, 12]
    s = build_cyclic(labels, 12)
    text = serialize_system(s)
    assert "1x3,2,10,11,11,3" in text
    assert parse_system(text) == s
    assert parse_labels("12", 12) == (12,)
    assert parse_labels("12", 2) == (1, 2)
    assert format_labels((1, 2), 2) == "12"


def test_mass_error_is_a_validation_error():
    text = "alpern-system v1\ncells 2 P1 P2\ncolumn c0 1/3 1212\nedge c0 0 c0 1/3\n"
    with pytest.raises(ValidationError) as err:
        parse_system(text)
    assert "total mass 4/3 ≠ 1" in err.value.violations


@pytest.mark.parametrize(
    "text, lineno",
    [
        ("nope\n", 1),
        ("alpern-system v1\ncells 2 P1\n", 2),
        ("alpern-system v1\ncells 2 P1 P2\ncolumn c0 1/x 12\n", 3),
        ("alpern-system v1\ncells 2 P1 P2\n\ncolumn c0 1/2 1;2\n", 4),
        ("alpern-system v1\ncells 2 P1 P2\ncolumn c0 1/2 12\nedge c0 0 c0\n", 4),
        ("alpern-system v1\ncolumn c0 1/2 12\n", 2),
        ("alpern-system v1\ncells 2 P1 P2\nwidget\n", 3),
    ],
)
def test_syntax_errors_carry_line_numbers(text, lineno):
    with pytest.raises(FormatSyntaxError) as err:
        parse_system(text)
    assert err.value.lineno == lineno
    assert f"line {lineno}" in str(err.value)


@settings(max_examples=60)
@given(
    st.lists(st.integers(1, 3), min_size=1, max_size=30),
    st.lists(st.integers(1, 3), min_size=1, max_size=30),
)
def test_round_trip_property(labels0, labels1):
    s = two_column_system([1, 2, 3] + labels0, [3, 2, 1] + labels1, t=3)
    assert parse_system(serialize_system(s)) == s
