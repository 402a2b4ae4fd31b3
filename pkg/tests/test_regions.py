import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spectralsi.regions import ball, complement, halfspace, intersection, interval, parse_region, union


def test_ball_membership_is_strict():
    b = ball(1.0, 2)
    assert b([0.6, 0.79])
    assert not b([0.6, 0.8])
    assert not ball(1.0)(1.0)


def test_interval_half_open():
    i = interval(-0.5, 0.5)
    assert i(-0.5) and not i(0.5)
    assert i.measure() == 1.0


def test_union_and_intersection_measures():
    u = union(interval(-0.5, -0.2857), interval(0.2857, 0.5))
    assert math.isclose(u.measure(), 2 * (0.5 - 0.2857))
    cut = intersection(ball(1.0), interval(0, math.inf))
    assert cut.measure() == 1.0
    assert cut.pieces == (((0.0,), (1.0,)),)


def test_halfspace_and_complement():
    h = halfspace([1.0, 1.0], 0.0)
    assert h([1.0, 0.0]) and not h([-1.0, 0.5])
    c = complement(interval(0, math.inf))
    assert c(-1.0) and not c(0.0)


@pytest.mark.parametrize(
    "text",
    [
        "all",
        "empty",
        "ball(2)",
        "interval(0, inf)",
        "interval(-inf, -0.25)",
        "union(interval(-0.5, -0.2857), interval(0.2857, 0.5))",
        "intersection(ball(1), complement(interval(-0.1, 0.1)))",
    ],
)
def test_labels_round_trip(text):
    r = parse_region(text)
    again = parse_region(r.label)
    assert again.label == r.label
    x = np.linspace(-3, 3, 601)
    assert np.array_equal(r(x), again(x))


def test_two_dimensional_parse():
    r = parse_region("intersection(box([-1, -1], [1, 1]), halfspace([0, 1], 0))", dim=2)
    assert r([0.0, 0.5]) and not r([0.0, -0.5]) and not r([2.0, 0.5])


def test_support_needs_resolver():
    with pytest.raises(ValueError):
        parse_region("support(haar)")


def test_support_via_registry():
    from spectralsi.registry import resolver

    r = parse_region("support(hardy-shannon)", resolver=resolver)
    assert r(0.25) and not r(-0.25) and not r(0.75)


def test_bad_expressions():
    for text in ("ball(", "circle(1)", "ball(1) extra"):
        with pytest.raises(ValueError):
            parse_region(text)


spans = st.tuples(st.floats(-5, 5), st.floats(0.01, 3)).map(lambda t: (t[0], t[0] + t[1]))


@given(st.lists(spans, min_size=1, max_size=5))
def test_union_measure_matches_fine_grid(parts):
    u = union(*[interval(a, b) for a, b in parts])
    grid = np.linspace(-6, 9, 150_001)
    h = grid[1] - grid[0]
    approx = np.sum(u(grid)) * h
    assert abs(approx - u.measure()) < 4 * len(parts) * h


@given(spans, spans)
def test_intersection_pieces_agree_with_membership(p, q):
    r = intersection(interval(*p), interval(*q))
    exact = max(0.0, min(p[1], q[1]) - max(p[0], q[0]))
    assert math.isclose(r.measure(), exact, abs_tol=1e-12)
