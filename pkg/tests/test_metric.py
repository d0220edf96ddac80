import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from greedynet.metric import (
    EUCLIDEAN,
    ONE_TWO,
    MetricError,
    PartialDistanceSpec,
    StructureError,
    WeightedTree,
    metric_closure,
    metric_from_json,
    metric_from_matrix,
    metric_from_one_two,
    metric_from_points,
    metric_from_tree,
    to_exact,
    validate_metric,
)

import oracles


def test_two_point_metric_ok():
    assert validate_metric([[0, 1], [1, 0]]).ok


def test_triangle_violation_reported():
    rep = validate_metric([[0, 1, 3], [1, 0, 1], [3, 1, 0]])
    assert not rep.ok
    assert (0, 2, 1) in rep.violations


def test_no_ge_matrix_is_metric():
    from greedynet.scenarios import no_ge_instance

    assert validate_metric(no_ge_instance().metric).ok


@pytest.mark.parametrize("bad", [[[0, 1], [1, 0], [1, 1]], [[0, -1], [-1, 0]]])
def test_malformed_matrices(bad):
    with pytest.raises(StructureError):
        validate_metric(bad)


def test_asymmetric_matrix_rejected():
    assert not validate_metric([[0, 1], [2, 0]]).ok
    with pytest.raises(MetricError):
        metric_from_matrix([[0, 1], [2, 0]])


def test_one_two_examples():
    m = metric_from_one_two(3, [(0, 1)])
    assert (m.d(0, 1), m.d(0, 2), m.d(1, 2)) == (1, 2, 2)
    assert m.kind == ONE_TWO
    assert metric_from_one_two(2, []).d(0, 1) == 2
    p = metric_from_one_two(4, [(0, 1), (1, 2), (2, 3)])
    assert p.d(0, 2) == p.d(0, 3) == p.d(1, 3) == 2


def test_one_two_rejects_bad_edges():
    with pytest.raises(StructureError):
        metric_from_one_two(3, [(0, 0)])
    with pytest.raises(StructureError):
        metric_from_one_two(3, [(0, 3)])


def test_tree_examples():
    assert metric_from_tree([(0, 1, 2), (1, 2, 3)]).d(0, 2) == 5
    star = metric_from_tree([(0, i, 1) for i in range(1, 4)])
    assert all(star.d(i, j) == 2 for i in range(1, 4) for j in range(1, 4) if i != j)
    assert metric_from_tree([(0, 1, 7)]).d(0, 1) == 7


def test_tree_must_be_a_tree():
    with pytest.raises(StructureError):
        WeightedTree.from_edges([(0, 1, 1), (1, 2, 1), (2, 0, 1)])
    with pytest.raises(StructureError):
        WeightedTree.from_edges([(0, 1, 0)])


def test_points_examples():
    assert metric_from_points([(0, 0), (3, 4)]).d(0, 1) == 5
    assert metric_from_points([(0, 0), (1, 0), (0, 1)]).d(1, 2) == pytest.approx(math.sqrt(2), abs=1e-15)
    m = metric_from_points([(0, 0), (1, 1), (3, 1), (5, 1), (6, 0)])
    assert m.kind == EUCLIDEAN
    assert m.d(0, 1) == pytest.approx(math.sqrt(2), abs=1e-12)
    assert m.d(1, 2) == pytest.approx(2, abs=1e-12)
    assert m.d(2, 3) == pytest.approx(2, abs=1e-12)
    assert m.d(3, 4) == pytest.approx(math.sqrt(2), abs=1e-12)


def test_points_coincident_rejected_collinear_accepted():
    with pytest.raises(StructureError):
        metric_from_points([(0, 0), (1, 0), (0, 0)])
    assert metric_from_points([(0, 0), (1, 0), (2, 0)]).d(0, 2) == 2


def test_closure_examples():
    m = metric_closure(PartialDistanceSpec(3, ((0, 1, 1), (1, 2, 1))))
    assert m.d(0, 2) == 2
    with pytest.raises(StructureError):
        metric_closure(PartialDistanceSpec(3, ((0, 1, 5),)))


def test_closure_reports_inconsistent_entry():
    with pytest.raises(MetricError):
        metric_closure(PartialDistanceSpec(3, ((0, 1, 1), (1, 2, 1), (0, 2, 5))))


def test_closure_sat_value():
    from greedynet.scenarios import EXAMPLE_FORMULA, sat_reduction

    sc = sat_reduction(EXAMPLE_FORMULA)
    assert sc.metric.d(sc.node("y"), sc.node("d")) == Fraction("3.26")


def test_to_exact_parses():
    assert to_exact("3/5") == Fraction(3, 5)
    assert to_exact(0.6) == Fraction(3, 5)
    assert to_exact(2) == 2
    with pytest.raises(StructureError):
        to_exact("x")
    with pytest.raises(StructureError):
        to_exact(float("inf"))


def test_json_round_trip():
    for m in [metric_from_one_two(4, [(0, 1), (2, 3)]), metric_from_tree([(0, 1, "3/2"), (1, 2, 1)]),
              metric_from_points([(0, 0), (1, 2), (3, 1)]), metric_from_matrix([[0, 1, 2], [1, 0, 1], [2, 1, 0]])]:
        m2 = metric_from_json(m.to_json())
        assert m2.kind == m.kind
        assert m2.dist == m.dist


@st.composite
def sparse_specs(draw):
    n = draw(st.integers(2, 8))
    # a random spanning tree keeps the partial distances connected, extra entries are long enough to stay consistent
    entries = []
    for i in range(1, n):
        entries.append((draw(st.integers(0, i - 1)), i, Fraction(draw(st.integers(1, 20)), draw(st.integers(1, 4)))))
    extra = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=n))
    return n, entries, extra


@given(sparse_specs())
@settings(max_examples=80, deadline=None)
def test_closure_is_always_a_metric(spec):
    n, entries, extra = spec
    base = metric_closure(PartialDistanceSpec(n, tuple(entries)))
    assert validate_metric(base).ok
    # extra entries at or above the closure value never conflict except at equality with shorter routes
    more = [(a, b, base.d(a, b)) for a, b in extra if a != b]
    m = metric_closure(PartialDistanceSpec(n, tuple(entries + more)))
    assert validate_metric(m).ok
    assert m.dist == base.dist


@given(st.integers(2, 9), st.integers(0, 2**32))
@settings(max_examples=40, deadline=None)
def test_tree_metric_matches_path_sums(n, seed):
    rnd = random.Random(seed)
    t, m = oracles.random_tree_metric(rnd, n)
    adj = {i: [] for i in range(n)}
    for a, b, w in t.edges:
        adj[a].append((b, w))
        adj[b].append((a, w))

    def path_sum(a, b, prev=-1):
        if a == b:
            return Fraction(0)
        for y, w in adj[a]:
            if y != prev:
                r = path_sum(y, b, a)
                if r is not None:
                    return r + w
        return None

    for a in range(n):
        for b in range(n):
            assert m.d(a, b) == path_sum(a, b)


@given(st.lists(st.tuples(st.floats(-50, 50), st.floats(-50, 50)), min_size=2, max_size=12, unique=True))
@settings(max_examples=40, deadline=None)
def test_euclidean_entries_match_coordinates(pts):
    try:
        m = metric_from_points(pts)
    except StructureError:
        return
    for i in range(m.n):
        for j in range(m.n):
            assert abs(m.d(i, j) - math.dist(m.points[i], m.points[j])) <= 1e-12


@given(st.integers(2, 10), st.integers(0, 2**32))
@settings(max_examples=30, deadline=None)
def test_one_two_entries(n, seed):
    rnd = random.Random(seed)
    m = oracles.random_one_two(rnd, n)
    assert all(m.d(a, b) in (1, 2) for a in range(n) for b in range(n) if a != b)
    assert validate_metric(m).ok


def test_order_is_sorted_by_distance():
    m = oracles.random_one_two(random.Random(3), 7)
    for v in range(m.n):
        ds = [m.d(x, v) for x in m.order[v]]
        assert ds == sorted(ds)
