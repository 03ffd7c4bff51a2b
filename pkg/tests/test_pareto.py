import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracle import brute_force_fronts
from modprom.pareto import ObjectivePoint, crowding_distance, dominates, non_dominated_sort, truncate

coord = st.floats(-1, 1, allow_nan=False).map(lambda x: round(x, 2))
point_lists = st.lists(st.tuples(coord, coord), min_size=1, max_size=30)


def test_dominates_examples():
    assert dominates((1.0, 0.9), (0.9, 0.8))
    assert not dominates((1.0, 0.8), (0.9, 0.9)) and not dominates((0.9, 0.9), (1.0, 0.8))
    assert not dominates((0.5, 0.5), (0.5, 0.5))
    assert dominates(ObjectivePoint(1.0, 0.5, owner=3), ObjectivePoint(1.0, 0.4))


@given(st.tuples(coord, coord), st.tuples(coord, coord), st.tuples(coord, coord))
def test_dominance_is_a_strict_order(a, b, c):
    assert not dominates(a, a)
    assert not (dominates(a, b) and dominates(b, a))
    if dominates(a, b) and dominates(b, c):
        assert dominates(a, c)


def test_reference_front_is_mutually_non_dominating():
    pts = [(0.625, 0.961), (0.813, 0.9419), (0.965, 0.911), (1, 0.79)]
    assert non_dominated_sort(pts).fronts == [[0, 1, 2, 3]]


def test_chain_gives_singleton_fronts():
    assert non_dominated_sort([(1, 1), (0.5, 0.5), (0.2, 0.2)]).fronts == [[0], [1], [2]]


@given(point_lists)
def test_sort_matches_brute_force(pts):
    part = non_dominated_sort(pts)
    assert [set(f) for f in part.fronts] == brute_force_fronts(pts)
    for f in part.fronts:
        assert not any(dominates(pts[a], pts[b]) for a in f for b in f)


@given(point_lists)
def test_monotone_rescaling_keeps_the_partition(pts):
    shifted = [(a * 2 + 3, b) for a, b in pts]
    assert non_dominated_sort(shifted).fronts == non_dominated_sort(pts).fronts


def test_crowding_two_points_infinite():
    assert crowding_distance([(1, 0), (0, 1)]) == [math.inf, math.inf]


def test_crowding_collinear_middle_is_two():
    d = crowding_distance([(0.0, 1.0), (0.5, 0.5), (1.0, 0.0)])
    assert d[1] == pytest.approx(2.0)
    assert math.isinf(d[0]) and math.isinf(d[2])


def test_crowding_constant_objective_contributes_nothing():
    # f_c spacing 0, 0.1, 0.5, 1.0; f_g constant
    d = crowding_distance([(0.0, 0.7), (0.1, 0.7), (0.5, 0.7), (1.0, 0.7)])
    assert d[1] == pytest.approx(0.5) and d[2] == pytest.approx(0.9)
    assert sum(math.isinf(x) for x in d) == 2


def test_truncate_whole_first_front():
    pts = [(1, 0), (0, 1), (0.5, 0.5), (0.45, 0.1), (0.3, 0.3), (0.2, 0.35), (0.1, 0.45)]
    part = non_dominated_sort(pts)
    assert [len(f) for f in part.fronts] == [3, 4]
    assert sorted(truncate(part, pts, 3)) == [0, 1, 2]


def test_truncate_partial_front_keeps_largest_distances():
    pts = [(1.0, 0.9), (0.9, 1.0),                           # front 1
           (0.0, 0.8), (0.1, 0.7), (0.75, 0.05), (0.8, 0.0)]  # front 2
    part = non_dominated_sort(pts)
    assert [len(f) for f in part.fronts] == [2, 4]
    # oracle: recompute the front-2 crowding distances by hand and drop the smallest twice
    keep = truncate(part, pts, 4)
    assert sorted(keep) == [0, 1, 2, 5]


def test_truncate_identity():
    pts = [(0.1, 0.2), (0.3, 0.1), (0.0, 0.0)]
    assert sorted(truncate(non_dominated_sort(pts), pts, 3)) == [0, 1, 2]


@given(point_lists, st.data())
def test_truncate_size_and_first_front(pts, data):
    part = non_dominated_sort(pts)
    N = data.draw(st.integers(1, len(pts)))
    keep = truncate(part, pts, N)
    assert len(keep) == N == len(set(keep))
    if len(part.fronts[0]) <= N:
        assert set(part.fronts[0]) <= set(keep)


def test_random_populations_against_numpy_oracle():
    rng = np.random.default_rng(11)
    for _ in range(50):
        pts = [tuple(p) for p in rng.random((rng.integers(1, 40), 2)).round(1)]
        assert [set(f) for f in non_dominated_sort(pts).fronts] == brute_force_fronts(pts)
