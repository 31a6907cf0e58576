from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from btembed.errors import IndistinguishableEnds
from btembed.padic import from_fraction
from btembed.tree import (
    INFINITY,
    Ball,
    Walk,
    ball_distance,
    ball_lattice_roundtrip,
    canonical_ball,
    end_at,
    enumerate_region,
    geodesic,
    hull_of,
    lattice_from_rows,
    lattice_to_ball,
    neighbors,
    to_dot_graph,
)


def B(p, z, n):
    return Ball(p, Fraction(z), n)


class TestCanonicalBall:
    def test_reduces_center(self):
        assert canonical_ball(2, 5, 2) == B(2, 1, 2)
        assert canonical_ball(2, 5, 2).center == 1

    def test_root(self):
        assert canonical_ball(2, 0, 0) == B(2, 0, 0)

    def test_fractional_center(self):
        ball = canonical_ball(3, Fraction(1, 3), -1)
        assert ball == B(3, 0, -1)
        assert ball.contains_point(Fraction(1, 3))

    def test_from_scalar(self):
        assert canonical_ball(3, from_fraction(3, 29, 6), 2) == B(3, 2, 2)

    def test_label(self):
        assert B(2, Fraction(1, 4), -1).label == "B_1/4^[-1]"


class TestDistance:
    def test_nested(self):
        assert ball_distance(B(2, 0, 0), B(2, 0, 2)) == 2

    def test_siblings(self):
        assert ball_distance(B(2, 0, 2), B(2, 1, 2)) == 4

    def test_self(self):
        assert ball_distance(B(3, 2, 1), B(3, 2, 1)) == 0


class TestNeighbors:
    def test_root_p2(self):
        assert set(neighbors(B(2, 0, 0))) == {B(2, 0, -1), B(2, 0, 1), B(2, 1, 1)}

    def test_degree_p3(self):
        assert len(set(neighbors(B(3, 5, 2)))) == 4

    def test_child_p2(self):
        assert set(neighbors(B(2, 1, 1))) == {B(2, 0, 0), B(2, 1, 2), B(2, 3, 2)}

    @pytest.mark.parametrize("p", [2, 3, 5])
    def test_degree_and_symmetry(self, p):
        for v in enumerate_region(B(p, 0, 0), 2):
            ns = neighbors(v)
            assert len(set(ns)) == p + 1
            assert all(ball_distance(v, w) == 1 and v in neighbors(w) for w in ns)


class TestRegion:
    def test_radius_zero(self):
        assert enumerate_region(B(2, 0, 0), 0) == [B(2, 0, 0)]

    def test_small(self):
        assert len(enumerate_region(B(2, 0, 0), 1)) == 4
        assert len(enumerate_region(B(3, 0, 0), 2)) == 17

    @pytest.mark.parametrize("p,R", [(2, 3), (3, 3), (5, 2)])
    def test_cardinality(self, p, R):
        region = enumerate_region(B(p, 0, 0), R)
        assert len(set(region)) == 1 + (p + 1) * (p**R - 1) // (p - 1)

    def test_negative_radius(self):
        with pytest.raises(ValueError):
            enumerate_region(B(2, 0, 0), -1)


class TestLattices:
    def test_roundtrip_root(self):
        assert lattice_to_ball(ball_lattice_roundtrip(B(2, 0, 0))) == B(2, 0, 0)

    def test_homothety(self):
        assert lattice_to_ball(lattice_from_rows(2, [[2, 0], [0, 2]])) == B(2, 0, 0)

    def test_columns(self):
        # columns (1, 1) and (0, 4)
        assert lattice_to_ball(lattice_from_rows(2, [[1, 0], [1, 4]])) == B(2, 1, 2)

    @pytest.mark.parametrize("p", [2, 3])
    def test_roundtrip_region(self, p):
        for v in enumerate_region(B(p, 0, 0), 3):
            assert lattice_to_ball(ball_lattice_roundtrip(v)) == v


class TestGeodesic:
    def test_nested_chain(self):
        assert list(geodesic(B(2, 0, 0), B(2, 0, 3))) == [B(2, 0, k) for k in range(4)]

    def test_through_parent(self):
        assert list(geodesic(B(2, 1, 1), B(2, 0, 2))) == [B(2, 1, 1), B(2, 0, 0), B(2, 0, 1), B(2, 0, 2)]

    def test_ends(self):
        w = geodesic(INFINITY, end_at(2, 0, 16), extent=2)
        assert all(v.center == 0 for v in w)
        ns = [v.n for v in w]
        assert ns == sorted(ns) and ns[0] < 0 < ns[-1]

    def test_same_end(self):
        with pytest.raises(IndistinguishableEnds):
            geodesic(end_at(2, 3, 8), end_at(2, 3, 8))

    @pytest.mark.parametrize("p", [2, 3])
    def test_length_is_distance(self, p):
        region = enumerate_region(B(p, 0, 0), 3)
        for a in region[:: max(1, len(region) // 12)]:
            for b in region:
                if a != b:
                    assert geodesic(a, b).length == ball_distance(a, b)


class TestWalk:
    def test_rejects_gap(self):
        with pytest.raises(ValueError):
            Walk((B(2, 0, 0), B(2, 0, 2)))

    def test_rejects_backtrack(self):
        with pytest.raises(ValueError):
            Walk((B(2, 0, 0), B(2, 0, 1), B(2, 0, 0)))

    def test_reverse(self):
        w = Walk((B(2, 0, 0), B(2, 0, 1)))
        assert w.reversed().length == 1 and w.reversed()[0] == B(2, 0, 1)


class TestHull:
    def test_triple_center(self):
        h = hull_of([B(2, 0, 1), B(2, 1, 1), B(2, 0, -1)])
        assert h.center == B(2, 0, 0)
        assert h.vertices == {B(2, 0, 1), B(2, 1, 1), B(2, 0, -1), B(2, 0, 0)}

    def test_repeated(self):
        with pytest.raises(ValueError):
            hull_of([B(2, 0, 0), B(2, 0, 0)])

    def test_ends_and_ball(self):
        h = hull_of([INFINITY, end_at(2, 0, 16), B(2, 1, 1)])
        assert h.center == B(2, 0, 0)

    def test_indistinguishable_ends(self):
        with pytest.raises(IndistinguishableEnds):
            hull_of([end_at(2, 1, 4), end_at(2, 17, 4), B(2, 0, 0)])

    def test_quartet_shape(self):
        h = hull_of([B(2, 0, -2), B(2, 0, 2), B(2, 1, 3), B(2, 3, 3)])
        s = h.shape
        assert (s.r, s.s, s.t, s.u, s.l) == (2, 2, 2, 2, 1)
        assert s.m == 3 and s.u_is_min

    def test_leaves_are_defining(self):
        items = [B(3, 0, 2), B(3, 1, 1), B(3, 0, -2), B(3, 5, 2)]
        h = hull_of(items)
        for v in h.vertices:
            degree = sum(1 for w in neighbors(v) if w in h.vertices)
            assert degree > 1 or v in items


def test_dot_graph():
    text = to_dot_graph(enumerate_region(B(2, 0, 0), 1), {B(2, 0, 0): "box"}, directed=True)
    assert text.startswith("digraph tree {")
    assert text.count("->") == 3
    assert 'label="B_0^[0]", shape=box' in text


# --- properties ---------------------------------------------------------------


def balls(p):
    return st.builds(lambda z, n: B(p, Fraction(z, p**3), n), st.integers(-500, 500), st.integers(-3, 4))


@given(st.data(), st.sampled_from([2, 3]))
def test_tree_metric(data, p):
    a, b, c, d = (data.draw(balls(p)) for _ in range(4))
    dist = ball_distance
    assert dist(a, b) == dist(b, a)
    assert dist(a, c) <= dist(a, b) + dist(b, c)
    # four-point condition: the two largest pair sums agree
    sums = sorted([dist(a, b) + dist(c, d), dist(a, c) + dist(b, d), dist(a, d) + dist(b, c)])
    assert sums[1] == sums[2]


@given(st.data(), st.sampled_from([2, 3]))
def test_median_lies_on_all_geodesics(data, p):
    a, b, c = (data.draw(balls(p)) for _ in range(3))
    if len({a, b, c}) < 3:
        return
    U = hull_of([a, b, c]).center
    assert ball_distance(a, U) + ball_distance(U, b) == ball_distance(a, b)
    assert ball_distance(a, U) + ball_distance(U, c) == ball_distance(a, c)
