import json
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from bargain.core import (
    Collection,
    CollectionError,
    Point,
    check_allocation,
    dominates,
    expected_outcome,
    mask_of,
    parse_collection,
    quadrant,
    serialize_collection,
    to_rational,
    weighted_avg,
)
from conftest import EXAMPLE1, coll, grid_collections, grid_point


class TestRational:
    def test_decimal_and_fraction_strings(self):
        assert to_rational("0.99") == F(99, 100)
        assert to_rational("2/4") == F(1, 2)
        assert to_rational(3) == F(3)

    @pytest.mark.parametrize("bad", [0.5, True, "x", "1/0", None])
    def test_rejects(self, bad):
        with pytest.raises((ValueError, TypeError, ZeroDivisionError)):
            to_rational(bad)

    @given(st.integers(-50, 50), st.integers(1, 50), st.integers(-50, 50), st.integers(1, 50))
    def test_canonical_form_survives_arithmetic(self, a, b, c, d):
        x, y = F(a, b), F(c, d)
        for r in (x + y, x - y, x * y):
            assert r.denominator > 0
            assert to_rational(f"{r.numerator}/{r.denominator}") == r


class TestCollection:
    def test_validation(self):
        with pytest.raises(CollectionError):
            Collection(())
        with pytest.raises(CollectionError):
            coll(("3/2", 0))
        with pytest.raises(CollectionError):
            coll((0, 0), weights=[F(0)])

    def test_duplicate_and_symmetry(self):
        A = coll((1, 0), (0, 1))
        assert A.is_symmetric()
        assert A.duplicate(1).points == (Point(1, 0), Point(0, 1), Point(0, 1))
        assert not A.duplicate(1).is_symmetric()
        assert EXAMPLE1.is_symmetric()

    def test_weighted_symmetry_needs_equal_weights(self):
        assert not coll((1, 0), (0, 1), weights=[F(3), F(1)]).is_symmetric()


class TestAverages:
    def test_midpoint(self):
        assert weighted_avg(coll((0, 0), (1, 1)), 0b11) == Point(F(1, 2), F(1, 2))

    def test_example2(self):
        A = coll((1, 1), ("98/100", 0), (0, "98/100"))
        assert weighted_avg(A, 0b111) == Point(F(33, 50), F(33, 50))

    def test_weighted(self):
        A = coll((1, 0), (0, 1), weights=[F(3), F(1)])
        assert weighted_avg(A, 0b11) == Point(F(3, 4), F(1, 4))

    def test_empty_set(self):
        with pytest.raises(ValueError, match="empty averaging set"):
            weighted_avg(coll((0, 0)), 0)


class TestQuadrants:
    def test_strict_lower(self):
        A = coll((1, 0), (0, 1), ("1/2", "1/2"))
        assert quadrant(A, Point(F(3, 4), F(3, 4)), "strict_lower") == 0b100

    def test_fixed_point_has_empty_strict_lower(self):
        A = coll((1, 1), ("98/100", 0), (0, "98/100"))
        assert quadrant(A, Point(F(33, 50), F(33, 50)), "strict_lower") == 0

    def test_weak_lower(self):
        assert quadrant(coll((1, 1), (0, 0)), Point(F(1, 2), F(1, 2)), "weak_lower") == 0b10

    def test_operator_pairs(self):
        A = coll((1, 0), (0, 1), ("1/2", "1/2"))
        x = Point(F(1, 2), F(1, 2))
        assert quadrant(A, x, ">=,*") == 0b101
        assert quadrant(A, x, "<,>") == 0b010
        with pytest.raises(ValueError):
            quadrant(A, x, "~,<")

    @given(grid_collections(), grid_point)
    def test_weak_contains_strict(self, A, x):
        strict = quadrant(A, x, "strict_lower")
        weak = quadrant(A, x, "weak_lower")
        assert strict & ~weak == 0
        assert quadrant(A, x, "strict_upper") & weak == 0


class TestDominance:
    def test_cases(self):
        assert dominates(Point(1, 1), Point(F(1, 2), F(1, 2)))
        assert not dominates(Point(1, 1), Point(0, 1))
        assert dominates(Point(1, 1), Point(1, 1), "weak")
        assert not dominates(Point(1, 1), Point(1, 1), "strict")


class TestOutcomes:
    def test_expected_outcome(self):
        assert expected_outcome(coll((1, 0), (0, 1)), [F(1, 2), F(1, 2)]) == Point(F(1, 2), F(1, 2))
        assert expected_outcome(EXAMPLE1, [0, 0, 0, 1]) == Point(F(2, 3), F(2, 3))
        assert expected_outcome(coll((1, 1)), [1]) == Point(1, 1)
        with pytest.raises(ValueError):
            expected_outcome(coll((1, 1)), [F(1, 2), F(1, 2)])

    def test_check_allocation(self):
        check_allocation([F(1, 3)] * 3)
        with pytest.raises(ValueError):
            check_allocation([F(1, 2), F(1, 3)])


class TestJson:
    def test_parse(self):
        A = parse_collection(b'{"alternatives":[["1","0"],["0","1"]]}')
        assert A.n == 2
        assert parse_collection('{"alternatives":[["0.99","0.99"]]}').points == (Point(F(99, 100), F(99, 100)),)

    @pytest.mark.parametrize(
        "text",
        [
            '{"alternatives":[["3/2","0"]]}',
            '{"alternatives":[]}',
            '{"alternatives":[["1","0"]],"weights":["0"]}',
            '{"alternatives":[["1"]]}',
            "not json",
        ],
    )
    def test_errors(self, text):
        with pytest.raises(CollectionError):
            parse_collection(text)

    @given(grid_collections())
    def test_round_trip(self, A):
        assert parse_collection(serialize_collection(A)) == A

    def test_weights_round_trip(self):
        A = coll((1, 0), (0, 1), weights=[F(3), F(1, 2)])
        data = json.loads(serialize_collection(A))
        assert data["weights"] == ["3", "1/2"]
        assert parse_collection(serialize_collection(A)) == A


def test_mask_of():
    assert mask_of([0, 3]) == 0b1001
