from fractions import Fraction as F

import pytest
from hypothesis import given, settings

from bargain.afp import enumerate_afps_oracle, is_afp
from bargain.core import Point, dominates
from bargain.equilibria import (
    BudgetExceeded,
    ConstructionError,
    Profile,
    construct_agreement_profile,
    construct_cudd_profiles,
    construct_disagreement_profile,
    disagreement_max,
    enumerate_pure_ne,
    is_pure_ne,
    lemma_violations,
    payoffs,
)
from bargain.mechanisms import CUDD, Dictator, SADelta
from conftest import EXAMPLE1, coll, grid_collections

P = lambda a, b: Point(F(a), F(b))  # noqa: E731


class TestPayoffs:
    def test_weight_mismatch(self):
        with pytest.raises(ValueError):
            payoffs(SADelta(F(1, 2), [F(1)] * 3), coll((1, 0), (0, 1)), Profile(1, 2))


class TestIsPureNE:
    def test_example1_sa(self):
        assert is_pure_ne(SADelta(0), EXAMPLE1, Profile(0b1001, 0b1010))

    def test_example1_sa_delta(self):
        m = SADelta(F(1, 10))
        res = is_pure_ne(m, EXAMPLE1, Profile(0b1001, 0b1010))
        assert not res
        assert res.deviation.player == 1
        assert res.deviation.after.u1 > res.deviation.before.u1
        # adding the (0.99,0.99) alternative is itself an improving deviation
        assert m.payoff(EXAMPLE1, 0b1101, 0b1010).u1 > F(59, 90)

    def test_dictator(self):
        res = is_pure_ne(Dictator(), coll((1, 0), (0, 1)), Profile(1, None))
        assert not res and res.deviation.signal == 0


class TestEnumeration:
    def test_sa_half_two_points(self):
        assert enumerate_pure_ne(SADelta(F(1, 2)), coll((1, 0), (0, 1))).neo == (P("1/2", "1/2"),)

    def test_cudd(self):
        rep = enumerate_pure_ne(CUDD(), coll((1, 0), (0, 1), ("3/4", "3/4")))
        assert set(rep.neo) == {P("3/4", "3/4"), P("1/2", "1/2")}

    def test_dictator(self):
        assert enumerate_pure_ne(Dictator(), coll((1, 0), (0, 1))).neo == (P(1, 0),)

    def test_example1(self):
        rep = enumerate_pure_ne(SADelta(0), EXAMPLE1)
        assert P("2/3", "2/3") in rep.neo
        assert Profile(0b1001, 0b1010) in rep.profiles

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            enumerate_pure_ne(SADelta(0), EXAMPLE1, budget=100)

    def test_json(self):
        rep = enumerate_pure_ne(SADelta(F(1, 2)), coll((1, 0), (0, 1)))
        d = rep.to_dict()
        assert d["neo"] == [["1/2", "1/2"]]
        assert {"s1": [1], "s2": [2], "outcome": ["1/2", "1/2"]} in d["equilibria"]

    @settings(max_examples=30, deadline=None)
    @given(grid_collections(max_n=4))
    def test_kernel_matches_numpy_scan(self, A):
        m = SADelta(F(1, 3))
        a = enumerate_pure_ne(m, A, validate="all")
        b = enumerate_pure_ne(m, A, use_kernel=False, block_rows=3)
        assert sorted(a.equilibria) == sorted(b.equilibria)

    @settings(max_examples=30, deadline=None)
    @given(grid_collections(max_n=3))
    def test_every_reported_profile_is_exact_ne(self, A):
        for m in (SADelta(0), CUDD(), Dictator()):
            rep = enumerate_pure_ne(m, A, validate="none")
            assert all(is_pure_ne(m, A, p) for p in rep.profiles)


class TestDeltaOne:
    def test_full_lists_are_always_an_equilibrium(self):
        # with delta = 1 only the union matters, so nobody can move ([n],[n])
        A = coll((1, 1), (0, 0))
        m = SADelta(1)
        assert is_pure_ne(m, A, Profile(0b11, 0b11))
        assert enumerate_pure_ne(m, A).neo == (P("1/2", "1/2"), P(1, 1))


class TestConstructions:
    def test_disagreement_two_points(self):
        A = coll((1, 0), (0, 1))
        w = is_afp(A, P("1/2", "1/2"))
        prof = construct_disagreement_profile(A, w)
        assert prof == Profile(0b01, 0b10)
        m = SADelta(F(1, 2))
        assert is_pure_ne(m, A, prof) and payoffs(m, A, prof) == P("1/2", "1/2")

    def test_disagreement_duplicate(self):
        A = coll((1, 0), (0, 1), (0, 1))
        prof = construct_disagreement_profile(A, is_afp(A, P("1/3", "2/3")))
        assert prof == Profile(0b001, 0b110)

    def test_disagreement_singleton(self):
        A = coll((1, 1))
        assert construct_disagreement_profile(A, is_afp(A, P(1, 1))) == Profile(1, 0)

    def test_disagreement_rejects_dominated(self):
        A = coll((1, 1), ("98/100", 0), (0, "98/100"))
        with pytest.raises(ConstructionError):
            construct_disagreement_profile(A, is_afp(A, P("33/50", "33/50")))

    def test_agreement(self):
        A = coll((0, 1), (1, 1))
        m = SADelta(F(1, 10))
        prof = construct_agreement_profile(A, 1, is_afp(A, P("1/2", 1)))
        assert prof.s1 & prof.s2 == 0b10
        assert is_pure_ne(m, A, prof) and payoffs(m, A, prof) == P("19/20", 1)
        prof = construct_agreement_profile(A, 1, is_afp(A, P(1, 1)))
        assert payoffs(m, A, prof) == P(1, 1) and is_pure_ne(m, A, prof)

    def test_agreement_three_points(self):
        A = coll((1, 0), (0, 1), ("3/4", "3/4"))
        afps = enumerate_afps_oracle(A)
        m = SADelta(F(1, 4))
        for w in afps.witnesses:
            if dominates(A.points[2], w.x, "weak"):
                prof = construct_agreement_profile(A, 2, w)
                assert is_pure_ne(m, A, prof)
                assert payoffs(m, A, prof) == F(3, 4) * A.points[2] + F(1, 4) * w.x

    def test_agreement_rejects_inefficient(self):
        with pytest.raises(ConstructionError):
            construct_agreement_profile(EXAMPLE1, 3, is_afp(EXAMPLE1, enumerate_afps_oracle(EXAMPLE1).points[0]))

    @settings(max_examples=40, deadline=None)
    @given(grid_collections(max_n=5))
    def test_constructed_profiles_are_equilibria(self, A):
        m = SADelta(F(1, 2))
        for w in enumerate_afps_oracle(A).witnesses:
            if not any(dominates(a, w.x) for a in A.points):
                prof = construct_disagreement_profile(A, w)
                assert is_pure_ne(m, A, prof) and payoffs(m, A, prof) == w.x
            for i, a in enumerate(A.points):
                if dominates(a, w.x, "weak") and not any(dominates(b, a) for b in A.points):
                    prof = construct_agreement_profile(A, i, w)
                    assert is_pure_ne(m, A, prof)


class TestCuddProfiles:
    def test_three_points(self):
        A = coll((1, 0), (0, 1), ("3/4", "3/4"))
        profs = construct_cudd_profiles(A)
        assert profs == [Profile((0, 0), (1, 1)), Profile((2, 0), (2, 1))]
        assert [CUDD().payoff(A, *p) for p in profs] == [P("1/2", "1/2"), P("3/4", "3/4")]
        assert all(is_pure_ne(CUDD(), A, p) for p in profs)

    def test_singleton(self):
        assert construct_cudd_profiles(coll((1, 1)))[0] == Profile((0, 0), (0, 0))

    def test_only_disagreement(self):
        assert construct_cudd_profiles(coll((1, 0), (0, 1))) == [Profile((0, 0), (1, 1))]


class TestStructureInvariants:
    @settings(max_examples=40, deadline=None)
    @given(grid_collections(max_n=5))
    def test_hold_below_one(self, A):
        for d in (F(1, 4), F(1, 2)):
            assert lemma_violations(A, enumerate_pure_ne(SADelta(d), A, validate="none")) == []

    def test_broken_at_one(self):
        A = coll((1, 1), (0, 0))
        bad = lemma_violations(A, enumerate_pure_ne(SADelta(1), A))
        assert {b["lemma"] for b in bad} >= {"unique-agreement"}

    def test_disagreement_max(self):
        A = coll((1, 0), (0, 1), ("1/4", "1/4"))
        for w in enumerate_afps_oracle(A).witnesses:
            for player in (1, 2):
                best, xi = disagreement_max(A, w, player)
                assert best == xi
