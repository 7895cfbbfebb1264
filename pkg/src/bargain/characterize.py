"""Closed-form equilibrium outcome sets and efficiency tests."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .afp import DEFAULT_ORACLE_CAP, AFPError, enumerate_afps_oracle, enumerate_diagonal_afps
from .core import Collection, Point, dominates, mask_of, to_rational
from .mechanisms import CUDD, Dictator, Mechanism, SADelta, SAKDelta

__all__ = [
    "NEOSets",
    "MaxMinStats",
    "pe_set",
    "afp_points",
    "sa_delta_neo",
    "cudd_neo",
    "dictator_neo",
    "neo_characterization",
    "max_min_stats",
    "is_eps_pareto_efficient",
    "is_eps_close_to_frontier",
    "pie_collection",
    "pie_reference_x",
    "segment_distance",
]


@dataclass(frozen=True)
class NEOSets:
    ag: tuple[Point, ...]
    dis: tuple[Point, ...]

    @property
    def union(self) -> tuple[Point, ...]:
        return tuple(sorted(set(self.ag) | set(self.dis)))

    def to_dict(self) -> dict:
        return {
            "ag": [p.as_strings() for p in self.ag],
            "dis": [p.as_strings() for p in self.dis],
            "neo": [p.as_strings() for p in self.union],
        }


@dataclass(frozen=True)
class MaxMinStats:
    m_max: tuple[Fraction, Fraction]
    m_min: tuple[Fraction, Fraction]
    argmax: tuple[int, int]  # bitmasks


def pe_set(A: Collection) -> int:
    """Indices of alternatives no alternative strictly dominates."""
    return mask_of(
        i for i, a in enumerate(A.points) if not any(dominates(b, a) for b in A.points)
    )


def afp_points(A: Collection, cap: int = DEFAULT_ORACLE_CAP) -> tuple[Point, ...]:
    """Distinct AFPs by the oracle when ``n <= cap``, else by the diagonal scan."""
    if A.n <= cap:
        return enumerate_afps_oracle(A, cap).points
    if A.is_symmetric():
        return tuple(w.x for w in enumerate_diagonal_afps(A))
    raise AFPError(f"n={A.n} is above the oracle cap and the collection is not symmetric")


def sa_delta_neo(A: Collection, delta, afps=None, cap: int = DEFAULT_ORACLE_CAP) -> NEOSets:
    """Agreement and disagreement outcome sets of SA_delta (weights taken from ``A``)."""
    delta = to_rational(delta)
    if afps is None:
        afps = afp_points(A, cap)
    pe = sorted({A.points[i] for i in range(A.n) if pe_set(A) >> i & 1})
    ag = {(1 - delta) * a + delta * x for a in pe for x in afps if dominates(a, x, "weak")}
    dis = {x for x in afps if not any(dominates(a, x) for a in A.points)}
    return NEOSets(tuple(sorted(ag)), tuple(sorted(dis)))


def max_min_stats(A: Collection) -> MaxMinStats:
    u = ([p.u1 for p in A.points], [p.u2 for p in A.points])
    hi = (max(u[0]), max(u[1]))
    lo = (min(u[0]), min(u[1]))
    arg = tuple(mask_of(k for k, v in enumerate(u[i]) if v == hi[i]) for i in (0, 1))
    return MaxMinStats(hi, lo, arg)


def cudd_neo(A: Collection) -> NEOSets:
    st = max_min_stats(A)
    t1 = (st.m_max[0] + st.m_min[0]) / 2
    t2 = (st.m_max[1] + st.m_min[1]) / 2
    ag = {a for a in A.points if a.u1 >= t1 and a.u2 >= t2}
    b = [A.points[k] for k in range(A.n) if st.argmax[0] >> k & 1]
    c = [A.points[k] for k in range(A.n) if st.argmax[1] >> k & 1]
    dis = {(p + q) / 2 for p in b for q in c}
    return NEOSets(tuple(sorted(ag)), tuple(sorted(dis)))


def dictator_neo(A: Collection) -> NEOSets:
    top = max(p.u1 for p in A.points)
    return NEOSets(tuple(sorted({p for p in A.points if p.u1 == top})), ())


def neo_characterization(mech: Mechanism, A: Collection, cap: int = DEFAULT_ORACLE_CAP) -> NEOSets:
    if isinstance(mech, SAKDelta):
        if mech.delta == 0:
            raise ValueError("no closed form for delta = 0")
        return sa_delta_neo(mech.lift(A), mech.delta, cap=cap)
    if isinstance(mech, SADelta):
        if mech.delta == 0:
            raise ValueError("no closed form for plain SA (delta = 0)")
        return sa_delta_neo(mech.weighted(A), mech.delta, cap=cap)
    if isinstance(mech, CUDD):
        return cudd_neo(A)
    if isinstance(mech, Dictator):
        return dictator_neo(A)
    raise ValueError(f"no closed form for {mech!r}")


def is_eps_pareto_efficient(A: Collection, x: Point, eps) -> bool:
    z = x.shift(to_rational(eps))
    return not any(dominates(a, z) for a in A.points)


def _segment_dominates(p: Point, q: Point, z: Point) -> bool:
    """Is there t in [0, 1] with (1 - t) p + t q >> z?"""
    lo, lo_open = Fraction(0), False
    hi, hi_open = Fraction(1), False
    for pi, qi, zi in ((p.u1, q.u1, z.u1), (p.u2, q.u2, z.u2)):
        d = qi - pi
        if d == 0:
            if pi <= zi:
                return False
            continue
        t = (zi - pi) / d
        if d > 0:  # need t' > t
            if t > lo or (t == lo and not lo_open):
                lo, lo_open = t, True
        else:  # need t' < t
            if t < hi or (t == hi and not hi_open):
                hi, hi_open = t, True
    if lo < hi:
        return True
    return lo == hi and not lo_open and not hi_open


def is_eps_close_to_frontier(A: Collection, x: Point, eps) -> bool:
    """No point of conv(A) strictly dominates ``x + (eps, eps)``.

    A dominating hull point can be pushed along (1, 1) onto the hull boundary,
    so vertices and segments between pairs of alternatives suffice.
    """
    z = x.shift(to_rational(eps))
    pts = sorted(set(A.points))
    if any(dominates(a, z) for a in pts):
        return False
    for i, p in enumerate(pts):
        for q in pts[i + 1:]:
            if _segment_dominates(p, q, z):
                return False
    return True


def pie_collection(k: int) -> Collection:
    """Grid points ``(c/k, d/k)`` with ``c + d <= k``, ordered by c then d."""
    if k < 1:
        raise ValueError("k must be positive")
    return Collection(
        tuple(Point(Fraction(c, k), Fraction(d, k)) for c in range(k + 1) for d in range(k + 1 - c))
    )


def _cubic(x: Fraction) -> Fraction:
    return x**3 - x + Fraction(1, 3)


def pie_reference_x(precision) -> tuple[Fraction, Fraction]:
    """Bracket the root of ``x^3 - x + 1/3`` in ``[0, 1/2]`` to the given width."""
    precision = to_rational(precision)
    if precision <= 0:
        raise ValueError("precision must be positive")
    lo, hi = Fraction(0), Fraction(1, 2)
    assert _cubic(lo) > 0 > _cubic(hi)
    while hi - lo > precision:
        mid = (lo + hi) / 2
        if _cubic(mid) > 0:
            lo = mid
        else:
            hi = mid
    return lo, hi


def segment_distance(x: Point, x_lo) -> Fraction:
    """L-infinity distance from ``x`` to ``{(t, 1-t) : x_lo <= t <= 1 - x_lo}``."""
    x_lo = to_rational(x_lo)
    if not 0 <= x_lo <= Fraction(1, 2):
        raise ValueError("x_lo must lie in [0, 1/2]")
    # max(|x1 - t|, |x2 - 1 + t|) is convex in t, minimal at the midpoint below
    t = (x.u1 + 1 - x.u2) / 2
    t = min(max(t, x_lo), 1 - x_lo)
    return max(abs(x.u1 - t), abs(x.u2 - 1 + t))
