"""Average fixed points of a collection.

A point ``x`` is an average fixed point (AFP) when some averaging set ``S``
satisfies ``A \\ A_{<=,<=}(x) <= S <= A \\ A_{<,<}(x)`` and the weighted mean of
``S`` is exactly ``x``.  Four routes are provided:

* :func:`iterate_boundaries_included` -- the monotone elimination iteration,
  which always terminates at a boundaries-included AFP;
* :func:`enumerate_afps_oracle` -- exhaustive check of every nonempty subset;
* :func:`is_afp` -- exact membership test by subset-sum DP over the boundary;
* :func:`enumerate_diagonal_afps` -- scan of the diagonal for symmetric input.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import numpy as np

from .core import Collection, Point, format_rational, mask_of, members, quadrant, weighted_avg

__all__ = [
    "AveragingWitness",
    "AFPEnumeration",
    "AFPError",
    "iterate_boundaries_included",
    "enumerate_afps_oracle",
    "enumerate_diagonal_afps",
    "is_afp",
    "verify_chain",
    "check_witness",
    "witness_to_dict",
    "DEFAULT_ORACLE_CAP",
]

DEFAULT_ORACLE_CAP = 22
DEFAULT_GRID_CAP = 10**6
_INT64_SAFE = 1 << 62
_DP_TARGET_LIMIT = 1 << 24


class AFPError(ValueError):
    pass


@dataclass(frozen=True)
class AveragingWitness:
    x: Point
    S: int
    boundary_included: int

    @property
    def indices(self) -> list[int]:
        return members(self.S)


@dataclass(frozen=True)
class AFPEnumeration:
    witnesses: tuple[AveragingWitness, ...]
    points: tuple[Point, ...]


def _make_witness(A: Collection, x: Point, S: int) -> AveragingWitness:
    boundary = quadrant(A, x, "weak_lower") & ~quadrant(A, x, "strict_lower")
    return AveragingWitness(x, S, S & boundary)


def check_witness(A: Collection, w: AveragingWitness) -> bool:
    """Re-verify the sandwich condition, exact average and boundary record."""
    if not w.S or w.S >> A.n:
        return False
    weak = quadrant(A, w.x, "weak_lower")
    strict = quadrant(A, w.x, "strict_lower")
    full = A.full_mask
    mandatory = full & ~weak
    allowed = full & ~strict
    if mandatory & ~w.S or w.S & ~allowed:
        return False
    if w.boundary_included != w.S & weak & ~strict:
        return False
    return weighted_avg(A, w.S) == w.x


def iterate_boundaries_included(A: Collection) -> tuple[AveragingWitness, list[Point]]:
    """Run ``x <- avg(A \\ A_{<,<}(x))`` from ``avg(A)`` until it stops moving.

    Returns the boundaries-included fixed point and the trace ``[x^1, x^2, ...]``
    (the last entry is the fixed point).
    """
    full = A.full_mask
    x = weighted_avg(A, full)
    trace = [x]
    while True:
        S = full & ~quadrant(A, x, "strict_lower")
        nxt = weighted_avg(A, S)
        if nxt == x:
            return _make_witness(A, x, S), trace
        x = nxt
        trace.append(x)


# -- exhaustive oracle ----------------------------------------------------------


def _integer_form(A: Collection):
    """Coordinates as ints over a common denominator and integer weights."""
    D = A.common_denominator()
    wden = 1
    for w in A.weights:
        wden = lcm(wden, w.denominator)
    c1 = [int(p.u1 * D) for p in A.points]
    c2 = [int(p.u2 * D) for p in A.points]
    w = [int(x * wden) for x in A.weights]
    return D, c1, c2, w


def _subset_table(values, dtype):
    """Sums over all subsets of ``values`` indexed by bitmask (one add per subset)."""
    out = np.zeros(1, dtype=dtype)
    for v in values:
        out = np.concatenate([out, out + v])
    return out


def enumerate_afps_oracle(A: Collection, cap: int = DEFAULT_ORACLE_CAP) -> AFPEnumeration:
    """Check the AFP definition on all ``2^n - 1`` nonempty subsets.

    Subset sums are built incrementally (each subset is one addition away from a
    smaller one) and the sandwich test runs vectorized in integer arithmetic.
    """
    n = A.n
    if n > cap:
        raise AFPError(
            f"n={n} exceeds the oracle cap {cap}; use enumerate_diagonal_afps for "
            "symmetric grids or iterate_boundaries_included for a single fixed point"
        )
    D, c1, c2, w = _integer_form(A)
    bound = D * sum(w) * 2
    dtype = np.int64 if bound < _INT64_SAFE else object
    low = min(n, 16)
    lw = _subset_table(w[:low], dtype)
    l1 = _subset_table([wi * ci for wi, ci in zip(w[:low], c1[:low])], dtype)
    l2 = _subset_table([wi * ci for wi, ci in zip(w[:low], c2[:low])], dtype)
    low_masks = np.arange(1 << low, dtype=np.int64)

    hits: list[AveragingWitness] = []
    for high in range(1 << (n - low)):
        hw = hs1 = hs2 = 0
        for b in range(n - low):
            if high >> b & 1:
                j = low + b
                hw += w[j]
                hs1 += w[j] * c1[j]
                hs2 += w[j] * c2[j]
        W = lw + hw
        S1 = l1 + hs1
        S2 = l2 + hs2
        ok = np.asarray(W > 0, dtype=bool)
        for j in range(n):
            t1 = W * c1[j]
            t2 = W * c2[j]
            # a_j outside A_{<=,<=}(x), resp. inside A_{<,<}(x)
            above = np.asarray(t1 > S1, dtype=bool) | np.asarray(t2 > S2, dtype=bool)
            below = np.asarray(t1 < S1, dtype=bool) & np.asarray(t2 < S2, dtype=bool)
            if j < low:
                inside = (low_masks >> j) & 1 == 1
            else:
                inside = bool(high >> (j - low) & 1)
            ok &= np.where(inside, ~below, ~above)
        for lm in np.flatnonzero(ok):
            lm = int(lm)
            mask = lm | (high << low)
            den = D * int(W[lm])
            x = Point(Fraction(int(S1[lm]), den), Fraction(int(S2[lm]), den))
            hits.append(_make_witness(A, x, mask))

    hits.sort(key=lambda h: (h.x, h.S))
    points = tuple(sorted({h.x for h in hits}))
    return AFPEnumeration(tuple(hits), points)


# -- exact membership -------------------------------------------------------------


def _subset_sum(values: list[int], target: int) -> list[int] | None:
    """Positions of a subset of positive ``values`` summing to ``target`` or None."""
    if target < 0:
        return None
    if target == 0:
        return []
    if target > _DP_TARGET_LIMIT and len(values) <= 20:
        # bitset would be enormous; the boundary is small enough to enumerate
        for mask in range(1, 1 << len(values)):
            if sum(v for k, v in enumerate(values) if mask >> k & 1) == target:
                return members(mask)
        return None
    limit = (1 << (target + 1)) - 1
    reach = 1
    history = [reach]
    for v in values:
        reach = (reach | (reach << v)) & limit
        history.append(reach)
    if not reach >> target & 1:
        return None
    chosen = []
    s = target
    for pos in range(len(values) - 1, -1, -1):
        if history[pos] >> s & 1:
            continue
        chosen.append(pos)
        s -= values[pos]
    return sorted(chosen)


def is_afp(A: Collection, x) -> AveragingWitness | None:
    """Return a witness that ``x`` is an AFP of ``A``, or None.

    Points on the vertical boundary line move only the second coordinate of the
    residual sum and points on the horizontal line only the first, so the
    boundary choice splits into two independent one-dimensional subset sums.
    Points equal to ``x`` do not move the average and are always included.
    """
    x = x if isinstance(x, Point) else Point(*x)
    full = A.full_mask
    weak = quadrant(A, x, "weak_lower")
    strict = quadrant(A, x, "strict_lower")
    mandatory = full & ~weak
    equal = quadrant(A, x, "<=,<=") & quadrant(A, x, ">=,>=")
    vertical = quadrant(A, x, ">=,<") & weak  # a1 == x1, a2 < x2
    horizontal = quadrant(A, x, "<,>=") & weak  # a2 == x2, a1 < x1
    assert (vertical | horizontal | equal) == weak & ~strict

    res = {}
    den = 1
    for i in range(A.n):
        w = A.weights[i]
        p = A.points[i]
        res[i] = (w * (p.u1 - x.u1), w * (p.u2 - x.u2))
        den = lcm(den, res[i][0].denominator, res[i][1].denominator)
    r1 = {i: int(v[0] * den) for i, v in res.items()}
    r2 = {i: int(v[1] * den) for i, v in res.items()}

    need1 = sum(r1[i] for i in members(mandatory))
    need2 = sum(r2[i] for i in members(mandatory))
    hz = members(horizontal)
    vt = members(vertical)
    pick1 = _subset_sum([-r1[i] for i in hz], need1)
    if pick1 is None:
        return None
    pick2 = _subset_sum([-r2[i] for i in vt], need2)
    if pick2 is None:
        return None
    S = mandatory | equal | mask_of(hz[k] for k in pick1) | mask_of(vt[k] for k in pick2)
    if not S:
        return None
    return _make_witness(A, x, S)


# -- symmetric collections ------------------------------------------------------------


def enumerate_diagonal_afps(A: Collection, grid_cap: int = DEFAULT_GRID_CAP) -> list[AveragingWitness]:
    """All AFPs of a symmetric collection, one witness per distinct point.

    For symmetric input every AFP lies on the diagonal.  Between consecutive
    coordinate values the lower boundary of ``(t, t)`` is empty and the
    mandatory set is constant, so each open cell is decided by one average;
    the coordinate values themselves go through :func:`is_afp`.
    """
    if not A.is_symmetric():
        raise AFPError("collection is not symmetric")
    m = A.common_denominator()
    if m > grid_cap:
        raise AFPError(f"coordinates are not on a common grid 1/m with m <= {grid_cap} (m={m})")

    values = sorted({p.u1 for p in A.points} | {p.u2 for p in A.points})
    top = [max(p.u1, p.u2) for p in A.points]
    found: dict[Point, AveragingWitness] = {}

    # open cells (values[j-1], values[j]) with values[-1] = -inf, values[len] = +inf
    for j in range(len(values) + 1):
        lo = values[j - 1] if j > 0 else None
        hi = values[j] if j < len(values) else None
        if hi is None:
            continue  # nothing lies above the top cell, so the averaging set is empty
        S = mask_of(i for i, t in enumerate(top) if t >= hi)
        x = weighted_avg(A, S)
        if x.u1 != x.u2:
            continue
        if (lo is None or lo < x.u1) and x.u1 < hi:
            found[x] = _make_witness(A, x, S)

    for v in values:
        wit = is_afp(A, Point(v, v))
        if wit is not None:
            found[wit.x] = wit
    return [found[k] for k in sorted(found)]


def verify_chain(points) -> bool:
    """True iff the points are totally ordered by weak dominance."""
    pts = sorted(p if isinstance(p, Point) else Point(*p) for p in points)
    return all(a.u2 <= b.u2 for a, b in zip(pts, pts[1:]))


def witness_to_dict(w: AveragingWitness) -> dict:
    return {
        "x": w.x.as_strings(),
        "S": [i + 1 for i in members(w.S)],
        "boundary": [i + 1 for i in members(w.boundary_included)],
    }


def format_point(p: Point) -> str:
    return f"({format_rational(p.u1)}, {format_rational(p.u2)})"
