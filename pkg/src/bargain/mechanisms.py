"""Bargaining mechanisms: signal spaces plus an allocation map.

Six mechanisms are provided.  ``SADelta(0)`` is the plain
satisfactory-alternatives mechanism and ``SADelta(delta)`` its delta variant.
``SADelta(delta, weights)`` is the weighted variant.  ``SAKDelta`` is the
k-uniform lift, and ``Dictator`` and ``CUDD`` are the other two.

Signals are plain Python values.  The SA family uses bitmask ints over
alternative indices (zero based).  CUDD uses ``(agreement, disagreement)``
index pairs.  Dictator uses an index for player 1 and ``None`` for player 2.
Each mechanism can also build a :class:`Game` for a collection.  A Game holds
exact integer payoff tables over a common denominator, and the equilibrium
search scans them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations_with_replacement
from math import comb, lcm
from typing import Any, Sequence

import numpy as np

from .core import Collection, Point, expected_outcome, format_rational, mask_of, members, to_rational

__all__ = [
    "Mechanism",
    "MechanismError",
    "MechanismInstance",
    "SADelta",
    "SAKDelta",
    "Dictator",
    "CUDD",
    "Game",
    "sa_delta_allocate",
    "cudd_allocate",
    "dictator_allocate",
    "k_uniform_multisets",
    "lift_k_uniform",
    "build_mechanism",
    "MECHANISM_KINDS",
    "DEFAULT_LIFT_CAP",
]

DEFAULT_LIFT_CAP = 4096
_INT64_SAFE = 1 << 62


class MechanismError(ValueError):
    pass


# -- allocation formulas ----------------------------------------------------------


def _weighted_uniform(mask: int, weights: Sequence[Fraction], n: int, scale=Fraction(1)) -> list[Fraction]:
    idx = members(mask)
    total = sum((weights[i] for i in idx), Fraction(0))
    out = [Fraction(0)] * n
    for i in idx:
        out[i] = scale * weights[i] / total
    return out


def sa_delta_allocate(delta, weights, L1: int, L2: int, n: int) -> tuple[Fraction, ...]:
    """Randomized allocation of the (weighted) SA_delta mechanism.

    Both lists empty gives the weighted-uniform lottery over all of ``[n]``.
    Disjoint lists give the weighted-uniform lottery over the union.
    Intersecting lists mix the intersection lottery with weight ``1 - delta``
    and the union lottery with weight ``delta``.
    """
    delta = to_rational(delta)
    w = [Fraction(1)] * n if weights is None else [to_rational(x) for x in weights]
    if len(w) != n:
        raise MechanismError(f"{len(w)} weights for n={n}")
    inter, union = L1 & L2, L1 | L2
    if not union:
        return tuple(_weighted_uniform((1 << n) - 1, w, n))
    if not inter:
        return tuple(_weighted_uniform(union, w, n))
    a = _weighted_uniform(inter, w, n, 1 - delta)
    b = _weighted_uniform(union, w, n, delta)
    return tuple(x + y for x, y in zip(a, b))


def cudd_allocate(s1: tuple[int, int], s2: tuple[int, int], n: int) -> tuple[Fraction, ...]:
    (g1, d1), (g2, d2) = s1, s2
    for v in (g1, d1, g2, d2):
        if not 0 <= v < n:
            raise MechanismError(f"CUDD signal index {v} out of range for n={n}")
    out = [Fraction(0)] * n
    if g1 == g2:
        out[g1] = Fraction(1)
    else:
        out[d1] += Fraction(1, 2)
        out[d2] += Fraction(1, 2)
    return tuple(out)


def dictator_allocate(s1: int, n: int) -> tuple[Fraction, ...]:
    if not 0 <= s1 < n:
        raise MechanismError(f"dictator signal {s1} out of range for n={n}")
    out = [Fraction(0)] * n
    out[s1] = Fraction(1)
    return tuple(out)


# -- k-uniform lift ------------------------------------------------------------------


def k_uniform_multisets(n: int, k: int) -> list[tuple[int, ...]]:
    """Sorted index multisets of size ``k`` in lexicographic order."""
    return list(combinations_with_replacement(range(n), k))


def lift_k_uniform(A: Collection, k: int, cap: int = DEFAULT_LIFT_CAP) -> Collection:
    """Expected outcomes of all k-uniform lotteries over the indices of ``A``.

    Duplicate mixes are kept as separate alternatives.  The result has
    ``C(n + k - 1, k)`` entries in lexicographic multiset order.
    """
    if k < 1:
        raise MechanismError("k must be a positive integer")
    size = comb(A.n + k - 1, k)
    if size > cap:
        raise MechanismError(f"k-uniform lift has {size} alternatives, above the cap {cap}")
    pts = []
    for ms in k_uniform_multisets(A.n, k):
        s1 = sum((A.points[i].u1 for i in ms), Fraction(0))
        s2 = sum((A.points[i].u2 for i in ms), Fraction(0))
        pts.append(Point(s1 / k, s2 / k))
    return Collection(tuple(pts))


# -- games ---------------------------------------------------------------------------


@dataclass
class Game:
    """Payoff tables of a mechanism played on a collection.

    Player payoffs are ``P / den`` with integer ``P``.  Rows index player 1
    signals and columns player 2 signals.  ``block(r0, r1)`` returns the two
    payoff matrices for rows ``r0:r1``.  SA-family games also carry subset
    tables (``sa_tables``) that a compiled kernel scans directly.
    """

    signals1: Sequence[Any]
    signals2: Sequence[Any]
    den: int
    dtype: Any
    _block: Any = field(repr=False)
    sa_tables: tuple | None = field(default=None, repr=False)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.signals1), len(self.signals2)

    @property
    def size(self) -> int:
        return len(self.signals1) * len(self.signals2)

    def block(self, r0: int, r1: int):
        return self._block(r0, r1)

    def outcome_from_ints(self, p1, p2) -> Point:
        return Point(Fraction(int(p1), self.den), Fraction(int(p2), self.den))


def _pick_dtype(max_abs: int):
    return np.int64 if max_abs < _INT64_SAFE else object


def _explicit_game(signals1, signals2, payoff) -> Game:
    """Game from an exact payoff function, tabulated once."""
    rows = [[payoff(s1, s2) for s2 in signals2] for s1 in signals1]
    den = 1
    for row in rows:
        for p in row:
            den = lcm(den, p.u1.denominator, p.u2.denominator)
    P1 = [[int(p.u1 * den) for p in row] for row in rows]
    P2 = [[int(p.u2 * den) for p in row] for row in rows]
    dtype = _pick_dtype(den)
    M1 = np.array(P1, dtype=dtype).reshape(len(signals1), len(signals2))
    M2 = np.array(P2, dtype=dtype).reshape(len(signals1), len(signals2))
    return Game(signals1, signals2, den, dtype, lambda r0, r1: (M1[r0:r1], M2[r0:r1]))


# -- mechanism classes -----------------------------------------------------------------


class Mechanism:
    """Base class.  Subclasses define signal spaces and ``allocate``."""

    name = "mechanism"
    anonymous = False

    def signal_space(self, n: int, player: int) -> Sequence[Any]:
        raise NotImplementedError

    def allocate(self, s1, s2, n: int) -> tuple[Fraction, ...]:
        raise NotImplementedError

    def payoff(self, A: Collection, s1, s2) -> Point:
        return expected_outcome(A, self.allocate(s1, s2, A.n))

    def game(self, A: Collection) -> Game:
        return _explicit_game(
            self.signal_space(A.n, 0), self.signal_space(A.n, 1), lambda a, b: self.payoff(A, a, b)
        )

    def signal_count(self, n: int, player: int) -> int:
        return len(self.signal_space(n, player))

    def profile_count(self, n: int) -> int:
        return self.signal_count(n, 0) * self.signal_count(n, 1)

    def signal_to_json(self, s, n: int):
        return s

    def params(self) -> dict:
        return {}

    def describe(self) -> dict:
        return {"mechanism": self.name, **self.params()}

    def instance(self, n: int) -> "MechanismInstance":
        return MechanismInstance(self, n)

    def __repr__(self) -> str:
        args = ", ".join(f"{k}={v}" for k, v in self.params().items())
        return f"{type(self).__name__}({args})"

    def __eq__(self, other) -> bool:
        return type(self) is type(other) and self.params() == other.params()

    def __hash__(self) -> int:
        return hash((type(self).__name__, repr(self)))


class SADelta(Mechanism):
    """Satisfactory alternatives with intersection weight ``1 - delta``.

    ``delta=0`` is the plain SA mechanism.  With ``weights`` set, every
    uniform lottery is replaced by the weight-proportional one.
    """

    anonymous = True

    def __init__(self, delta=0, weights=None):
        self.delta = to_rational(delta)
        if not 0 <= self.delta <= 1:
            raise MechanismError("delta must lie in [0, 1]")
        self.weights = None if weights is None else tuple(to_rational(w) for w in weights)
        if self.weights is not None and any(w <= 0 for w in self.weights):
            raise MechanismError("weights must be strictly positive")

    @property
    def name(self) -> str:
        if self.weights is not None:
            return "sa-delta-w"
        return "sa" if self.delta == 0 else "sa-delta"

    def params(self) -> dict:
        out = {"delta": format_rational(self.delta)}
        if self.weights is not None:
            out["weights"] = [format_rational(w) for w in self.weights]
        return out

    def _weights_for(self, n: int):
        if self.weights is not None and len(self.weights) != n:
            raise MechanismError(f"mechanism has {len(self.weights)} weights but n={n}")
        return self.weights

    def weighted(self, A: Collection) -> Collection:
        """``A`` carrying this mechanism's index weights (unit when unweighted)."""
        if self.weights is None and not A.is_weighted:
            return A
        return A.with_weights(self._weights_for(A.n))

    def signal_space(self, n: int, player: int) -> range:
        return range(1 << n)

    def signal_count(self, n: int, player: int) -> int:
        return 1 << n

    def allocate(self, s1, s2, n):
        return sa_delta_allocate(self.delta, self._weights_for(n), s1, s2, n)

    def payoff(self, A: Collection, s1, s2) -> Point:
        avg = _SubsetAverages.of(self.weighted(A))
        inter, union = s1 & s2, s1 | s2
        if not union:
            return avg[A.full_mask]
        if not inter:
            return avg[union]
        return (1 - self.delta) * avg[inter] + self.delta * avg[union]

    def signal_to_json(self, s, n):
        return [i + 1 for i in members(s)]

    def game(self, A: Collection) -> Game:
        return _sa_game(self.weighted(A), self.delta)


class SAKDelta(Mechanism):
    """SA_delta played over the k-uniform lift of the collection.

    Signals are bitmasks over the multisets of :func:`k_uniform_multisets`.
    """

    anonymous = True

    def __init__(self, delta, k: int, cap: int = DEFAULT_LIFT_CAP):
        if int(k) != k or k < 1:
            raise MechanismError("k must be a positive integer")
        self.k = int(k)
        self.base = SADelta(delta)
        self.delta = self.base.delta
        self.cap = cap

    name = "sa-k-delta"

    def params(self) -> dict:
        return {"delta": format_rational(self.delta), "k": self.k}

    def lifted_size(self, n: int) -> int:
        return comb(n + self.k - 1, self.k)

    def signal_space(self, n, player):
        return range(1 << self.lifted_size(n))

    def signal_count(self, n, player):
        return 1 << self.lifted_size(n)

    def allocate(self, s1, s2, n):
        ms = k_uniform_multisets(n, self.k)
        lifted = sa_delta_allocate(self.delta, None, s1, s2, len(ms))
        out = [Fraction(0)] * n
        for prob, m in zip(lifted, ms):
            if prob:
                for i in m:
                    out[i] += prob / self.k
        return tuple(out)

    def lift(self, A: Collection) -> Collection:
        return lift_k_uniform(A, self.k, self.cap)

    def payoff(self, A, s1, s2):
        return self.base.payoff(self.lift(A), s1, s2)

    def game(self, A):
        return self.base.game(self.lift(A))

    def signal_to_json(self, s, n):
        ms = k_uniform_multisets(n, self.k)
        return [[i + 1 for i in ms[m]] for m in members(s)]


class Dictator(Mechanism):
    """Player 1 names the alternative.  Player 2 has a single null signal."""

    name = "dictator"

    def signal_space(self, n, player):
        return range(n) if player == 0 else [None]

    def allocate(self, s1, s2, n):
        return dictator_allocate(s1, n)

    def payoff(self, A, s1, s2):
        dictator_allocate(s1, A.n)
        return A.points[s1]

    def signal_to_json(self, s, n):
        return None if s is None else s + 1


class CUDD(Mechanism):
    """Coordination with uniform dictatorial disagreement."""

    name = "cudd"
    anonymous = True

    def signal_space(self, n, player):
        return [(g, d) for g in range(n) for d in range(n)]

    def allocate(self, s1, s2, n):
        return cudd_allocate(s1, s2, n)

    def payoff(self, A, s1, s2):
        (g1, d1), (g2, d2) = s1, s2
        if not all(0 <= v < A.n for v in (g1, d1, g2, d2)):
            raise MechanismError(f"CUDD signal out of range for n={A.n}")
        if g1 == g2:
            return A.points[g1]
        return (A.points[d1] + A.points[d2]) / 2

    def signal_to_json(self, s, n):
        return [s[0] + 1, s[1] + 1]

    def game(self, A: Collection) -> Game:
        n = A.n
        D = A.common_denominator()
        c1 = np.array([int(p.u1 * D) for p in A.points], dtype=np.int64)
        c2 = np.array([int(p.u2 * D) for p in A.points], dtype=np.int64)
        sig = np.arange(n * n)
        g, d = sig // n, sig % n

        def block(r0, r1):
            g1, d1 = g[r0:r1, None], d[r0:r1, None]
            same = g1 == g[None, :]
            P1 = np.where(same, 2 * c1[g1], c1[d1] + c1[d[None, :]])
            P2 = np.where(same, 2 * c2[g1], c2[d1] + c2[d[None, :]])
            return P1, P2

        if 2 * D >= _INT64_SAFE:
            return super().game(A)
        return Game(self.signal_space(n, 0), self.signal_space(n, 1), 2 * D, np.int64, block)


# -- SA game tables ------------------------------------------------------------------------


class _SubsetAverages:
    """Exact weighted averages of every subset, cached per collection."""

    _cache: dict = {}

    def __init__(self, A: Collection):
        self.A = A
        self._avg: dict[int, Point] = {}

    @classmethod
    def of(cls, A: Collection) -> "_SubsetAverages":
        hit = cls._cache.get(A)
        if hit is None:
            if len(cls._cache) > 64:
                cls._cache.clear()
            hit = cls._cache[A] = cls(A)
        return hit

    def __getitem__(self, mask: int) -> Point:
        p = self._avg.get(mask)
        if p is None:
            from .core import weighted_avg

            p = self._avg[mask] = weighted_avg(self.A, mask)
        return p


def _subset_sums(values: list[int], dtype) -> np.ndarray:
    out = np.zeros(1, dtype=dtype)
    for v in values:
        out = np.concatenate([out, out + v])
    return out


def _sa_game(A: Collection, delta: Fraction) -> Game:
    """Integer tables for SA_delta, indexed by intersection / union bitmask.

    Payoff at ``(L1, L2)`` is ``dis[U]`` when ``I = L1 & L2`` is empty and
    ``agree[I] + union[U]`` otherwise, with ``U = L1 | L2``.  The empty union
    is mapped to the full index set.
    """
    n = A.n
    D = A.common_denominator()
    wden = 1
    for w in A.weights:
        wden = lcm(wden, w.denominator)
    wi = [int(w * wden) for w in A.weights]
    c1 = [int(p.u1 * D) * w for p, w in zip(A.points, wi)]
    c2 = [int(p.u2 * D) * w for p, w in zip(A.points, wi)]
    p, q = delta.numerator, delta.denominator

    wdtype = _pick_dtype(sum(wi))
    wl = 1
    for s in np.unique(_subset_sums(wi, wdtype)[1:]):
        wl = lcm(wl, int(s))
    den = D * q * wl
    # largest table entry is about den * sum(weights)
    dtype = _pick_dtype(2 * den * max(1, sum(wi)))

    W = _subset_sums(wi, dtype)
    S1 = _subset_sums(c1, dtype)
    S2 = _subset_sums(c2, dtype)
    W[0] = W[-1]
    S1[0] = S1[-1]
    S2[0] = S2[-1]
    f = wl // W
    # avg * den = S / (D * W) * D * q * wl = S * q * (wl / W)
    dis1 = S1 * f * q
    dis2 = S2 * f * q
    agree1 = S1 * f * (q - p)
    agree2 = S2 * f * (q - p)
    union1 = S1 * f * p
    union2 = S2 * f * p

    sig = np.arange(1 << n, dtype=np.int64)

    def block(r0, r1):
        rows = sig[r0:r1, None]
        I = rows & sig[None, :]
        U = rows | sig[None, :]
        dis = I == 0
        P1 = np.where(dis, dis1[U], agree1[I] + union1[U])
        P2 = np.where(dis, dis2[U], agree2[I] + union2[U])
        return P1, P2

    tables = (agree1, agree2, union1, union2, dis1, dis2) if dtype is np.int64 else None
    space = range(1 << n)
    return Game(space, space, den, dtype, block, tables)


# -- MechanismInstance / factory ---------------------------------------------------------------


@dataclass(frozen=True)
class MechanismInstance:
    """A mechanism fixed to ``n`` alternatives."""

    mechanism: Mechanism
    n: int

    def signal_space(self, player: int):
        return self.mechanism.signal_space(self.n, player)

    def allocate(self, s1, s2) -> tuple[Fraction, ...]:
        return self.mechanism.allocate(s1, s2, self.n)

    @cached_property
    def sizes(self) -> tuple[int, int]:
        return len(self.signal_space(0)), len(self.signal_space(1))


MECHANISM_KINDS = ("sa", "sa-delta", "sa-delta-w", "sa-k-delta", "dictator", "cudd")


def make_mechanism(kind: str, delta=None, weights=None, k=None) -> Mechanism:
    kind = kind.lower().replace("_", "-")
    if kind == "sa":
        return SADelta(0)
    if kind in ("sa-delta", "sa-delta-w"):
        if delta is None:
            raise MechanismError(f"{kind} needs --delta")
        if kind == "sa-delta-w" and weights is None:
            raise MechanismError("sa-delta-w needs weights")
        return SADelta(delta, weights if kind == "sa-delta-w" else None)
    if kind == "sa-k-delta":
        if delta is None or k is None:
            raise MechanismError("sa-k-delta needs --delta and --k")
        return SAKDelta(delta, k)
    if kind == "dictator":
        return Dictator()
    if kind == "cudd":
        return CUDD()
    raise MechanismError(f"unknown mechanism {kind!r}; choose from {', '.join(MECHANISM_KINDS)}")


def build_mechanism(kind: str, n: int, delta=None, weights=None, k=None) -> MechanismInstance:
    if n < 1:
        raise MechanismError("n must be positive")
    mech = make_mechanism(kind, delta, weights, k)
    if weights is not None and len(weights) != n:
        raise MechanismError(f"{len(weights)} weights for n={n}")
    return mech.instance(n)
