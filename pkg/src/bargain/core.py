"""Exact points, collections, index sets and the quadrant vocabulary.

All utilities and probabilities are :class:`fractions.Fraction`. Index sets are
plain Python ints used as bitmasks (bit ``i`` is alternative ``i``, zero based),
so they scale to any ``n`` without a separate dense representation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Iterator, Sequence

__all__ = [
    "Fraction",
    "Point",
    "Collection",
    "CollectionError",
    "to_rational",
    "format_rational",
    "mask_of",
    "members",
    "popcount",
    "weighted_avg",
    "quadrant",
    "QUADRANT_MODES",
    "dominates",
    "expected_outcome",
    "check_allocation",
    "parse_collection",
    "serialize_collection",
    "collection_to_dict",
    "collection_from_dict",
]


class CollectionError(ValueError):
    """Raised for malformed or out-of-range collection input."""


def to_rational(value) -> Fraction:
    """Convert ``value`` to an exact ``Fraction``.

    Accepts ints, rationals and strings holding ``"p/q"`` or a decimal literal.
    Binary floats are refused: they have already lost exactness.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not utilities")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise CollectionError(f"not a rational literal: {value!r}") from exc
    if isinstance(value, float):
        raise TypeError("floats are inexact; pass a string such as '0.99' or '99/100'")
    raise TypeError(f"cannot convert {type(value).__name__} to a rational")


def format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True, order=True)
class Point:
    """A utility pair ``(u1, u2)``; ordering is lexicographic."""

    u1: Fraction
    u2: Fraction

    def __post_init__(self):
        object.__setattr__(self, "u1", to_rational(self.u1))
        object.__setattr__(self, "u2", to_rational(self.u2))

    def __iter__(self) -> Iterator[Fraction]:
        yield self.u1
        yield self.u2

    def __getitem__(self, player: int) -> Fraction:
        # player is 0 or 1
        return (self.u1, self.u2)[player]

    def __add__(self, other: "Point") -> "Point":
        return Point(self.u1 + other.u1, self.u2 + other.u2)

    def __sub__(self, other: "Point") -> "Point":
        return Point(self.u1 - other.u1, self.u2 - other.u2)

    def __mul__(self, scalar) -> "Point":
        s = to_rational(scalar)
        return Point(self.u1 * s, self.u2 * s)

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "Point":
        s = to_rational(scalar)
        return Point(self.u1 / s, self.u2 / s)

    def swapped(self) -> "Point":
        return Point(self.u2, self.u1)

    def shift(self, eps) -> "Point":
        e = to_rational(eps)
        return Point(self.u1 + e, self.u2 + e)

    def in_unit_square(self) -> bool:
        return 0 <= self.u1 <= 1 and 0 <= self.u2 <= 1

    def as_strings(self) -> list[str]:
        return [format_rational(self.u1), format_rational(self.u2)]

    def __repr__(self) -> str:
        return f"({format_rational(self.u1)}, {format_rational(self.u2)})"


def _as_point(p) -> Point:
    return p if isinstance(p, Point) else Point(*p)


@dataclass(frozen=True)
class Collection:
    """Indexed multiset of alternatives with positive per-index weights."""

    points: tuple[Point, ...]
    weights: tuple[Fraction, ...] = field(default=())

    def __post_init__(self):
        pts = tuple(_as_point(p) for p in self.points)
        if not pts:
            raise CollectionError("a collection needs at least one alternative")
        for k, p in enumerate(pts):
            if not p.in_unit_square():
                raise CollectionError(f"alternative {k + 1} = {p!r} lies outside [0,1]^2")
        ws = tuple(to_rational(w) for w in self.weights) if self.weights else (Fraction(1),) * len(pts)
        if len(ws) != len(pts):
            raise CollectionError(f"{len(ws)} weights for {len(pts)} alternatives")
        if any(w <= 0 for w in ws):
            raise CollectionError("weights must be strictly positive")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", ws)

    @classmethod
    def of(cls, *points, weights=None) -> "Collection":
        """``Collection.of((1, 0), (0, "1/2"))`` convenience constructor."""
        return cls(tuple(Point(*p) for p in points), tuple(weights or ()))

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    @property
    def is_weighted(self) -> bool:
        return any(w != 1 for w in self.weights)

    def __len__(self) -> int:
        return self.n

    def __iter__(self) -> Iterator[Point]:
        return iter(self.points)

    def __getitem__(self, k: int) -> Point:
        return self.points[k]

    def with_weights(self, weights) -> "Collection":
        return Collection(self.points, tuple(weights) if weights is not None else ())

    def unweighted(self) -> "Collection":
        return Collection(self.points)

    def duplicate(self, j: int) -> "Collection":
        """The collection ``(A, j)``: alternative ``j`` (zero based) appended again."""
        if not 0 <= j < self.n:
            raise IndexError(f"index {j} out of range for n={self.n}")
        return Collection(self.points + (self.points[j],), self.weights + (self.weights[j],))

    def swapped(self) -> "Collection":
        return Collection(tuple(p.swapped() for p in self.points), self.weights)

    def is_symmetric(self) -> bool:
        """Multiset of (point, weight) is closed under swapping coordinates."""
        from collections import Counter

        counts = Counter(zip(self.points, self.weights))
        return all(counts[(p.swapped(), w)] == c for (p, w), c in counts.items())

    def common_denominator(self) -> int:
        from math import lcm

        d = 1
        for p in self.points:
            d = lcm(d, p.u1.denominator, p.u2.denominator)
        return d


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def members(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def weighted_avg(A: Collection, S: int) -> Point:
    """Weighted mean of the alternatives indexed by the bitmask ``S``."""
    if not S:
        raise ValueError("empty averaging set")
    if S >> A.n:
        raise IndexError("index set has members beyond n")
    s1 = s2 = total = Fraction(0)
    for i in members(S):
        w = A.weights[i]
        p = A.points[i]
        s1 += w * p.u1
        s2 += w * p.u2
        total += w
    return Point(s1 / total, s2 / total)


_OPS = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
    "*": lambda a, b: True,
}

QUADRANT_MODES = {
    "strict_lower": "<,<",
    "weak_lower": "<=,<=",
    "upper_left": "<,>",
    "lower_right": ">,<",
    "strict_upper": ">,>",
    "weak_upper": ">=,>=",
    # half-closed pieces; with strict_lower and weak_upper these partition [n]
    "left_upper_closed": "<,>=",
    "right_lower_closed": ">=,<",
}


def quadrant(A: Collection, x: Point, mode: str) -> int:
    """Indices of alternatives in the quadrant ``mode`` anchored at ``x``.

    ``mode`` is a name from ``QUADRANT_MODES`` or an operator pair such as
    ``">,<="`` (the set A_{>,<=}(x)); ``*`` leaves a coordinate unconstrained.
    """
    ops = QUADRANT_MODES.get(mode, mode)
    try:
        o1, o2 = (_OPS[o.strip()] for o in ops.split(","))
    except (KeyError, ValueError, AttributeError):
        raise ValueError(f"unknown quadrant mode {mode!r}") from None
    x = _as_point(x)
    m = 0
    for i, p in enumerate(A.points):
        if o1(p.u1, x.u1) and o2(p.u2, x.u2):
            m |= 1 << i
    return m


def dominates(a: Point, b: Point, mode: str = "strict") -> bool:
    if mode == "strict":
        return a.u1 > b.u1 and a.u2 > b.u2
    if mode == "weak":
        return a.u1 >= b.u1 and a.u2 >= b.u2
    raise ValueError(f"unknown dominance mode {mode!r}")


def check_allocation(p: Sequence[Fraction], n: int | None = None) -> None:
    if n is not None and len(p) != n:
        raise ValueError(f"allocation has length {len(p)}, expected {n}")
    if any(q < 0 for q in p):
        raise ValueError("allocation has a negative entry")
    if sum(p, Fraction(0)) != 1:
        raise ValueError("allocation does not sum to 1")


def expected_outcome(A: Collection, p: Sequence[Fraction]) -> Point:
    if len(p) != A.n:
        raise ValueError(f"allocation has length {len(p)} but the collection has {A.n} alternatives")
    s1 = s2 = Fraction(0)
    for q, a in zip(p, A.points):
        if q:
            s1 += q * a.u1
            s2 += q * a.u2
    return Point(s1, s2)


# -- JSON ---------------------------------------------------------------------


def collection_from_dict(data) -> Collection:
    if not isinstance(data, dict) or "alternatives" not in data:
        raise CollectionError('expected an object with an "alternatives" array')
    alts = data["alternatives"]
    if not isinstance(alts, list) or not alts:
        raise CollectionError('"alternatives" must be a non-empty array')
    points = []
    for k, pair in enumerate(alts):
        if not isinstance(pair, list) or len(pair) != 2:
            raise CollectionError(f"alternative {k + 1} is not a pair")
        if not all(isinstance(v, (str, int)) and not isinstance(v, bool) for v in pair):
            raise CollectionError(f"alternative {k + 1}: numbers must be strings or integers")
        points.append(Point(to_rational(pair[0]), to_rational(pair[1])))
    weights = data.get("weights")
    if weights is not None:
        if not isinstance(weights, list):
            raise CollectionError('"weights" must be an array')
        weights = [to_rational(w) if isinstance(w, (str, int)) else _bad_weight(w) for w in weights]
    return Collection(tuple(points), tuple(weights or ()))


def _bad_weight(w):
    raise CollectionError(f"weight {w!r} must be a string or integer")


def collection_to_dict(A: Collection) -> dict:
    out = {"alternatives": [p.as_strings() for p in A.points]}
    if A.is_weighted:
        out["weights"] = [format_rational(w) for w in A.weights]
    return out


def parse_collection(text: bytes | str) -> Collection:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CollectionError(f"malformed JSON: {exc}") from exc
    return collection_from_dict(data)


def serialize_collection(A: Collection) -> bytes:
    return (json.dumps(collection_to_dict(A), indent=1) + "\n").encode()
