"""Executable axiom checkers for mechanisms on concrete collections."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .characterize import is_eps_close_to_frontier, is_eps_pareto_efficient, neo_characterization
from .core import Collection, CollectionError, Point, to_rational
from .equilibria import DEFAULT_BUDGET, BudgetExceeded, enumerate_pure_ne
from .mechanisms import Mechanism

__all__ = [
    "AffineMap",
    "AxiomVerdict",
    "AXIOMS",
    "neo_of",
    "check_anonymity",
    "check_symmetry",
    "check_ira",
    "check_iat",
    "check_uniqueness",
    "check_efficiency",
    "apply_maps",
    "random_affine_pair",
]

AXIOMS = ("anonymity", "symmetry", "ira", "iat", "uniqueness", "efficiency")


@dataclass(frozen=True)
class AffineMap:
    """``x -> alpha * x + beta`` with ``alpha > 0``."""

    alpha: Fraction = Fraction(1)
    beta: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "alpha", to_rational(self.alpha))
        object.__setattr__(self, "beta", to_rational(self.beta))
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")

    def __call__(self, v: Fraction) -> Fraction:
        return self.alpha * v + self.beta

    def to_dict(self) -> dict:
        return {"alpha": str(self.alpha), "beta": str(self.beta)}


def apply_maps(A: Collection, T1: AffineMap, T2: AffineMap) -> Collection:
    pts = tuple(Point(T1(p.u1), T2(p.u2)) for p in A.points)
    if not all(p.in_unit_square() for p in pts):
        raise CollectionError("transformed collection leaves [0,1]^2")
    return Collection(pts, A.weights)


@dataclass(frozen=True)
class AxiomVerdict:
    axiom: str
    holds: bool
    witness: dict[str, Any] | None = None
    detail: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not self.holds and self.witness is None:
            raise ValueError("a failing verdict needs a witness")

    def __bool__(self) -> bool:
        return self.holds

    def to_dict(self) -> dict:
        out = {"axiom": self.axiom, "holds": self.holds, "witness": self.witness}
        out.update(self.detail)
        return out


def _pts(points) -> list[list[str]]:
    return [p.as_strings() for p in sorted(points)]


def neo_of(mech: Mechanism, A: Collection, method: str = "auto", budget: int = DEFAULT_BUDGET) -> tuple[Point, ...]:
    """Distinct equilibrium outcomes by brute force, closed form, or whichever fits (``auto``)."""
    if method not in ("auto", "brute", "characterize"):
        raise ValueError(f"unknown method {method!r}")
    if method == "characterize":
        return neo_characterization(mech, A).union
    if method == "auto" and mech.profile_count(A.n) > budget:
        try:
            return neo_characterization(mech, A).union
        except ValueError:
            pass
    return enumerate_pure_ne(mech, A, budget=budget, validate="outcomes").neo


def check_anonymity(mech: Mechanism, n: int, budget: int = DEFAULT_BUDGET) -> AxiomVerdict:
    s1 = list(mech.signal_space(n, 0))
    s2 = list(mech.signal_space(n, 1))
    if s1 != s2:
        return AxiomVerdict(
            "anonymity", False, {"reason": "signal spaces differ", "sizes": [len(s1), len(s2)]}
        )
    if len(s1) ** 2 > budget:
        raise BudgetExceeded(f"{len(s1) ** 2} signal pairs exceed the budget {budget}")
    for i, a in enumerate(s1):
        for b in s1[i + 1:]:
            fa = mech.allocate(a, b, n)
            fb = mech.allocate(b, a, n)
            if fa != fb:
                return AxiomVerdict(
                    "anonymity",
                    False,
                    {
                        "s1": mech.signal_to_json(a, n),
                        "s2": mech.signal_to_json(b, n),
                        "f(s1,s2)": [str(p) for p in fa],
                        "f(s2,s1)": [str(p) for p in fb],
                    },
                )
    return AxiomVerdict("anonymity", True)


def check_symmetry(mech: Mechanism, A: Collection, method: str = "auto", budget: int = DEFAULT_BUDGET) -> AxiomVerdict:
    if not A.is_symmetric():
        raise CollectionError("symmetry is only defined on symmetric collections")
    neo = set(neo_of(mech, A, method, budget))
    missing = sorted(x for x in neo if x.swapped() not in neo)
    detail = {"neo": _pts(neo)}
    if missing:
        return AxiomVerdict("symmetry", False, {"outcome": missing[0].as_strings(), "swapped_missing": True}, detail)
    return AxiomVerdict("symmetry", True, None, detail)


def check_ira(mech: Mechanism, A: Collection, j: int, method: str = "auto", budget: int = DEFAULT_BUDGET) -> AxiomVerdict:
    """Compare NEO of ``A`` with NEO after duplicating alternative ``j`` (0-based)."""
    before = set(neo_of(mech, A, method, budget))
    after = set(neo_of(mech, A.duplicate(j), method, budget))
    detail = {"j": j + 1, "neo": _pts(before), "neo_duplicated": _pts(after)}
    if before != after:
        return AxiomVerdict(
            "ira",
            False,
            {"j": j + 1, "only_original": _pts(before - after), "only_duplicated": _pts(after - before)},
            detail,
        )
    return AxiomVerdict("ira", True, None, detail)


def check_iat(
    mech: Mechanism, A: Collection, T1: AffineMap, T2: AffineMap, budget: int = DEFAULT_BUDGET
) -> AxiomVerdict:
    """Pure-equilibrium profiles must coincide and outcomes must map through ``(T1, T2)``."""
    B = apply_maps(A, T1, T2)
    ra = enumerate_pure_ne(mech, A, budget=budget, validate="outcomes")
    rb = enumerate_pure_ne(mech, B, budget=budget, validate="outcomes")
    detail = {"T1": T1.to_dict(), "T2": T2.to_dict(), "profiles": len(ra.equilibria)}
    pa, pb = ra.profiles, rb.profiles
    if pa != pb:
        diff = sorted(pa ^ pb, key=repr)[0]
        return AxiomVerdict(
            "iat",
            False,
            {
                "profile": [mech.signal_to_json(diff.s1, A.n), mech.signal_to_json(diff.s2, A.n)],
                "in_original": diff in pa,
            },
            detail,
        )
    outs_b = dict(rb.equilibria)
    for prof, x in ra.equilibria:
        y = outs_b[prof]
        if y != Point(T1(x.u1), T2(x.u2)):
            return AxiomVerdict(
                "iat",
                False,
                {
                    "profile": [mech.signal_to_json(prof.s1, A.n), mech.signal_to_json(prof.s2, A.n)],
                    "outcome": x.as_strings(),
                    "mapped_outcome": y.as_strings(),
                },
                detail,
            )
    return AxiomVerdict("iat", True, None, detail)


def check_uniqueness(mech: Mechanism, A: Collection, method: str = "auto", budget: int = DEFAULT_BUDGET) -> AxiomVerdict:
    """Counts distinct outcome points, not profiles."""
    neo = neo_of(mech, A, method, budget)
    detail = {"neo": _pts(neo)}
    if not neo:
        return AxiomVerdict("uniqueness", False, {"reason": "no pure equilibrium"}, detail)
    if len(neo) > 1:
        return AxiomVerdict("uniqueness", False, {"outcomes": _pts(neo)}, detail)
    return AxiomVerdict("uniqueness", True, None, detail)


def check_efficiency(
    mech: Mechanism,
    A: Collection,
    eps=0,
    mode: str = "all",
    notion: str = "alternatives",
    method: str = "auto",
    budget: int = DEFAULT_BUDGET,
) -> AxiomVerdict:
    eps = to_rational(eps)
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    if mode not in ("all", "exists"):
        raise ValueError("mode must be 'all' or 'exists'")
    tests = {"alternatives": is_eps_pareto_efficient, "frontier": is_eps_close_to_frontier}
    if notion not in tests:
        raise ValueError("notion must be 'alternatives' or 'frontier'")
    test = tests[notion]
    neo = neo_of(mech, A, method, budget)
    detail = {"eps": str(eps), "mode": mode, "notion": notion, "neo": _pts(neo)}
    if not neo:
        return AxiomVerdict("efficiency", False, {"reason": "no pure equilibrium"}, detail)
    good = [x for x in neo if test(A, x, eps)]
    if mode == "all" and len(good) < len(neo):
        bad = next(x for x in neo if x not in good)
        return AxiomVerdict("efficiency", False, {"outcome": bad.as_strings()}, detail)
    if mode == "exists" and not good:
        return AxiomVerdict("efficiency", False, {"outcomes": _pts(neo)}, detail)
    return AxiomVerdict("efficiency", True, None, detail)


def random_affine_pair(rng, A: Collection, grid: int = 8) -> tuple[AffineMap, AffineMap]:
    """Random positive affine maps keeping ``A`` inside the unit square.

    ``alpha`` is drawn from ``{1/grid, ..., 1}`` and ``beta`` from a grid over
    the admissible shifts.
    """
    maps = []
    for coord in (0, 1):
        vals = [p[coord] for p in A.points]
        lo, hi = min(vals), max(vals)
        alpha = Fraction(int(rng.integers(1, grid + 1)), grid)
        # need alpha*lo + beta >= 0 and alpha*hi + beta <= 1
        b_lo, b_hi = -alpha * lo, 1 - alpha * hi
        beta = b_lo + (b_hi - b_lo) * Fraction(int(rng.integers(0, grid + 1)), grid)
        maps.append(AffineMap(alpha, beta))
    return maps[0], maps[1]

