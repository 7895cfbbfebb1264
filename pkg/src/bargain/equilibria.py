"""Pure Nash equilibria: payoffs, deviation checks, exhaustive enumeration and
the constructive equilibrium profiles."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, NamedTuple

import numpy as np

from .afp import AveragingWitness, check_witness
from .core import Collection, Point, dominates, mask_of, members, quadrant, weighted_avg
from .mechanisms import CUDD, Game, Mechanism, SADelta

__all__ = [
    "Profile",
    "Deviation",
    "NECheck",
    "EquilibriumReport",
    "BudgetExceeded",
    "ConstructionError",
    "DEFAULT_BUDGET",
    "payoffs",
    "is_pure_ne",
    "enumerate_pure_ne",
    "construct_disagreement_profile",
    "construct_agreement_profile",
    "construct_cudd_profiles",
    "lemma_violations",
    "disagreement_max",
]

DEFAULT_BUDGET = 1 << 24


class BudgetExceeded(RuntimeError):
    pass


class ConstructionError(ValueError):
    pass


class Profile(NamedTuple):
    s1: Any
    s2: Any


@dataclass(frozen=True)
class Deviation:
    player: int  # 1 or 2
    signal: Any
    before: Point
    after: Point


@dataclass(frozen=True)
class NECheck:
    is_ne: bool
    deviation: Deviation | None = None

    def __bool__(self) -> bool:
        return self.is_ne


@dataclass(frozen=True)
class EquilibriumReport:
    mechanism: Mechanism
    n: int
    equilibria: tuple[tuple[Profile, Point], ...]
    neo: tuple[Point, ...]

    @property
    def profiles(self) -> set[Profile]:
        return {p for p, _ in self.equilibria}

    def to_dict(self, profiles: bool = True) -> dict:
        out: dict = {}
        if profiles:
            sj = self.mechanism.signal_to_json
            out["equilibria"] = [
                {"s1": sj(p.s1, self.n), "s2": sj(p.s2, self.n), "outcome": o.as_strings()}
                for p, o in self.equilibria
            ]
        out["neo"] = [o.as_strings() for o in self.neo]
        return out

    def to_json(self, profiles: bool = True) -> str:
        return json.dumps(self.to_dict(profiles), indent=1)


def payoffs(mech: Mechanism, A: Collection, p: Profile) -> Point:
    """Expected utility pair of profile ``p``."""
    if isinstance(mech, SADelta) and mech.weights is not None and len(mech.weights) != A.n:
        raise ValueError(f"mechanism has {len(mech.weights)} weights but the collection has {A.n} alternatives")
    return mech.payoff(A, p[0], p[1])


def is_pure_ne(mech: Mechanism, A: Collection, p: Profile) -> NECheck:
    """Exact best-response check of both players.

    A deviation counts only if it strictly raises the deviator's own payoff.
    The first improving deviation found (player 1 first, signals in order)
    is returned as a witness.
    """
    s1, s2 = p
    base = payoffs(mech, A, p)
    for alt in mech.signal_space(A.n, 0):
        if alt == s1:
            continue
        q = mech.payoff(A, alt, s2)
        if q.u1 > base.u1:
            return NECheck(False, Deviation(1, alt, base, q))
    for alt in mech.signal_space(A.n, 1):
        if alt == s2:
            continue
        q = mech.payoff(A, s1, alt)
        if q.u2 > base.u2:
            return NECheck(False, Deviation(2, alt, base, q))
    return NECheck(True)


def _scan_numpy(game: Game, block_rows: int | None):
    m1, m2 = game.shape
    rows = block_rows or max(1, (1 << 20) // max(1, m2))
    best1 = None
    best2 = []
    for r0 in range(0, m1, rows):
        P1, P2 = game.block(r0, min(m1, r0 + rows))
        colmax = P1.max(axis=0)
        best1 = colmax if best1 is None else np.maximum(best1, colmax)
        best2.append(P2.max(axis=1))
    best2 = np.concatenate(best2)
    found = []
    for r0 in range(0, m1, rows):
        r1 = min(m1, r0 + rows)
        P1, P2 = game.block(r0, r1)
        hit = np.asarray(P1 == best1[None, :], dtype=bool) & np.asarray(P2 == best2[r0:r1, None], dtype=bool)
        for i, j in zip(*np.nonzero(hit)):
            found.append((r0 + int(i), int(j), P1[i, j], P2[i, j]))
    return found


def enumerate_pure_ne(
    mech: Mechanism,
    A: Collection,
    budget: int = DEFAULT_BUDGET,
    validate: str = "all",
    block_rows: int | None = None,
    use_kernel: bool = True,
) -> EquilibriumReport:
    """Every pure Nash equilibrium of the game ``mech`` induces on ``A``.

    Payoffs are scanned as exact integer tables (compiled loop for SA-family
    games, blocked numpy otherwise).  ``validate`` re-checks candidates with
    :func:`is_pure_ne` in rational arithmetic: ``"all"`` checks every profile,
    ``"outcomes"`` one profile per distinct outcome, ``"none"`` skips it.
    """
    if validate not in ("all", "outcomes", "none"):
        raise ValueError("validate must be 'all', 'outcomes' or 'none'")
    count = mech.profile_count(A.n)
    if count > budget:
        raise BudgetExceeded(
            f"{count} profiles exceed the budget {budget}; use the closed-form characterization instead"
        )
    game = mech.game(A)
    m1, m2 = game.shape
    if use_kernel and game.sa_tables is not None:
        from ._kernels import sa_equilibria

        rows = [tuple(r) for r in sa_equilibria(game.sa_tables, m1).tolist()]
    else:
        rows = _scan_numpy(game, block_rows)

    s1s, s2s = game.signals1, game.signals2
    eqs = []
    for i, j, p1, p2 in rows:
        eqs.append((Profile(s1s[i], s2s[j]), game.outcome_from_ints(p1, p2)))

    if validate != "none":
        seen: set[Point] = set()
        for prof, out in eqs:
            if validate == "outcomes" and out in seen:
                continue
            seen.add(out)
            if payoffs(mech, A, prof) != out or not is_pure_ne(mech, A, prof):
                raise AssertionError(f"scan and exact check disagree on profile {prof}")
    neo = tuple(sorted({o for _, o in eqs}))
    return EquilibriumReport(mech, A.n, tuple(eqs), neo)


# -- constructive profiles ----------------------------------------------------------


def _split_boundary(A: Collection, w: AveragingWitness) -> tuple[int, int]:
    """B1 holds boundary points with a1 == x1 (points equal to x included)."""
    b1 = quadrant(A, w.x, ">=,*") & w.boundary_included
    return b1, w.boundary_included & ~b1


def construct_disagreement_profile(A: Collection, witness: AveragingWitness) -> Profile:
    """Lists ``(B1 | D1, B2 | D2)`` with ``D_i`` the points above ``x`` for player i."""
    x = witness.x
    if not check_witness(A, witness):
        raise ConstructionError("witness is not a valid average fixed point")
    if any(dominates(a, x) for a in A.points):
        raise ConstructionError(f"{x!r} is strictly dominated by an alternative")
    b1, b2 = _split_boundary(A, witness)
    d1 = quadrant(A, x, ">,*")
    d2 = quadrant(A, x, "*,>")
    return Profile(b1 | d1, b2 | d2)


def construct_agreement_profile(A: Collection, a_index: int, witness: AveragingWitness) -> Profile:
    """Agreement on alternative ``a_index`` backed by the fixed point ``witness.x``.

    Player 1 lists ``B1 | C1 | R | {a}`` and player 2 lists ``B2 | C2 | {a}``.
    ``R`` is the rectangle between ``x`` and ``a``.  ``C1`` holds the points
    right of ``x1`` and not above ``a2``, and ``C2`` the points above ``x2``
    and not right of ``a1``, both outside ``R``.
    """
    a = A.points[a_index]
    x = witness.x
    if not check_witness(A, witness):
        raise ConstructionError("witness is not a valid average fixed point")
    if any(dominates(b, a) for b in A.points):
        raise ConstructionError(f"alternative {a_index + 1} is not Pareto efficient")
    if not dominates(a, x, "weak"):
        raise ConstructionError(f"{a!r} does not weakly dominate {x!r}")
    R = quadrant(A, a, "weak_lower") & quadrant(A, x, "weak_upper")
    C1 = quadrant(A, Point(x.u1, a.u2), ">,<=") & ~R
    C2 = quadrant(A, Point(a.u1, x.u2), "<=,>") & ~R
    b1, b2 = _split_boundary(A, witness)
    me = 1 << a_index
    L1 = b1 | C1 | R | me
    L2 = (b2 | C2 | me) & ~(R & ~me)
    return Profile(L1, L2)


def construct_cudd_profiles(A: Collection) -> list[Profile]:
    """Disagreement profiles ``((j,j),(k,k))`` plus one agreement profile per
    alternative meeting both midpoint thresholds, with punishments that
    minimize the opponent's utility."""
    u1 = [p.u1 for p in A.points]
    u2 = [p.u2 for p in A.points]
    top1 = [i for i, v in enumerate(u1) if v == max(u1)]
    top2 = [i for i, v in enumerate(u2) if v == max(u2)]
    out = [Profile((j, j), (k, k)) for j in top1 for k in top2]
    pun1 = u2.index(min(u2))  # player 1 hurts player 2
    pun2 = u1.index(min(u1))
    t1 = (max(u1) + min(u1)) / 2
    t2 = (max(u2) + min(u2)) / 2
    for k, p in enumerate(A.points):
        if p.u1 >= t1 and p.u2 >= t2:
            out.append(Profile((k, pun1), (k, pun2)))
    return out


# -- equilibrium structure invariants -------------------------------------------------


def _union_avg(A: Collection, prof: Profile) -> tuple[int, Point]:
    U = prof.s1 | prof.s2
    U = U or A.full_mask
    return U, weighted_avg(A, U)


def lemma_violations(A: Collection, report: EquilibriumReport) -> list[dict]:
    """Check structural invariants on every equilibrium of an SA_delta report.

    * the agreement set holds a single point (all intersection alternatives equal);
    * the union is sandwiched between A \\ A_{<=,<=}(x) and A \\ A_{<,<}(x),
      where x is the union average;
    * an agreement point weakly dominates x and is Pareto efficient;
    * in a disagreement no alternative strictly dominates x.
    """
    bad = []
    full = A.full_mask
    for prof, _ in report.equilibria:
        inter = prof.s1 & prof.s2
        U, x = _union_avg(A, prof)
        pts = [A.points[i] for i in members(inter)]
        if inter and len(set(pts)) != 1:
            bad.append({"lemma": "unique-agreement", "profile": prof})
        mandatory = full & ~quadrant(A, x, "weak_lower")
        allowed = full & ~quadrant(A, x, "strict_lower")
        if mandatory & ~U or U & ~allowed:
            bad.append({"lemma": "union-sandwich", "profile": prof})
        if inter:
            a = pts[0]
            if not dominates(a, x, "weak") or any(dominates(b, a) for b in A.points):
                bad.append({"lemma": "agreement-efficient", "profile": prof})
        elif any(dominates(b, x) for b in A.points):
            bad.append({"lemma": "disagreement-undominated", "profile": prof})
    return bad


def disagreement_max(A: Collection, witness: AveragingWitness, player: int = 1):
    """Brute-force ``max_S avg_i(S | S_other)`` for the opponent list of the
    disagreement profile, over every nonempty union.  Returns ``(max, x_i)``."""
    prof = construct_disagreement_profile(A, witness)
    other = prof.s2 if player == 1 else prof.s1
    coord = 0 if player == 1 else 1
    best = None
    for S in range(1 << A.n):
        U = S | other
        if not U:
            continue
        v = weighted_avg(A, U)[coord]
        if best is None or v > best:
            best = v
    return best, witness.x[coord]


def cudd_profile_outcome(A: Collection, prof: Profile) -> Point:
    return CUDD().payoff(A, *prof)
