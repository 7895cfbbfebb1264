"""Seeded verification suites over random grid collections.

Every trial draws its collection from its own PCG64 stream spawned from the
suite seed, so a trial's result depends only on ``(seed, index)`` and reports
are identical regardless of how many worker processes ran them.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from .afp import (
    check_witness,
    enumerate_afps_oracle,
    enumerate_diagonal_afps,
    iterate_boundaries_included,
    verify_chain,
)
from .axioms import (
    check_anonymity,
    check_efficiency,
    check_iat,
    check_ira,
    check_symmetry,
    check_uniqueness,
    random_affine_pair,
)
from .characterize import cudd_neo, is_eps_close_to_frontier, is_eps_pareto_efficient, sa_delta_neo
from .core import Collection, Point, collection_to_dict, dominates, to_rational
from .equilibria import (
    BudgetExceeded,
    construct_agreement_profile,
    construct_disagreement_profile,
    disagreement_max,
    enumerate_pure_ne,
    is_pure_ne,
    lemma_violations,
    payoffs,
)
from .fixtures import fixture_collections
from .mechanisms import CUDD, Dictator, SADelta, SAKDelta

__all__ = ["SuiteConfig", "SUITES", "default_config", "random_collection", "run_suite", "report_json"]

PRNG_NAME = "numpy.PCG64"


@dataclass(frozen=True)
class SuiteConfig:
    seed: int = 42
    trials: int = 200
    n_range: tuple[int, int] = (2, 6)
    grid_denominator: int = 8
    delta_values: tuple[Fraction, ...] = (Fraction(1, 4), Fraction(1, 2), Fraction(1))
    budget: int = 1 << 24
    k_values: tuple[int, ...] = (2, 3)

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        lo, hi = self.n_range
        if not 1 <= lo <= hi:
            raise ValueError(f"bad n_range {self.n_range}")
        if self.grid_denominator < 1:
            raise ValueError("grid_denominator must be positive")
        object.__setattr__(self, "delta_values", tuple(to_rational(d) for d in self.delta_values))

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "trials": self.trials,
            "n_range": list(self.n_range),
            "grid_denominator": self.grid_denominator,
            "delta_values": [str(d) for d in self.delta_values],
            "budget": self.budget,
            "k_values": list(self.k_values),
        }


_DEFAULTS = {
    "theorem1": {},
    "cudd": {"n_range": (2, 5)},
    "afp": {},
    "lemmas": {},
    "axioms": {"trials": 20, "n_range": (1, 1)},
    "prop2": {"trials": 50, "n_range": (1, 3), "delta_values": (Fraction(1, 10), Fraction(1, 4), Fraction(1, 2))},
}


def default_config(suite: str, **overrides) -> SuiteConfig:
    if suite not in _DEFAULTS:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(_DEFAULTS)}")
    opts = dict(_DEFAULTS[suite])
    opts.update({k: v for k, v in overrides.items() if v is not None})
    return SuiteConfig(**opts)


def random_collection(rng: np.random.Generator, n_range, g: int) -> Collection:
    n = int(rng.integers(n_range[0], n_range[1] + 1))
    c = rng.integers(0, g + 1, size=(n, 2))
    return Collection(tuple(Point(Fraction(int(a), g), Fraction(int(b), g)) for a, b in c))


def _pts(points) -> list:
    return [p.as_strings() for p in sorted(points)]


# -- per-trial checks ----------------------------------------------------------------


def _trial_theorem1(A: Collection, cfg: SuiteConfig, rng) -> dict:
    rows = []
    for d in cfg.delta_values:
        brute = set(enumerate_pure_ne(SADelta(d), A, budget=cfg.budget, validate="outcomes").neo)
        ch = sa_delta_neo(A, d)
        claimed = set(ch.union)
        eff = all(is_eps_pareto_efficient(A, x, d) for x in brute)
        rows.append(
            {
                "delta": str(d),
                "equal": brute == claimed,
                "nonempty": bool(brute),
                "delta_efficient": eff,
                "neo": _pts(brute),
                "only_brute": _pts(brute - claimed),
                "only_characterized": _pts(claimed - brute),
            }
        )
    ok = all(r["equal"] and r["nonempty"] and r["delta_efficient"] for r in rows)
    return {"pass": ok, "checks": rows}


def _trial_cudd(A: Collection, cfg: SuiteConfig, rng) -> dict:
    brute = set(enumerate_pure_ne(CUDD(), A, budget=cfg.budget, validate="outcomes").neo)
    claimed = set(cudd_neo(A).union)
    has_pe = any(is_eps_pareto_efficient(A, x, 0) for x in brute)
    return {
        "pass": brute == claimed and has_pe,
        "equal": brute == claimed,
        "pareto_efficient_exists": has_pe,
        "neo": _pts(brute),
        "only_brute": _pts(brute - claimed),
        "only_characterized": _pts(claimed - brute),
    }


def _iteration_ok(A: Collection) -> dict:
    w, trace = iterate_boundaries_included(A)
    increasing = all(dominates(b, a) for a, b in zip(trace, trace[1:]))
    return {
        "iterations": len(trace),
        "within_bound": len(trace) <= A.n + 1,
        "strictly_increasing": increasing,
        "witness_valid": check_witness(A, w),
    }


def _trial_afp(A: Collection, cfg: SuiteConfig, rng) -> dict:
    it = _iteration_ok(A)
    afps = enumerate_afps_oracle(A)
    chain = verify_chain(afps.points)
    bi_found = it["witness_valid"] and iterate_boundaries_included(A)[0].x in afps.points
    # symmetrized copy: every AFP on the diagonal, diagonal scan matches the oracle
    S = Collection(A.points + tuple(p.swapped() for p in A.points))
    sym = enumerate_afps_oracle(S)
    diagonal = all(x.u1 == x.u2 for x in sym.points)
    scan = tuple(w.x for w in enumerate_diagonal_afps(S))
    it_s = _iteration_ok(S)
    ok = (
        all(it[k] for k in ("within_bound", "strictly_increasing", "witness_valid"))
        and all(it_s[k] for k in ("within_bound", "strictly_increasing", "witness_valid"))
        and chain
        and bi_found
        and diagonal
        and verify_chain(sym.points)
        and scan == sym.points
    )
    return {
        "pass": ok,
        "iteration": it,
        "afps": _pts(afps.points),
        "chain": chain,
        "iteration_point_in_oracle": bi_found,
        "symmetrized": {
            "iteration": it_s,
            "afps": _pts(sym.points),
            "diagonal": diagonal,
            "scan_matches_oracle": scan == sym.points,
        },
    }


def _trial_lemmas(A: Collection, cfg: SuiteConfig, rng) -> dict:
    rows = []
    for d in cfg.delta_values:
        mech = SADelta(d)
        rep = enumerate_pure_ne(mech, A, budget=cfg.budget, validate="none")
        bad = lemma_violations(A, rep)
        rows.append(
            {
                "delta": str(d),
                "equilibria": len(rep.equilibria),
                "violations": sorted({b["lemma"] for b in bad}),
                "first_violation": None
                if not bad
                else [mech.signal_to_json(bad[0]["profile"].s1, A.n), mech.signal_to_json(bad[0]["profile"].s2, A.n)],
            }
        )
    # constructive profiles and the disagreement max bound, independent of delta
    afps = enumerate_afps_oracle(A)
    construct = []
    seen = set()
    for w in afps.witnesses:
        if w.x in seen:
            continue
        seen.add(w.x)
        if any(dominates(a, w.x) for a in A.points):
            continue
        prof = construct_disagreement_profile(A, w)
        for player in (1, 2):
            best, xi = disagreement_max(A, w, player)
            construct.append({"x": w.x.as_strings(), "player": player, "max_le_x": best <= xi})
        for d in cfg.delta_values:
            mech = SADelta(d)
            ok = bool(is_pure_ne(mech, A, prof)) and payoffs(mech, A, prof) == w.x
            construct.append({"x": w.x.as_strings(), "delta": str(d), "disagreement_ne": ok})
    for w in afps.witnesses:
        for i, a in enumerate(A.points):
            if not dominates(a, w.x, "weak") or any(dominates(b, a) for b in A.points):
                continue
            prof = construct_agreement_profile(A, i, w)
            for d in cfg.delta_values:
                mech = SADelta(d)
                want = (1 - d) * a + d * w.x
                ok = bool(is_pure_ne(mech, A, prof)) and payoffs(mech, A, prof) == want
                construct.append({"x": w.x.as_strings(), "a": i + 1, "delta": str(d), "agreement_ne": ok})
    construct_ok = all(all(v for k, v in c.items() if isinstance(v, bool)) for c in construct)
    ok = construct_ok and all(not r["violations"] for r in rows)
    return {"pass": ok, "checks": rows, "constructions_ok": construct_ok, "constructions": len(construct)}


def _trial_prop2(A: Collection, cfg: SuiteConfig, rng) -> dict:
    rows = []
    for k in cfg.k_values:
        for d in cfg.delta_values:
            mech = SAKDelta(d, k)
            ch = sa_delta_neo(mech.lift(A), d)
            eps = d + Fraction(1, k)
            far = [x for x in ch.union if not is_eps_close_to_frontier(A, x, eps)]
            rows.append({"k": k, "delta": str(d), "outcomes": len(ch.union), "not_close": _pts(far)})
    return {"pass": all(not r["not_close"] for r in rows), "checks": rows}


# -- axioms suite: fixture expectations plus random affine maps ------------------------------

AXIOM_MECHANISMS = {
    "sa": SADelta(0),
    "sa-delta-1/10": SADelta(Fraction(1, 10)),
    "sa-delta-1/2": SADelta(Fraction(1, 2)),
    "dictator": Dictator(),
    "cudd": CUDD(),
}
_AXIOM_BRUTE_BUDGET = 1 << 16


def axiom_expectations(mech_names=None, axioms=None, budget: int = _AXIOM_BRUTE_BUDGET, fixtures=None) -> list[dict]:
    """Instance-level expectations over the fixture set.

    Each row names the mechanism, fixture, axiom, the expected verdict and the
    observed verdict.  Rows whose fixture is absent from ``fixtures`` are
    left out.
    """
    fx = fixture_collections() if fixtures is None else fixtures
    names = list(mech_names or AXIOM_MECHANISMS)
    want_axioms = set(axioms or ("anonymity", "symmetry", "ira", "uniqueness", "efficiency"))
    rows: list[dict] = []

    def add(mech_name, fixture, axiom, expect, verdict, **extra):
        row = {
            "mechanism": mech_name,
            "fixture": fixture,
            "axiom": axiom,
            "expected": expect,
            "holds": verdict.holds,
            "witness": verdict.witness,
            "ok": expect is None or verdict.holds == expect,
        }
        row.update(extra)
        rows.append(row)

    for name in names:
        mech = AXIOM_MECHANISMS[name]
        if "anonymity" in want_axioms:
            add(name, None, "anonymity", name != "dictator", check_anonymity(mech, 3), n=3)
        if "uniqueness" in want_axioms and name == "sa-delta-1/10" and "thm2_App" in fx:
            v = check_uniqueness(mech, fx["thm2_App"], budget=budget)
            add(name, "thm2_App", "uniqueness", False, v, outcomes=len(v.detail["neo"]))
            rows[-1]["ok"] = rows[-1]["ok"] and len(v.detail["neo"]) >= 3
        if "ira" in want_axioms and name == "sa-delta-1/2" and "thm3_A" in fx:
            add(name, "thm3_A", "ira", False, check_ira(mech, fx["thm3_A"], 1, budget=budget), j=2)
        if name in ("dictator", "cudd"):
            for fname, A in fx.items():
                if "ira" in want_axioms:
                    # one verdict per fixture, failing on the first index that breaks IRA
                    verdicts = [check_ira(mech, A, j, budget=budget) for j in range(A.n)]
                    first_bad = next((v for v in verdicts if not v.holds), verdicts[0])
                    add(name, fname, "ira", True, first_bad, indices=A.n)
                if "symmetry" in want_axioms and A.is_symmetric():
                    # the dictator is only required to break symmetry somewhere
                    add(name, fname, "symmetry", True if name == "cudd" else None, check_symmetry(mech, A, budget=budget))
                if "efficiency" in want_axioms and name == "dictator":
                    add(name, fname, "efficiency", True, check_efficiency(mech, A, 0, "all", budget=budget))
                if "efficiency" in want_axioms and name == "cudd":
                    add(name, fname, "efficiency-exists", True, check_efficiency(mech, A, 0, "exists", budget=budget))
        if "symmetry" in want_axioms and name == "dictator":
            sym = [r for r in rows if r["mechanism"] == name and r["axiom"] == "symmetry"]
            broken = [r["fixture"] for r in sym if not r["holds"]]
            rows.append({"mechanism": name, "fixture": None, "axiom": "symmetry-somewhere", "expected": False,
                         "holds": not broken, "witness": {"fixtures": broken}, "ok": bool(broken)})
        if "efficiency" in want_axioms and name == "cudd" and "thm3_Appp" in fx:
            v = check_efficiency(mech, fx["thm3_Appp"], Fraction(1, 4), "all", budget=budget)
            add(name, "thm3_Appp", "efficiency", False, v, eps="1/4")
        if "efficiency" in want_axioms and name == "sa" and "example1" in fx:
            add(name, "example1", "efficiency", False, check_efficiency(mech, fx["example1"], 0, "all", budget=budget))
    return rows


def iat_rows(cfg: SuiteConfig, mech_names=None, fixtures=None) -> list[dict]:
    """Random affine maps per fixture and mechanism; fixtures above the brute budget are skipped."""
    rows = []
    fx = fixture_collections() if fixtures is None else fixtures
    seqs = np.random.SeedSequence(cfg.seed)
    for fname, child in zip(sorted(fx), seqs.spawn(len(fx))):
        A = fx[fname]
        rng = np.random.Generator(np.random.PCG64(child))
        maps = [random_affine_pair(rng, A) for _ in range(cfg.trials)]
        for name in mech_names or AXIOM_MECHANISMS:
            mech = AXIOM_MECHANISMS[name]
            if mech.profile_count(A.n) > _AXIOM_BRUTE_BUDGET:
                rows.append({"mechanism": name, "fixture": fname, "axiom": "iat", "status": "skipped",
                             "reason": f"{mech.profile_count(A.n)} profiles above {_AXIOM_BRUTE_BUDGET}", "ok": True})
                continue
            bad = None
            for T1, T2 in maps:
                v = check_iat(mech, A, T1, T2, budget=_AXIOM_BRUTE_BUDGET)
                if not v.holds:
                    bad = v
                    break
            rows.append({"mechanism": name, "fixture": fname, "axiom": "iat", "maps": len(maps),
                         "holds": bad is None, "witness": None if bad is None else bad.witness,
                         "expected": True, "ok": bad is None})
    return rows


# -- driver ------------------------------------------------------------------------

_TRIALS = {
    "theorem1": _trial_theorem1,
    "cudd": _trial_cudd,
    "afp": _trial_afp,
    "lemmas": _trial_lemmas,
    "prop2": _trial_prop2,
}
SUITES = tuple(_DEFAULTS)


def _run_one(args) -> dict:
    suite, cfg, index, seq = args
    rng = np.random.Generator(np.random.PCG64(seq))
    A = random_collection(rng, cfg.n_range, cfg.grid_denominator)
    rec = {"trial": index, "collection": collection_to_dict(A)}
    try:
        rec.update(_TRIALS[suite](A, cfg, rng))
        rec["status"] = "pass" if rec["pass"] else "fail"
    except BudgetExceeded as e:
        rec.update({"status": "skipped", "pass": True, "reason": str(e)})
    return rec


def run_suite(suite: str, cfg: SuiteConfig | None = None, workers: int = 1) -> dict:
    """Run ``suite`` and return the report dict (``report["passed"]`` is the verdict)."""
    cfg = cfg or default_config(suite)
    header = {"suite": suite, "prng": PRNG_NAME, "config": cfg.to_dict()}
    if suite == "axioms":
        rows = axiom_expectations() + iat_rows(cfg)
        failed = [i for i, r in enumerate(rows) if not r["ok"]]
        return {**header, "rows": rows, "failed": len(failed), "passed": not failed}
    if suite not in _TRIALS:
        raise ValueError(f"unknown suite {suite!r}")
    seqs = np.random.SeedSequence(cfg.seed).spawn(cfg.trials)
    jobs = [(suite, cfg, i, s) for i, s in enumerate(seqs)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            trials = list(ex.map(_run_one, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        trials = [_run_one(j) for j in jobs]
    trials.sort(key=lambda t: t["trial"])
    counts = {s: sum(t["status"] == s for t in trials) for s in ("pass", "fail", "skipped")}
    return {**header, "trials": trials, "counts": counts, "passed": counts["fail"] == 0}


def report_json(report: dict) -> str:
    return json.dumps(report, indent=1, sort_keys=True) + "\n"


def with_overrides(cfg: SuiteConfig, **kw) -> SuiteConfig:
    return replace(cfg, **{k: v for k, v in kw.items() if v is not None})
