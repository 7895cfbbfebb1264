"""Command-line front end.

Exit codes: 0 success, 1 a checked property failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

from .afp import (
    AFPError,
    enumerate_afps_oracle,
    enumerate_diagonal_afps,
    is_afp,
    iterate_boundaries_included,
    witness_to_dict,
)
from .axioms import AXIOMS
from .characterize import (
    neo_characterization,
    pie_collection,
    pie_reference_x,
    sa_delta_neo,
    segment_distance,
)
from .core import Collection, CollectionError, parse_collection, to_rational
from .equilibria import DEFAULT_BUDGET, BudgetExceeded, enumerate_pure_ne
from .fixtures import write_fixtures
from .mechanisms import MECHANISM_KINDS, MechanismError, SADelta, make_mechanism
from .suites import AXIOM_MECHANISMS, SUITES, axiom_expectations, default_config, iat_rows, report_json, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _load(path) -> Collection:
    try:
        return parse_collection(Path(path).read_bytes())
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e}") from None


def _rationals(text: str | None):
    if text is None:
        return None
    return [to_rational(t) for t in text.split(",") if t.strip()]


def _mechanism(args, A=None):
    weights = _rationals(args.weights)
    if args.mechanism == "sa-delta-w" and weights is None and A is not None and A.is_weighted:
        weights = list(A.weights)
    delta = to_rational(args.delta) if args.delta is not None else None
    return make_mechanism(args.mechanism, delta, weights, args.k)


def _csv_rows(ag, dis) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["u1_exact", "u2_exact", "u1_float", "u2_float", "kind"])
    for kind, pts in (("AG", ag), ("DIS", dis)):
        for p in pts:
            w.writerow([str(p.u1), str(p.u2), f"{float(p.u1):.12g}", f"{float(p.u2):.12g}", kind])
    return buf.getvalue()


# -- subcommands ----------------------------------------------------------------------


def cmd_fixtures(args) -> int:
    out = Path(args.out or "fixtures")
    paths = write_fixtures(out, to_rational(args.eps))
    sys.stdout.write("".join(f"{p}\n" for p in paths))
    return EXIT_OK


def cmd_verify(args) -> int:
    overrides = {
        "seed": args.seed,
        "trials": args.trials,
        "budget": args.budget,
        "grid_denominator": args.grid,
    }
    if args.n_min is not None or args.n_max is not None:
        base = default_config(args.suite).n_range
        overrides["n_range"] = (args.n_min or base[0], args.n_max or base[1])
    if args.deltas:
        overrides["delta_values"] = tuple(_rationals(args.deltas))
    if args.k_values:
        overrides["k_values"] = tuple(int(k) for k in args.k_values.split(","))
    cfg = default_config(args.suite, **overrides)
    report = run_suite(args.suite, cfg, workers=args.threads)
    _emit(args, report_json(report))
    summary = report.get("counts", {"failed": report.get("failed")})
    print(f"{args.suite}: {'pass' if report['passed'] else 'FAIL'} {summary}", file=sys.stderr)
    return EXIT_OK if report["passed"] else EXIT_FAIL


def cmd_neo(args) -> int:
    A = _load(args.collection)
    mech = _mechanism(args, A)
    out: dict = {"mechanism": mech.describe(), "n": A.n, "method": args.method}
    brute = claimed = None
    if args.method in ("brute", "both"):
        rep = enumerate_pure_ne(mech, A, budget=args.budget)
        brute = set(rep.neo)
        out.update(rep.to_dict(profiles=args.profiles))
    if args.method in ("characterize", "both"):
        ch = neo_characterization(mech, A)
        claimed = set(ch.union)
        out["characterized"] = ch.to_dict()
        if brute is None:
            out["neo"] = [p.as_strings() for p in ch.union]
    status = EXIT_OK
    if brute is not None and claimed is not None:
        out["agree"] = brute == claimed
        if brute != claimed:
            out["only_brute"] = [p.as_strings() for p in sorted(brute - claimed)]
            out["only_characterized"] = [p.as_strings() for p in sorted(claimed - brute)]
            print("error: brute force and characterization disagree", file=sys.stderr)
            status = EXIT_FAIL
    _emit(args, _dump(out))
    return status


def cmd_afp(args) -> int:
    A = _load(args.collection)
    out: dict = {"n": A.n, "method": args.method}
    if args.method == "iterate":
        w, trace = iterate_boundaries_included(A)
        out["fixed_point"] = witness_to_dict(w)
        out["trace"] = [p.as_strings() for p in trace]
    elif args.method == "oracle":
        en = enumerate_afps_oracle(A, args.cap)
        out["afps"] = [p.as_strings() for p in en.points]
        out["witnesses"] = [witness_to_dict(w) for w in en.witnesses]
    elif args.method == "diagonal":
        ws = enumerate_diagonal_afps(A)
        out["afps"] = [w.x.as_strings() for w in ws]
        out["witnesses"] = [witness_to_dict(w) for w in ws]
    else:
        if not args.x:
            raise UsageError("--method check needs --x u1,u2")
        x = _rationals(args.x)
        if len(x) != 2:
            raise UsageError("--x takes two coordinates")
        w = is_afp(A, x)
        out["x"] = [str(v) for v in x]
        out["is_afp"] = w is not None
        out["witness"] = None if w is None else witness_to_dict(w)
    _emit(args, _dump(out))
    return EXIT_OK


def cmd_characterize(args) -> int:
    A = _load(args.collection)
    mech = _mechanism(args, A)
    ch = neo_characterization(mech, A)
    _emit(args, _dump({"mechanism": mech.describe(), "n": A.n, **ch.to_dict()}))
    if args.csv:
        Path(args.csv).write_text(_csv_rows(ch.ag, ch.dis))
    return EXIT_OK


def run_pie(k: int, delta, precision=Fraction(1, 10**9), cross_check: bool = False, budget: int = 1 << 31):
    """Pie-grid report plus the outcome sets it was built from."""
    delta = to_rational(delta)
    if k < 1:
        raise UsageError("k must be positive")
    if not 0 < delta <= 1:
        raise UsageError("delta must lie in (0, 1]")
    A = pie_collection(k)
    lo, hi = pie_reference_x(precision)
    try:
        afps = tuple(w.x for w in enumerate_diagonal_afps(A))
    except AFPError as e:
        raise UsageError(str(e)) from None
    ch = sa_delta_neo(A, delta, afps=afps)
    bound = delta + Fraction(1, k)
    dist = {p: segment_distance(p, lo) for p in ch.union}
    report = {
        "k": k,
        "n": A.n,
        "delta": str(delta),
        "norm": "L-infinity",
        "x_bracket": [str(lo), str(hi)],
        "x_bracket_float": [float(lo), float(hi)],
        "afps": [p.as_strings() for p in afps],
        "bound": str(bound),
        "max_distance": str(max(dist.values())) if dist else None,
        "outcomes": [{"x": p.as_strings(), "distance": str(d), "within": d <= bound} for p, d in sorted(dist.items())],
        "ag": [p.as_strings() for p in ch.ag],
        "dis": [p.as_strings() for p in ch.dis],
    }
    ok = bool(dist) and all(d <= bound for d in dist.values())
    if cross_check:
        brute = set(enumerate_pure_ne(SADelta(delta), A, budget=budget, validate="outcomes").neo)
        report["brute_force_agrees"] = brute == set(ch.union)
        ok = ok and report["brute_force_agrees"]
    report["passed"] = ok
    return report, ch


def cmd_pie(args) -> int:
    budget = args.budget if args.budget is not None else 1 << 31
    report, ch = run_pie(args.k_pie, to_rational(args.delta), to_rational(args.precision), args.cross_check, budget)
    _emit(args, _dump(report))
    if args.csv:
        Path(args.csv).write_text(_csv_rows(ch.ag, ch.dis))
    return EXIT_OK if report["passed"] else EXIT_FAIL


def cmd_axioms(args) -> int:
    fixtures = None
    if args.fixtures:
        d = Path(args.fixtures)
        if not d.is_dir():
            raise UsageError(f"{d} is not a directory")
        fixtures = {p.stem: _load(p) for p in sorted(d.glob("*.json"))}
    mechs = args.mechanisms.split(",") if args.mechanisms else list(AXIOM_MECHANISMS)
    unknown = [m for m in mechs if m not in AXIOM_MECHANISMS]
    if unknown:
        raise UsageError(f"unknown mechanism {unknown[0]!r}; choose from {', '.join(AXIOM_MECHANISMS)}")
    axioms = args.axioms.split(",") if args.axioms else list(AXIOMS)
    if set(axioms) - set(AXIOMS):
        raise UsageError(f"unknown axiom; choose from {', '.join(AXIOMS)}")
    rows = axiom_expectations(mechs, axioms, fixtures=fixtures)
    if "iat" in axioms:
        cfg = default_config("axioms", seed=args.seed)
        rows += iat_rows(cfg, mechs, fixtures=fixtures)
    failed = [r for r in rows if not r["ok"]]
    _emit(args, _dump({"rows": rows, "failed": len(failed), "passed": not failed}))
    return EXIT_OK if not failed else EXIT_FAIL


# -- parser ------------------------------------------------------------------------------


def _add_mechanism_flags(p, required=True):
    p.add_argument("--mechanism", "-m", choices=MECHANISM_KINDS, required=required)
    p.add_argument("--delta", help="rational such as 1/10")
    p.add_argument("--k", type=int, help="multiset size for sa-k-delta")
    p.add_argument("--weights", help="comma-separated positive rationals for sa-delta-w")


def _add_global_flags(p, default):
    p.add_argument("--seed", type=int, default=default)
    p.add_argument("--budget", type=int, default=default, help="profile-count cap for brute force")
    p.add_argument("--threads", type=int, default=1 if default is None else default, help="worker processes")
    p.add_argument("--out", default=default, help="output file (directory for fixtures)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bargain", description=__doc__)
    _add_global_flags(ap, None)
    # the same flags after the subcommand; SUPPRESS keeps them from clobbering earlier values
    common = argparse.ArgumentParser(add_help=False)
    _add_global_flags(common, argparse.SUPPRESS)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fixtures", parents=[common], help="write the named example collections")
    p.add_argument("--eps", default="1/4", help="parameter of the thm3_Appp fixture")
    p.set_defaults(func=cmd_fixtures)

    p = sub.add_parser("verify", parents=[common], help="run a seeded verification suite")
    p.add_argument("suite", choices=SUITES)
    p.add_argument("--trials", type=int)
    p.add_argument("--n-min", type=int)
    p.add_argument("--n-max", type=int)
    p.add_argument("--grid", type=int, help="coordinate grid denominator")
    p.add_argument("--deltas", help="comma-separated delta values")
    p.add_argument("--k-values", help="comma-separated k values (prop2)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("neo", parents=[common], help="equilibrium outcomes of a collection")
    p.add_argument("collection")
    _add_mechanism_flags(p)
    p.add_argument("--method", choices=("brute", "characterize", "both"), default="brute")
    p.add_argument("--profiles", action="store_true", help="list equilibrium profiles")
    p.set_defaults(func=cmd_neo)

    p = sub.add_parser("afp", parents=[common], help="average fixed points")
    p.add_argument("collection")
    p.add_argument("--method", choices=("oracle", "iterate", "diagonal", "check"), default="oracle")
    p.add_argument("--x", help="candidate point u1,u2 for --method check")
    p.add_argument("--cap", type=int, default=22, help="largest n for the oracle")
    p.set_defaults(func=cmd_afp)

    p = sub.add_parser("characterize", parents=[common], help="closed-form outcome sets")
    p.add_argument("collection")
    _add_mechanism_flags(p)
    p.add_argument("--csv", help="also write outcome points as CSV")
    p.set_defaults(func=cmd_characterize)

    p = sub.add_parser("pie", parents=[common], help="splitting-the-pie grid experiment")
    p.add_argument("--k", dest="k_pie", type=int, default=20)
    p.add_argument("--delta", default="1/100")
    p.add_argument("--precision", default="1/1000000000")
    p.add_argument("--cross-check", action="store_true", help="compare with brute force (small k)")
    p.add_argument("--csv", help="write outcome points as CSV")
    p.set_defaults(func=cmd_pie)

    p = sub.add_parser("axioms", parents=[common], help="axiom verdict matrix over fixtures")
    p.add_argument("--mechanisms", help="comma-separated subset of sa,sa-delta-1/10,sa-delta-1/2,dictator,cudd")
    p.add_argument("--fixtures", help="directory of fixture JSON files")
    p.add_argument("--axioms", help="comma-separated subset of anonymity,symmetry,ira,iat,uniqueness,efficiency")
    p.set_defaults(func=cmd_axioms)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.budget is None and args.command == "neo":
        args.budget = DEFAULT_BUDGET
    if args.threads < 1:
        parser.error("--threads must be positive")
    try:
        return args.func(args)
    except (UsageError, CollectionError, MechanismError, AFPError, BudgetExceeded, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
