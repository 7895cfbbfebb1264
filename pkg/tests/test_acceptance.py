"""Acceptance gate: one test and one printed PASS/FAIL line per criterion."""

import sys
import time
from fractions import Fraction as F

import pytest

from bargain.afp import enumerate_afps_oracle, enumerate_diagonal_afps
from bargain.axioms import check_ira, check_symmetry
from bargain.characterize import pie_collection, pie_reference_x, sa_delta_neo, segment_distance
from bargain.cli import run_pie
from bargain.core import Point
from bargain.equilibria import Profile, enumerate_pure_ne, is_pure_ne, payoffs
from bargain.fixtures import example3_collection, fixture_collections
from bargain.mechanisms import CUDD, SADelta
from bargain.suites import default_config, report_json, run_suite
from conftest import EXAMPLE1, EXAMPLE2

P = lambda a, b: Point(F(a), F(b))  # noqa: E731
_LINES: dict[int, str] = {}
_CACHE: dict = {}


@pytest.fixture(scope="module", autouse=True)
def summary(request):
    yield
    tr = request.config.pluginmanager.get_plugin("terminalreporter")
    write = tr.write_line if tr else print
    write("")
    write("acceptance summary")
    for k in sorted(_LINES):
        write(_LINES[k])


def verdict(n: int, ok: bool, detail: str, capsys=None):
    line = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    _LINES[n] = line
    if capsys is not None:
        with capsys.disabled():
            print("\n" + line)
    assert ok, line


def suite(name):
    if name not in _CACHE:
        t = time.perf_counter()
        rep = run_suite(name, default_config(name))
        _CACHE[name] = (rep, time.perf_counter() - t)
    return _CACHE[name]


def _per_delta_failures(rep, key):
    out = {}
    for t in rep["trials"]:
        for c in t["checks"]:
            if key(c):
                out.setdefault(c["delta"], []).append(t["trial"])
    return out


def test_criterion_01_closed_form_equals_brute_force(capsys):
    rep, secs = suite("theorem1")
    bad = _per_delta_failures(rep, lambda c: not c["equal"])
    cfg = rep["config"]
    counts = {d: len(bad.get(d, [])) for d in cfg["delta_values"]}
    example = None
    if bad:
        d = next(iter(bad))
        t = rep["trials"][bad[d][0]]
        c = next(c for c in t["checks"] if c["delta"] == d)
        example = f"e.g. trial {t['trial']} delta={d}: brute-only outcomes {c['only_brute']}"
    ok = not bad and secs < 120
    verdict(
        1,
        ok,
        f"{cfg['trials']} collections, mismatches per delta {counts}, {secs:.1f}s" + (f"; {example}" if example else ""),
        capsys,
    )


def test_criterion_02_nonempty_and_delta_efficient(capsys):
    rep, _ = suite("theorem1")
    bad = _per_delta_failures(rep, lambda c: not (c["nonempty"] and c["delta_efficient"]))
    checked = sum(len(t["checks"]) for t in rep["trials"])
    verdict(2, not bad, f"{checked} (collection, delta) cells, failures {bad or 'none'}", capsys)


def test_criterion_03_fixed_point_structure(capsys):
    rep, _ = suite("afp")
    worst = max(t["iteration"]["iterations"] for t in rep["trials"])
    fails = [t["trial"] for t in rep["trials"] if t["status"] != "pass"]
    verdict(
        3,
        not fails,
        f"{len(rep['trials'])} collections (+ symmetrized copies): iteration bound, monotone trace, chain, diagonal; "
        f"max iterations {worst}; failures {fails or 'none'}",
        capsys,
    )


def test_criterion_04_worked_examples(capsys):
    checks = {}
    prof = Profile(0b1001, 0b1010)
    checks["ex1 SA equilibrium"] = bool(is_pure_ne(SADelta(0), EXAMPLE1, prof)) and payoffs(
        SADelta(0), EXAMPLE1, prof
    ) == P("2/3", "2/3")
    checks["ex1 SA_1/10 not equilibrium"] = not is_pure_ne(SADelta(F(1, 10)), EXAMPLE1, prof)
    checks["ex2 AFP set"] = enumerate_afps_oracle(EXAMPLE2).points == (P("33/50", "33/50"), P(1, 1))
    t = time.perf_counter()
    A3 = example3_collection(2)
    found = {w.x for w in enumerate_diagonal_afps(A3)}
    checks["ex3 k=2 AFPs"] = A3.n == 26 and {P("5/16", "5/16"), P("19/104", "19/104")} <= found
    secs = time.perf_counter() - t
    ok = all(checks.values()) and secs < 30
    verdict(4, ok, ", ".join(f"{k}={'ok' if v else 'NO'}" for k, v in checks.items()) + f", ex3 {secs:.2f}s", capsys)


def test_criterion_05_pie_grid(capsys):
    t = time.perf_counter()
    lo, hi = pie_reference_x(F(1, 10**9))
    bracket_ok = F(3949, 10000) < lo < hi < F(3950, 10000) and hi - lo <= F(1, 10**9)
    report, ch = run_pie(20, F(1, 100))
    bound = F(1, 100) + F(1, 20)
    worst = max(segment_distance(p, lo) for p in ch.union)
    k20_ok = report["passed"] and worst <= bound and len(ch.union) > 0
    # brute force over all 2^30 profiles of the k=4 grid
    A4 = pie_collection(4)
    brute = set(enumerate_pure_ne(SADelta(F(1, 100)), A4, budget=1 << 31, validate="outcomes").neo)
    cross_ok = brute == set(sa_delta_neo(A4, F(1, 100)).union)
    secs = time.perf_counter() - t
    ok = bracket_ok and k20_ok and cross_ok and secs < 60
    verdict(
        5,
        ok,
        f"x in ({float(lo):.10f}, {float(hi):.10f}); k=20: {len(ch.union)} outcomes, max L-inf distance "
        f"{float(worst):.4f} <= {float(bound)}; k=4 brute force agrees={cross_ok}; {secs:.1f}s",
        capsys,
    )


def test_criterion_06_cudd(capsys):
    rep, _ = suite("cudd")
    fails = [t["trial"] for t in rep["trials"] if t["status"] != "pass"]
    fx = fixture_collections()
    sym_bad = [n for n, A in fx.items() if A.is_symmetric() and not check_symmetry(CUDD(), A)]
    pairs = [(n, j) for n, A in fx.items() for j in range(A.n)]
    ira_bad = [(n, j + 1) for n, j in pairs if not check_ira(CUDD(), fx[n], j)]
    ok = not fails and not sym_bad and not ira_bad
    verdict(
        6,
        ok,
        f"{len(rep['trials'])} collections (brute == closed form, PE outcome exists), failures {fails or 'none'}; "
        f"symmetry on {sum(A.is_symmetric() for A in fx.values())} symmetric fixtures, bad {sym_bad or 'none'}; "
        f"IRA on {len(pairs)} (fixture, j) pairs, bad {ira_bad or 'none'}",
        capsys,
    )


def test_criterion_07_frontier_closeness(capsys):
    rep, _ = suite("prop2")
    fails = [t["trial"] for t in rep["trials"] if t["status"] != "pass"]
    cells = sum(len(t["checks"]) for t in rep["trials"])
    verdict(7, not fails, f"{len(rep['trials'])} collections x k in {{2,3}} x 3 deltas = {cells} cells, failures {fails or 'none'}", capsys)


def test_criterion_08_equilibrium_structure(capsys):
    rep, _ = suite("lemmas")
    bad = _per_delta_failures(rep, lambda c: bool(c["violations"]))
    kinds = sorted({v for t in rep["trials"] for c in t["checks"] for v in c["violations"]})
    cons_bad = [t["trial"] for t in rep["trials"] if not t["constructions_ok"]]
    counts = {d: len(v) for d, v in bad.items()}
    ok = not bad and not cons_bad
    verdict(
        8,
        ok,
        f"collections with violations per delta {counts or 'none'} (kinds {kinds}); "
        f"constructed profiles and disagreement max bound failures {cons_bad or 'none'}",
        capsys,
    )


def test_criterion_09_axiom_demonstrations(capsys):
    rep, secs = suite("axioms")
    bad = [(r["mechanism"], r["fixture"], r["axiom"]) for r in rep["rows"] if not r["ok"]]
    iat = [r for r in rep["rows"] if r["axiom"] == "iat"]
    iat_run = [r for r in iat if r.get("status") != "skipped"]
    verdict(
        9,
        not bad,
        f"{len(rep['rows']) - len(iat)} expectation rows, {len(iat_run)} IAT cells x 20 maps "
        f"({len(iat) - len(iat_run)} above brute budget skipped), mismatches {bad or 'none'}, {secs:.1f}s",
        capsys,
    )


def test_criterion_10_determinism(capsys):
    cfg = default_config("theorem1", trials=40)
    a = report_json(run_suite("theorem1", cfg))
    b = report_json(run_suite("theorem1", cfg))
    c = report_json(run_suite("theorem1", cfg, workers=3))
    cfg2 = default_config("afp", trials=60, seed=7)
    d = report_json(run_suite("afp", cfg2, workers=1))
    e = report_json(run_suite("afp", cfg2, workers=4))
    other = report_json(run_suite("afp", default_config("afp", trials=60, seed=8)))
    ok = a == b == c and d == e and d != other
    verdict(10, ok, "theorem1 x3 (1,1,3 workers) and afp (1 vs 4 workers) byte-identical; different seed differs", capsys)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
