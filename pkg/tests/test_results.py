import json
from fractions import Fraction

from blp.results import FAIL, PASS, SKIPPED, CheckResult, SuiteReport, exact_check, skipped


def test_exact_check_and_serialization():
    ok = exact_check("a", 0)
    bad = exact_check("b", Fraction(1, 3), {"lambda": "1,1", "v": Fraction(2, 5)})
    assert ok.status == PASS and bad.status == FAIL
    d = bad.as_dict()
    assert d["error"] == "1/3" and d["witness"]["v"] == "2/5" and d["ms"] is None


def test_report_sorted_summary_and_formats():
    checks = [CheckResult("z", PASS, error=0.5), exact_check("a", 1), skipped("m", "empty")]
    r = SuiteReport("all", {"p": 2}, 7, checks)
    assert [c.name for c in r.checks] == ["a", "m", "z"]
    assert r.summary == {PASS: 1, FAIL: 1, SKIPPED: 1} and not r.ok
    data = json.loads(r.to_json())
    assert list(data) == ["suite", "config", "seed", "checks", "summary"]
    assert list(data["checks"][0]) == ["name", "status", "kind", "error", "witness", "ms"]
    rows = r.to_csv().splitlines()
    assert rows[0] == "name,status,kind,error,witness,ms" and len(rows) == 4
    assert r.to_json() == SuiteReport("all", {"p": 2}, 7, list(reversed(checks))).to_json()
