"""Suite execution and report assembly."""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor

from ..heisenberg import DEFAULT_MEMORY_BUDGET, AtomSpace, ModelConfig, build_atom_space
from ..results import CheckResult, SuiteReport
from .suites import CATALOG, Context


class UnknownSuiteError(KeyError):
    pass


def suite_names(name: str) -> list[str]:
    if name == "all":
        return list(CATALOG)
    if name not in CATALOG:
        raise UnknownSuiteError(f"unknown suite {name!r}; choose from all, {', '.join(CATALOG)}")
    return [name]


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("BLP_THREADS", "1")))
    except ValueError:
        return 1


def _run_one(name: str, space: AtomSpace, seed: int, budget: int) -> list[CheckResult]:
    ctx = Context(space, seed, memory_budget=budget)
    t0 = time.perf_counter()
    out = CATALOG[name](ctx)
    for c in out:
        if c.ms is None:
            c.ms = (time.perf_counter() - t0) * 1000
    return out


def run_suite(name: str, config: ModelConfig | AtomSpace, seed: int = 0, *,
              timings: bool = False,
              memory_budget: int = DEFAULT_MEMORY_BUDGET) -> SuiteReport:
    """Run one suite (or ``"all"``) and return a report whose bytes depend only
    on ``(name, config, seed)`` unless ``timings`` is set."""
    names = suite_names(name)
    space = config if isinstance(config, AtomSpace) else build_atom_space(config)
    threads = min(_threads(), len(names))
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(lambda s: _run_one(s, space, seed, memory_budget), names))
    else:
        parts = [_run_one(s, space, seed, memory_budget) for s in names]
    checks = [c for part in parts for c in part]
    if not timings:
        for c in checks:
            c.ms = None
    return SuiteReport(name, space.config.as_dict(), seed, checks)
