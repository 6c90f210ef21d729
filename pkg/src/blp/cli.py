"""Command-line entry point.

Exit codes: 0 when every executed check passes, 1 when any check fails,
2 on configuration errors (bad flags, unknown suites, invalid models,
models over the memory budget).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, fields
from typing import Sequence

from .heisenberg import DEFAULT_MEMORY_BUDGET, ConfigError, ModelConfig, build_atom_space
from .operators import norm_table_csv
from .pgplane import PlaneError, build_plane, check_plane_axioms, check_residue_identities
from .results import SuiteReport
from .verify import CATALOG, UnknownSuiteError, run_suite
from .verify.suites import prop3_tables

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
COMMANDS = ("build", "verify", "norms", "plane")


class UsageError(Exception):
    pass


@dataclass
class CliConfig:
    command: str
    p: int | None = None
    grid: tuple[int, int, int, int] | None = None
    A: int | None = None
    B: int | None = None
    C: int | None = None
    suite: str = "all"
    seed: int = 0
    format: str = "json"
    output: str | None = None
    memory_budget: int = DEFAULT_MEMORY_BUDGET
    q: int | None = None
    m: int = 1
    timings: bool = False

    def model(self) -> ModelConfig:
        if self.p is None or self.grid is None:
            raise ConfigError(f"{self.command} needs --p and --grid")
        cfg = ModelConfig(self.p, *self.grid, A=self.A, B=self.B, C=self.C)
        if cfg.estimated_bytes() > self.memory_budget:
            raise ConfigError(
                f"model has {cfg.atom_count} atoms (~{cfg.estimated_bytes()} bytes), over the "
                f"memory budget of {self.memory_budget} bytes")
        return cfg


def parse_grid(text) -> tuple[int, int, int, int]:
    if isinstance(text, (list, tuple)):
        parts = list(text)
    else:
        parts = str(text).split(",")
    try:
        vals = tuple(int(x) for x in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must be i0,j0,I,J, got {text!r}") from None
    if len(vals) != 4:
        raise argparse.ArgumentTypeError(f"grid must be i0,j0,I,J, got {text!r}")
    return vals


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="blp", description="Exact finite model of a two-parameter filtration")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def model_flags(p):
        p.add_argument("--p", type=int, help="prime")
        p.add_argument("--grid", type=parse_grid, help="i0,j0,I,J")
        p.add_argument("--A", type=int)
        p.add_argument("--B", type=int)
        p.add_argument("--C", type=int)
        p.add_argument("--memory-budget", type=int, dest="memory_budget",
                       help=f"bytes (default {DEFAULT_MEMORY_BUDGET})")

    def common(p):
        p.add_argument("--config", help="JSON file with the same field names as the flags")
        p.add_argument("--format", choices=("json", "csv"))
        p.add_argument("--output", help="write here instead of standard output")

    b = sub.add_parser("build", help="build a model and print its metadata")
    model_flags(b)
    common(b)

    v = sub.add_parser("verify", help="run verification suites")
    model_flags(v)
    common(v)
    v.add_argument("--suite", help=f"all or one of: {', '.join(CATALOG)}")
    v.add_argument("--seed", type=int)
    v.add_argument("--timings", action="store_true", default=None,
                   help="record wall times (reports are then not byte-stable)")

    n = sub.add_parser("norms", help="operator norm tables |D d^m D| and |d^m d^m|")
    model_flags(n)
    common(n)
    n.add_argument("--m", type=int, choices=(1, 2))

    pl = sub.add_parser("plane", help="build PG(2,q) and run its checks")
    common(pl)
    pl.add_argument("--q", type=int)
    pl.add_argument("--incidence", action="store_true", default=None,
                    help="emit the incidence list instead of the checks")
    return parser


def _load_config_file(path: str) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    known = {f.name for f in fields(CliConfig)} | {"incidence"}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown config fields: {', '.join(unknown)}")
    if "grid" in data:
        try:
            data["grid"] = parse_grid(data["grid"])
        except argparse.ArgumentTypeError as exc:
            raise ConfigError(str(exc)) from None
    return data


def resolve(ns: argparse.Namespace) -> tuple[CliConfig, dict]:
    """Flags override config-file values, which override defaults."""
    given = {k: v for k, v in vars(ns).items() if v is not None and k != "config"}
    merged = _load_config_file(ns.config) if getattr(ns, "config", None) else {}
    merged.update(given)
    extra = {"incidence": bool(merged.pop("incidence", False))}
    merged.pop("command", None)
    return CliConfig(command=ns.command, **merged), extra


def _emit(text: str, cfg: CliConfig) -> None:
    if cfg.output:
        with open(cfg.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _report_text(report: SuiteReport, fmt: str) -> str:
    return report.to_csv() if fmt == "csv" else report.to_json()


def cmd_build(cfg: CliConfig, extra: dict) -> int:
    space = build_atom_space(cfg.model())
    meta = space.metadata()
    meta["estimated_bytes"] = space.config.estimated_bytes()
    meta["grid_levels"] = [str(lam) for lam in space.grid()]
    if cfg.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["field", "value"])
        for k, v in meta.items():
            w.writerow([k, ";".join(v) if isinstance(v, list) else v])
        text = buf.getvalue()
    else:
        text = json.dumps(meta, indent=2) + "\n"
    _emit(text, cfg)
    return EXIT_OK


def cmd_verify(cfg: CliConfig, extra: dict) -> int:
    if cfg.suite != "all" and cfg.suite not in CATALOG:
        raise UnknownSuiteError(f"unknown suite {cfg.suite!r}; choose from all, {', '.join(CATALOG)}")
    report = run_suite(cfg.suite, cfg.model(), cfg.seed, timings=cfg.timings,
                       memory_budget=cfg.memory_budget)
    _emit(_report_text(report, cfg.format), cfg)
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_norms(cfg: CliConfig, extra: dict) -> int:
    space = build_atom_space(cfg.model())
    ddd, dd = prop3_tables(space, cfg.m)
    rows = ddd + dd
    if cfg.format == "csv":
        text = norm_table_csv(rows)
    else:
        def cw(x):
            return None if x is None else str(x)
        text = json.dumps({"config": space.config.as_dict(), "m": cfg.m,
                           "rows": [{"lambda": cw(a), "mu": cw(b), "lambda_prime": cw(c),
                                     "m": m, "norm": round(v, 12)} for a, b, c, m, v in rows]},
                          indent=2) + "\n"
    _emit(text, cfg)
    return EXIT_OK


def cmd_plane(cfg: CliConfig, extra: dict) -> int:
    if cfg.q is None:
        raise ConfigError("plane needs --q")
    plane = build_plane(cfg.q)
    if extra["incidence"]:
        _emit(plane.to_csv(), cfg)
        return EXIT_OK
    checks = [check_plane_axioms(plane, f"plane/axioms/q={cfg.q}"),
              check_residue_identities(plane, f"plane/residue/q={cfg.q}")]
    report = SuiteReport("plane", {"q": cfg.q, "points": plane.size, "lines": plane.size},
                         cfg.seed, checks)
    if cfg.format == "csv":
        _emit(report.to_csv(), cfg)
    else:
        summary = f"PG(2,{cfg.q}): {plane.size} points, {plane.size} lines\n"
        if cfg.output:
            _emit(report.to_json(), cfg)
            sys.stdout.write(summary)
        else:
            sys.stdout.write(summary)
            _emit(report.to_json(), cfg)
    return EXIT_OK if report.ok else EXIT_FAIL


HANDLERS = {"build": cmd_build, "verify": cmd_verify, "norms": cmd_norms, "plane": cmd_plane}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        cfg, extra = resolve(ns)
        return HANDLERS[cfg.command](cfg, extra)
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_CONFIG
    except (ConfigError, PlaneError, UnknownSuiteError, TypeError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        sys.stderr.write(f"blp: error: {msg}\n{parser.format_usage()}")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
