"""The check catalog.

Every suite takes a :class:`Context` and returns a list of
:class:`CheckResult`.  Exact suites compare rationals with zero tolerance,
both at the operator level (one kernel column for translation-invariant
operators) and on seeded random functions.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from ..coweights import LAM1, LAM2, Coweight, dist
from ..exact import BoundaryFunction
from ..filtration import Join, Level, partition
from ..heisenberg import DEFAULT_MEMORY_BUDGET, AtomSpace, ModelConfig, build_atom_space, \
    cell_measure
from ..linalg import LinearOperator
from ..operators import D, L, Dstar, boundary_terms, calderon_sum, col_op, cotlar_bound, d, \
    level_op, lp_power, maximal, operator_norm2, row_op, square, transform_operator
from ..pgplane import affine_path_counts, build_plane, check_plane_axioms, \
    check_residue_identities
from ..results import EMPIRICAL, EXACT, FAIL, PASS, CheckResult, skipped
from . import empirical
from .generators import make_rng, predictable_coefficients, random_functions

ORIENTATIONS = (("lambda1", LAM1, LAM2), ("lambda2", LAM2, LAM1))
EMPIRICAL_EXPONENTS = (1.5, 2.0, 3.0)
SEED_COUNT = 5
SPREAD_LIMIT = 0.10
GROWTH_LIMIT = 2.0
NORM_ATOL = 1e-9


@dataclass
class Context:
    space: AtomSpace
    seed: int
    samples: int = 20
    inequality_samples: int = 100
    memory_budget: int = DEFAULT_MEMORY_BUDGET
    _spaces: dict = field(default_factory=dict, repr=False)

    @property
    def config(self) -> ModelConfig:
        return self.space.config

    @property
    def q(self) -> Fraction:
        return Fraction(self.space.p)

    def functions(self, label: str, count: int | None = None, measurability=None,
                  nonnegative: bool = False, space: AtomSpace | None = None,
                  seed: int | None = None) -> BoundaryFunction:
        sp = space or self.space
        rng = make_rng(self.seed if seed is None else seed, label)
        return random_functions(sp, rng, count or self.samples, measurability, nonnegative)

    def space_for(self, config: ModelConfig) -> AtomSpace:
        if config == self.config:
            return self.space
        if config not in self._spaces:
            self._spaces[config] = build_atom_space(config)
        return self._spaces[config]

    def calibration_space(self) -> AtomSpace:
        c = self.config
        return self.space_for(ModelConfig(c.p, c.i0, c.j0, c.i0 + 1, c.j0 + 1))

    def window(self) -> list[Coweight]:
        """Every representable level, row-major."""
        sp = self.space
        return [Coweight(i, j) for i in sp.rows() for j in sp.cols()
                if sp.representable(Coweight(i, j))]


def _first_nonzero(num: np.ndarray) -> dict:
    idx = np.argwhere(num != 0)[0]
    out = {"atom": int(idx[0])}
    if num.ndim == 2:
        out["sample"] = int(idx[1])
    return out


class Tally:
    """Accumulates exact comparisons for one named check."""

    def __init__(self, name: str):
        self.name = name
        self.error = Fraction(0)
        self.witness: dict | None = None
        self.instances = 0
        self.notes: dict = {}
        self.t0 = time.perf_counter()

    def record(self, error: Fraction, witness: dict | None) -> None:
        self.instances += 1
        if error > self.error:
            self.error = error
        if error and self.witness is None:
            self.witness = witness

    def compare(self, lhs: BoundaryFunction, rhs: BoundaryFunction, where: dict) -> None:
        diff = lhs - rhs
        err = diff.max_abs()
        self.record(err, dict(where, **_first_nonzero(diff.num)) if err else None)

    def operators(self, A: LinearOperator, B: LinearOperator, fs: BoundaryFunction | None,
                  where: dict) -> None:
        if A.invariant and B.invariant:
            self.compare(A.kernel_column(), B.kernel_column(), dict(where, via="kernel column"))
        elif not A.equals(B):
            self.record(Fraction(1), dict(where, via="standard basis"))
        if fs is not None:
            self.compare(A.apply(fs), B.apply(fs), dict(where, via="random functions"))

    def nonnegative(self, x: BoundaryFunction, where: dict) -> None:
        lo = x.min_value()
        if lo < 0:
            self.record(-lo, dict(where, **_first_nonzero(np.minimum(x.num, 0))))
        else:
            self.record(Fraction(0), None)

    def result(self, empty_reason: str = "grid too small for this index pattern") -> CheckResult:
        ms = (time.perf_counter() - self.t0) * 1000
        if self.instances == 0:
            out = skipped(self.name, empty_reason)
        elif self.error:
            out = CheckResult(self.name, FAIL, EXACT, self.error, self.witness)
        else:
            out = CheckResult(self.name, PASS, EXACT, Fraction(0),
                              dict(self.notes, instances=self.instances))
        out.ms = ms
        return out


def _lam(x: Coweight) -> str:
    return str(x)


def _join(space: AtomSpace, a: Coweight, b: Coweight) -> LinearOperator:
    return LinearOperator.projection(partition(space, Join(a, b)))


# -- structure ----------------------------------------------------------------


def suite_prop0(ctx: Context) -> list[CheckResult]:
    sp = ctx.space
    fs = ctx.functions("prop0")
    refine, tower, measure = Tally("prop0-nesting/refinement"), Tally("prop0-nesting/tower"), \
        Tally("prop0-nesting/measure")
    grid = sp.grid()
    for lam in grid:
        pt = partition(sp, Level(lam))
        total = sp.atom_measure * pt.size
        err = abs(total - cell_measure(ctx.config, lam))
        err += abs(total * pt.ncells - sp.pi_box)
        measure.record(err, {"lambda": _lam(lam)} if err else None)
        for mu in grid:
            if not (lam.i <= mu.i and lam.j <= mu.j):
                continue
            ok = partition(sp, Level(mu)).refines(pt)
            refine.record(Fraction(0 if ok else 1),
                          None if ok else {"lambda": _lam(lam), "mu": _lam(mu)})
            El, Em = level_op(sp, lam), level_op(sp, mu)
            w = {"lambda": _lam(lam), "mu": _lam(mu)}
            tower.operators(Em @ El, El, fs, dict(w, order="E_mu E_lambda"))
            tower.operators(El @ Em, El, fs, dict(w, order="E_lambda E_mu"))
    return [refine.result(), tower.result(), measure.result()]


def suite_lemma1_eq1(ctx: Context) -> list[CheckResult]:
    sp, q = ctx.space, ctx.q
    fs = ctx.functions("lemma1-eq1")
    t = Tally("lemma1-eq1")
    for lam in ctx.window():
        for label, l1, l2 in ORIENTATIONS:
            a, b, jj = lam + l1, lam + l2, lam + l1 - l2
            if not all(map(sp.representable, (a, b, jj))):
                continue
            Ea, Eb = level_op(sp, a), level_op(sp, b)
            lhs = Ea @ Eb @ Ea
            rhs = Ea * (1 / q) - (1 / q) * (_join(sp, jj, lam) @ Ea) + level_op(sp, lam)
            t.operators(lhs, rhs, fs, {"lambda": _lam(lam), "orientation": label})
    return [t.result()]


def suite_lemma1_eq23(ctx: Context) -> list[CheckResult]:
    sp, q = ctx.space, ctx.q
    fs = ctx.functions("lemma1-eq23")
    t = Tally("lemma1-eq23")
    for lam in ctx.window():
        for label, l1, l2 in ORIENTATIONS:
            a, b = lam + l1, lam + l2
            if not (sp.representable(a) and sp.representable(b)):
                continue
            P = level_op(sp, b) @ level_op(sp, a)
            t.operators(P @ P, P * (1 / q) + (1 - 1 / q) * level_op(sp, lam), fs,
                        {"lambda": _lam(lam), "orientation": label})
    return [t.result()]


def suite_lemma4_eq6(ctx: Context) -> list[CheckResult]:
    sp = ctx.space
    fs = ctx.functions("lemma4-eq6")
    t = Tally("lemma4-eq6")
    step = LAM2 - LAM1
    kmax = ctx.config.A + ctx.config.B
    for lam in ctx.window():
        for sign in (1, -1):
            for k in range(1, kmax + 1):
                a = lam + (sign * k) * step
                if not sp.representable(a):
                    continue
                for j in range(0, k + 1):
                    b = lam + (sign * j) * step
                    if not sp.representable(b):
                        continue
                    Ea, El = level_op(sp, a), level_op(sp, lam)
                    t.operators(Ea @ El, Ea @ level_op(sp, b) @ El, fs,
                                {"lambda": _lam(lam), "k": sign * k, "j": sign * j})
    return [t.result()]


def suite_lemma3_eq7(ctx: Context) -> list[CheckResult]:
    sp = ctx.space
    fs = ctx.functions("lemma3-eq7")
    tallies = {k: Tally(f"lemma3-eq7/{k}") for k in ("7.1", "7.2", "7.3", "7.4")}
    span = ctx.config.A + ctx.config.B
    for lam in ctx.window():
        for label, l1, l2 in ORIENTATIONS:
            for i in range(1, span + 1):
                lp = lam - i * l1
                if not sp.representable(lp):
                    continue
                for k in range(0, span + 1):
                    mu = lp + k * (l2 - l1)
                    if not sp.representable(mu):
                        continue
                    w = {"lambda": _lam(lam), "i": i, "k": k, "orientation": label}
                    El, Elp, Em = level_op(sp, lam), level_op(sp, lp), level_op(sp, mu)
                    tallies["7.1"].operators(Em @ El, Em @ Elp, fs, w)
                    tallies["7.2"].operators(El @ Em, Elp @ Em, fs, w)
                    mt = mu + (l2 - l1)
                    if sp.representable(mt):
                        Jn = _join(sp, mu, mt)
                        tallies["7.3"].operators(Jn @ El, Em @ Elp, fs, w)
                        tallies["7.4"].operators(El @ Jn, Elp @ Em, fs, w)
    return [t.result() for t in tallies.values()]


def suite_lemma5(ctx: Context) -> list[CheckResult]:
    sp = ctx.space
    fs = ctx.functions("lemma5")
    t = Tally("lemma5")
    span = ctx.config.A + ctx.config.B
    for lam in ctx.window():
        for k in range(-span, span + 1):
            mu = lam + k * (LAM1 - LAM2)
            if not sp.representable(mu):
                continue
            side = row_op(sp, lam.i) if k >= 0 else col_op(sp, lam.j)
            Em = level_op(sp, mu)
            t.operators(level_op(sp, lam) @ Em, side @ Em, fs,
                        {"lambda": _lam(lam), "k": k, "field": "row" if k >= 0 else "col"})
    return [t.result()]


def _eq8_indices(lam: Coweight, k: int, l1: Coweight, l2: Coweight):
    return (lam + k * l1, lam + l1 + (k - 1) * l2, lam + k * l2,
            lam + (k - 1) * l1, lam + l1 + (k - 2) * l2, lam + (k - 1) * l2)


def suite_lemma2_eq8(ctx: Context) -> list[CheckResult]:
    sp, q = ctx.space, ctx.q
    fs = ctx.functions("lemma2-eq8")
    t8, tf = Tally("lemma2-eq8/eq8"), Tally("lemma2-eq8/closed-form")
    span = ctx.config.A + ctx.config.B
    for lam in ctx.window():
        for label, l1, l2 in ORIENTATIONS:
            for k in range(2, span + 1):
                idx = _eq8_indices(lam, k, l1, l2)
                if not all(map(sp.representable, idx)):
                    continue
                mu, mu1, mu2, nu, nu1, nu2 = (level_op(sp, x) for x in idx)
                w = {"lambda": _lam(lam), "k": k, "orientation": label}
                lhs = mu2 @ mu @ mu2 @ mu - (1 / q) * (mu2 @ mu @ mu1 @ mu)
                rhs = nu2 @ nu @ nu2 @ nu - (1 / q) * (nu2 @ nu @ nu1 @ nu)
                t8.operators(lhs, rhs, fs, w)
                tf.operators(mu2 @ mu @ mu2 @ mu,
                             (1 / q) * (mu2 @ mu @ mu1 @ mu) + (1 - 1 / q) * level_op(sp, lam),
                             fs, w)
    return [t8.result(), tf.result()]


def suite_lemma2_positivity(ctx: Context) -> list[CheckResult]:
    sp, q = ctx.space, ctx.q
    fs = ctx.functions("lemma2-positivity", ctx.inequality_samples, nonnegative=True)
    t = Tally("lemma2-positivity")
    t.notes["samples"] = ctx.inequality_samples
    span = ctx.config.A + ctx.config.B
    for lam in ctx.window():
        for label, l1, l2 in ORIENTATIONS:
            for k in range(1, span + 1):
                a, b = lam + k * l1, lam + k * l2
                if not (sp.representable(a) and sp.representable(b)):
                    continue
                P = level_op(sp, b) @ level_op(sp, a)
                gap = (P @ P).apply(fs) - level_op(sp, lam).apply(fs) * (1 - 1 / q)
                t.nonnegative(gap, {"lambda": _lam(lam), "k": k, "orientation": label})
    return [t.result()]


def thm1_chain_indices(space: AtomSpace):
    """For ``f`` measurable at ``mu = (I, J)``: per grid ``lam`` the pair
    ``nu = lam + <mu - lam, a0> lam1`` and ``nu'' = lam + <mu - lam, a0> lam2``,
    plus the exponents of the smallest window containing all of them."""
    c = space.config
    mu = Coweight(c.I, c.J)
    pairs = []
    for lam in space.grid():
        k = (mu - lam).level
        pairs.append((lam, lam + k * LAM1, lam + k * LAM2))
    need = {"A": max(nu.i for _, nu, _ in pairs), "B": max(nu2.j for _, _, nu2 in pairs),
            "C": max(max(nu.level, nu2.level) for _, nu, nu2 in pairs)}
    return mu, pairs, need


def suite_thm1_pointwise(ctx: Context) -> list[CheckResult]:
    sp, q = ctx.space, ctx.q
    c = ctx.config
    mu, pairs, need = thm1_chain_indices(sp)
    usable = [(lam, nu, nu2) for lam, nu, nu2 in pairs
              if sp.representable(nu) and sp.representable(nu2)]
    padding = {
        "measurability": _lam(mu),
        "enclosing_exponents": need,
        "window_exponents": {"A": c.A, "B": c.B, "C": c.C},
        "constrained_lambdas": [_lam(lam) for lam, _, _ in pairs
                                if (lam, _, _) not in usable] if len(usable) < len(pairs) else [],
    }
    fs = ctx.functions("thm1-pointwise", ctx.inequality_samples, Level(mu), nonnegative=True)
    ineq, chain = Tally("thm1-pointwise"), Tally("thm1-pointwise/chain")
    ineq.notes.update(padding, samples=ctx.inequality_samples)
    chain.notes.update(padding)
    lhs = maximal(sp, "Mstar", fs) * (1 - 1 / q)
    rhs = fs
    for kind in ("Rstar", "Lstar", "Rstar", "Lstar"):
        rhs = maximal(sp, kind, rhs)
    ineq.nonnegative(rhs - lhs, {"inequality": "(1-1/q) M* f <= L* R* L* R* f"})
    Emu = level_op(sp, mu)
    for lam, nu, nu2 in usable:
        En, En2 = level_op(sp, nu), level_op(sp, nu2)
        R_, C_ = row_op(sp, lam.i), col_op(sp, lam.j)
        chain.operators(En2 @ En @ En2 @ En @ Emu, R_ @ C_ @ R_ @ C_ @ Emu, fs,
                        {"lambda": _lam(lam), "nu": _lam(nu), "nu2": _lam(nu2)})
    return [ineq.result(), chain.result()]


def suite_doob(ctx: Context) -> list[CheckResult]:
    sp = ctx.space
    fs = ctx.functions("doob", ctx.inequality_samples)
    base = lp_power(sp, fs, 2)
    out = []
    for kind in ("Lstar", "Rstar"):
        t = Tally(f"doob/{kind}")
        t.notes["samples"] = ctx.inequality_samples
        vals = lp_power(sp, maximal(sp, kind, fs), 2)
        for k, (m, f2) in enumerate(zip(vals, base)):
            excess = m - 4 * f2
            t.record(max(excess, Fraction(0)), {"sample": k, "ratio_squared": m / f2}
                     if excess > 0 else None)
        out.append(t.result())
    return out


def suite_eq10(ctx: Context) -> list[CheckResult]:
    sp = ctx.space
    fs = ctx.functions("eq10-isometry")
    base = lp_power(sp, fs, 2)
    out = []
    for kind in ("calS", "calSstar"):
        t = Tally(f"eq10-isometry/{kind}")
        sq = square(sp, kind, fs).sum_squares.sum_atoms()
        for k, (s, f2) in enumerate(zip(sq, base)):
            err = abs(s * sp.atom_measure - f2)
            t.record(err, {"sample": k} if err else None)
        out.append(t.result())
    return out


def suite_prop2(ctx: Context) -> list[CheckResult]:
    sp = ctx.space
    fs = ctx.functions("prop2-calderon")
    ident, orders = Tally("prop2-calderon"), Tally("prop2-calderon/orderings")
    total = LinearOperator.zero(sp.atom_count)
    for lam in sp.difference_grid():
        total = total + D(sp, lam) @ Dstar(sp, lam)
    ident.operators(total, LinearOperator.identity(sp.atom_count), None, {"operator": "sum D D*"})
    ref = calderon_sum(sp, fs)
    ident.compare(ref, fs, {"via": "random functions"})
    ident.compare(calderon_sum(sp, BoundaryFunction.zeros(sp.atom_count)),
                  BoundaryFunction.zeros(sp.atom_count), {"via": "zero function"})
    rng = make_rng(ctx.seed, "prop2-orderings")
    grid = sp.difference_grid()
    for r in range(5):
        perm = [grid[k] for k in rng.permutation(len(grid))]
        orders.compare(calderon_sum(sp, fs, perm), ref, {"ordering": r})
    return [ident.result(), orders.result()]


def suite_eq22(ctx: Context) -> list[CheckResult]:
    sp = ctx.space
    fs = ctx.functions("eq22")
    t = Tally("eq22")
    zero = LinearOperator.zero(sp.atom_count)
    for mu in sp.interior():
        dm = d(sp, mu)
        for nu in sp.grid():
            if nu.level <= mu.level - 2:
                t.operators(level_op(sp, nu) @ dm, zero, fs, {"mu": _lam(mu), "nu": _lam(nu)})
    return [t.result()]


def suite_prop1(ctx: Context) -> list[CheckResult]:
    sp, q = ctx.space, ctx.q
    gs = ctx.functions("prop1-decay")
    t = Tally("prop1-decay")
    span = ctx.config.A + ctx.config.B
    worst = Fraction(0)
    for lam in sp.grid():
        for label, l1, l2 in ORIENTATIONS:
            for j in range(1, span + 1):
                low = lam - j * l1
                if not sp.representable(low):
                    continue
                f = gs - level_op(sp, low).apply(gs)
                fl = level_op(sp, lam).apply(f)
                denom = lp_power(sp, fl, 2)
                for k in range(j, span + 1):
                    target = lam - k * (l1 - l2)
                    if not sp.representable(target):
                        continue
                    num = lp_power(sp, level_op(sp, target).apply(fl), 2)
                    bound = Fraction(4) / q ** (k - j + 1)
                    w = {"lambda": _lam(lam), "j": j, "k": k, "orientation": label}
                    for s, (a, b) in enumerate(zip(num, denom)):
                        excess = a - bound * b
                        if b:
                            worst = max(worst, a / (bound * b))
                        t.record(max(excess, Fraction(0)), dict(w, sample=s) if excess > 0 else None)
    t.notes["max_ratio_to_bound"] = float(worst)
    return [t.result()]


def suite_f4(ctx: Context) -> list[CheckResult]:
    sp = ctx.space
    fs = ctx.functions("f4-fails")
    t = Tally("f4-fails")
    n = sp.atom_count
    first = None
    found = 0
    for lam in ctx.window():
        a, b = lam + LAM1, lam + LAM2
        if not (sp.representable(a) and sp.representable(b)):
            continue
        e0 = BoundaryFunction.indicator(n, 0)
        lhs = (level_op(sp, a) @ level_op(sp, b)).apply(e0)
        rhs = level_op(sp, lam).apply(e0)
        diff = lhs - rhs
        if diff.is_zero():
            t.record(Fraction(1), {"lambda": _lam(lam), "reason": "no witness: F4 holds here"})
            continue
        found += 1
        t.record(Fraction(0), None)
        if first is None:
            atom = int(np.flatnonzero(diff.num)[0])
            rand = (level_op(sp, a) @ level_op(sp, b)).apply(fs) - level_op(sp, lam).apply(fs)
            first = {"lambda": _lam(lam), "function": "indicator of atom 0", "atom": atom,
                     "lhs": lhs[atom], "rhs": rhs[atom],
                     "random_witnesses": int(np.sum(np.any(rand.num != 0, axis=0)))}
            top = a + LAM2
            first["join_cells"] = partition(sp, Join(a, b)).ncells
            if sp.representable(top):
                first["level_cells_" + _lam(top)] = partition(sp, Level(top)).ncells
    if first is not None:
        t.notes["witness"] = first
        t.notes["lambdas_with_witness"] = found
    return [t.result()]


def suite_eq46_48(ctx: Context) -> list[CheckResult]:
    sp, q = ctx.space, ctx.q
    fs = ctx.functions("eq46-48")
    names = ("d-projections", "eq46", "d3", "d4", "eq48")
    tl = {k: Tally(f"eq46-48/{k}") for k in names}
    printed_holds = []
    for lam in sp.interior():
        dl = d(sp, lam)
        E0, E1 = level_op(sp, lam), level_op(sp, lam - LAM1)
        E2, E12 = level_op(sp, lam - LAM2), level_op(sp, lam - LAM1 - LAM2)
        w = {"lambda": _lam(lam)}
        zero = LinearOperator.zero(sp.atom_count)
        tp = tl["d-projections"]
        tp.operators(dl @ E0, dl, fs, dict(w, identity="d E_lam = d"))
        tp.operators(dl @ E12, zero, fs, dict(w, identity="d E_(lam-l1-l2) = 0"))
        tp.operators(dl @ E2, -(E1 @ E2) + E12, fs, dict(w, identity="d E_(lam-l2)"))
        tp.operators(dl @ E1, -(E2 @ E1) + E12, fs, dict(w, identity="d E_(lam-l1)"))
        d2 = dl @ dl
        symmetric = dl + E1 @ E2 + E2 @ E1 - 2 * E12
        printed = dl + E1 @ E2 + E1 @ E1 - 2 * E12
        tl["eq46"].operators(d2, symmetric, fs, dict(w, form="E1 E2 + E2 E1"))
        printed_holds.append(d2.equals(printed))
        d3 = d2 @ dl
        tl["d3"].operators(d3, d2 - E1 @ E2 @ E1 - E2 @ E1 @ E2 + 2 * E12, fs, w)
        d4 = d3 @ dl
        P, Q = E1 @ E2, E2 @ E1
        tl["d4"].operators(d4, d3 + P @ P + Q @ Q - 2 * E12, fs, dict(w, form="squares"))
        tl["d4"].operators(d4, d3 + (1 / q) * P + (1 / q) * Q - (2 / q) * E12, fs,
                           dict(w, form="reduced"))
        tl["eq48"].operators(d4 - d3 - (1 / q) * d2 + (1 / q) * dl, zero, fs, w)
    tl["eq46"].notes.update(symmetric_form_holds=tl["eq46"].error == 0,
                            printed_form_holds=bool(printed_holds) and all(printed_holds),
                            printed_form="E_(lam-l1) E_(lam-l1)")
    return [tl[k].result() for k in names]


def suite_thm2_reconstruction(ctx: Context) -> list[CheckResult]:
    sp, q = ctx.space, ctx.q
    c = ctx.config
    top = Coweight(c.I, c.J)
    gs = ctx.functions("thm2-reconstruction", measurability=Level(top))
    per, summed, tele = Tally("thm2-reconstruction/per-lambda"), \
        Tally("thm2-reconstruction/sum"), Tally("thm2-reconstruction/telescoping")
    n = sp.atom_count
    sum_d = LinearOperator.zero(n)
    sum_dt = LinearOperator.zero(n)
    for lam in sp.interior():
        dl = d(sp, lam)
        d2, d3 = dl @ dl, dl @ dl @ dl
        d4 = d3 @ dl
        per.operators(-q * d4 + q * d3 + d2, dl, gs, {"lambda": _lam(lam)})
        tilde = -q * d3 + q * d2 + dl
        sum_d = sum_d + dl
        sum_dt = sum_dt + dl @ tilde
    if sp.interior():
        summed.operators(sum_dt, sum_d, gs, {"identity": "sum d (T~ g) = sum d g"})
    full = sum_d
    for _, T in boundary_terms(sp):
        full = full + T
    tele.operators(full, level_op(sp, top), None, {"identity": "interior + boundary = E_(I,J)"})
    tele.compare(full.apply(gs), gs, {"identity": "f = sum of differences, f measurable at I,J"})
    return [per.result(), summed.result(), tele.result()]


# -- operator norms -----------------------------------------------------------


def prop3_tables(space: AtomSpace, m: int):
    """Rows ``(lam, mu, lam_prime, m, norm)`` for ``|D_lam d_mu^m D_lam'|`` and
    ``(lam, mu, None, m, norm)`` for ``|d_lam^m d_mu^m|``."""
    grid = space.difference_grid()
    Ds = {lam: D(space, lam) for lam in grid}
    ddd, dd = [], []
    powers = {mu: d(space, mu) ** m for mu in space.interior()}
    for mu, dm in powers.items():
        for lam in grid:
            left = Ds[lam] @ dm
            for lp in grid:
                ddd.append((lam, mu, lp, m, operator_norm2(left @ Ds[lp], space)))
    for lam, dl in powers.items():
        for mu, dm in powers.items():
            dd.append((lam, mu, None, m, operator_norm2(dl @ dm, space)))
    return ddd, dd


def _prop3_scale(q: float, row) -> float:
    lam, mu, lp, _, _ = row
    if lp is None:
        return q ** (-dist(lam, mu) / 2)
    return q ** (-dist(mu, lam) / 4 - dist(mu, lp) / 4)


def suite_prop3(ctx: Context) -> list[CheckResult]:
    sp = ctx.space
    q = float(ctx.q)
    cal = ctx.calibration_space()
    if not sp.interior():
        return [skipped(f"prop3-decay/{k}/m={m}", "no interior level", EMPIRICAL)
                for k in ("DdD", "dd") for m in (1, 2)]
    out = []
    for m in (1, 2):
        t0 = time.perf_counter()
        cur = prop3_tables(sp, m)
        calt = cur if cal is sp else prop3_tables(cal, m)
        for label, rows, crows in (("DdD", cur[0], calt[0]), ("dd", cur[1], calt[1])):
            C = max(r[4] / _prop3_scale(q, r) for r in crows)
            worst, wrow = -math.inf, None
            for r in rows:
                v = r[4] - 2 * C * _prop3_scale(q, r)
                if v > worst:
                    worst, wrow = v, r
            normalized = max(r[4] / _prop3_scale(q, r) for r in rows)
            ok = worst <= NORM_ATOL
            wit = {"calibration_grid": "{},{},{},{}".format(*cal.config.as_tuple()[1:5]),
                   "C": round(C, 12), "max_normalized": round(normalized, 12),
                   "entries": len(rows),
                   "worst": {"lambda": _lam(wrow[0]), "mu": _lam(wrow[1]),
                             "lambda_prime": None if wrow[2] is None else _lam(wrow[2]),
                             "norm": round(wrow[4], 12)}}
            res = CheckResult(f"prop3-decay/{label}/m={m}", PASS if ok else FAIL, EMPIRICAL,
                              round(max(worst, 0.0), 12), wit)
            res.ms = (time.perf_counter() - t0) * 1000
            out.append(res)
    return out


def suite_cotlar(ctx: Context) -> list[CheckResult]:
    sp = ctx.space
    fams = {
        "DDstar": [D(sp, lam) @ Dstar(sp, lam) for lam in sp.difference_grid()],
        "L": [L(sp, i) for i in sp.rows()],
    }
    out = []
    for label, fam in fams.items():
        t0 = time.perf_counter()
        res = cotlar_bound(fam, sp)
        err = abs(res.sum_norm - 1.0)
        ok = res.holds and err <= NORM_ATOL
        r = CheckResult(f"cotlar/{label}", PASS if ok else FAIL, EMPIRICAL, round(err, 15),
                        {"sum_norm": round(res.sum_norm, 12), "bound": round(res.bound, 12),
                         "family_size": len(fam)})
        r.ms = (time.perf_counter() - t0) * 1000
        out.append(r)
    return out


# -- empirical ratio studies ----------------------------------------------------


def _ratio_check(name: str, cur: list[float], cal: list[float], cal_grid: str) -> CheckResult:
    finite = all(math.isfinite(x) and x > 0 for x in cur + cal)
    spread = max(cur) / min(cur) - 1 if finite else math.inf
    growth = max(cur) / max(cal) if finite else math.inf
    ok = finite and spread < SPREAD_LIMIT and growth < GROWTH_LIMIT
    wit = {"max_ratio_per_seed": [round(x, 12) for x in cur],
           "calibration_grid": cal_grid,
           "calibration_max_ratio": round(max(cal), 12) if cal else None,
           "spread": round(spread, 12), "growth": round(growth, 12),
           "limits": {"spread": SPREAD_LIMIT, "growth": GROWTH_LIMIT}}
    return CheckResult(name, PASS if ok else FAIL, EMPIRICAL, round(spread, 12), wit)


def _seeds(ctx: Context) -> list[int]:
    return [ctx.seed + k for k in range(SEED_COUNT)]


def _empirical_suite(ctx: Context, prefix: str, study: Callable) -> list[CheckResult]:
    """``study(space, seed)`` -> {check_suffix: max ratio}; run on the current
    and the calibration window for every seed."""
    t0 = time.perf_counter()
    c = ctx.config
    if c.I < c.i0 + 1 or c.J < c.j0 + 1:
        return [skipped(prefix, "window smaller than the calibration grid", EMPIRICAL)]
    cal = ctx.calibration_space()
    cal_grid = "{},{},{},{}".format(*cal.config.as_tuple()[1:5])
    cur_runs = [study(ctx.space, s) for s in _seeds(ctx)]
    cal_runs = cur_runs if cal is ctx.space else [study(cal, s) for s in _seeds(ctx)]
    out = []
    for key in cur_runs[0]:
        r = _ratio_check(f"{prefix}/{key}", [run[key] for run in cur_runs],
                         [run[key] for run in cal_runs], cal_grid)
        r.ms = (time.perf_counter() - t0) * 1000
        out.append(r)
    return out


def _fmt_p(r: float) -> str:
    return f"p={r:g}"


def suite_thm1_empirical(ctx: Context) -> list[CheckResult]:
    def study(space, seed):
        c = space.config
        F = random_functions(space, make_rng(seed, "thm1-empirical"), ctx.samples,
                             Level((c.I, c.J))).to_float()
        proj = empirical.measurable_projection(space)
        return {_fmt_p(r): float(empirical.maximal_ratio(space, F, r, proj).max())
                for r in EMPIRICAL_EXPONENTS}
    return _empirical_suite(ctx, "thm1-empirical", study)


def suite_thm2_empirical(ctx: Context) -> list[CheckResult]:
    def study(space, seed):
        c = space.config
        F = random_functions(space, make_rng(seed, "thm2-empirical"), ctx.samples,
                             Level((c.I, c.J))).to_float()
        proj = empirical.measurable_projection(space)
        out = {}
        for r in EMPIRICAL_EXPONENTS:
            up, lo = empirical.square_ratios(space, F, r, proj)
            out[f"upper/{_fmt_p(r)}"] = float(up.max())
            out[f"lower/{_fmt_p(r)}"] = float(np.nanmax(lo)) if np.any(np.isfinite(lo)) \
                else math.nan
        return out
    return _empirical_suite(ctx, "thm2-empirical", study)


def suite_transform(ctx: Context) -> list[CheckResult]:
    sp = ctx.space
    out = []
    if not sp.interior():
        return [skipped("transform-bound", "no interior level")]
    # exact parts: predictability commutation and the constant-coefficient telescoping
    fs = ctx.functions("transform-bound/exact")
    comm, tele = Tally("transform-bound/predictable-commutation"), \
        Tally("transform-bound/telescoping")
    fam = predictable_coefficients(sp, make_rng(ctx.seed, "transform-bound/coeffs"), 1)
    for lam in fam:
        Ma = LinearOperator.multiplication(fam[lam])
        dl = d(sp, lam)
        # multiplications break translation invariance; compare on functions
        comm.compare((dl @ Ma).apply(fs), (Ma @ dl).apply(fs),
                     {"lambda": _lam(lam), "via": "random functions"})
    c = ctx.config
    one = transform_operator(sp, 1, 1)
    target = (level_op(sp, (c.I, c.J)) - level_op(sp, (c.i0, c.J)) - level_op(sp, (c.I, c.j0))
              + level_op(sp, (c.i0, c.j0)))
    tele.operators(one, target, fs, {"coefficients": "a = 1", "m": 1})
    out += [comm.result(), tele.result()]

    def study(space, seed):
        c = space.config
        F = random_functions(space, make_rng(seed, "transform-bound"), ctx.samples,
                             Level((c.I, c.J))).to_float()
        rng = make_rng(seed, "transform-bound/coefficients")
        fams = [predictable_coefficients(space, rng, 1, signs=True) for _ in range(ctx.samples)]
        proj = empirical.measurable_projection(space)
        res = {}
        for m in (1, 2):
            for r in EMPIRICAL_EXPONENTS:
                res[f"m={m}/{_fmt_p(r)}"] = float(
                    empirical.transform_ratio(space, fams, m, F, r, proj).max())
        return res
    return out + _empirical_suite(ctx, "transform-bound", study)


# -- plane ----------------------------------------------------------------------


PLANE_ORDERS = (2, 3, 5, 7)


def suite_plane(ctx: Context) -> list[CheckResult]:
    out = []
    for q in sorted(set(PLANE_ORDERS) | {ctx.space.p}):
        t0 = time.perf_counter()
        P = build_plane(q)
        for r in (check_plane_axioms(P, f"plane/axioms/q={q}"),
                  check_residue_identities(P, f"plane/residue/q={q}")):
            r.error = Fraction(r.error)
            r.ms = (time.perf_counter() - t0) * 1000
            if r.passed:
                r.witness = dict(r.witness or {}, points=P.size, lines=P.size)
            out.append(r)
    return out


def group_path_counts(space: AtomSpace, lam: Coweight, l1: Coweight, l2: Coweight):
    """Inside the ``lam``-cell of atom 0: ``q^2 E_(lam+l1) E_(lam+l2)`` between the
    ``lam+l1`` cells, as an integer matrix, and the cell incidence matrix."""
    q = space.p
    base = partition(space, Level(lam))
    atoms = base.cells()[base.cell_id[0]]
    pa, pb = partition(space, Level(lam + l1)), partition(space, Level(lam + l2))
    pts = np.unique(pa.cell_id[atoms])
    lines = np.unique(pb.cell_id[atoms])
    ind = (pa.cell_id[:, None] == pts[None, :]).astype(np.int64)
    out = (level_op(space, lam + l1) @ level_op(space, lam + l2)).apply(
        BoundaryFunction(ind, 1, reduced=True))
    reps = pa.cells()[pts][:, 0]
    scaled = out * (q * q)
    if scaled.den != 1:
        raise ArithmeticError("transition weights are not multiples of q^-2")
    paths = np.asarray(scaled.num[reps, :], dtype=np.int64)
    inc = np.zeros((len(pts), len(lines)), dtype=np.int64)
    pos_p = {c: k for k, c in enumerate(pts)}
    pos_l = {c: k for k, c in enumerate(lines)}
    for a in atoms:
        inc[pos_p[pa.cell_id[a]], pos_l[pb.cell_id[a]]] = 1
    return paths, inc


def _multiset(M: np.ndarray):
    return sorted(M.ravel().tolist()), sorted(tuple(sorted(row)) for row in M.tolist())


def suite_cross_model(ctx: Context) -> list[CheckResult]:
    sp = ctx.space
    q = sp.p
    plane = build_plane(q)
    pp, ll = affine_path_counts(plane)
    t = Tally("cross-model")
    for lam in ctx.window():
        for label, l1, l2 in ORIENTATIONS:
            a, b = lam + l1, lam + l2
            if not (sp.representable(a) and sp.representable(b)):
                continue
            paths, inc = group_path_counts(sp, lam, l1, l2)
            target = pp if label == "lambda1" else ll
            w = {"lambda": _lam(lam), "orientation": label}
            bad = None
            if paths.shape != target.shape:
                bad = {"reason": "cell counts differ", "group": list(paths.shape),
                       "plane": list(target.shape)}
            elif _multiset(paths) != _multiset(target):
                bad = {"reason": "path-count multisets differ"}
            elif not np.array_equal(inc @ inc.T, paths):
                bad = {"reason": "transition weights differ from cell incidence paths"}
            elif np.any(inc.sum(axis=0) != q) or np.any(inc.sum(axis=1) != q):
                bad = {"reason": "cell incidence degrees differ from q"}
            t.record(Fraction(1 if bad else 0), dict(w, **bad) if bad else None)
    t.notes.update(q=q, affine_points=int(pp.shape[0]),
                   path_count_values={str(v): int(c) for v, c in
                                      zip(*np.unique(pp, return_counts=True))})
    return [t.result()]


CATALOG: dict[str, Callable[[Context], list[CheckResult]]] = {
    "prop0-nesting": suite_prop0,
    "lemma1-eq1": suite_lemma1_eq1,
    "lemma1-eq23": suite_lemma1_eq23,
    "lemma4-eq6": suite_lemma4_eq6,
    "lemma3-eq7": suite_lemma3_eq7,
    "lemma5": suite_lemma5,
    "lemma2-eq8": suite_lemma2_eq8,
    "lemma2-positivity": suite_lemma2_positivity,
    "thm1-pointwise": suite_thm1_pointwise,
    "thm1-empirical": suite_thm1_empirical,
    "doob": suite_doob,
    "eq10-isometry": suite_eq10,
    "prop2-calderon": suite_prop2,
    "eq22": suite_eq22,
    "prop1-decay": suite_prop1,
    "prop3-decay": suite_prop3,
    "eq46-48": suite_eq46_48,
    "thm2-reconstruction": suite_thm2_reconstruction,
    "thm2-empirical": suite_thm2_empirical,
    "transform-bound": suite_transform,
    "f4-fails": suite_f4,
    "cotlar": suite_cotlar,
    "plane": suite_plane,
    "cross-model": suite_cross_model,
}
