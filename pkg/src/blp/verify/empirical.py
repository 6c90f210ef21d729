"""Seeded empirical norm-ratio studies.

A raw random draw of ``|Tf|_p / |f|_p`` on a small window is dominated by
sampling noise, so every start is improved by monotone ascent before the
maximum is taken:

* linear ``T``: the power step ``f <- phi_p'(P T* phi_p(T f))`` never
  decreases the ratio (``phi_r(x) = sign(x)|x|^(r-1)``, ``P`` the projection
  onto the admissible functions);
* sublinear ``M*``: the same step applied to the linear selection operator
  that realizes ``M* f`` at the current ``f``;
* ``S``: the power step for the l2-valued operator ``f -> (T_k f)_k``.

All atoms carry the same measure, so ratios are computed with plain sums.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from ..filtration import Level, partition
from ..heisenberg import AtomSpace
from ..operators import CoefficientFamily, boundary_terms, d

RTOL = 1e-10
MAX_STEPS = 60


def phi(x: np.ndarray, r: float) -> np.ndarray:
    return np.sign(x) * np.abs(x) ** (r - 1)


def colnorm(x: np.ndarray, r: float) -> np.ndarray:
    return np.sum(np.abs(x) ** r, axis=0) ** (1 / r)


def _normalize(x: np.ndarray, r: float) -> np.ndarray:
    n = colnorm(x, r)
    return x / np.where(n > 0, n, 1)


def _ascend(F: np.ndarray, r: float, value: Callable, step: Callable) -> np.ndarray:
    """Per-column monotone ascent; ``value(f, cols)`` is the ratio of the
    normalized columns ``f`` (original indices ``cols``), ``step(f, cols)``
    proposes the next iterate.  Converged columns drop out."""
    f = _normalize(F.astype(float), r)
    cols = np.arange(f.shape[1])
    best = value(f, cols)
    for _ in range(MAX_STEPS):
        if not len(cols):
            break
        cur = f[:, cols]
        cand = _normalize(step(cur, cols), r)
        ok = np.all(np.isfinite(cand), axis=0) & (colnorm(cand, r) > 0)
        val = np.where(ok, value(np.where(ok, cand, cur), cols), -np.inf)
        better = val > best[cols] * (1 + RTOL)
        f[:, cols[better]] = cand[:, better]
        best[cols[better]] = val[better]
        cols = cols[better]
    return best


def linear_ratio(apply: Callable, adjoint: Callable, proj: Callable, F: np.ndarray,
                 r: float) -> np.ndarray:
    """``apply(f, cols)`` and ``adjoint(y, cols)`` act on the columns ``cols``."""
    rp = r / (r - 1)
    return _ascend(F, r, lambda f, c: colnorm(apply(f, c), r),
                   lambda f, c: phi(proj(adjoint(phi(apply(f, c), r), c)), rp))


def maximal_ratio(space: AtomSpace, F: np.ndarray, r: float, proj: Callable) -> np.ndarray:
    """Ascent for ``|M* f|_r / |f|_r``."""
    parts = [partition(space, Level(lam)) for lam in space.grid()]
    rp = r / (r - 1)

    def averages(g):
        return np.stack([pt.average_float(g) for pt in parts])

    def value(f, cols):
        return colnorm(np.abs(averages(f)).max(axis=0), r)

    def step(f, cols):
        v = averages(f)
        idx = np.abs(v).argmax(axis=0)
        s = np.sign(np.take_along_axis(v, idx[None], 0)[0])
        y = phi(s * np.take_along_axis(v, idx[None], 0)[0], r)
        z = sum(pt.average_float(np.where(idx == t, s * y, 0.0)) for t, pt in enumerate(parts))
        return phi(proj(z), rp)

    return _ascend(F, r, value, step)


def square_ops(space: AtomSpace):
    return [d(space, lam) for lam in space.interior()] + [T for _, T in boundary_terms(space)]


def square_ratios(space: AtomSpace, F: np.ndarray, r: float, proj: Callable):
    """``(upper, lower)``: ascended ``|Sf|/|f|`` and raw ``|f|/|Sf|`` per column
    (``nan`` where undefined)."""
    ops = square_ops(space)
    adj = [T.adjoint() for T in ops]
    rp = r / (r - 1)

    def S(f):
        return np.sqrt(sum(T.apply_float(f) ** 2 for T in ops))

    def step(f, cols):
        vals = [T.apply_float(f) for T in ops]
        s = np.sqrt(sum(v**2 for v in vals))
        w = np.where(s > 0, s, 1.0) ** (r - 2) * (s > 0)
        z = sum(A.apply_float(v * w) for A, v in zip(adj, vals))
        return phi(proj(z), rp)

    f0 = _normalize(F.astype(float), r)
    fn, sn = colnorm(f0, r), colnorm(S(f0), r)
    # zero draws carry no information about the lower ratio
    lower = np.where((fn > 0) & (sn > 0), fn / np.where(sn > 0, sn, 1.0), np.nan)
    upper = _ascend(F, r, lambda f, c: colnorm(S(f), r), step)
    return upper, lower


def transform_ratio(space: AtomSpace, families: list[CoefficientFamily], m: int,
                    F: np.ndarray, r: float, proj: Callable) -> np.ndarray:
    """Column ``k`` uses coefficient family ``families[k]``."""
    lams = list(space.interior())
    ops = [d(space, lam) for lam in lams]
    coeff = [np.stack([fam[lam].to_float() for fam in families], axis=1) for lam in lams]

    def dm(D, g):
        for _ in range(m):
            g = D.apply_float(g)
        return g

    def apply(f, cols):
        return sum(a[:, cols] * dm(D, f) for a, D in zip(coeff, ops))

    def adjoint(y, cols):
        return sum(dm(D, a[:, cols] * y) for a, D in zip(coeff, ops))

    return linear_ratio(apply, adjoint, proj, F, r)


def measurable_projection(space: AtomSpace) -> Callable:
    c = space.config
    return partition(space, Level((c.I, c.J))).average_float
