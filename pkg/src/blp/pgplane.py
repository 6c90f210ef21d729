"""The Desarguesian projective plane PG(2, q) and residue counting identities.

Points and lines are normalized nonzero vectors of ``F_q^3`` (first nonzero
coordinate equal to 1); a point lies on a line when their dot product
vanishes mod ``q``.

For a flag ``(p0, l0)`` the *affine points* are the ``q^2`` points off
``l0`` and the *affine lines* are the ``q^2`` lines missing ``p0``.  These
play the roles of the level cells one step up in either direction inside a
level cell of the filtration.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import TextIO

import numpy as np

from .heisenberg import is_prime
from .results import FAIL, PASS, CheckResult


class PlaneError(ValueError):
    pass


def _normalized_vectors(q: int) -> np.ndarray:
    out = []
    for a in range(q):
        for b in range(q):
            out.append((1, a, b))
    for a in range(q):
        out.append((0, 1, a))
    out.append((0, 0, 1))
    return np.array(out, dtype=np.int64)


@dataclass(frozen=True, eq=False)
class ProjectivePlane:
    q: int
    points: np.ndarray
    lines: np.ndarray
    incidence: np.ndarray  # (points, lines) 0/1

    @property
    def size(self) -> int:
        return len(self.points)

    def incident(self, p: int, l: int) -> bool:
        return bool(self.incidence[p, l])

    def line_through(self, p: int, r: int) -> int:
        common = np.flatnonzero(self.incidence[p] & self.incidence[r])
        if p == r or len(common) != 1:
            raise PlaneError(f"points {p} and {r} do not determine a unique line")
        return int(common[0])

    def with_flipped(self, p: int, l: int) -> "ProjectivePlane":
        """Copy with one incidence toggled (for negative tests)."""
        n = self.incidence.copy()
        n[p, l] ^= 1
        return ProjectivePlane(self.q, self.points, self.lines, n)

    def write_csv(self, out: TextIO) -> None:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["point_id", "line_id"])
        for p, l in zip(*np.nonzero(self.incidence)):
            w.writerow([int(p), int(l)])

    def to_csv(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()


def build_plane(q: int) -> ProjectivePlane:
    if not is_prime(q):
        raise PlaneError(f"q={q} is not prime")
    v = _normalized_vectors(q)
    inc = ((v @ v.T) % q == 0).astype(np.int64)
    return ProjectivePlane(q, v, v.copy(), inc)


def check_plane_axioms(plane: ProjectivePlane, name: str = "plane-axioms") -> CheckResult:
    q, N = plane.q, plane.incidence
    n = q * q + q + 1
    witness = None
    if N.shape != (n, n):
        witness = {"reason": "wrong size", "points": N.shape[0], "lines": N.shape[1], "expected": n}
    else:
        gram = N @ N.T
        off = gram.copy()
        np.fill_diagonal(off, 1)
        line_sizes = N.sum(axis=0)
        point_degrees = N.sum(axis=1)
        if np.any(off != 1):
            a, b = (int(t) for t in np.argwhere(off != 1)[0])
            witness = {"reason": "two points do not span exactly one line",
                       "point_pair": [a, b], "common_lines": int(gram[a, b])}
        elif np.any(line_sizes != q + 1):
            l = int(np.flatnonzero(line_sizes != q + 1)[0])
            witness = {"reason": "line size", "line": l, "count": int(line_sizes[l])}
        elif np.any(point_degrees != q + 1):
            p = int(np.flatnonzero(point_degrees != q + 1)[0])
            witness = {"reason": "point degree", "point": p, "count": int(point_degrees[p])}
        elif np.any(gram != q * np.eye(n, dtype=np.int64) + 1):
            witness = {"reason": "N N^T != qI + J"}
        else:
            dual = N.T @ N
            bad = np.argwhere(dual != q * np.eye(n, dtype=np.int64) + 1)
            if len(bad):
                a, b = (int(t) for t in bad[0])
                witness = {"reason": "two lines do not meet once", "line_pair": [a, b],
                           "common_points": int(dual[a, b])}
    return CheckResult(name, FAIL if witness else PASS, "exact", 0 if witness is None else 1,
                       witness)


def _line_table(N: np.ndarray) -> np.ndarray:
    """``T[p, r]`` = the line through distinct points ``p`` and ``r``."""
    common = N[:, None, :] & N[None, :, :]
    return common.argmax(axis=2)


def check_residue_identities(plane: ProjectivePlane, name: str = "plane-residue") -> CheckResult:
    """Exhaustive check of the three counting identities over all flags
    ``(p0, l0)`` and points ``p1`` off ``l0``, with ``l1`` the line through
    ``p0`` and ``p1``:

    (a) every affine line carries ``q`` affine points, exactly one on ``l1``;
    (b) the two-step path expansion, scaled by ``q^2``:
        ``sum_{l ~ p1} sum_{p' ~ l} e_p' = q e_p1 + sum_{p' !~ l1} e_p'
        = q e_p1 + sum_{p'} e_p' - sum_{p' ~ l1} e_p'``  (affine points, lines);
    (c) in ``sum_{p' !~ l1} sum_{l ~ p'} e_l`` every affine line occurs ``q - 1`` times.
    """
    q, N = plane.q, plane.incidence
    table = _line_table(N)
    counts = {"flags": 0, "configurations": 0}
    for p0 in range(N.shape[0]):
        for l0 in np.flatnonzero(N[p0]):
            counts["flags"] += 1
            ap = np.flatnonzero(N[:, l0] == 0)
            al = np.flatnonzero(N[p0] == 0)
            Nr = N[np.ix_(ap, al)]
            l1 = table[p0, ap]
            M1 = N[np.ix_(ap, l1)]  # M1[p', k] = [p' ~ l1(p1_k)]
            counts["configurations"] += len(ap)
            wit = {"p0": p0, "l0": int(l0)}
            col = Nr.sum(axis=0)
            if np.any(col != q):
                k = int(np.flatnonzero(col != q)[0])
                return _fail(name, "a", dict(wit, line=int(al[k]), affine_points=int(col[k])))
            on_l1 = Nr.T @ M1
            if np.any(on_l1 != 1):
                li, k = (int(t) for t in np.argwhere(on_l1 != 1)[0])
                return _fail(name, "a", dict(wit, p1=int(ap[k]), line=int(al[li]),
                                             points_on_l1=int(on_l1[li, k])))
            lhs = Nr @ Nr.T
            eye = q * np.eye(len(ap), dtype=np.int64)
            mid = eye + (1 - M1)
            rhs = eye + np.ones_like(M1) - M1
            for label, other in (("b1", mid), ("b2", rhs)):
                if np.any(lhs != other):
                    a, k = (int(t) for t in np.argwhere(lhs != other)[0])
                    return _fail(name, label, dict(wit, p1=int(ap[k]), point=int(ap[a])))
            mult = Nr.T @ (1 - M1)
            if np.any(mult != q - 1):
                li, k = (int(t) for t in np.argwhere(mult != q - 1)[0])
                return _fail(name, "c", dict(wit, p1=int(ap[k]), line=int(al[li]),
                                             times=int(mult[li, k])))
    return CheckResult(name, PASS, "exact", 0,
                       dict(counts, q=q, l1_convention="line through p0 and p1",
                            times_each_line=q - 1))


def _fail(name: str, part: str, witness: dict) -> CheckResult:
    return CheckResult(name, FAIL, "exact", 1, dict(witness, identity=part))


def affine_path_counts(plane: ProjectivePlane, p0: int = None, l0: int = None):
    """``(Nr Nr^T, Nr^T Nr)`` for the affine part at a flag (first flag by default)."""
    N = plane.incidence
    if p0 is None:
        p0 = 0
    if l0 is None:
        l0 = int(np.flatnonzero(N[p0])[0])
    Nr = N[np.ix_(np.flatnonzero(N[:, l0] == 0), np.flatnonzero(N[p0] == 0))]
    return Nr @ Nr.T, Nr.T @ Nr
