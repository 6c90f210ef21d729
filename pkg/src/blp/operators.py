"""Martingale differences, maximal and square functions, transforms and norms.

Index conventions on the finite window:

* ``L(i)`` for ``i0 <= i <= A`` and ``R(j)`` for ``j0 <= j <= B``; the lowest
  one is the base projection itself, so both families resolve the identity.
* ``D(lam) = L(i) R(j)`` and ``Dstar(lam) = R(j) L(i)`` on the same range.
* ``d(lam)`` only for ``lam.i > i0`` and ``lam.j > j0`` (all four levels must
  be representable).  The square function ``S`` sums the interior grid and
  carries the edge differences and the corner projection separately.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, TextIO

import numpy as np

from .coweights import LAM1, LAM2, Coweight
from .exact import BoundaryFunction
from .filtration import Col, Level, PartitionError, Row, partition
from .heisenberg import AtomSpace
from .linalg import LinearOperator


class OperatorError(ValueError):
    pass


def _cw(lam) -> Coweight:
    return lam if isinstance(lam, Coweight) else Coweight(*lam)


def level_op(space: AtomSpace, lam) -> LinearOperator:
    return LinearOperator.projection(partition(space, Level(_cw(lam))))


def row_op(space: AtomSpace, i: int) -> LinearOperator:
    return LinearOperator.projection(partition(space, Row(i)))


def col_op(space: AtomSpace, j: int) -> LinearOperator:
    return LinearOperator.projection(partition(space, Col(j)))


# -- difference operators ---------------------------------------------------


def L(space: AtomSpace, i: int) -> LinearOperator:
    c = space.config
    if not c.i0 <= i <= c.A:
        raise OperatorError(f"L({i}) outside rows {c.i0}..{c.A}")
    if i == c.i0:
        return row_op(space, i)
    return row_op(space, i) - row_op(space, i - 1)


def R(space: AtomSpace, j: int) -> LinearOperator:
    c = space.config
    if not c.j0 <= j <= c.B:
        raise OperatorError(f"R({j}) outside columns {c.j0}..{c.B}")
    if j == c.j0:
        return col_op(space, j)
    return col_op(space, j) - col_op(space, j - 1)


def D(space: AtomSpace, lam) -> LinearOperator:
    lam = _cw(lam)
    return L(space, lam.i) @ R(space, lam.j)


def Dstar(space: AtomSpace, lam) -> LinearOperator:
    lam = _cw(lam)
    return R(space, lam.j) @ L(space, lam.i)


def d(space: AtomSpace, lam) -> LinearOperator:
    lam = _cw(lam)
    c = space.config
    if lam.i <= c.i0 or lam.j <= c.j0 or not space.representable(lam):
        raise OperatorError(
            f"d({lam}) needs i>{c.i0}, j>{c.j0} and a representable level")
    return (level_op(space, lam) - level_op(space, lam - LAM1)
            - level_op(space, lam - LAM2) + level_op(space, lam - LAM1 - LAM2))


_KINDS = {"L": L, "R": R, "D": D, "Dstar": Dstar, "d": d}


def difference_op(space: AtomSpace, kind: str, index) -> LinearOperator:
    """``kind`` is one of ``L``, ``R`` (integer index) or ``D``, ``Dstar``,
    ``d`` (coweight index)."""
    try:
        fn = _KINDS[kind]
    except KeyError:
        raise OperatorError(f"unknown difference kind {kind!r}") from None
    return fn(space, index)


def boundary_terms(space: AtomSpace) -> list[tuple[str, LinearOperator]]:
    """Edge differences along ``j = j0`` and ``i = i0`` plus the corner.

    Together with the interior double differences they telescope to
    ``E_(I,J)``.
    """
    c = space.config
    out = []
    for i in range(c.i0 + 1, c.I + 1):
        out.append((f"edge({i},{c.j0})",
                    level_op(space, (i, c.j0)) - level_op(space, (i - 1, c.j0))))
    for j in range(c.j0 + 1, c.J + 1):
        out.append((f"edge({c.i0},{j})",
                    level_op(space, (c.i0, j)) - level_op(space, (c.i0, j - 1))))
    out.append((f"corner({c.i0},{c.j0})", level_op(space, (c.i0, c.j0))))
    return out


# -- maximal functions ------------------------------------------------------


def maximal(space: AtomSpace, kind: str, f: BoundaryFunction) -> BoundaryFunction:
    """``Mstar``: max over grid levels of ``|E_lam f|``; ``Lstar``/``Rstar``:
    max over rows/columns of ``E[|f| | .]``."""
    if kind == "Mstar":
        vals = (abs(partition(space, Level(lam)).average(f)) for lam in space.grid())
    elif kind == "Lstar":
        g = abs(f)
        vals = (partition(space, Row(i)).average(g) for i in space.rows())
    elif kind == "Rstar":
        g = abs(f)
        vals = (partition(space, Col(j)).average(g) for j in space.cols())
    else:
        raise OperatorError(f"unknown maximal kind {kind!r}")
    out = None
    for v in vals:
        out = v if out is None else out.maximum(v)
    return out


def maximal_float(space: AtomSpace, kind: str, x: np.ndarray) -> np.ndarray:
    if kind == "Mstar":
        parts = [partition(space, Level(lam)) for lam in space.grid()]
        return np.max([np.abs(pt.average_float(x)) for pt in parts], axis=0)
    a = np.abs(x)
    if kind == "Lstar":
        parts = [partition(space, Row(i)) for i in space.rows()]
    elif kind == "Rstar":
        parts = [partition(space, Col(j)) for j in space.cols()]
    else:
        raise OperatorError(f"unknown maximal kind {kind!r}")
    return np.max([pt.average_float(a) for pt in parts], axis=0)


# -- square functions -------------------------------------------------------


@dataclass
class SquareFunction:
    sum_squares: BoundaryFunction
    interior: BoundaryFunction
    boundary: BoundaryFunction | None = None

    @property
    def values(self) -> np.ndarray:
        return np.sqrt(self.sum_squares.to_float())


def _sum_squares(ops: Iterable[LinearOperator], f: BoundaryFunction) -> BoundaryFunction:
    acc = None
    for T in ops:
        g = T.apply(f)
        sq = g.square()
        acc = sq if acc is None else acc + sq
    if acc is None:
        acc = BoundaryFunction(np.zeros(f.num.shape, dtype=np.int64), 1, reduced=True)
    return acc


def square(space: AtomSpace, kind: str, f: BoundaryFunction) -> SquareFunction:
    if kind == "calS":
        s = _sum_squares((D(space, lam) for lam in space.difference_grid()), f)
        return SquareFunction(s, s)
    if kind == "calSstar":
        s = _sum_squares((Dstar(space, lam) for lam in space.difference_grid()), f)
        return SquareFunction(s, s)
    if kind == "S":
        inner_part = _sum_squares((d(space, lam) for lam in space.interior()), f)
        edge = _sum_squares((T for _, T in boundary_terms(space)), f)
        return SquareFunction(inner_part + edge, inner_part, edge)
    raise OperatorError(f"unknown square function kind {kind!r}")


def square_float(space: AtomSpace, kind: str, x: np.ndarray) -> np.ndarray:
    """Pointwise square function in floating point (``S`` includes the boundary)."""
    if kind == "calS":
        ops = [D(space, lam) for lam in space.difference_grid()]
    elif kind == "calSstar":
        ops = [Dstar(space, lam) for lam in space.difference_grid()]
    elif kind == "S":
        ops = [d(space, lam) for lam in space.interior()] + [T for _, T in boundary_terms(space)]
    else:
        raise OperatorError(f"unknown square function kind {kind!r}")
    return np.sqrt(sum(T.apply_float(x) ** 2 for T in ops))


# -- martingale transforms --------------------------------------------------


@dataclass
class CoefficientFamily:
    """Predictable coefficients ``a_lam`` keyed by interior coweights."""

    coeffs: dict[Coweight, BoundaryFunction]
    bound: Fraction = Fraction(1)

    def __getitem__(self, lam: Coweight) -> BoundaryFunction:
        return self.coeffs[lam]

    def __iter__(self):
        return iter(sorted(self.coeffs))


def check_predictable(space: AtomSpace, family: CoefficientFamily) -> None:
    interior = set(space.interior())
    for lam, a in family.coeffs.items():
        if lam not in interior:
            raise OperatorError(f"coefficient at non-interior {lam}")
        if a.num.ndim != 1 or len(a) != space.atom_count:
            raise OperatorError(f"coefficient at {lam} is not a single atom function")
        if not partition(space, Level(lam - LAM1 - LAM2)).is_measurable(a):
            raise OperatorError(f"coefficient at {lam} is not predictable")
        if a.max_abs() > family.bound:
            raise OperatorError(f"coefficient at {lam} exceeds the bound {family.bound}")


def _family(space: AtomSpace, a, bound) -> CoefficientFamily:
    if isinstance(a, CoefficientFamily):
        return a
    n = space.atom_count
    if isinstance(a, Mapping):
        coeffs = {_cw(k): v for k, v in a.items()}
    else:
        coeffs = {lam: BoundaryFunction.constant(n, a) for lam in space.interior()}
    if bound is None:
        bound = max((v.max_abs() for v in coeffs.values()), default=Fraction(0))
    return CoefficientFamily(coeffs, Fraction(bound))


def martingale_transform(space: AtomSpace, a, m: int, f: BoundaryFunction,
                         bound=None) -> BoundaryFunction:
    """``sum_lam a_lam d_lam^m f`` over the interior; ``a`` is a
    :class:`CoefficientFamily`, a mapping, or a constant."""
    if m < 1:
        raise OperatorError("m must be a positive integer")
    fam = _family(space, a, bound)
    check_predictable(space, fam)
    acc = BoundaryFunction(np.zeros(f.num.shape, dtype=np.int64), 1, reduced=True)
    for lam in fam:
        g = f
        dl = d(space, lam)
        for _ in range(m):
            g = dl.apply(g)
        acc = acc + fam[lam] * g
    return acc


def transform_operator(space: AtomSpace, a, m: int, bound=None) -> LinearOperator:
    if m < 1:
        raise OperatorError("m must be a positive integer")
    fam = _family(space, a, bound)
    check_predictable(space, fam)
    out = LinearOperator.zero(space.atom_count)
    for lam in fam:
        a = fam[lam]
        if np.all(a.num == a.num.flat[0]):
            # constant coefficients keep the operator translation invariant
            out = out + a[0] * d(space, lam) ** m
        else:
            out = out + LinearOperator.multiplication(a) @ d(space, lam) ** m
    return out


def transform_float(space: AtomSpace, family: CoefficientFamily, m: int, x: np.ndarray) -> np.ndarray:
    acc = np.zeros_like(x, dtype=float)
    for lam in family:
        g = x
        dl = d(space, lam)
        for _ in range(m):
            g = dl.apply_float(g)
        a = family[lam].to_float()
        acc += a.reshape(a.shape + (1,) * (x.ndim - 1)) * g
    return acc


def calderon_sum(space: AtomSpace, f: BoundaryFunction,
                 order: Sequence[Coweight] | None = None) -> BoundaryFunction:
    lams = space.difference_grid() if order is None else list(order)
    acc = BoundaryFunction(np.zeros(f.num.shape, dtype=np.int64), 1, reduced=True)
    for lam in lams:
        acc = acc + D(space, lam).apply(Dstar(space, lam).apply(f))
    return acc


# -- norms ------------------------------------------------------------------


def _exponent(p):
    if isinstance(p, str):
        if p.lower() in ("inf", "infinity"):
            return math.inf
        p = Fraction(p)
    if p != math.inf and p < 1:
        raise OperatorError(f"p={p} < 1 is not a norm")
    return p


def lp_power(space: AtomSpace, f: BoundaryFunction, p: int):
    """Exact ``sum |f|^p * atom_measure`` for a positive integer ``p``."""
    if int(p) != p or p < 1:
        raise OperatorError("exact p-th powers need a positive integer p")
    p = int(p)
    g = abs(f)
    acc = g
    for _ in range(p - 1):
        acc = acc * g
    s = acc.sum_atoms()
    w = space.atom_measure
    return [v * w for v in s] if isinstance(s, list) else s * w


def lp_norm(space: AtomSpace, f: BoundaryFunction, p) -> float | np.ndarray:
    p = _exponent(p)
    if p == math.inf:
        m = np.max(np.abs(f.to_float()), axis=0)
        return float(m) if np.ndim(m) == 0 else m
    if int(p) == p:
        s = lp_power(space, f, int(p))
        if isinstance(s, list):
            return np.array([float(v) ** (1 / int(p)) for v in s])
        return float(s) ** (1 / int(p))
    return lp_norm_float(space, f.to_float(), float(p))


def lp_norm_float(space: AtomSpace, x: np.ndarray, p) -> float | np.ndarray:
    p = _exponent(p)
    a = np.abs(np.asarray(x, dtype=float))
    if p == math.inf:
        out = a.max(axis=0)
    else:
        p = float(p)
        out = (np.sum(a**p, axis=0) * float(space.atom_measure)) ** (1 / p)
    return float(out) if np.ndim(out) == 0 else out


def inner(space: AtomSpace, f: BoundaryFunction, g: BoundaryFunction):
    return (f * g).sum_atoms() * space.atom_measure if f.num.ndim == 1 and g.num.ndim == 1 \
        else [v * space.atom_measure for v in (f * g).sum_atoms()]


_DENSE_LIMIT = 512
_ZERO_REL = 1e-12


def operator_norm2(T: LinearOperator, space: AtomSpace | None = None, *,
                   tol: float = 1e-13, maxiter: int = 5000) -> float:
    """Largest singular value of ``T``.

    Equal atom weights make the measure-weighted norm the plain matrix
    2-norm.  Small spaces use a dense SVD; otherwise Lanczos on ``T* T``
    from a fixed starting vector.
    """
    from scipy.sparse.linalg import LinearOperator as ScipyOperator, eigsh

    n = T.n
    if T.kind == "zero":
        return 0.0
    if n <= _DENSE_LIMIT:
        return float(np.linalg.norm(T.to_dense_float(), 2))
    v0 = np.random.default_rng(20240229).standard_normal(n)
    Tv = T.apply_float(v0)
    if np.linalg.norm(Tv) <= _ZERO_REL * np.linalg.norm(v0):
        v1 = np.random.default_rng(7).standard_normal(n)
        if np.linalg.norm(T.apply_float(v1)) <= _ZERO_REL * np.linalg.norm(v1):
            return 0.0
    adj = T.adjoint()
    gram = ScipyOperator((n, n), dtype=float, matvec=lambda v: adj.apply_float(T.apply_float(v)))
    w = eigsh(gram, k=1, which="LA", v0=v0, tol=tol, maxiter=maxiter,
              return_eigenvectors=False)
    return float(math.sqrt(max(float(w[0]), 0.0)))


@dataclass
class CotlarResult:
    bound: float
    sum_norm: float
    holds: bool
    pair_norms: dict[tuple[int, int], float] = field(default_factory=dict, repr=False)


def cotlar_bound(family: Sequence[LinearOperator], space: AtomSpace | None = None,
                 atol: float = 1e-9) -> CotlarResult:
    """Square-root-sum almost orthogonality bound
    ``max_mu sum_lam max(|T_mu T_lam*|, |T_mu* T_lam|)^(1/2)`` and the check
    ``|sum T_lam| <= bound``."""
    if not family:
        raise OperatorError("empty operator family")
    n = len(family)
    adj = [T.adjoint() for T in family]
    selfadj = [T.equals(A) if T.invariant else False for T, A in zip(family, adj)]
    pair: dict[tuple[int, int], float] = {}
    for a in range(n):
        for b in range(a, n):
            x = operator_norm2(family[a] @ adj[b], space)
            if selfadj[a] and selfadj[b]:
                y = x
            else:
                y = operator_norm2(adj[a] @ family[b], space)
            pair[(a, b)] = pair[(b, a)] = max(x, y)
    bound = max(sum(math.sqrt(pair[(a, b)]) for b in range(n)) for a in range(n))
    total = family[0]
    for T in family[1:]:
        total = total + T
    s = operator_norm2(total, space)
    return CotlarResult(bound, s, s <= bound + atol, pair)


def write_norm_table(rows: Iterable[tuple], out: TextIO) -> None:
    """Rows ``(lam, mu, lam_prime, m, norm)``; coweights as ``i,j``."""
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["lambda", "mu", "lambda_prime", "m", "norm"])
    for lam, mu, lp, m, val in rows:
        w.writerow([str(lam), str(mu), "" if lp is None else str(lp), m, f"{val:.12e}"])


def norm_table_csv(rows: Iterable[tuple]) -> str:
    buf = io.StringIO()
    write_norm_table(rows, buf)
    return buf.getvalue()


__all__ = [
    "OperatorError", "L", "R", "D", "Dstar", "d", "difference_op", "boundary_terms",
    "level_op", "row_op", "col_op", "maximal", "maximal_float", "SquareFunction", "square",
    "square_float", "CoefficientFamily", "check_predictable", "martingale_transform",
    "transform_operator", "transform_float", "calderon_sum", "lp_power", "lp_norm",
    "lp_norm_float", "inner", "operator_norm2", "CotlarResult", "cotlar_bound",
    "write_norm_table", "norm_table_csv", "PartitionError",
]
