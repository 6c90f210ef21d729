"""Exact rational linear operators on atom functions.

Operators are kept as expression trees over conditional-expectation
projections (plus pointwise multiplications), never as dense matrices.
``apply`` evaluates the tree exactly on a :class:`BoundaryFunction` (or a
batch of them), ``apply_float`` does the same in floating point.

Every projection onto a coset partition commutes with left translation by
the group, and so does every sum and product of them.  Such an operator is
a convolution: it is fixed by its kernel column ``T e_0``, which makes exact
equality a single evaluation.  Operators containing multiplications lose the
property and fall back to comparison on the full standard basis.
"""

from __future__ import annotations

import csv
import io
from fractions import Fraction
from typing import TextIO

import numpy as np

from .exact import BoundaryFunction

_BASIS_CHUNK = 256


class LinearOperator:
    def __init__(self, kind: str, n: int, *, part=None, func=None, terms=(), factors=(),
                 name: str | None = None):
        self.kind = kind
        self.n = n
        self.part = part
        self.func = func
        self.terms = tuple(terms)
        self.factors = tuple(factors)
        self.name = name
        if kind == "sum":
            self.invariant = all(t.invariant for _, t in self.terms)
        elif kind == "compose":
            self.invariant = all(t.invariant for t in self.factors)
        else:
            self.invariant = kind != "mult"

    # -- leaves ---------------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> "LinearOperator":
        return cls("identity", n, name="I")

    @classmethod
    def zero(cls, n: int) -> "LinearOperator":
        return cls("zero", n, name="0")

    @classmethod
    def projection(cls, part) -> "LinearOperator":
        return cls("proj", part.space.atom_count, part=part, name=f"E[{part.spec}]")

    @classmethod
    def multiplication(cls, f: BoundaryFunction) -> "LinearOperator":
        if f.num.ndim != 1:
            raise ValueError("multiplier must be a single function")
        return cls("mult", len(f), func=f, name="M")

    def __repr__(self) -> str:
        return f"LinearOperator({self.describe()})"

    def describe(self) -> str:
        if self.kind in ("identity", "zero", "proj", "mult"):
            return self.name
        if self.kind == "compose":
            return " ".join(f.describe() if f.kind != "sum" else f"({f.describe()})"
                            for f in self.factors)
        parts = []
        for c, t in self.terms:
            s = t.describe()
            parts.append(s if c == 1 else f"{c}*{s}" if t.kind != "sum" else f"{c}*({s})")
        return " + ".join(parts)

    # -- algebra --------------------------------------------------------

    def _check(self, other: "LinearOperator") -> None:
        if not isinstance(other, LinearOperator):
            raise TypeError(f"cannot combine operator with {type(other).__name__}")
        if other.n != self.n:
            raise ValueError(f"dimension mismatch {self.n} != {other.n}")

    def _as_terms(self):
        if self.kind == "sum":
            return list(self.terms)
        if self.kind == "zero":
            return []
        return [(Fraction(1), self)]

    def __add__(self, other: "LinearOperator") -> "LinearOperator":
        self._check(other)
        merged: list[tuple[Fraction, LinearOperator]] = []
        for c, t in self._as_terms() + other._as_terms():
            for k, (c2, t2) in enumerate(merged):
                if t2 is t:
                    merged[k] = (c2 + c, t)
                    break
            else:
                merged.append((c, t))
        merged = [(c, t) for c, t in merged if c != 0]
        if not merged:
            return LinearOperator.zero(self.n)
        if len(merged) == 1 and merged[0][0] == 1:
            return merged[0][1]
        return LinearOperator("sum", self.n, terms=merged)

    def __sub__(self, other: "LinearOperator") -> "LinearOperator":
        return self + (-1) * other

    def __neg__(self) -> "LinearOperator":
        return (-1) * self

    def __mul__(self, c) -> "LinearOperator":
        if isinstance(c, LinearOperator):
            raise TypeError("use @ to compose operators")
        c = Fraction(c)
        if c == 0 or self.kind == "zero":
            return LinearOperator.zero(self.n)
        if c == 1:
            return self
        return LinearOperator("sum", self.n, terms=[(c * a, t) for a, t in self._as_terms()])

    __rmul__ = __mul__

    def __matmul__(self, other: "LinearOperator") -> "LinearOperator":
        self._check(other)
        if self.kind == "zero" or other.kind == "zero":
            return LinearOperator.zero(self.n)
        if self.kind == "identity":
            return other
        if other.kind == "identity":
            return self
        left = self.factors if self.kind == "compose" else (self,)
        right = other.factors if other.kind == "compose" else (other,)
        factors = list(left)
        for f in right:
            # projections are idempotent
            if factors and f.kind == "proj" and factors[-1].kind == "proj" \
                    and factors[-1].part.box == f.part.box:
                continue
            factors.append(f)
        if len(factors) == 1:
            return factors[0]
        return LinearOperator("compose", self.n, factors=factors)

    def __pow__(self, m: int) -> "LinearOperator":
        if m < 0:
            raise ValueError("negative power")
        out = LinearOperator.identity(self.n)
        for _ in range(m):
            out = out @ self
        return out

    def adjoint(self) -> "LinearOperator":
        """Adjoint for the measure-weighted inner product (equal atom weights)."""
        if self.kind in ("identity", "zero", "proj", "mult"):
            return self
        if self.kind == "sum":
            return LinearOperator("sum", self.n, terms=[(c, t.adjoint()) for c, t in self.terms])
        return LinearOperator("compose", self.n, factors=[f.adjoint() for f in reversed(self.factors)])

    # -- evaluation -----------------------------------------------------

    def apply(self, f: BoundaryFunction) -> BoundaryFunction:
        if len(f) != self.n:
            raise ValueError(f"function of length {len(f)} for operator of size {self.n}")
        k = self.kind
        if k == "identity":
            return f
        if k == "zero":
            return BoundaryFunction(np.zeros(f.num.shape, dtype=np.int64), 1, reduced=True)
        if k == "proj":
            return self.part.average(f)
        if k == "mult":
            return self.func * f
        if k == "compose":
            for t in reversed(self.factors):
                f = t.apply(f)
            return f
        acc = None
        for c, t in self.terms:
            v = t.apply(f)
            if c != 1:
                v = v * c
            acc = v if acc is None else acc + v
        return acc

    __call__ = apply

    def apply_float(self, x: np.ndarray) -> np.ndarray:
        k = self.kind
        if k == "identity":
            return x
        if k == "zero":
            return np.zeros_like(x, dtype=float)
        if k == "proj":
            return self.part.average_float(x)
        if k == "mult":
            a = self.func.to_float()
            return a.reshape(a.shape + (1,) * (x.ndim - 1)) * x
        if k == "compose":
            for t in reversed(self.factors):
                x = t.apply_float(x)
            return x
        acc = np.zeros(x.shape, dtype=float)
        for c, t in self.terms:
            acc = acc + float(c) * t.apply_float(x)
        return acc

    def kernel_column(self) -> BoundaryFunction:
        """``T e_0``; determines a translation-invariant operator."""
        return self.apply(BoundaryFunction.indicator(self.n, 0))

    def equals(self, other: "LinearOperator") -> bool:
        self._check(other)
        if self.invariant and other.invariant:
            return self.kernel_column() == other.kernel_column()
        diff = self - other
        for start in range(0, self.n, _BASIS_CHUNK):
            stop = min(start + _BASIS_CHUNK, self.n)
            block = np.zeros((self.n, stop - start), dtype=np.int64)
            block[np.arange(start, stop), np.arange(stop - start)] = 1
            if not diff.apply(BoundaryFunction(block, 1, reduced=True)).is_zero():
                return False
        return True

    def defect(self, other: "LinearOperator") -> Fraction:
        """Largest absolute kernel entry of ``self - other`` (exact; invariant operators)."""
        if not (self.invariant and other.invariant):
            raise ValueError("defect is defined for translation-invariant operators")
        return (self.kernel_column() - other.kernel_column()).max_abs()

    def is_self_adjoint(self) -> bool:
        return self.equals(self.adjoint())

    # -- export ---------------------------------------------------------

    def triplets(self, space) -> list[tuple[int, int, Fraction]]:
        """Nonzero entries ``(row_atom, col_atom, value)``, column by column."""
        out = []
        if self.invariant:
            col0 = self.kernel_column()
            support = np.flatnonzero(col0.num)
            vals = [Fraction(int(col0.num[s]), col0.den) for s in support]
            for b in range(self.n):
                rows = space.left_translation(space.element(b))[support]
                order = np.argsort(rows, kind="stable")
                out.extend((int(rows[t]), b, vals[t]) for t in order)
            return out
        for start in range(0, self.n, _BASIS_CHUNK):
            stop = min(start + _BASIS_CHUNK, self.n)
            block = np.zeros((self.n, stop - start), dtype=np.int64)
            block[np.arange(start, stop), np.arange(stop - start)] = 1
            cols = self.apply(BoundaryFunction(block, 1, reduced=True))
            for k in range(stop - start):
                for a in np.flatnonzero(cols.num[:, k]):
                    out.append((int(a), start + k, Fraction(int(cols.num[a, k]), cols.den)))
        return out

    def write_csv(self, space, out: TextIO) -> None:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["row_atom", "col_atom", "value"])
        for a, b, v in self.triplets(space):
            w.writerow([a, b, f"{v.numerator}/{v.denominator}"])

    def to_csv(self, space) -> str:
        buf = io.StringIO()
        self.write_csv(space, buf)
        return buf.getvalue()

    def to_dense_float(self) -> np.ndarray:
        return self.apply_float(np.eye(self.n))

    def as_scipy(self):
        from scipy.sparse.linalg import LinearOperator as ScipyOperator

        adj = self.adjoint()
        return ScipyOperator(
            (self.n, self.n), dtype=float,
            matvec=self.apply_float, rmatvec=adj.apply_float,
            matmat=self.apply_float, rmatmat=adj.apply_float)
