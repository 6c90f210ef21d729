"""Exact rational functions on atoms.

A :class:`BoundaryFunction` stores integer numerators over one shared
positive denominator, always reduced.  Numerators are ``int64`` while every
operation is provably overflow free and fall back to Python integers (object
arrays) otherwise, so results are exact regardless of magnitude.

A two-dimensional numerator array holds a batch of functions column-wise;
all operators act on batches the same way they act on single functions.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable

import numpy as np

SAFE = 2**62


def maxabs(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    return int(np.abs(a).max())


def _to_int64_if_small(a: np.ndarray) -> np.ndarray:
    if a.dtype == object and (a.size == 0 or maxabs(a) < SAFE):
        return a.astype(np.int64)
    return a


def _as_object(a: np.ndarray) -> np.ndarray:
    return a if a.dtype == object else a.astype(object)


def scale_int(a: np.ndarray, k: int, bound: int | None = None) -> np.ndarray:
    """``a * k`` without overflow."""
    if k == 1:
        return a
    if a.dtype != object:
        m = maxabs(a) if bound is None else bound
        if m * abs(k) < SAFE:
            return a * k
    return _as_object(a) * k


def add_int(a: np.ndarray, b: np.ndarray, sign: int = 1) -> np.ndarray:
    if a.dtype != object and b.dtype != object and maxabs(a) + maxabs(b) < SAFE:
        return a + b if sign > 0 else a - b
    a, b = _as_object(a), _as_object(b)
    return a + b if sign > 0 else a - b


def mul_int(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.dtype != object and b.dtype != object and maxabs(a) * maxabs(b) < SAFE:
        return a * b
    return _as_object(a) * _as_object(b)


def sum_int(a: np.ndarray, axis: int) -> np.ndarray:
    if a.dtype != object and maxabs(a) * max(a.shape[axis], 1) >= SAFE:
        a = _as_object(a)
    return a.sum(axis=axis)


def _gcd_all(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    if a.dtype != object:
        return int(np.gcd.reduce(a.ravel()))
    return math.gcd(*a.ravel().tolist())


def _broadcast(a: np.ndarray, ndim: int) -> np.ndarray:
    while a.ndim < ndim:
        a = a[..., None]
    return a


class BoundaryFunction:
    """Exact rational values on atoms: ``num / den``."""

    __slots__ = ("num", "den")
    __hash__ = None  # mutable-array backed

    def __init__(self, num, den: int = 1, *, reduced: bool = False):
        num = np.asarray(num)
        if num.dtype.kind in "iu":
            num = num.astype(np.int64, copy=False)
        elif num.dtype != object:
            raise TypeError(f"numerators must be integers, got {num.dtype}")
        den = int(den)
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if den < 0:
            num, den = -num, -den
        if not reduced:
            g = math.gcd(_gcd_all(num), den)
            if g > 1:
                num = num // g
                den //= g
        self.num = _to_int64_if_small(num)
        self.den = den

    # -- constructors ---------------------------------------------------

    @classmethod
    def from_values(cls, values: Iterable) -> "BoundaryFunction":
        fr = [Fraction(v) for v in values]
        L = math.lcm(*[v.denominator for v in fr]) if fr else 1
        num = np.array([v.numerator * (L // v.denominator) for v in fr], dtype=object)
        return cls(num, L)

    @classmethod
    def zeros(cls, n: int) -> "BoundaryFunction":
        return cls(np.zeros(n, dtype=np.int64), 1, reduced=True)

    @classmethod
    def constant(cls, n: int, c) -> "BoundaryFunction":
        c = Fraction(c)
        return cls(np.full(n, c.numerator, dtype=object), c.denominator)

    @classmethod
    def indicator(cls, n: int, index) -> "BoundaryFunction":
        num = np.zeros(n, dtype=np.int64)
        num[index] = 1
        return cls(num, 1, reduced=True)

    @classmethod
    def stack(cls, fs: list["BoundaryFunction"]) -> "BoundaryFunction":
        """Batch of one-dimensional functions as columns."""
        L = math.lcm(*[f.den for f in fs])
        cols = [scale_int(f.num, L // f.den) for f in fs]
        if any(c.dtype == object for c in cols):
            cols = [_as_object(c) for c in cols]
        return cls(np.stack(cols, axis=1), L)

    # -- views ----------------------------------------------------------

    def __len__(self) -> int:
        return self.num.shape[0]

    @property
    def shape(self) -> tuple[int, ...]:
        return self.num.shape

    @property
    def batch_size(self) -> int:
        return 1 if self.num.ndim == 1 else self.num.shape[1]

    def column(self, k: int) -> "BoundaryFunction":
        return BoundaryFunction(self.num[:, k], self.den)

    def columns(self) -> list["BoundaryFunction"]:
        if self.num.ndim == 1:
            return [self]
        return [self.column(k) for k in range(self.num.shape[1])]

    @property
    def values(self) -> np.ndarray:
        out = np.empty(self.num.shape, dtype=object)
        flat = out.reshape(-1)
        for k, n in enumerate(self.num.reshape(-1).tolist()):
            flat[k] = Fraction(n, self.den)
        return out

    def __getitem__(self, index) -> Fraction:
        return Fraction(int(self.num[index]), self.den)

    def to_float(self) -> np.ndarray:
        if self.num.dtype != object and self.den < 2**53:
            return self.num.astype(float) / self.den
        return np.vectorize(lambda n: n / self.den, otypes=[float])(self.num)

    def __repr__(self) -> str:
        head = ", ".join(str(v) for v in self.values.reshape(-1)[:6])
        return f"BoundaryFunction(shape={self.shape}, [{head}{', ...' if self.num.size > 6 else ''}])"

    # -- arithmetic -----------------------------------------------------

    def _common(self, other: "BoundaryFunction"):
        L = math.lcm(self.den, other.den)
        a = scale_int(self.num, L // self.den)
        b = scale_int(other.num, L // other.den)
        nd = max(a.ndim, b.ndim)
        return _broadcast(a, nd), _broadcast(b, nd), L

    def __add__(self, other) -> "BoundaryFunction":
        if not isinstance(other, BoundaryFunction):
            return self + BoundaryFunction.constant(len(self), other)
        a, b, L = self._common(other)
        return BoundaryFunction(add_int(a, b), L)

    __radd__ = __add__

    def __sub__(self, other) -> "BoundaryFunction":
        if not isinstance(other, BoundaryFunction):
            return self - BoundaryFunction.constant(len(self), other)
        a, b, L = self._common(other)
        return BoundaryFunction(add_int(a, b, -1), L)

    def __rsub__(self, other) -> "BoundaryFunction":
        return (-self) + other

    def __neg__(self) -> "BoundaryFunction":
        return BoundaryFunction(-self.num, self.den, reduced=True)

    def __mul__(self, other) -> "BoundaryFunction":
        if isinstance(other, BoundaryFunction):
            nd = max(self.num.ndim, other.num.ndim)
            return BoundaryFunction(
                mul_int(_broadcast(self.num, nd), _broadcast(other.num, nd)),
                self.den * other.den)
        s = Fraction(other)
        return BoundaryFunction(scale_int(self.num, s.numerator), self.den * s.denominator)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "BoundaryFunction":
        return self * (1 / Fraction(other))

    def __abs__(self) -> "BoundaryFunction":
        return BoundaryFunction(np.abs(self.num), self.den, reduced=True)

    def square(self) -> "BoundaryFunction":
        return self * self

    def maximum(self, other: "BoundaryFunction") -> "BoundaryFunction":
        a, b, L = self._common(other)
        return BoundaryFunction(np.maximum(a, b), L)

    def le(self, other: "BoundaryFunction") -> np.ndarray:
        """Pointwise ``self <= other`` as a boolean array."""
        a, b, _ = self._common(other)
        return a <= b

    def sum_atoms(self) -> Fraction | list[Fraction]:
        """Plain sum over atoms (per column for batches)."""
        s = sum_int(self.num, 0)
        if np.ndim(s) == 0:
            return Fraction(int(s), self.den)
        return [Fraction(int(v), self.den) for v in s]

    def max_abs(self) -> Fraction:
        return Fraction(maxabs(self.num), self.den)

    def min_value(self) -> Fraction:
        return Fraction(int(self.num.min()), self.den)

    def is_zero(self) -> bool:
        return not np.any(self.num != 0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BoundaryFunction):
            return NotImplemented
        return (self.den == other.den and self.num.shape == other.num.shape
                and bool(np.all(self.num == other.num)))

    def __ne__(self, other) -> bool:
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq
