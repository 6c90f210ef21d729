"""Integer arithmetic on the coweight lattice.

A coweight ``i*lam1 + j*lam2`` is stored by its two coefficients.  Pairings
with the positive roots reduce to reading ``i``, ``j`` or ``i + j``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass


class Root(enum.Enum):
    ALPHA0 = 0
    ALPHA1 = 1
    ALPHA2 = 2


@dataclass(frozen=True, order=True)
class Coweight:
    i: int
    j: int

    @property
    def level(self) -> int:
        return self.i + self.j

    def __add__(self, other: "Coweight") -> "Coweight":
        return Coweight(self.i + other.i, self.j + other.j)

    def __sub__(self, other: "Coweight") -> "Coweight":
        return Coweight(self.i - other.i, self.j - other.j)

    def __neg__(self) -> "Coweight":
        return Coweight(-self.i, -self.j)

    def __rmul__(self, k: int) -> "Coweight":
        return Coweight(k * self.i, k * self.j)

    def __str__(self) -> str:
        return f"{self.i},{self.j}"

    def as_tuple(self) -> tuple[int, int]:
        return (self.i, self.j)

    @classmethod
    def parse(cls, text: str) -> "Coweight":
        """Parse the ``"i,j"`` form used by the CLI and reports."""
        parts = text.replace("(", "").replace(")", "").split(",")
        if len(parts) != 2:
            raise ValueError(f"expected 'i,j', got {text!r}")
        return cls(int(parts[0]), int(parts[1]))


LAM1 = Coweight(1, 0)
LAM2 = Coweight(0, 1)
ZERO = Coweight(0, 0)


def pairing(lam: Coweight, root: Root) -> int:
    if root is Root.ALPHA1:
        return lam.i
    if root is Root.ALPHA2:
        return lam.j
    return lam.i + lam.j


def leq(lam: Coweight, mu: Coweight) -> bool:
    """The partial order: ``mu`` lies in the upward sector at ``lam``."""
    return lam.i <= mu.i and lam.j <= mu.j


def dist(lam: Coweight, mu: Coweight) -> int:
    return max(abs(lam.i - mu.i), abs(lam.j - mu.j))


def meet(lam: Coweight, mu: Coweight) -> Coweight:
    return Coweight(min(lam.i, mu.i), min(lam.j, mu.j))


def join(lam: Coweight, mu: Coweight) -> Coweight:
    return Coweight(max(lam.i, mu.i), max(lam.j, mu.j))


def box(i0: int, j0: int, i1: int, j1: int):
    """All coweights with ``i0 <= i <= i1`` and ``j0 <= j <= j1``, row-major."""
    return [Coweight(i, j) for i in range(i0, i1 + 1) for j in range(j0, j1 + 1)]
