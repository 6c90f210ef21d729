"""Sigma-fields on the atom space and exact conditional expectation.

Every sigma-field used here is the partition of the box into left cosets of
a box subgroup ``H(ex, ey, ez) = p^ex O x p^ey O x p^ez O`` containing the
base subgroup:

* ``Level(lam)``  -> ``H(lam.i, lam.j, lam.i + lam.j)``
* ``Row(i)``      -> ``H(i, B, C)``: orbits of right translation by ``(a, 0, 0)``,
  ``a`` in ``p^i O``, i.e. the sigma-field generated by all levels in row ``i``
* ``Col(j)``      -> ``H(A, j, C)``: orbits of right translation by ``(0, b, 0)``
* ``Join(levels)``-> intersection of the level subgroups (common refinement)

All cells of such a partition have the same number of atoms, so the
conditional expectation is the plain average over a cell.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import TextIO

import numpy as np
from scipy import sparse

from .coweights import Coweight
from .exact import BoundaryFunction, sum_int
from .heisenberg import AtomSpace
from .linalg import LinearOperator


class PartitionError(ValueError):
    pass


@dataclass(frozen=True)
class PartitionSpec:
    kind: str
    lam: Coweight | None = None
    index: int | None = None
    members: tuple[Coweight, ...] = ()

    def __str__(self) -> str:
        if self.kind == "level":
            return f"Level({self.lam})"
        if self.kind == "row":
            return f"Row({self.index})"
        if self.kind == "col":
            return f"Col({self.index})"
        return "Join(" + ";".join(str(m) for m in self.members) + ")"


def Level(lam: Coweight | tuple[int, int]) -> PartitionSpec:
    if not isinstance(lam, Coweight):
        lam = Coweight(*lam)
    return PartitionSpec("level", lam=lam)


def Row(i: int) -> PartitionSpec:
    return PartitionSpec("row", index=i)


def Col(j: int) -> PartitionSpec:
    return PartitionSpec("col", index=j)


def Join(*levels) -> PartitionSpec:
    members = []
    for m in levels:
        if isinstance(m, PartitionSpec):
            if m.kind != "level":
                raise PartitionError("Join accepts Level specs only")
            m = m.lam
        elif not isinstance(m, Coweight):
            m = Coweight(*m)
        members.append(m)
    if not members:
        raise PartitionError("Join of nothing")
    return PartitionSpec("join", members=tuple(members))


def box_exponents(space: AtomSpace, spec: PartitionSpec) -> tuple[int, int, int]:
    """The subgroup exponents of ``spec``; raises if not representable."""
    c = space.config
    if spec.kind == "level":
        if not space.representable(spec.lam):
            raise PartitionError(
                f"{spec} is not representable: need {c.i0}<=i<={c.A}, {c.j0}<=j<={c.B}, "
                f"i+j<={c.C}")
        return (spec.lam.i, spec.lam.j, spec.lam.level)
    if spec.kind == "row":
        if not c.i0 <= spec.index <= c.A:
            raise PartitionError(f"{spec} out of range {c.i0}..{c.A}")
        return (spec.index, c.B, c.C)
    if spec.kind == "col":
        if not c.j0 <= spec.index <= c.B:
            raise PartitionError(f"{spec} out of range {c.j0}..{c.B}")
        return (c.A, spec.index, c.C)
    if spec.kind == "join":
        boxes = [box_exponents(space, Level(m)) for m in spec.members]
        return tuple(max(b[k] for b in boxes) for k in range(3))
    raise PartitionError(f"unknown partition kind {spec.kind!r}")


class Partition:
    """Equal-size cell decomposition of the atoms."""

    def __init__(self, space: AtomSpace, spec: PartitionSpec, box: tuple[int, int, int]):
        self.space = space
        self.spec = spec
        self.box = box
        key = space.box_key(*box)
        _, cell_id = np.unique(key, return_inverse=True)
        self.cell_id = cell_id.astype(np.int64).reshape(-1)
        self.ncells = int(self.cell_id.max()) + 1
        n = space.atom_count
        if n % self.ncells:
            raise AssertionError("unequal cells")
        self.size = n // self.ncells
        # atoms grouped cell by cell, for reshaped reductions
        self.order = np.argsort(self.cell_id, kind="stable")
        self._agg = None  # sparse cell-averaging matrix, built on first float use
        self.cell_id.setflags(write=False)

    def __repr__(self) -> str:
        return f"Partition({self.spec}, cells={self.ncells}, size={self.size})"

    @property
    def cell_size(self) -> np.ndarray:
        return np.full(self.ncells, self.size, dtype=np.int64)

    def cells(self) -> np.ndarray:
        """``(ncells, size)`` array of atom indices, cell by cell."""
        return self.order.reshape(self.ncells, self.size)

    def cell_sums(self, a: np.ndarray) -> np.ndarray:
        grouped = a[self.order].reshape((self.ncells, self.size) + a.shape[1:])
        return grouped.sum(axis=1) if a.dtype.kind == "f" else sum_int(grouped, 1)

    def average(self, f: BoundaryFunction) -> BoundaryFunction:
        if self.size == 1:
            return f
        return BoundaryFunction(self.cell_sums(f.num)[self.cell_id], f.den * self.size)

    def average_float(self, x: np.ndarray) -> np.ndarray:
        if self.size == 1:
            return x
        if self._agg is None:
            n = len(self.cell_id)
            self._agg = sparse.csr_matrix(
                (np.full(n, 1.0 / self.size), (self.cell_id, np.arange(n))), shape=(self.ncells, n))
        return (self._agg @ x)[self.cell_id]

    def refines(self, other: "Partition") -> bool:
        """Every cell of ``self`` lies inside one cell of ``other``."""
        labels = other.cell_id[self.cells()]
        return bool(np.all(labels == labels[:, :1]))

    def is_measurable(self, f: BoundaryFunction) -> bool:
        """Whether ``f`` (or every column of a batch) is constant on cells."""
        g = f.num[self.order].reshape((self.ncells, self.size) + f.num.shape[1:])
        return bool(np.all(g == g[:, :1]))

    def write_csv(self, out: TextIO) -> None:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["atom_index", "cell_id"])
        for a, c in enumerate(self.cell_id.tolist()):
            w.writerow([a, c])

    def to_csv(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()


def partition(space: AtomSpace, spec: PartitionSpec) -> Partition:
    box = box_exponents(space, spec)
    cache = space.__dict__.setdefault("_partition_cache", {})
    part = cache.get(box)
    if part is None:
        part = cache[box] = Partition(space, spec, box)
    elif part.spec != spec:
        # same cells under a different name; share the arrays
        alias = object.__new__(Partition)
        alias.__dict__.update(part.__dict__)
        alias.spec = spec
        part = alias
    return part


def cond_expect(f: BoundaryFunction, part: Partition) -> BoundaryFunction:
    if len(f) != part.space.atom_count:
        raise ValueError("function and partition live on different spaces")
    return part.average(f)


def expectation_operator(part: Partition, space: AtomSpace | None = None) -> LinearOperator:
    if space is not None and space is not part.space:
        raise ValueError("partition belongs to another space")
    return LinearOperator.projection(part)


def E(space: AtomSpace, spec) -> LinearOperator:
    """Shorthand: expectation operator for a spec or a coweight (level)."""
    if isinstance(spec, (Coweight, tuple)):
        spec = Level(spec)
    return LinearOperator.projection(partition(space, spec))
