"""Seeded generators of exact test functions and predictable coefficients."""

from __future__ import annotations

import zlib
from fractions import Fraction

import numpy as np

from ..coweights import LAM1, LAM2
from ..exact import BoundaryFunction
from ..filtration import Level, PartitionSpec, partition
from ..heisenberg import AtomSpace
from ..operators import CoefficientFamily

MAX_NUMERATOR = 8
MAX_DENOMINATOR = 6


def make_rng(seed, *labels) -> np.random.Generator:
    """Generator keyed by a seed plus stable labels (names hash via crc32)."""
    if isinstance(seed, np.random.Generator):
        return seed
    key = [int(seed)] + [zlib.crc32(str(t).encode()) for t in labels]
    return np.random.default_rng(key)


def _cell_values(rng, space: AtomSpace, measurability, size_fn):
    if measurability is None:
        return size_fn(space.atom_count), None
    part = partition(space, measurability)
    return size_fn(part.ncells), part.cell_id


def random_function(space: AtomSpace, seed, measurability: PartitionSpec | None = None,
                    nonnegative: bool = False) -> BoundaryFunction:
    """Values ``k / den`` with ``|k| <= 8`` and ``den`` in ``1..6`` drawn once
    per function; constant on the cells of ``measurability`` when given."""
    rng = make_rng(seed)
    den = int(rng.integers(1, MAX_DENOMINATOR + 1))
    lo = 0 if nonnegative else -MAX_NUMERATOR
    vals, cell_id = _cell_values(
        rng, space, measurability,
        lambda n: rng.integers(lo, MAX_NUMERATOR + 1, size=n, dtype=np.int64))
    if cell_id is not None:
        vals = vals[cell_id]
    return BoundaryFunction(vals, den)


def random_functions(space: AtomSpace, seed, count: int,
                     measurability: PartitionSpec | None = None,
                     nonnegative: bool = False) -> BoundaryFunction:
    """A batch of ``count`` independent functions, as columns."""
    rng = make_rng(seed)
    return BoundaryFunction.stack(
        [random_function(space, rng, measurability, nonnegative) for _ in range(count)])


def predictable_coefficients(space: AtomSpace, seed, bound=1, signs: bool = False) -> CoefficientFamily:
    """For each interior ``lam`` a ``Level(lam - lam1 - lam2)``-measurable
    function bounded by ``bound``: values on a grid of step ``bound/8``, or
    only ``+-bound`` when ``signs`` is set."""
    bound = Fraction(bound)
    if bound <= 0:
        raise ValueError("bound must be positive")
    rng = make_rng(seed)
    coeffs = {}
    for lam in space.interior():
        part = partition(space, Level(lam - LAM1 - LAM2))
        if signs:
            k = rng.choice(np.array([-MAX_NUMERATOR, MAX_NUMERATOR], dtype=np.int64), size=part.ncells)
        else:
            k = rng.integers(-MAX_NUMERATOR, MAX_NUMERATOR + 1, size=part.ncells, dtype=np.int64)
        coeffs[lam] = BoundaryFunction(k[part.cell_id], 1) * (bound / MAX_NUMERATOR)
    return CoefficientFamily(coeffs, bound)
