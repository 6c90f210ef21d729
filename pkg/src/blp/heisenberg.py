"""Truncated p-adic Heisenberg group and its partition into atoms.

Elements are triples ``(x, y, z)`` multiplied as upper unitriangular
matrices::

    (x, y, z) * (x', y', z') = (x + x', y + y', z + z' + x y')

The model lives inside the box subgroup ``H(i0, j0) = p^i0 O x p^j0 O x
p^(i0+j0) O``.  Atoms are left cosets of the base subgroup
``K = p^A O x p^B O x p^C O``; because ``i0 + B >= C`` every atom is simply a
residue triple ``(x mod p^A, y mod p^B, z mod p^C)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from .coweights import Coweight

_INT64_SAFE = 2**62

# Rough working-set cost per atom for the exact suites: 20 samples of
# arbitrary-precision values times the live temporaries of a d^4 evaluation.
BYTES_PER_ATOM = 10240
DEFAULT_MEMORY_BUDGET = 2 * 1024**3


class ConfigError(ValueError):
    """Raised for a model configuration that cannot be represented."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    k = 2
    while k * k <= n:
        if n % k == 0:
            return False
        k += 1
    return True


@dataclass(frozen=True)
class ModelConfig:
    p: int
    i0: int
    j0: int
    I: int
    J: int
    A: int | None = None
    B: int | None = None
    C: int | None = None

    def __post_init__(self):
        # Fill the default base exponents, then validate everything.
        C = self.I + self.J if self.C is None else self.C
        A = C - self.j0 if self.A is None else self.A
        B = C - self.i0 if self.B is None else self.B
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)
        self.validate()

    def validate(self) -> None:
        p, i0, j0, I, J, A, B, C = self.as_tuple()
        if not is_prime(p):
            raise ConfigError(f"p={p} is not prime")
        if i0 > I or j0 > J:
            raise ConfigError(f"empty grid: i0={i0} > I={I} or j0={j0} > J={J}")
        if A < I or B < J or C < I + J:
            raise ConfigError(
                f"base atoms must refine the finest grid level: need A>=I, B>=J, C>=I+J "
                f"(A={A}, B={B}, C={C})")
        if C > A + B:
            raise ConfigError(f"C={C} > A+B={A + B}: base cosets do not form a group")
        if A + j0 < C or B + i0 < C:
            raise ConfigError(
                f"closure violated: need A+j0>=C and B+i0>=C (A={A}, B={B}, C={C}, "
                f"i0={i0}, j0={j0}); some row/column expectation would leave the atom space")

    def as_tuple(self) -> tuple[int, ...]:
        return (self.p, self.i0, self.j0, self.I, self.J, self.A, self.B, self.C)

    def as_dict(self) -> dict:
        return dict(zip(("p", "i0", "j0", "I", "J", "A", "B", "C"), self.as_tuple()))

    @property
    def atom_count(self) -> int:
        return self.p ** ((self.A - self.i0) + (self.B - self.j0) + (self.C - self.i0 - self.j0))

    def estimated_bytes(self) -> int:
        return self.atom_count * BYTES_PER_ATOM

    def with_grid(self, I: int, J: int) -> "ModelConfig":
        """Same p and origin, a different grid, default exponents."""
        return ModelConfig(self.p, self.i0, self.j0, I, J)


@dataclass(frozen=True)
class GroupElement:
    x: int
    y: int
    z: int

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.x, self.y, self.z)


def _check_canonical(g: GroupElement, config: ModelConfig) -> None:
    p, i0, j0 = config.p, config.i0, config.j0
    ok = (
        g.x % p**i0 == 0 and 0 <= g.x < p**config.A
        and g.y % p**j0 == 0 and 0 <= g.y < p**config.B
        and g.z % p ** (i0 + j0) == 0 and 0 <= g.z < p**config.C
    )
    if not ok:
        raise ValueError(f"{g} is not a canonical representative under {config}")


def canonical(g: GroupElement, config: ModelConfig) -> GroupElement:
    p = config.p
    return GroupElement(g.x % p**config.A, g.y % p**config.B, g.z % p**config.C)


def group_mul(g: GroupElement, h: GroupElement, config: ModelConfig) -> GroupElement:
    """Product of canonical representatives, reduced to canonical residues."""
    _check_canonical(g, config)
    _check_canonical(h, config)
    return canonical(GroupElement(g.x + h.x, g.y + h.y, g.z + h.z + g.x * h.y), config)


def group_inv(g: GroupElement, config: ModelConfig) -> GroupElement:
    return canonical(GroupElement(-g.x, -g.y, -g.z + g.x * g.y), config)


def cell_measure(config: ModelConfig, lam: Coweight) -> Fraction:
    """Measure of one level-``lam`` cell, ``q^(-2 <lam, alpha0>)``."""
    return Fraction(1, config.p ** (2 * lam.level)) if lam.level >= 0 else Fraction(
        config.p ** (-2 * lam.level))


@dataclass(frozen=True, eq=False)
class AtomSpace:
    """The finite window: ``atom_count`` equal-measure atoms in lexicographic
    digit order ``(u, v, w)`` with ``x = p^i0 u``, ``y = p^j0 v``,
    ``z = p^(i0+j0) w``."""

    config: ModelConfig
    x: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)
    z: np.ndarray = field(repr=False)

    @property
    def p(self) -> int:
        return self.config.p

    @property
    def atom_count(self) -> int:
        return len(self.x)

    @property
    def pi_box(self) -> Fraction:
        return cell_measure(self.config, Coweight(self.config.i0, self.config.j0))

    @property
    def atom_measure(self) -> Fraction:
        return self.pi_box / self.atom_count

    @cached_property
    def digit_shape(self) -> tuple[int, int, int]:
        c = self.config
        return (c.p ** (c.A - c.i0), c.p ** (c.B - c.j0), c.p ** (c.C - c.i0 - c.j0))

    def atom_index(self, x, y, z) -> np.ndarray:
        """Atom index of arbitrary integer representatives (arrays or scalars)."""
        c = self.config
        p = c.p
        nu, nv, nw = self.digit_shape
        u = (np.asarray(x) % p**c.A) // p**c.i0
        v = (np.asarray(y) % p**c.B) // p**c.j0
        w = (np.asarray(z) % p**c.C) // p ** (c.i0 + c.j0)
        return (u * nv + v) * nw + w

    def element(self, index: int) -> GroupElement:
        return GroupElement(int(self.x[index]), int(self.y[index]), int(self.z[index]))

    def index_of(self, g: GroupElement) -> int:
        return int(self.atom_index(g.x, g.y, g.z))

    def box_key(self, ex: int, ey: int, ez: int) -> np.ndarray:
        """Identifier of the left coset ``g H(ex, ey, ez)`` for every atom.

        Requires ``ex + ey >= ez`` (subgroup) and the box to contain ``K``.
        The key is ``(x mod p^ex, y mod p^ey, (z + x b) mod p^ez)`` with
        ``b = (y mod p^ey) - y``, the unique normal form inside the coset.
        """
        p = self.p
        px, py, pz = p**ex, p**ey, p**ez
        x, y, z = self.x, self.y, self.z
        b = (y % py) - y
        kz = (z + x * b) % pz
        return ((x % px) * py + (y % py)) * pz + kz

    def left_translation(self, h: GroupElement) -> np.ndarray:
        """Permutation ``perm`` with ``perm[a] = index(h * g_a)``."""
        return self.atom_index(h.x + self.x, h.y + self.y, h.z + self.z + h.x * self.y)

    def right_translation(self, h: GroupElement) -> np.ndarray:
        """Permutation ``perm[a] = index(g_a * h)`` on representatives."""
        return self.atom_index(self.x + h.x, self.y + h.y, self.z + h.z + self.x * h.y)

    def inverse_products(self, b: int) -> np.ndarray:
        """``index(g_b^{-1} g_a)`` for every atom ``a``."""
        gb = self.element(b)
        inv = group_inv(gb, self.config)
        return self.left_translation(inv)

    # -- index sets -----------------------------------------------------

    def grid(self) -> list[Coweight]:
        c = self.config
        return [Coweight(i, j) for i in range(c.i0, c.I + 1) for j in range(c.j0, c.J + 1)]

    def interior(self) -> list[Coweight]:
        c = self.config
        return [Coweight(i, j) for i in range(c.i0 + 1, c.I + 1) for j in range(c.j0 + 1, c.J + 1)]

    def rows(self) -> range:
        return range(self.config.i0, self.config.A + 1)

    def cols(self) -> range:
        return range(self.config.j0, self.config.B + 1)

    def difference_grid(self) -> list[Coweight]:
        """Index set of ``D_lam = L_i R_j``: every row by every column."""
        return [Coweight(i, j) for i in self.rows() for j in self.cols()]

    def representable(self, lam: Coweight) -> bool:
        """Whether the level-``lam`` sigma-field is a union of atoms inside the box."""
        c = self.config
        return (c.i0 <= lam.i <= c.A and c.j0 <= lam.j <= c.B
                and lam.level <= c.C)

    def metadata(self) -> dict:
        d = self.config.as_dict()
        d["atom_count"] = self.atom_count
        pi = self.pi_box
        d["pi_box"] = f"{pi.numerator}/{pi.denominator}"
        return d

    def to_json(self) -> str:
        return json.dumps(self.metadata(), sort_keys=True)


def build_atom_space(config: ModelConfig) -> AtomSpace:
    config.validate()
    c = config
    p = c.p
    nu, nv, nw = (p ** (c.A - c.i0), p ** (c.B - c.j0), p ** (c.C - c.i0 - c.j0))
    dtype = np.int64 if p ** (c.A + c.B) < _INT64_SAFE and p ** (c.C + 1) < _INT64_SAFE else object
    u = np.arange(nu, dtype=np.int64).astype(dtype)
    v = np.arange(nv, dtype=np.int64).astype(dtype)
    w = np.arange(nw, dtype=np.int64).astype(dtype)
    U, V, W = np.meshgrid(u, v, w, indexing="ij")
    x = (U * p**c.i0).ravel()
    y = (V * p**c.j0).ravel()
    z = (W * p ** (c.i0 + c.j0)).ravel()
    for a in (x, y, z):
        a.setflags(write=False)
    return AtomSpace(config, x, y, z)
