from fractions import Fraction
from functools import lru_cache

import numpy as np
import pytest

from blp import ModelConfig, build_atom_space


@lru_cache(maxsize=None)
def space_for(p, i0, j0, I, J):
    return build_atom_space(ModelConfig(p, i0, j0, I, J))


@pytest.fixture(scope="session")
def sp2():
    """p=2, grid (0,0,1,1): 64 atoms."""
    return space_for(2, 0, 0, 1, 1)


@pytest.fixture(scope="session")
def sp3():
    """p=3, grid (0,0,1,1): 729 atoms."""
    return space_for(3, 0, 0, 1, 1)


@pytest.fixture(scope="session")
def sp2big():
    """p=2, grid (0,0,2,2): 4096 atoms."""
    return space_for(2, 0, 0, 2, 2)


@pytest.fixture(scope="session")
def sp2shift():
    """p=2 with a shifted origin, grid (1,0,2,1)."""
    return space_for(2, 1, 0, 2, 1)


def brute_cells(space, ex, ey, ez):
    """Cell labels of the left cosets of H(ex, ey, ez), from explicit group
    products: atoms a, b share a cell iff g_a^-1 g_b lies in H."""
    p = space.p
    n = space.atom_count
    xs, ys, zs = (space.x.tolist(), space.y.tolist(), space.z.tolist())
    label = [-1] * n
    nxt = 0
    for a in range(n):
        if label[a] >= 0:
            continue
        label[a] = nxt
        # inverse of (x, y, z) is (-x, -y, -z + x y)
        ix, iy, iz = -xs[a], -ys[a], -zs[a] + xs[a] * ys[a]
        for b in range(a + 1, n):
            if label[b] >= 0:
                continue
            hx, hy = ix + xs[b], iy + ys[b]
            hz = iz + zs[b] + ix * ys[b]
            if hx % p**ex == 0 and hy % p**ey == 0 and hz % p**ez == 0:
                label[b] = nxt
        nxt += 1
    return np.array(label)


def dense_projection(labels):
    """Exact averaging matrix (as Fractions) of a labelling."""
    n = len(labels)
    sizes = np.bincount(labels)
    M = np.empty((n, n), dtype=object)
    for a in range(n):
        for b in range(n):
            M[a, b] = Fraction(1, int(sizes[labels[a]])) if labels[a] == labels[b] else Fraction(0)
    return M


def float_projection(labels):
    same = (labels[:, None] == labels[None, :]).astype(float)
    return same / same.sum(axis=1, keepdims=True)


def same_partition(l1, l2):
    """Labellings describe the same partition."""
    pairs = set(zip(np.asarray(l1).tolist(), np.asarray(l2).tolist()))
    return len(pairs) == len(set(np.asarray(l1).tolist())) == len(set(np.asarray(l2).tolist()))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import ACCEPTANCE_LINES
    except ImportError:
        return
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
