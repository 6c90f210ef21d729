from fractions import Fraction
from functools import lru_cache

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blp.exact import BoundaryFunction
from blp.filtration import Level, partition
from blp.linalg import LinearOperator
from blp.verify.generators import random_function, random_functions
from conftest import brute_cells, dense_projection, space_for

SP = space_for(2, 0, 0, 1, 1)
LEVELS = SP.grid()


def proj(lam):
    return LinearOperator.projection(partition(SP, Level(lam)))


class Q:
    """Dense exact matrix as integer numerators over one denominator."""

    def __init__(self, num, den=1):
        num = np.asarray(num, dtype=np.int64)
        g = int(np.gcd.reduce(np.append(num.ravel(), den)))
        self.num, self.den = num // g, int(den) // g

    @classmethod
    def of(cls, M):
        den = int(np.lcm.reduce([x.denominator for x in M.ravel()]))
        return cls(np.vectorize(lambda x: int(x * den))(M), den)

    def __add__(self, o):
        return Q(self.num * o.den + o.num * self.den, self.den * o.den)

    def __sub__(self, o):
        return self + o.scale(-1)

    def scale(self, c):
        c = Fraction(c)
        return Q(self.num * c.numerator, self.den * c.denominator)

    def __matmul__(self, o):
        return Q(self.num @ o.num, self.den * o.den)

    def fractions(self):
        return np.vectorize(lambda x: Fraction(int(x), self.den), otypes=[object])(self.num)

    def floats(self):
        return self.num / self.den


@lru_cache(maxsize=None)
def dense(lam):
    return Q.of(dense_projection(brute_cells(SP, lam.i, lam.j, lam.level)))


# random expression trees paired with their dense exact matrices
def _leaf():
    return st.sampled_from(LEVELS).map(lambda lam: (proj(lam), dense(lam)))


def _combine(children):
    coef = st.fractions(min_value=-3, max_value=3, max_denominator=4)
    return st.one_of(
        st.tuples(children, children).map(lambda t: (t[0][0] + t[1][0], t[0][1] + t[1][1])),
        st.tuples(children, children).map(lambda t: (t[0][0] - t[1][0], t[0][1] - t[1][1])),
        st.tuples(children, children).map(lambda t: (t[0][0] @ t[1][0], t[0][1] @ t[1][1])),
        st.tuples(coef, children).map(lambda t: (t[0] * t[1][0], t[1][1].scale(t[0]))),
    )


trees = st.recursive(_leaf(), _combine, max_leaves=5)


@settings(max_examples=30, deadline=None)
@given(trees, st.integers(0, 10**6))
def test_expression_trees_match_dense_matrices(pair, seed):
    T, Mq = pair
    M = Mq.fractions()
    f = random_function(SP, seed)
    assert T.apply(f).values.tolist() == M.dot(f.values).tolist()
    assert np.allclose(T.apply_float(f.to_float()), Mq.floats() @ f.to_float())
    assert np.allclose(T.to_dense_float(), Mq.floats())
    # adjoint is the transpose under the uniform atom measure
    assert np.allclose(T.adjoint().to_dense_float(), Mq.floats().T)


@settings(max_examples=20, deadline=None)
@given(trees, trees)
def test_equality_by_kernel_column_agrees_with_dense(a, b):
    (T1, M1), (T2, M2) = a, b
    diff = (M1 - M2).fractions()
    assert T1.equals(T2) == (not diff.any())
    assert T1.defect(T2) == max(abs(x) for x in diff.ravel())


def test_basis_fallback_for_multiplications():
    a = random_function(SP, 5)
    Ma = LinearOperator.multiplication(a)
    P = proj(LEVELS[1])
    assert not (Ma @ P).invariant
    assert (Ma @ P).equals(Ma @ P @ P)
    assert not (Ma @ P).equals(P @ Ma)
    with pytest.raises(ValueError):
        (Ma @ P).defect(P)


def test_algebra_shortcuts():
    n = SP.atom_count
    P = proj(LEVELS[0])
    I, Z = LinearOperator.identity(n), LinearOperator.zero(n)
    assert (I @ P) is P and (P @ I) is P
    assert (P @ Z).kind == "zero" and (0 * P).kind == "zero"
    assert (P @ P) is P  # idempotent projections collapse
    assert (P ** 0).kind == "identity" and (P ** 3).equals(P)
    assert P.is_self_adjoint()
    f = random_functions(SP, 1, 3)
    assert (P - P).apply(f).is_zero()
    with pytest.raises(ValueError):
        P ** -1
    with pytest.raises(TypeError):
        P * P
    with pytest.raises(ValueError):
        P.apply(BoundaryFunction.zeros(3))


def test_triplets_and_csv_match_dense():
    T = proj(LEVELS[1]) @ proj(LEVELS[2]) - Fraction(1, 2) * proj(LEVELS[3])
    M = (dense(LEVELS[1]) @ dense(LEVELS[2]) - dense(LEVELS[3]).scale(Fraction(1, 2))).fractions()
    trip = T.triplets(SP)
    want = {(a, b): M[a, b] for a in range(SP.atom_count) for b in range(SP.atom_count) if M[a, b]}
    assert {(a, b): v for a, b, v in trip} == want
    text = T.to_csv(SP).splitlines()
    assert text[0] == "row_atom,col_atom,value" and len(text) == len(want) + 1
    # the basis path gives the same entries
    a = random_function(SP, 2)
    Ma = LinearOperator.multiplication(a)
    got = {(r, c): v for r, c, v in (Ma @ T).triplets(SP)}
    MA = np.diag(a.values).dot(M)
    assert got == {(r, c): MA[r, c] for r in range(SP.atom_count)
                   for c in range(SP.atom_count) if MA[r, c]}


def test_scipy_adapter():
    T = proj(LEVELS[1]) @ proj(LEVELS[2])
    A = T.as_scipy()
    x = np.arange(SP.atom_count, dtype=float)
    assert np.allclose(A @ x, T.apply_float(x))
    assert np.allclose(A.rmatvec(x), T.adjoint().apply_float(x))
