from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from blp.exact import BoundaryFunction

fracs = st.fractions(min_value=-50, max_value=50, max_denominator=30)
vecs = st.lists(fracs, min_size=1, max_size=8)


def _pairs():
    return st.integers(1, 8).flatmap(
        lambda n: st.tuples(st.lists(fracs, min_size=n, max_size=n),
                            st.lists(fracs, min_size=n, max_size=n)))


@given(_pairs())
def test_arithmetic_matches_fractions(ab):
    a, b = ab
    fa, fb = BoundaryFunction.from_values(a), BoundaryFunction.from_values(b)
    assert (fa + fb).values.tolist() == [x + y for x, y in zip(a, b)]
    assert (fa - fb).values.tolist() == [x - y for x, y in zip(a, b)]
    assert (fa * fb).values.tolist() == [x * y for x, y in zip(a, b)]
    assert abs(fa).values.tolist() == [abs(x) for x in a]
    assert fa.maximum(fb).values.tolist() == [max(x, y) for x, y in zip(a, b)]
    assert fa.max_abs() == max(abs(x) for x in a)
    assert fa.min_value() == min(a)
    assert fa.sum_atoms() == sum(a)


@given(vecs, fracs)
def test_scalars(a, c):
    f = BoundaryFunction.from_values(a)
    assert (f * c).values.tolist() == [x * c for x in a]
    assert (c * f).values.tolist() == [x * c for x in a]
    if c:
        assert (f / c).values.tolist() == [x / c for x in a]


@given(vecs)
def test_reduced_form(a):
    f = BoundaryFunction.from_values(a)
    g = int(np.gcd.reduce(np.append(np.abs(f.num.astype(object)), f.den).astype(np.int64)))
    assert g == 1 and f.den > 0


def test_big_values_fall_back_to_python_ints():
    f = BoundaryFunction(np.array([2**61, 1]), 1)
    g = f * f * f
    assert g[0] == Fraction(2**183)
    assert g.num.dtype == object
    assert (g - g).is_zero()


def test_batches_are_columns():
    a = BoundaryFunction.from_values([1, Fraction(1, 2)])
    b = BoundaryFunction.from_values([Fraction(1, 3), 0])
    s = BoundaryFunction.stack([a, b])
    assert s.shape == (2, 2) and s.batch_size == 2
    assert s.column(0) == a and s.column(1) == b
    assert s.sum_atoms() == [Fraction(3, 2), Fraction(1, 3)]


def test_constructors_and_errors():
    assert BoundaryFunction.zeros(3).is_zero()
    assert BoundaryFunction.constant(2, Fraction(2, 3)).values.tolist() == [Fraction(2, 3)] * 2
    assert BoundaryFunction.indicator(3, 1).values.tolist() == [0, 1, 0]
    with pytest.raises(ZeroDivisionError):
        BoundaryFunction(np.array([1]), 0)
    with pytest.raises(TypeError):
        BoundaryFunction(np.array([0.5]), 1)
