import pytest
from hypothesis import given
from hypothesis import strategies as st

from blp.coweights import LAM1, LAM2, ZERO, Coweight, Root, box, dist, join, leq, meet, pairing

ints = st.integers(-20, 20)
cws = st.builds(Coweight, ints, ints)


@given(cws, cws, cws)
def test_lattice_group_laws(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert a + ZERO == a
    assert a - a == ZERO
    assert -(-a) == a


@given(cws, st.integers(-5, 5))
def test_scalar_multiple_is_coordinatewise(a, k):
    assert k * a == Coweight(k * a.i, k * a.j)


@given(cws)
def test_pairings(a):
    assert pairing(a, Root.ALPHA1) == a.i
    assert pairing(a, Root.ALPHA2) == a.j
    assert pairing(a, Root.ALPHA0) == a.level == a.i + a.j


@given(cws, cws, cws)
def test_dist_is_a_metric(a, b, c):
    assert dist(a, b) == dist(b, a) >= 0
    assert (dist(a, b) == 0) == (a == b)
    assert dist(a, c) <= dist(a, b) + dist(b, c)


@given(cws, cws)
def test_meet_join_bound_the_order(a, b):
    m, j = meet(a, b), join(a, b)
    assert leq(m, a) and leq(m, b) and leq(a, j) and leq(b, j)
    assert leq(a, b) == (join(a, b) == b)


def test_fundamental_coweights():
    assert LAM1 == Coweight(1, 0) and LAM2 == Coweight(0, 1)
    assert (LAM1 + LAM2).level == 2
    assert dist(LAM1, LAM2) == 1


@given(cws)
def test_text_round_trip(a):
    assert Coweight.parse(str(a)) == a


@pytest.mark.parametrize("bad", ["1", "1,2,3", "a,b"])
def test_parse_rejects(bad):
    with pytest.raises(ValueError):
        Coweight.parse(bad)


def test_box_is_row_major():
    assert box(0, 0, 1, 1) == [Coweight(0, 0), Coweight(0, 1), Coweight(1, 0), Coweight(1, 1)]
    assert box(2, 2, 1, 1) == []
