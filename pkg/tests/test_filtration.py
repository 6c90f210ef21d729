from fractions import Fraction

import numpy as np
import pytest

from blp.coweights import Coweight
from blp.exact import BoundaryFunction
from blp.filtration import (Col, E, Join, Level, PartitionError, Row, box_exponents,
                            cond_expect, partition)
from blp.verify.generators import random_functions
from conftest import brute_cells, dense_projection, same_partition


def _specs(space):
    c = space.config
    out = [Level(lam) for lam in space.grid()]
    out += [Row(i) for i in space.rows()] + [Col(j) for j in space.cols()]
    out += [Join((c.i0 + 1, c.j0), (c.i0, c.j0 + 1))]
    return out


@pytest.mark.parametrize("name", ["sp2", "sp2shift"])
def test_partitions_match_brute_force_cosets(name, request):
    sp = request.getfixturevalue(name)
    for spec in _specs(sp):
        part = partition(sp, spec)
        assert same_partition(part.cell_id, brute_cells(sp, *part.box)), spec
        assert np.all(np.bincount(part.cell_id) == part.size)


def test_box_exponents(sp2big):
    assert box_exponents(sp2big, Level((1, 2))) == (1, 2, 3)
    assert box_exponents(sp2big, Row(1)) == (1, 4, 4)
    assert box_exponents(sp2big, Col(2)) == (4, 2, 4)
    assert box_exponents(sp2big, Join((2, 1), (1, 2))) == (2, 2, 3)
    with pytest.raises(PartitionError):
        box_exponents(sp2big, Level((3, 2)))
    with pytest.raises(PartitionError):
        box_exponents(sp2big, Row(5))


def test_level_cell_counts(sp2big):
    # a level-lam cell has measure p^-2(i+j); the window has measure 1
    for lam in sp2big.grid():
        assert partition(sp2big, Level(lam)).ncells == 2 ** (2 * lam.level)


def test_nesting_and_row_col_fields(sp2big):
    g = sp2big.grid()
    for a in g:
        for b in g:
            if a.i <= b.i and a.j <= b.j:
                assert partition(sp2big, Level(b)).refines(partition(sp2big, Level(a)))
    # Row(i) is generated by all levels in row i, so it refines each of them
    for lam in g:
        assert partition(sp2big, Row(lam.i)).refines(partition(sp2big, Level(lam)))
        assert partition(sp2big, Col(lam.j)).refines(partition(sp2big, Level(lam)))


def test_join_is_common_refinement(sp2big):
    a, b = Coweight(1, 0), Coweight(0, 1)
    j = partition(sp2big, Join(a, b))
    pa, pb = partition(sp2big, Level(a)), partition(sp2big, Level(b))
    pairs = set(zip(pa.cell_id.tolist(), pb.cell_id.tolist()))
    assert j.ncells == len(pairs)
    assert j.refines(pa) and j.refines(pb)
    # strictly coarser than the level one step up: the failure of commuting
    assert j.ncells < partition(sp2big, Level((1, 1))).ncells


def test_average_matches_dense_oracle(sp2):
    fs = random_functions(sp2, 3, 4)
    for spec in _specs(sp2):
        part = partition(sp2, spec)
        M = dense_projection(brute_cells(sp2, *part.box))
        got = cond_expect(fs, part)
        want = M.dot(fs.values)
        assert (got.values == want).all(), spec
        assert np.allclose(part.average_float(fs.to_float()), want.astype(float))


def test_expectation_properties(sp3):
    fs = random_functions(sp3, 11, 5)
    for lam in sp3.grid():
        part = partition(sp3, Level(lam))
        g = part.average(fs)
        assert part.is_measurable(g)
        assert part.average(g) == g
        # conditional expectation preserves integrals
        assert g.sum_atoms() == fs.sum_atoms()
    assert not partition(sp3, Level((1, 1))).is_measurable(fs)


def test_partition_cache_and_aliases(sp2big):
    a = partition(sp2big, Level((0, 0)))
    assert partition(sp2big, Level((0, 0))) is a
    level = partition(sp2big, Level((0, 4)))
    row = partition(sp2big, Row(0))  # the same subgroup H(0, B, C)
    assert row.spec == Row(0) and level.spec == Level((0, 4))
    assert np.array_equal(row.cell_id, level.cell_id)


def test_operator_shorthand_and_csv(sp2):
    f = BoundaryFunction.indicator(sp2.atom_count, 0)
    assert E(sp2, (0, 0)).apply(f).values[5] == Fraction(1, 64)
    text = partition(sp2, Level((1, 1))).to_csv()
    lines = text.splitlines()
    assert lines[0] == "atom_index,cell_id" and len(lines) == 65


def test_space_mismatch(sp2, sp3):
    with pytest.raises(ValueError):
        cond_expect(BoundaryFunction.zeros(sp3.atom_count), partition(sp2, Level((0, 0))))
