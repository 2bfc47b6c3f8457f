import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from bvcurrents.acceptance import loglog_slope
from bvcurrents.chains import Chain, Grid, boundary, mass, refine, translate
from bvcurrents.deform import (
    BATCH_HEADER,
    FillError,
    batch_rows,
    coarse_grid,
    deform_to_coarse,
    embed,
    isoperimetric_fill,
)
from bvcurrents.fixtures import block_cycle, square_cycle
from bvcurrents.random_instances import random_rectangle_cycle
from bvcurrents.spacetime import end_trace, lift_spatial, start_trace, variation
from bvcurrents.transform import PreconditionError

seeds = st.integers(0, 2**32 - 1)


def test_coarse_aligned_cycle_is_untouched():
    g = Grid.make([4, 4])
    T = block_cycle(g, 2, (2, 0))
    r = deform_to_coarse(T, 2)
    assert r.W.is_zero() and variation(r.S) == 0
    assert r.P == square_cycle(coarse_grid(g, 2), (1, 0))


def test_unit_square_collapses_on_the_coarse_grid():
    g = Grid.make([4, 4])
    r = deform_to_coarse(square_cycle(g), 2)
    assert r.P.is_zero()
    assert mass(r.W) == 1 and variation(r.S) == 1
    assert r.rho == 2
    assert variation(r.S) <= r.rho * mass(r.T)


def test_deformation_preconditions():
    g = Grid.make([3, 3])
    with pytest.raises(PreconditionError, match="divisible"):
        deform_to_coarse(square_cycle(g), 2)
    with pytest.raises(PreconditionError, match="cycle"):
        deform_to_coarse(Chain.cell(g, (0, 0), (0,)), 3)
    with pytest.raises(PreconditionError):
        deform_to_coarse(square_cycle(g), 0)


def test_zero_cycle():
    g = Grid.make([2, 2])
    r = deform_to_coarse(Chain(g, 1), 2)
    assert r.P.is_zero() and r.W.is_zero()
    assert r.mass_ratio is None


@settings(max_examples=25)
@given(seeds, st.sampled_from([(2, 6), (3, 6), (2, 4), (3, 9)]))
def test_deformation_identities(seed, case):
    m, n = case
    rng = random.Random(seed)
    g = Grid.make([n, n])
    T = random_rectangle_cycle(rng, g, modulus=m)
    r = deform_to_coarse(T, m)
    assert boundary(r.P).is_zero()
    assert T + boundary(r.W) == embed(r.P, m)
    assert variation(r.S) == mass(r.W)
    assert boundary(r.S.chain) == lift_spatial(embed(r.P, m), r.S.grid, r.S.columns) - lift_spatial(T, r.S.grid, 0)
    r.verify()


def test_refined_and_shifted_cycle_moves_back_one_fine_step():
    T = block_cycle(Grid.make([4, 4]), 2, (1, 1))
    for f in (2, 3, 4):
        shifted = translate(refine(T, f), (1, 0))
        r = deform_to_coarse(shifted, f)
        assert r.rho == 1 and mass(shifted) == 8
        assert variation(r.S) == Fraction(4, f)
        assert r.variation_ratio <= Fraction(1, 4)


def test_batch_rows():
    g = Grid.make([4, 4])
    rows = batch_rows([("sq", deform_to_coarse(square_cycle(g), 2))])
    assert rows[0] == BATCH_HEADER
    assert rows[1] == "sq,4,2,0,1,1,0,1/8"


def test_fill_square_cycle():
    g = Grid.make([2, 2])
    r = isoperimetric_fill(square_cycle(g))
    assert r.variation == 1
    assert boundary(r.W) == -square_cycle(g)
    assert boundary(r.S.chain) == -lift_spatial(square_cycle(g), r.S.grid, 0)
    assert r.constant() == 1 / 16


def test_fill_zero_cycle():
    r = isoperimetric_fill(Chain(Grid.make([2, 2]), 1))
    assert r.W.is_zero() and r.S.chain.is_zero()


def test_fill_reports_failure_when_no_coarsening_collapses():
    g = Grid.make([5, 5])
    T = block_cycle(g, 5)
    with pytest.raises(FillError) as info:
        isoperimetric_fill(T)
    assert info.value.best is not None and not info.value.best.P.is_zero()


def test_isoperimetric_exponent():
    masses, fills = [], []
    for r in range(1, 6):
        g = Grid.make([2 * r, 2 * r])
        res = isoperimetric_fill(block_cycle(g, r))
        assert res.variation == r * r
        assert start_trace(res.S) == block_cycle(g, r)
        assert end_trace(res.S).is_zero()
        masses.append(4 * r)
        fills.append(res.variation)
    assert abs(loglog_slope(masses, fills) - 2) <= 0.05
