import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from bvcurrents.chains import Chain, ChainError, Grid, boundary, mass
from bvcurrents.fixtures import square_cycle, unit_square
from bvcurrents.flatnorm import flat_norm
from bvcurrents.random_instances import generic_time, random_plan, random_spacetime_chain
from bvcurrents.spacetime import (
    SliceError,
    SpacetimeChain,
    TimeInterval,
    boundary_variation,
    discrete_lipschitz_constant,
    end_trace,
    lift_spatial,
    mass_decomposition,
    slice_at,
    slice_by_cylinder,
    slice_left,
    slice_right,
    spacetime_grid,
    spatial_projection,
    start_trace,
    stationary,
    variation,
    weighted_variation,
)
from bvcurrents.transform import SweepPlan, one_flip_schedule, rescale_time, sweep

seeds = st.integers(0, 2**32 - 1)
SPACE = Grid.make([2, 2])
CYCLE = square_cycle(SPACE)


def spatial_cell_at_half(coeff=1):
    grid = spacetime_grid(SPACE, 2)
    return SpacetimeChain(lift_spatial(Chain.cell(SPACE, (0, 0), (0, 1), coeff), grid, 1))


def test_prism_has_no_variation():
    S = stationary(CYCLE)
    assert variation(S, TimeInterval.closed(0, 1)) == 0


def test_single_spatial_cell_variation():
    S = spatial_cell_at_half()
    assert variation(S, TimeInterval.closed(0, 1)) == 1
    assert variation(S, TimeInterval.closed(0, Fraction(1, 3))) == 0
    assert variation(S, TimeInterval.right_open(0, Fraction(1, 2))) == 0
    assert variation(S, TimeInterval.closed(Fraction(1, 2), 1)) == 1


def test_sweep_of_mass_five_fill():
    g = Grid.make([5, 1])
    fill = Chain(g, 2, [(((i, 0), (0, 1)), 1) for i in range(5)])
    S = sweep(SweepPlan(Chain(g, 1), fill, one_flip_schedule(fill), 5))
    # independent summation over the spatial cells
    assert sum(abs(c) * S.grid.volume(cell.axes) for cell, c in S.chain.items() if 0 not in cell.axes) == 5
    assert variation(S) == 5


def test_boundary_variation_of_prism():
    S = stationary(CYCLE)
    assert boundary_variation(S, TimeInterval.open(0, 1)) == 0
    assert boundary_variation(S, TimeInterval.closed(0, 1)) == 2 * mass(CYCLE)


def test_prism_slice_and_zero_slice():
    S = stationary(CYCLE, 3)
    assert slice_at(S, Fraction(1, 2)) == CYCLE
    Z = SpacetimeChain(Chain(S.grid, 2))
    assert slice_at(Z, Fraction(1, 2)).is_zero()


def test_slice_at_grid_time_is_rejected():
    S = stationary(CYCLE, 2)
    with pytest.raises(SliceError, match="slice_right"):
        slice_at(S, Fraction(1, 2))
    with pytest.raises(SliceError):
        slice_right(S, 1)
    with pytest.raises(SliceError):
        slice_left(S, 0)


def test_one_sided_slices_at_a_jump():
    plan = SweepPlan(CYCLE, -unit_square(SPACE), one_flip_schedule(-unit_square(SPACE)), 1)
    S = sweep(plan)
    t = Fraction(1, 2)
    assert slice_left(S, t) == CYCLE
    assert slice_right(S, t).is_zero()
    jump = Chain(S.grid, 2, [(c, v) for c, v in S.spatial_items()])
    assert slice_right(S, t) - slice_left(S, t) == boundary(spatial_projection(SpacetimeChain(jump)))
    # continuity point
    assert slice_left(S, Fraction(1, 4)) == slice_right(S, Fraction(1, 4))
    # the right slice at the start is the start trace
    assert slice_right(S, 0) == start_trace(S)


def test_projection_examples():
    S = spatial_cell_at_half(2)
    P = spatial_projection(S)
    assert P == Chain.cell(SPACE, (0, 0), (0, 1), 2)
    assert mass(P) == variation(S) == 2
    grid = spacetime_grid(SPACE, 4)
    sq = unit_square(SPACE)
    S2 = SpacetimeChain(lift_spatial(sq, grid, 1) - lift_spatial(sq, grid, 3))
    assert spatial_projection(S2).is_zero()
    assert variation(S2) == 2


def test_mass_decomposition_examples():
    assert mass_decomposition(stationary(CYCLE)) == (4, 0)
    assert mass_decomposition(spatial_cell_at_half()) == (0, 1)


def test_weighted_variation_examples():
    S = spatial_cell_at_half()
    ones = {((0, 1), 1): 1, ((0, 1), -1): 1}
    assert weighted_variation(S, ones) == variation(S)
    assert weighted_variation(S, {((0, 1), 1): 2, ((0, 1), -1): 1}) == 2
    with pytest.raises(ValueError):
        weighted_variation(S, {((0, 1), -1): 1})


def test_discrete_lipschitz_examples():
    assert discrete_lipschitz_constant(stationary(CYCLE)) == 0
    grid = spacetime_grid(SPACE, 4)
    S = SpacetimeChain(lift_spatial(unit_square(SPACE), grid, 2))
    assert discrete_lipschitz_constant(S) == 4


def test_lipschitz_constant_of_unit_flips_survives_rescaling():
    g = Grid.make([3, 1])
    fill = Chain(g, 2, [(((i, 0), (0, 1)), 1) for i in range(3)])
    S = sweep(SweepPlan(Chain(g, 1), fill, one_flip_schedule(fill), 3))
    L = discrete_lipschitz_constant(S)
    assert L == 1 / S.time_spacing
    # rescaling by 2 halves the columns; spreading flips back over them keeps the constant per unit time
    R = rescale_time(S, 2)
    assert discrete_lipschitz_constant(R) == 2 * L
    assert variation(R) == variation(S)


@given(seeds)
def test_mass_decomposition_sums_to_mass(seed):
    S = random_spacetime_chain(random.Random(seed))
    temporal, spatial = mass_decomposition(S)
    assert temporal + spatial == mass(S.chain)
    assert spatial == variation(S)
    h = S.time_spacing
    assert temporal == sum(h * mass(slice_at(S, S.time(i) + h / 2)) for i in range(S.columns))


@given(seeds)
def test_variation_additive_over_half_open_splits(seed):
    rng = random.Random(seed)
    S = random_spacetime_chain(rng)
    n = S.columns
    r, s, t = sorted(rng.randint(0, 2 * n) for _ in range(3))
    r, s, t = (S.t0 + S.time_spacing * Fraction(x, 2) for x in (r, s, t))
    whole = variation(S, TimeInterval.right_open(r, t))
    assert whole == variation(S, TimeInterval.right_open(r, s)) + variation(S, TimeInterval.right_open(s, t))
    assert variation(S, TimeInterval.closed(r, t)) <= mass(S.chain)


@given(seeds)
def test_slice_boundary_and_cylinder_formulas(seed):
    rng = random.Random(seed)
    S = random_spacetime_chain(rng)
    for _ in range(3):
        t = generic_time(rng, S)
        sl = slice_at(S, t)
        assert slice_by_cylinder(S, t) == sl
        if S.k >= 1:
            assert boundary(sl) == -slice_at(SpacetimeChain(boundary(S.chain)), t)


@given(seeds)
def test_projection_bound(seed):
    S = random_spacetime_chain(random.Random(seed))
    if S.k >= S.spatial_grid.dim:
        with pytest.raises(ChainError):
            spatial_projection(S)
        return
    assert mass(spatial_projection(S)) <= variation(S)


@given(seeds)
def test_projection_boundary_on_sweeps(seed):
    S = sweep(random_plan(random.Random(seed)))
    assert boundary(spatial_projection(S)) == slice_left(S, S.t1) - slice_right(S, S.t0)
    assert start_trace(S) == slice_right(S, S.t0)
    assert end_trace(S) == slice_left(S, S.t1)


@given(seeds)
def test_weighted_variation_is_coercive(seed):
    rng = random.Random(seed)
    S = random_spacetime_chain(rng)
    C = Fraction(rng.randint(1, 4))
    d = S.spatial_grid.dim
    import itertools

    R = {}
    for r in range(d + 1):
        for axes in itertools.combinations(range(d), r):
            for sign in (1, -1):
                R[(axes, sign)] = Fraction(rng.randint(1, 4 * int(C) ** 2), 4 * int(C)) if C > 1 else Fraction(1)
    R = {key: min(max(w, 1 / C), C) for key, w in R.items()}
    D = weighted_variation(S, R)
    assert variation(S) / C <= D <= C * variation(S)


@given(seeds)
def test_discrete_poincare(seed):
    rng = random.Random(seed)
    S = random_spacetime_chain(rng, max_dim=2)
    s, t = sorted([generic_time(rng, S), generic_time(rng, S)])
    if s == t:
        return
    I = TimeInterval.closed(s, t)
    lhs = flat_norm(slice_at(S, t) - slice_at(S, s)).value
    assert lhs <= variation(S, I) + boundary_variation(S, I)


@given(seeds)
def test_spacetime_round_trip(seed):
    S = random_spacetime_chain(random.Random(seed))
    assert SpacetimeChain.from_dict(S.to_dict()) == S
    assert S.to_dict()["time_axis"] == 0
