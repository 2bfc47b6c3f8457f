import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from bvcurrents.chains import Chain, ChainError, Grid, OutOfBoundsError, boundary, mass, translate
from bvcurrents.fixtures import checkerboard, grow_and_vanish, square_cycle, unit_square
from bvcurrents.random_instances import generic_time, random_cycle, random_plan, random_spacetime_chain
from bvcurrents.spacetime import (
    SpacetimeChain,
    boundary_variation,
    end_trace,
    lift_spatial,
    slice_at,
    slice_left,
    slice_right,
    start_trace,
    stationary,
    variation,
)
from bvcurrents.transform import (
    PreconditionError,
    SweepPlan,
    batched_schedule,
    collapse_cone,
    concatenate,
    one_flip_schedule,
    prism,
    reparametrize,
    rescale_time,
    reverse,
    sweep,
)

seeds = st.integers(0, 2**32 - 1)
SPACE = Grid.make([3, 3])
CYCLE = square_cycle(SPACE)
SHIFT_FILL = unit_square(SPACE, (1, 0)) - unit_square(SPACE, (0, 0))


def ends(S: SpacetimeChain, T0: Chain, T1: Chain) -> Chain:
    return lift_spatial(T1, S.grid, S.columns) - lift_spatial(T0, S.grid, 0)


def fill_sweep(base, fill, columns=None):
    sched = one_flip_schedule(fill)
    return sweep(SweepPlan(base, fill, sched, columns or max(1, len(sched))))


def test_concat_of_prisms_is_a_longer_prism():
    S = concatenate(stationary(CYCLE), stationary(CYCLE))
    assert S == stationary(CYCLE, 2)
    assert variation(S) == 0


def test_concat_adds_variations_two_and_three():
    g = Grid.make([5, 1])
    cells = [unit_square(g, (i, 0)) for i in range(5)]
    zero = Chain(g, 1)
    A = fill_sweep(zero, cells[0] + cells[1])
    B = fill_sweep(end_trace(A), cells[2] + cells[3] + cells[4])
    assert (variation(A), variation(B)) == (2, 3)
    C = concatenate(A, B)
    assert variation(C) == 5
    assert boundary(C.chain) == ends(C, zero, end_trace(B))


def test_concat_rejects_mismatched_traces():
    with pytest.raises(PreconditionError, match="trace"):
        concatenate(stationary(CYCLE), stationary(translate(CYCLE, (1, 0))))


def test_reverse_examples():
    S = fill_sweep(CYCLE, SHIFT_FILL)
    R = reverse(S)
    assert reverse(R) == S
    assert variation(R) == variation(S)
    assert start_trace(R) == end_trace(S) and end_trace(R) == start_trace(S)
    assert boundary(R.chain) == ends(R, end_trace(S), start_trace(S))


def test_rescale_identity_and_invariance():
    S = fill_sweep(CYCLE, SHIFT_FILL)
    assert rescale_time(S, 1) == S
    R = rescale_time(S, 3)
    assert R.columns == 3 * S.columns
    assert variation(R) == variation(S)
    assert boundary_variation(R) == boundary_variation(S)
    t = S.time_spacing * Fraction(2, 7)
    assert slice_at(R, t) == slice_at(S, t)


def test_reparametrize_rejects_bad_knots():
    S = stationary(CYCLE, 2)
    with pytest.raises(ChainError):
        reparametrize(S, [0, 2, 2])
    with pytest.raises(ChainError):
        reparametrize(S, [1, 2, 3])


def test_prism_of_square_cycle_along_first_axis():
    W = prism(CYCLE, 0, 1)
    assert W == SHIFT_FILL
    assert boundary(W) == translate(CYCLE, (1, 0)) - CYCLE


def test_prism_of_zero_and_out_of_bounds():
    assert prism(Chain(SPACE, 1), 1, -1).is_zero()
    with pytest.raises(OutOfBoundsError):
        prism(CYCLE, 0, -1)


@pytest.mark.parametrize("axis,direction", [(0, 1), (1, 1), (0, -1), (1, -1)])
def test_prism_homotopy_formula_on_random_chains(axis, direction):
    rng = random.Random(axis * 10 + direction)
    big = Grid.make([6, 6])
    for _ in range(100):
        T = random_cycle(rng, Grid.make([4, 4]), rng.randint(0, 1))
        T = Chain(big, T.k, translate_items(T, (1, 1)))
        lhs = boundary(prism(T, axis, direction))
        if T.k >= 1:
            lhs = lhs + prism(boundary(T), axis, direction)
        v = [0, 0]
        v[axis] = direction
        assert lhs == translate(T, v) - T


def translate_items(T, v):
    return [((tuple(a + b for a, b in zip(c.anchor, v)), c.axes), x) for c, x in T.items()]


def test_homotopy_formula_with_boundary_in_three_dimensions():
    rng = random.Random(9)
    g = Grid.make([4, 4, 4])
    for _ in range(100):
        T = Chain(g, 2, translate_items(random_plan(rng, Grid.make([2, 2, 2])).fill, (1, 1, 1)))
        j = rng.randrange(3)
        v = [0, 0, 0]
        v[j] = rng.choice((1, -1))
        d = v[j]
        assert boundary(prism(T, j, d)) + prism(boundary(T), j, d) == translate(T, v) - T


def test_sweep_collapses_cycle():
    S = fill_sweep(CYCLE, -unit_square(SPACE))
    assert variation(S) == 1
    assert boundary(S.chain) == -lift_spatial(CYCLE, S.grid, 0)


def test_sweep_translates_cycle():
    S = fill_sweep(CYCLE, SHIFT_FILL, 2)
    assert variation(S) == 2
    assert slice_left(S, 1) == translate(CYCLE, (1, 0))


def test_sweep_with_empty_fill_is_a_prism():
    S = sweep(SweepPlan(CYCLE, Chain(SPACE, 2), (), 1))
    assert variation(S) == 0
    assert slice_at(S, Fraction(1, 3)) == CYCLE
    assert boundary(S.chain) == ends(S, CYCLE, CYCLE)


def test_sweep_plan_validation():
    bad = SweepPlan(CYCLE, SHIFT_FILL, ((0, unit_square(SPACE, (1, 0))),), 1)
    with pytest.raises(PreconditionError, match="sum"):
        sweep(bad)
    cancel = ((0, SHIFT_FILL + unit_square(SPACE, (2, 2))), (0, -unit_square(SPACE, (2, 2))))
    with pytest.raises(PreconditionError, match="cancel"):
        sweep(SweepPlan(CYCLE, SHIFT_FILL, cancel, 1))
    open_base = CYCLE + Chain.cell(SPACE, (2, 2), (0,))
    with pytest.raises(PreconditionError, match="zero boundary"):
        sweep(SweepPlan(open_base, SHIFT_FILL, (), 1))


def test_batched_schedule_respects_budget():
    fill = checkerboard(3)
    sched = batched_schedule(fill, Fraction(2, 9))
    assert len(sched) == 5
    S = sweep(SweepPlan(Chain(fill.grid, 1), fill, sched, len(sched)))
    assert variation(S) == mass(fill)
    with pytest.raises(PreconditionError):
        batched_schedule(fill, Fraction(1, 10))


def test_sweep_plan_round_trip():
    plan = random_plan(random.Random(2))
    assert SweepPlan.from_dict(plan.to_dict()) == plan


def test_collapse_cone():
    S = collapse_cone(CYCLE, -unit_square(SPACE))
    assert variation(S) == 1
    assert boundary(S.chain) == -lift_spatial(CYCLE, S.grid, 0)
    Z = collapse_cone(Chain(SPACE, 1), Chain(SPACE, 2))
    assert Z.chain.is_zero()
    with pytest.raises(PreconditionError):
        collapse_cone(CYCLE, unit_square(SPACE))


def test_growing_boundary_keeps_variation_fixed():
    for n in (1, 2, 3):
        R, S = grow_and_vanish(n)
        assert mass(R) == 1
        assert variation(S) == 2
        assert boundary(S.chain).is_zero()
        peak = max(mass(slice_right(S, S.time(i))) for i in range(S.columns))
        assert peak == 4 * n


@given(seeds)
def test_sweep_contract_on_random_plans(seed):
    plan = random_plan(random.Random(seed))
    S = sweep(plan)
    assert variation(S) == mass(plan.fill)
    assert slice_right(S, 0) == plan.base
    assert slice_left(S, 1) == plan.base + boundary(plan.fill)
    assert boundary(S.chain) == ends(S, plan.base, plan.base + boundary(plan.fill))


@given(seeds)
def test_transform_identities_on_random_sweeps(seed):
    rng = random.Random(seed)
    space = Grid.make([3, 3])
    A = sweep(random_plan(rng, space))
    B = sweep(random_plan(rng, space, base=end_trace(A)))
    C = concatenate(A, B)
    assert variation(C) == variation(A) + variation(B)
    assert start_trace(C) == start_trace(A) and end_trace(C) == end_trace(B)
    assert variation(reverse(A)) == variation(A)
    m = rng.randint(1, 3)
    R = rescale_time(A, m)
    assert variation(R) == variation(A)
    t = generic_time(rng, A)
    assert slice_at(R, t) == slice_at(A, t)


@given(seeds)
def test_reverse_is_an_involution(seed):
    S = random_spacetime_chain(random.Random(seed))
    assert reverse(reverse(S)) == S
    assert variation(reverse(S)) == variation(S)
