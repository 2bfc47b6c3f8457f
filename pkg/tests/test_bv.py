import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from bvcurrents.bv import StepFunction, cantor_stage, graph_current, pointwise_variation
from bvcurrents.chains import Chain, ChainError, boundary
from bvcurrents.random_instances import random_interval_endpoints, random_step_function
from bvcurrents.spacetime import TimeInterval, discrete_lipschitz_constant, lift_spatial, variation

seeds = st.integers(0, 2**32 - 1)
WHOLE = TimeInterval.closed(0, 1)


def step(bps, vals):
    return StepFunction.make(bps, vals)


def test_single_jump():
    u = step([0, "1/2", 1], [0, 1])
    S = graph_current(u)
    spatial = [(c, v) for c, v in S.spatial_items()]
    assert len(spatial) == 1
    assert S.time(spatial[0][0].anchor[0]) == Fraction(1, 2)
    assert variation(S, WHOLE) == 1 == pointwise_variation(u, WHOLE)


def test_constant_function():
    u = step([0, 1], [3])
    assert variation(graph_current(u), WHOLE) == 0
    assert pointwise_variation(u) == 0


def test_monotone_staircase_and_zigzag():
    assert pointwise_variation(step([0, "1/4", "1/2", "3/4", 1], [0, "1/4", "1/2", 1])) == 1
    zigzag = step([0, "1/5", "2/5", "3/5", "4/5", 1], [0, 1, 0, 1, 0])
    assert pointwise_variation(zigzag) == 4
    assert variation(graph_current(zigzag)) == 4


def test_graph_boundary_is_endpoint_diracs():
    u = step([0, "1/3", "2/3", 1], [1, -1, 2])
    S = graph_current(u)
    space = S.spatial_grid
    lo = space.origin[0]
    h = space.spacing[0]

    def dirac(v):
        return Chain.cell(space, (int((v - lo) / h),), ())

    expected = lift_spatial(dirac(u(1)), S.grid, S.columns) - lift_spatial(dirac(u(0)), S.grid, 0)
    assert boundary(S.chain) == expected


def test_lipschitz_constant_is_largest_jump_over_time_step():
    u = step([0, "1/4", "1/2", 1], [0, 2, 1])
    S = graph_current(u)
    assert discrete_lipschitz_constant(S) == 2 / S.time_spacing


def test_cantor_stages():
    f0 = cantor_stage(0)
    assert f0.jumps() == [(Fraction(1, 3), Fraction(1))]
    for n in range(0, 6):
        f = cantor_stage(n)
        S = graph_current(f)
        assert variation(S, WHOLE) == 1
        assert all(b >= a for a, b in zip(f.values, f.values[1:]))
        if n >= 1:
            assert f(Fraction(1, 3)) == Fraction(1, 2)
            assert variation(S, TimeInterval.closed(0, Fraction(1, 3))) == Fraction(1, 2)
    with pytest.raises(ValueError):
        cantor_stage(-1)


def test_cantor_stage_two_by_hand():
    f = cantor_stage(2)
    assert f.breakpoints == tuple(Fraction(x, 27) for x in (0, 1, 7, 19, 25, 27))
    assert f.values == (0, Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), 1)


def test_invalid_step_functions():
    with pytest.raises(ChainError):
        step([0, "1/2"], [0])
    with pytest.raises(ChainError):
        step([0, "1/2", "1/2", 1], [0, 1, 2])
    with pytest.raises(ChainError):
        step([0, 1], [0, 1])
    with pytest.raises(ChainError):
        graph_current(step([0, "1/3", 1], [0, 1]), time_spacing=Fraction(1, 2))


def test_round_trip():
    u = cantor_stage(3)
    assert StepFunction.from_dict(u.to_dict()) == u


def test_random_identity_on_a_hundred_functions():
    rng = random.Random(10)
    for _ in range(100):
        u = random_step_function(rng)
        S = graph_current(u)
        for lo_closed in (True, False):
            for hi_closed in (True, False):
                a, b = random_interval_endpoints(rng, Fraction(0), Fraction(1))
                I = TimeInterval(a, b, lo_closed, hi_closed)
                assert variation(S, I) == pointwise_variation(u, I)


@given(seeds)
def test_variation_identity(seed):
    rng = random.Random(seed)
    u = random_step_function(rng)
    a, b = random_interval_endpoints(rng, Fraction(0), Fraction(1))
    I = TimeInterval(a, b, rng.random() < 0.5, rng.random() < 0.5)
    S = graph_current(u)
    assert variation(S, I) == pointwise_variation(u, I)
    # finer grids do not change the answer
    fine = graph_current(u, time_spacing=S.time_spacing / 3, value_spacing=S.spatial_grid.spacing[0] / 2)
    assert variation(fine, I) == pointwise_variation(u, I)
