"""Cantor staircases as space-time graphs: every stage has total variation 1."""

from fractions import Fraction

from bvcurrents.bv import cantor_stage, graph_current, pointwise_variation
from bvcurrents.spacetime import TimeInterval, discrete_lipschitz_constant, variation

first_third = TimeInterval.closed(0, Fraction(1, 3))
for n in range(6):
    u = cantor_stage(n)
    S = graph_current(u)
    print(
        f"stage {n}: {len(u.jumps())} jumps, Var {variation(S)}, "
        f"Var on [0,1/3] {variation(S, first_third)} (pointwise {pointwise_variation(u, first_third)}), "
        f"steepest column {discrete_lipschitz_constant(S)}"
    )
