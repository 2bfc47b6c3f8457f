"""Collapse r x r square loops and watch the cost grow like mass squared."""

from bvcurrents.acceptance import loglog_slope
from bvcurrents.chains import Grid, mass
from bvcurrents.deform import isoperimetric_fill
from bvcurrents.fixtures import block_cycle

masses, costs = [], []
for r in range(1, 6):
    T = block_cycle(Grid.make([2 * r, 2 * r]), r)
    res = isoperimetric_fill(T)
    masses.append(mass(T))
    costs.append(res.variation)
    print(f"r={r}  mass {mass(T)}  collapse cost {res.variation}  coarsening {res.m}")

print(f"log-log slope: {loglog_slope(masses, costs):.6f}")
