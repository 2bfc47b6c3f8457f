"""Slices can get arbitrarily long while the variation stays at 2.

A checkerboard of n*n small squares is grown one square per column and then
dropped all at once.  Unit area throughout, ever longer boundary.
"""

from bvcurrents.chains import mass
from bvcurrents.fixtures import grow_and_vanish
from bvcurrents.spacetime import slice_right, variation

for n in range(1, 6):
    R, S = grow_and_vanish(n)
    peak = max(mass(slice_right(S, S.time(i))) for i in range(S.columns))
    print(f"n={n}  area {mass(R)}  Var {variation(S)}  longest slice {peak}")
