"""Move a square loop one cell to the right and price the move two ways.

The cheapest space-time evolution (least variation) costs exactly as much
as the cheapest surface filling the difference of the two loops.
"""

from bvcurrents.chains import mass
from bvcurrents.fixtures import translated_cycles
from bvcurrents.flatnorm import dist_lip, flat_norm_boundaryless, verify_equality
from bvcurrents.spacetime import slice_right, spatial_projection, variation

T0, T1 = translated_cycles()
print("start loop mass:", mass(T0))

fill = flat_norm_boundaryless(T1 - T0)
print("cheapest filling of T1 - T0:", fill.value, fill.witnesses["Q"])

best = dist_lip(T0, T1, 2, 1)
S = best.witnesses["S"]
print("cheapest evolution on 2 columns, budget 1 per column:", best.value)
for i in range(S.columns):
    print(f"  slice on half-column {i}:", slice_right(S, S.time(i)))
print("variation:", variation(S), " projection mass:", mass(spatial_projection(S)))

report = verify_equality(T0, T1)
print("certified equality:", report.to_dict())
