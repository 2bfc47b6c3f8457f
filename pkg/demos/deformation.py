"""Push random loops drawn on a fine grid onto a grid three times coarser.

Prints one CSV row per loop.  The ratios stay bounded as the box grows.
"""

import random

from bvcurrents.chains import Grid
from bvcurrents.deform import batch_rows, deform_to_coarse
from bvcurrents.random_instances import random_rectangle_cycle

rng = random.Random(3)
results = []
for size in (6, 9, 12):
    for i in range(4):
        T = random_rectangle_cycle(rng, Grid.make([size, size]), modulus=3)
        if T.is_zero():
            continue
        results.append((f"n{size}-{i}", deform_to_coarse(T, 3)))

print("\n".join(batch_rows(results)))
