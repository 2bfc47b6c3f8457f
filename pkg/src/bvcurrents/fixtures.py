"""Small named constructions used by tests, demos and the ``check`` suite."""

from __future__ import annotations

from fractions import Fraction

from .chains import Chain, Grid, boundary, translate
from .spacetime import SpacetimeChain, lift_spatial
from .transform import SweepPlan, one_flip_schedule, sweep


def unit_square(grid: Grid, anchor=(0, 0)) -> Chain:
    return Chain.cell(grid, anchor, (0, 1))


def square_cycle(grid: Grid, anchor=(0, 0)) -> Chain:
    """Counter-clockwise boundary of one square."""
    return boundary(unit_square(grid, anchor))


def block_cycle(grid: Grid, side: int, anchor=(0, 0)) -> Chain:
    """Boundary of a ``side x side`` block of squares."""
    cells = [
        (((anchor[0] + i, anchor[1] + j), (0, 1)), 1) for i in range(side) for j in range(side)
    ]
    return boundary(Chain(grid, 2, cells))


def translated_cycles(extent: int = 3) -> tuple[Chain, Chain]:
    grid = Grid.make([extent, extent])
    c = square_cycle(grid)
    return c, translate(c, (1, 0))


def checkerboard(n: int) -> Chain:
    """``n*n`` squares of side ``1/n`` in a checkerboard on ``[0,2] x [0,1]``.

    Total area 1; no two squares share an edge, so the boundary consists of
    ``4 n**2`` edges of length ``1/n``.
    """
    grid = Grid.make([2 * n, n], Fraction(1, n))
    cells = [(((2 * j + (i % 2), i), (0, 1)), 1) for i in range(n) for j in range(n)]
    return Chain(grid, 2, cells)


def grow_and_vanish(n: int) -> tuple[Chain, SpacetimeChain]:
    """Grow the checkerboard's boundary square by square, then drop it at the end.

    Starts from the empty cycle, flips in one square per column (so the
    slice mass climbs to ``4n``), and ends with the spatial cell ``-R`` at
    the final time, which removes the whole boundary at once.  The result
    has zero boundary and variation ``2 mass(R)``.
    """
    R = checkerboard(n)
    zero = Chain(R.grid, 1)
    S = sweep(SweepPlan(zero, R, one_flip_schedule(R), len(R)))
    cap = lift_spatial(-R, S.grid, S.columns)
    return R, SpacetimeChain(S.chain + cap)
