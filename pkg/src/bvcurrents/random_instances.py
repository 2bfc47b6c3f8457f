"""Seeded random instances.

All generators draw from a caller-supplied ``random.Random`` (Mersenne
Twister MT19937 as implemented by CPython), so a seed fixes every instance
on every platform.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .bv import StepFunction
from .chains import Cell, Chain, Grid, boundary
from .spacetime import SpacetimeChain, spacetime_grid
from .transform import SweepPlan

SPACINGS = (Fraction(1), Fraction(1, 2), Fraction(1, 3), Fraction(2), Fraction(3, 2))


def random_grid(rng: random.Random, dim: int, max_extent: int = 3, uniform: bool = False) -> Grid:
    extents = tuple(rng.randint(1, max_extent) for _ in range(dim))
    if uniform:
        return Grid((Fraction(1),) * dim, (Fraction(0),) * dim, extents)
    spacing = tuple(rng.choice(SPACINGS) for _ in range(dim))
    origin = tuple(Fraction(rng.randint(-2, 2), rng.randint(1, 3)) for _ in range(dim))
    return Grid(spacing, origin, extents)


def random_cell(rng: random.Random, grid: Grid, k: int) -> Cell:
    axes = tuple(sorted(rng.sample(range(grid.dim), k)))
    anchor = tuple(rng.randint(0, n - 1 if i in axes else n) for i, n in enumerate(grid.extents))
    return Cell(anchor, axes)


def random_chain(rng: random.Random, grid: Grid, k: int, max_cells: int = 6, max_coeff: int = 3) -> Chain:
    items = []
    for _ in range(rng.randint(0, max_cells)):
        c = rng.randint(1, max_coeff) * rng.choice((-1, 1))
        items.append((random_cell(rng, grid, k), c))
    return Chain(grid, k, items, check=False)


def random_cycle(rng: random.Random, grid: Grid, k: int, max_cells: int = 4) -> Chain:
    """Boundary of a random (k+1)-chain with unit coefficients."""
    filler = random_chain(rng, grid, k + 1, max_cells, 1)
    return boundary(filler)


def random_spacetime_chain(rng: random.Random, max_dim: int = 3) -> SpacetimeChain:
    d = rng.randint(1, max_dim)
    space = random_grid(rng, d, 3)
    cols = rng.randint(1, 4)
    t0 = Fraction(rng.randint(0, 2), 2)
    grid = spacetime_grid(space, cols, t0, t0 + Fraction(rng.randint(1, 4), rng.randint(1, 3)))
    k = rng.randint(1, d + 1)
    items = []
    for _ in range(rng.randint(1, 8)):
        items.append((random_cell(rng, grid, k), rng.randint(1, 3) * rng.choice((-1, 1))))
    return SpacetimeChain(Chain(grid, k, items, check=False))


def split_units(fill: Chain) -> list[Chain]:
    """The fill as a list of signed unit cells, in canonical order."""
    out = []
    for cell, c in fill.sorted_items():
        unit = Chain(fill.grid, fill.k, {cell: 1 if c > 0 else -1}, check=False)
        out.extend([unit] * abs(c))
    return out


def random_plan(rng: random.Random, space: Grid | None = None, k: int = 1, base: Chain | None = None) -> SweepPlan:
    """Random sweep: random cycle base, random fill, random column assignment of unit flips."""
    if space is None:
        space = random_grid(rng, 2, 4)
        space = Grid(space.spacing, space.origin, tuple(max(2, n) for n in space.extents))
    if base is None:
        base = random_cycle(rng, space, k, 3)
    fill = random_chain(rng, space, k + 1, 4, 2)
    units = split_units(fill)
    ncols = rng.randint(max(1, len(units) // 2), max(1, len(units)) + 2)
    schedule = [(rng.randrange(ncols), u) for u in units]
    return SweepPlan(base, fill, tuple(schedule), ncols)


def random_step_function(rng: random.Random) -> StepFunction:
    q = rng.randint(1, 12)
    inner = sorted(rng.sample(range(1, q), rng.randint(0, q - 1))) if q > 1 else []
    bps = [Fraction(0)] + [Fraction(i, q) for i in inner] + [Fraction(1)]
    p = rng.randint(1, 4)
    values = [Fraction(rng.randint(-6, 6), p) for _ in range(len(bps) - 1)]
    return StepFunction(tuple(bps), tuple(values))


def random_interval_endpoints(rng: random.Random, lo: Fraction, hi: Fraction, denominator: int = 24):
    """Two sorted rational times in ``[lo, hi]`` on a 1/``denominator`` lattice of the range."""
    span = hi - lo
    a, b = sorted(rng.randint(0, denominator) for _ in range(2))
    return lo + span * Fraction(a, denominator), lo + span * Fraction(b, denominator)


def generic_time(rng: random.Random, S: SpacetimeChain) -> Fraction:
    """A time strictly inside a random column, never a grid time."""
    col = rng.randrange(S.columns)
    num = rng.randint(1, 6)
    frac = Fraction(num, 7)
    return S.time(col) + S.time_spacing * frac


Rect = tuple[int, int, int, int, int]  # x, y, width, height, sign


def random_rectangles(rng: random.Random, window: int = 4, max_rects: int = 3) -> list[Rect]:
    """Signed axis rectangles inside a ``window x window`` block of cells."""
    rects = []
    for _ in range(rng.randint(1, max_rects)):
        w, h = rng.randint(1, window), rng.randint(1, window)
        rects.append((rng.randint(0, window - w), rng.randint(0, window - h), w, h, rng.choice((-1, 1))))
    return rects


def rectangles_cycle(grid: Grid, rects: list[Rect], offset: tuple[int, int]) -> Chain:
    """Boundary of the signed rectangles, translated by ``offset``."""
    cells: dict[Cell, int] = {}
    for x, y, w, h, sign in rects:
        for i in range(x, x + w):
            for j in range(y, y + h):
                c = Cell((offset[0] + i, offset[1] + j), (0, 1))
                cells[c] = cells.get(c, 0) + sign
    return boundary(Chain(grid, 2, cells))


def aligned_offset(rng: random.Random, extent: int, window: int, modulus: int, residue: int) -> int:
    """Random offset congruent to ``residue`` mod ``modulus`` keeping the block inside ``extent``."""
    room = extent - window - residue
    if room < 0:
        raise ValueError(f"a block of {window} cells at residue {residue} does not fit in {extent}")
    return residue + modulus * rng.randint(0, room // modulus)


def random_rectangle_cycle(
    rng: random.Random, grid: Grid, max_rects: int = 3, window: int = 4, modulus: int = 1
) -> Chain:
    """Random rectangles in a window placed with offset uniform modulo ``modulus``.

    The window shrinks to fit small grids; residues that would push it out
    of the box are not drawn.
    """
    window = min(window, *grid.extents)
    rects = random_rectangles(rng, window, max_rects)
    offset = tuple(
        aligned_offset(rng, n, window, modulus, rng.randrange(min(modulus, n - window + 1)))
        for n in grid.extents
    )
    return rectangles_cycle(grid, rects, offset)
