"""Constructions on space-time chains.

Sweeps use a fixed layout: ``N`` columns on ``[0, 1]`` are realized with
``2N`` half-columns of length ``1/(2N)``, and the flips of column ``i`` sit
at the column midpoint (half-column index ``2i + 1``).  No spatial cells are
placed at the end times, so the end traces of a sweep agree with its
one-sided slices there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .chains import Cell, Chain, ChainError, OutOfBoundsError, boundary, mass
from .spacetime import (
    SpacetimeChain,
    end_trace,
    lift_spatial,
    slice_left,
    slice_right,
    spacetime_grid,
    start_trace,
    variation,
)

__all__ = [
    "SweepPlan",
    "ContractError",
    "PreconditionError",
    "reparametrize",
    "rescale_time",
    "concatenate",
    "reverse",
    "prism",
    "sweep",
    "flip_sequence",
    "column_pieces",
    "check_sweep_contract",
    "one_flip_schedule",
    "batched_schedule",
    "collapse_cone",
]


class PreconditionError(ValueError):
    """An input violates the documented precondition of a construction."""


class ContractError(AssertionError):
    """A construction failed to meet its own postcondition."""


# ---------------------------------------------------------------------------
# reparametrization


def reparametrize(S: SpacetimeChain, knots: Sequence[int], t0=0, t1=None) -> SpacetimeChain:
    """Push ``S`` forward under a monotone piecewise-affine time map.

    Old grid time ``i`` goes to new grid time ``knots[i]``; old column ``i``
    is spread over new columns ``knots[i] .. knots[i+1] - 1``.  The new time
    range is ``[t0, t1]`` with ``knots[-1]`` columns (``t1`` defaults to
    keeping the old column length).
    """
    n = S.columns
    knots = [int(x) for x in knots]
    if len(knots) != n + 1 or knots[0] != 0 or any(b <= a for a, b in zip(knots, knots[1:])):
        raise ChainError("knots must start at 0 and increase strictly, one per grid time")
    total = knots[-1]
    t0 = Fraction(t0)
    t1 = t0 + S.time_spacing * total if t1 is None else Fraction(t1)
    grid = spacetime_grid(S.spatial_grid, total, t0, t1)
    out: dict[Cell, int] = {}
    for cell, c in S.chain.items():
        i = cell.anchor[0]
        if cell.axes[0] == 0:
            for j in range(knots[i], knots[i + 1]):
                out[Cell((j,) + cell.anchor[1:], cell.axes)] = c
        else:
            out[Cell((knots[i],) + cell.anchor[1:], cell.axes)] = c
    return SpacetimeChain(Chain(grid, S.chain.k, out, check=False))


def rescale_time(S: SpacetimeChain, stretch: int) -> SpacetimeChain:
    """Refine the time axis by ``stretch``; slices and variations are unchanged."""
    if int(stretch) != stretch or stretch < 1:
        raise ChainError("stretch must be a positive integer")
    m = int(stretch)
    return reparametrize(S, [i * m for i in range(S.columns + 1)], S.t0, S.t1)


def concatenate(S1: SpacetimeChain, S2: SpacetimeChain) -> SpacetimeChain:
    """Run ``S1`` on ``[0, 1/2]`` and then ``S2`` on ``[1/2, 1]``."""
    if S1.spatial_grid != S2.spatial_grid:
        raise PreconditionError("concatenation needs both factors on the same spatial grid")
    if S1.k != S2.k:
        raise PreconditionError("concatenation needs factors of the same dimension")
    e1, s2 = end_trace(S1), start_trace(S2)
    if e1 != s2:
        raise PreconditionError(f"end trace of the first factor differs from the start trace of the second: {e1 - s2!r}")
    n1, n2 = S1.columns, S2.columns
    L = n1 * n2 // math.gcd(n1, n2)
    a = reparametrize(S1, [i * (L // n1) for i in range(n1 + 1)])
    b = reparametrize(S2, [i * (L // n2) for i in range(n2 + 1)])
    grid = spacetime_grid(S1.spatial_grid, 2 * L, 0, 1)
    out: dict[Cell, int] = {}
    for cell, c in a.chain.items():
        out[cell] = out.get(cell, 0) + c
    for cell, c in b.chain.items():
        key = Cell((cell.anchor[0] + L,) + cell.anchor[1:], cell.axes)
        out[key] = out.get(key, 0) + c
    return SpacetimeChain(Chain(grid, S1.chain.k, out, check=False))


def reverse(S: SpacetimeChain) -> SpacetimeChain:
    """Run ``S`` backwards in time on the same range.

    This is minus the pushforward under the time reflection, so temporal
    cells keep their coefficient and spatial cells change sign.
    """
    n = S.columns
    out = {}
    for cell, c in S.chain.items():
        i = cell.anchor[0]
        if cell.axes[0] == 0:
            out[Cell((n - 1 - i,) + cell.anchor[1:], cell.axes)] = c
        else:
            out[Cell((n - i,) + cell.anchor[1:], cell.axes)] = -c
    return SpacetimeChain(Chain(S.grid, S.chain.k, out, check=False))


# ---------------------------------------------------------------------------
# prisms


def prism(T: Chain, axis: int, direction: int = 1) -> Chain:
    """Trace of ``T`` translated one grid step along ``direction * e_axis``.

    Satisfies ``d(prism(T)) + prism(dT) = translate(T) - T``.  Cells that
    already span ``axis`` sweep out nothing and are dropped.
    """
    if direction not in (1, -1):
        raise ChainError("direction must be +1 or -1")
    if not 0 <= axis < T.grid.dim:
        raise ChainError(f"axis {axis} outside 0..{T.grid.dim - 1}")
    if T.k == T.grid.dim:
        if T:
            raise OutOfBoundsError("top-dimensional cells have no room to sweep")
        return Chain(T.grid, T.k)
    out = {}
    for (anchor, axes), c in T.items():
        shifted = anchor[:axis] + (anchor[axis] + direction,) + anchor[axis + 1 :]
        if not T.grid.contains(Cell(shifted, axes)):
            raise OutOfBoundsError(f"cell {anchor}{list(axes)} leaves the box when translated")
        if axis in axes:
            continue
        new_axes = tuple(sorted(axes + (axis,)))
        p = new_axes.index(axis)
        sign = 1 if p % 2 == 0 else -1
        if direction == 1:
            out[Cell(anchor, new_axes)] = sign * c
        else:
            base = anchor[:axis] + (anchor[axis] - 1,) + anchor[axis + 1 :]
            out[Cell(base, new_axes)] = -sign * c
    return Chain(T.grid, T.k + 1, out, check=False)


# ---------------------------------------------------------------------------
# sweeps


@dataclass(frozen=True)
class SweepPlan:
    """Start from ``base`` and flip ``fill`` in, one scheduled piece per entry.

    ``schedule`` is a list of ``(column, piece)``; pieces must partition
    ``fill`` without cancellation (they sum to ``fill`` and their masses sum
    to its mass).
    """

    base: Chain
    fill: Chain
    schedule: tuple[tuple[int, Chain], ...]
    time_columns: int

    def validate(self) -> None:
        if self.base.grid != self.fill.grid:
            raise PreconditionError("base and fill must live on the same spatial grid")
        if self.fill.k != self.base.k + 1:
            raise PreconditionError("fill must have one dimension more than base")
        if boundary(self.base):
            raise PreconditionError("base must have zero boundary")
        if self.time_columns < 1:
            raise PreconditionError("a sweep needs at least one time column")
        total = Chain(self.fill.grid, self.fill.k)
        pieces_mass = Fraction(0)
        for col, piece in self.schedule:
            if not 0 <= col < self.time_columns:
                raise PreconditionError(f"scheduled column {col} outside 0..{self.time_columns - 1}")
            if piece.grid != self.fill.grid or piece.k != self.fill.k:
                raise PreconditionError("scheduled pieces must be chains like the fill")
            total = total + piece
            pieces_mass += mass(piece)
        if total != self.fill:
            raise PreconditionError(f"schedule does not sum to the fill; difference {self.fill - total!r}")
        if pieces_mass != mass(self.fill):
            raise PreconditionError(
                f"schedule pieces cancel: their masses add to {pieces_mass}, fill mass is {mass(self.fill)}"
            )

    def to_dict(self) -> dict:
        from .chains import chain_to_dict

        return {
            "base": chain_to_dict(self.base),
            "fill": chain_to_dict(self.fill),
            "schedule": [{"column": c, "piece": chain_to_dict(p)} for c, p in self.schedule],
            "time_columns": self.time_columns,
        }

    @classmethod
    def from_dict(cls, data) -> "SweepPlan":
        from .chains import chain_from_dict

        return cls(
            chain_from_dict(data["base"]),
            chain_from_dict(data["fill"]),
            tuple((int(e["column"]), chain_from_dict(e["piece"])) for e in data["schedule"]),
            int(data["time_columns"]),
        )


def one_flip_schedule(fill: Chain) -> tuple[tuple[int, Chain], ...]:
    """One fill cell (with its full multiplicity) per column, in canonical order."""
    return tuple(
        (i, Chain(fill.grid, fill.k, {cell: c}, check=False)) for i, (cell, c) in enumerate(fill.sorted_items())
    )


def batched_schedule(fill: Chain, budget: Fraction) -> tuple[tuple[int, Chain], ...]:
    """Greedy packing of unit cell flips into columns of variation at most ``budget``."""
    budget = Fraction(budget)
    cols: list[dict[Cell, int]] = []
    room = Fraction(-1)
    for cell, c in fill.sorted_items():
        vol = fill.grid.volume(cell.axes)
        if vol > budget:
            raise PreconditionError(f"budget {budget} is smaller than a cell volume {vol}")
        step = 1 if c > 0 else -1
        for _ in range(abs(c)):
            if room < vol:
                cols.append({})
                room = budget
            cols[-1][cell] = cols[-1].get(cell, 0) + step
            room -= vol
    return tuple((i, Chain(fill.grid, fill.k, d, check=False)) for i, d in enumerate(cols))


def flip_sequence(base: Chain, pieces: Sequence[Chain]) -> SpacetimeChain:
    """Space-time chain on ``len(pieces)`` columns flipping ``pieces[i]`` in column ``i``.

    The slice starts at ``base`` and changes by ``boundary(pieces[i])`` at the
    midpoint of column ``i``.  No non-cancellation requirement is imposed.
    """
    n = len(pieces)
    if n < 1:
        raise PreconditionError("a flip sequence needs at least one column")
    grid = spacetime_grid(base.grid, 2 * n, 0, 1)
    out = Chain(grid, base.k + 1)
    current = base
    for i, piece in enumerate(pieces):
        out = out + lift_spatial(current, grid, 2 * i, temporal=True)
        if piece:
            out = out + lift_spatial(piece, grid, 2 * i + 1)
            current = current + boundary(piece)
        out = out + lift_spatial(current, grid, 2 * i + 1, temporal=True)
    return SpacetimeChain(out)


def column_pieces(plan: SweepPlan) -> list[Chain]:
    per_col = [Chain(plan.fill.grid, plan.fill.k) for _ in range(plan.time_columns)]
    for col, piece in plan.schedule:
        per_col[col] = per_col[col] + piece
    return per_col


def sweep(plan: SweepPlan) -> SpacetimeChain:
    """Space-time chain that flips each scheduled piece in at its column."""
    plan.validate()
    S = flip_sequence(plan.base, column_pieces(plan))
    check_sweep_contract(plan, S)
    return S


def check_sweep_contract(plan: SweepPlan, S: SpacetimeChain) -> None:
    """Assert every documented property of a sweep, raising :class:`ContractError`."""
    n = plan.time_columns
    end = plan.base + boundary(plan.fill)
    if slice_right(S, 0) != plan.base:
        raise ContractError("initial slice differs from the base")
    if slice_left(S, 1) != end:
        raise ContractError("final slice differs from base + boundary(fill)")
    per_col = column_pieces(plan)
    h = S.time_spacing
    for i in range(n):
        before = slice_right(S, 2 * i * h)
        after = slice_right(S, (2 * i + 1) * h)
        if after - before != boundary(per_col[i]):
            raise ContractError(f"column {i}: slice change is not the boundary of the scheduled piece")
    if variation(S) != mass(plan.fill):
        raise ContractError(f"variation {variation(S)} differs from fill mass {mass(plan.fill)}")
    expected = lift_spatial(end, S.grid, 2 * n) - lift_spatial(plan.base, S.grid, 0)
    if boundary(S.chain) != expected:
        raise ContractError("boundary of the sweep is not the difference of its end caps")
    if start_trace(S) != plan.base or end_trace(S) != end:
        raise ContractError("boundary traces disagree with base and end slice")


def collapse_cone(T: Chain, fill: Chain) -> SpacetimeChain:
    """Sweep ``T`` to zero through ``fill`` (requires ``d fill = -T``)."""
    if boundary(T):
        raise PreconditionError("collapse_cone needs a cycle (zero boundary)")
    if boundary(fill) != -T:
        raise PreconditionError("collapse_cone needs boundary(fill) == -T")
    schedule = one_flip_schedule(fill)
    plan = SweepPlan(T, fill, schedule, max(1, len(schedule)))
    return sweep(plan)
