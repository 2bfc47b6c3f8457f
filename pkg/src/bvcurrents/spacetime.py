"""Space-time chains: chains on a grid whose axis 0 is time.

Cells spanning axis 0 are *temporal* (an evolving k-chain carried forward
over one time column); all other cells are *spatial* and sit at a single
grid time (instantaneous jumps).  Variation only charges spatial cells.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping

from .chains import Cell, Chain, ChainError, Grid, boundary, chain_from_dict, chain_to_dict, refine

__all__ = [
    "SpacetimeChain",
    "TimeInterval",
    "SliceError",
    "spacetime_grid",
    "stationary",
    "variation",
    "boundary_variation",
    "slice_at",
    "slice_right",
    "slice_left",
    "slice_by_cylinder",
    "restrict_time",
    "spatial_projection",
    "mass_decomposition",
    "weighted_variation",
    "discrete_lipschitz_constant",
    "column_variations",
    "start_trace",
    "end_trace",
    "lift_spatial",
]


class SliceError(ValueError):
    """Slicing requested at a time where it is undefined or out of range."""


@dataclass(frozen=True)
class TimeInterval:
    lo: Fraction
    hi: Fraction
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"interval lower end {self.lo} exceeds upper end {self.hi}")

    @classmethod
    def closed(cls, lo, hi) -> "TimeInterval":
        return cls(Fraction(lo), Fraction(hi), True, True)

    @classmethod
    def open(cls, lo, hi) -> "TimeInterval":
        return cls(Fraction(lo), Fraction(hi), False, False)

    @classmethod
    def right_open(cls, lo, hi) -> "TimeInterval":
        return cls(Fraction(lo), Fraction(hi), True, False)

    @classmethod
    def parse(cls, text: str) -> "TimeInterval":
        """Parse ``"a,b"`` with an optional two-letter suffix such as ``oc``.

        The first letter governs the lower end, the second the upper end;
        ``c`` is closed and ``o`` open.  No suffix means closed.
        """
        text = text.strip()
        flags = "cc"
        if len(text) >= 2 and text[-2:] in ("cc", "co", "oc", "oo"):
            text, flags = text[:-2], text[-2:]
        parts = text.split(",")
        if len(parts) != 2:
            raise ValueError(f"interval must look like 'a,b' or 'a,boc', got {text!r}")
        return cls(Fraction(parts[0].strip()), Fraction(parts[1].strip()), flags[0] == "c", flags[1] == "c")

    def contains(self, t: Fraction) -> bool:
        if t < self.lo or t > self.hi:
            return False
        if t == self.lo and not self.lo_closed:
            return False
        if t == self.hi and not self.hi_closed:
            return False
        return True

    def __str__(self) -> str:
        return f"{'[' if self.lo_closed else '('}{self.lo},{self.hi}{']' if self.hi_closed else ')'}"


class SpacetimeChain:
    """A (1+k)-chain on a (1+d)-grid with axis 0 as time."""

    __slots__ = ("chain",)

    def __init__(self, chain: Chain):
        if not isinstance(chain, Chain):
            raise TypeError("SpacetimeChain wraps a Chain")
        if chain.grid.dim < 2:
            raise ChainError("a space-time grid needs a time axis and at least one spatial axis")
        if chain.k < 1:
            raise ChainError("a space-time chain has dimension at least 1")
        self.chain = chain

    @property
    def grid(self) -> Grid:
        return self.chain.grid

    @property
    def k(self) -> int:
        """Dimension of the evolving spatial current (chain dimension minus one)."""
        return self.chain.k - 1

    @property
    def time_spacing(self) -> Fraction:
        return self.grid.spacing[0]

    @property
    def columns(self) -> int:
        return self.grid.extents[0]

    @property
    def spatial_grid(self) -> Grid:
        return self.grid.drop_axis(0)

    @property
    def t0(self) -> Fraction:
        return self.grid.origin[0]

    @property
    def t1(self) -> Fraction:
        return self.grid.coordinate(0, self.columns)

    def time(self, index) -> Fraction:
        return self.grid.coordinate(0, index)

    def temporal_items(self):
        return [(c, v) for c, v in self.chain.items() if c.axes[0] == 0]

    def spatial_items(self):
        return [(c, v) for c, v in self.chain.items() if c.axes[0] != 0]

    def __eq__(self, other) -> bool:
        return isinstance(other, SpacetimeChain) and self.chain == other.chain

    def __hash__(self) -> int:
        return hash(self.chain)

    def __add__(self, other: "SpacetimeChain") -> "SpacetimeChain":
        return SpacetimeChain(self.chain + other.chain)

    def __sub__(self, other: "SpacetimeChain") -> "SpacetimeChain":
        return SpacetimeChain(self.chain - other.chain)

    def __neg__(self) -> "SpacetimeChain":
        return SpacetimeChain(-self.chain)

    def __repr__(self) -> str:
        return f"SpacetimeChain(columns={self.columns}, h_t={self.time_spacing}, {self.chain!r})"

    def to_dict(self) -> dict:
        data = {"time_axis": 0}
        data.update(chain_to_dict(self.chain))
        return data

    @classmethod
    def from_dict(cls, data: Mapping) -> "SpacetimeChain":
        if int(data.get("time_axis", 0)) != 0:
            raise ChainError("only time_axis 0 is supported")
        return cls(chain_from_dict(data))

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def spacetime_grid(spatial: Grid, columns: int, t0=0, t1=1) -> Grid:
    t0, t1 = Fraction(t0), Fraction(t1)
    if t1 <= t0:
        raise ChainError("time range must have positive length")
    return Grid(((t1 - t0) / columns,), (t0,), (columns,)) * spatial


def _to_space(cell: Cell) -> Cell:
    return Cell(cell.anchor[1:], tuple(a - 1 for a in cell.axes if a != 0))


def lift_spatial(T: Chain, grid: Grid, time_index: int, temporal: bool = False) -> Chain:
    """Embed a spatial chain into ``grid`` at a grid time, or over a column if ``temporal``."""
    if grid.drop_axis(0) != T.grid:
        raise ChainError("spatial chain lives on a different grid than the space-time grid")
    head = (0,) if temporal else ()
    items = [
        (Cell((time_index,) + c.anchor, head + tuple(a + 1 for a in c.axes)), v) for c, v in T.items()
    ]
    return Chain(grid, T.k + (1 if temporal else 0), items)


def stationary(T: Chain, columns: int = 1, t0=0, t1=1) -> SpacetimeChain:
    """The prism ``[t0, t1] x T``."""
    grid = spacetime_grid(T.grid, columns, t0, t1)
    out = Chain(grid, T.k + 1)
    for i in range(columns):
        out = out + lift_spatial(T, grid, i, temporal=True)
    return SpacetimeChain(out)


def _is_temporal(cell: Cell) -> bool:
    return bool(cell.axes) and cell.axes[0] == 0


def _spatial_mass(chain: Chain, I: TimeInterval | None) -> Fraction:
    grid = chain.grid
    total = Fraction(0)
    for cell, c in chain.items():
        if _is_temporal(cell):
            continue
        if I is None or I.contains(grid.coordinate(0, cell.anchor[0])):
            total += abs(c) * grid.volume(cell.axes)
    return total


def variation(S: SpacetimeChain, I: TimeInterval | None = None) -> Fraction:
    """Total volume of spatial cells whose time lies in ``I`` (all of them if ``I`` is None)."""
    return _spatial_mass(S.chain, I)


def boundary_variation(S: SpacetimeChain, I: TimeInterval | None = None) -> Fraction:
    return _spatial_mass(boundary(S.chain), I)


def _column_at(S: SpacetimeChain, t: Fraction) -> tuple[int, bool]:
    """Column containing ``t`` and whether ``t`` is itself a grid time."""
    q = (Fraction(t) - S.t0) / S.time_spacing
    return math.floor(q), q.denominator == 1


def _column_slice(S: SpacetimeChain, column: int) -> Chain:
    out = {}
    for cell, c in S.chain.items():
        if _is_temporal(cell) and cell.anchor[0] == column:
            out[_to_space(cell)] = c
    return Chain(S.spatial_grid, S.k, out, check=False)


def slice_at(S: SpacetimeChain, t) -> Chain:
    """Slice at a time strictly inside a column."""
    t = Fraction(t)
    if not S.t0 < t < S.t1:
        raise SliceError(f"time {t} outside the open time range ({S.t0},{S.t1})")
    col, on_grid = _column_at(S, t)
    if on_grid:
        raise SliceError(f"slice undefined at jump time {t}; use slice_right/slice_left")
    return _column_slice(S, col)


def slice_right(S: SpacetimeChain, t) -> Chain:
    t = Fraction(t)
    if not S.t0 <= t < S.t1:
        raise SliceError(f"right slice needs {S.t0} <= t < {S.t1}, got {t}")
    col, _ = _column_at(S, t)
    return _column_slice(S, col)


def slice_left(S: SpacetimeChain, t) -> Chain:
    t = Fraction(t)
    if not S.t0 < t <= S.t1:
        raise SliceError(f"left slice needs {S.t0} < t <= {S.t1}, got {t}")
    col, on_grid = _column_at(S, t)
    return _column_slice(S, col - 1 if on_grid else col)


def _restrict(chain: Chain, pred: Callable[[Fraction, bool], bool]) -> Chain:
    grid = chain.grid
    half = grid.spacing[0] / 2
    keep = {}
    for cell, c in chain.items():
        t = grid.coordinate(0, cell.anchor[0])
        temporal = _is_temporal(cell)
        if pred(t + half if temporal else t, temporal):
            keep[cell] = c
    return Chain(grid, chain.k, keep, check=False)


def restrict_time(S: SpacetimeChain, pred: Callable[[Fraction, bool], bool]) -> Chain:
    """``S`` restricted to cells selected by ``pred(time, temporal)``.

    Temporal cells are tested at their column midpoint, spatial ones at
    their grid time.  Returns the underlying chain (dimension preserved).
    """
    return _restrict(S.chain, pred)


def slice_by_cylinder(S: SpacetimeChain, t) -> Chain:
    """Slice via ``d(S restricted to {time < t}) - (dS) restricted to {time < t}``.

    The time axis is refined so that ``t`` becomes a grid time; the
    difference must then be concentrated on spatial cells at ``t``, and its
    spatial part is returned.  Independent of :func:`slice_at`.
    """
    t = Fraction(t)
    if not S.t0 < t < S.t1:
        raise SliceError(f"time {t} outside the open time range ({S.t0},{S.t1})")
    q = (t - S.t0) / S.time_spacing
    m = q.denominator
    factors = (m,) + (1,) * (S.grid.dim - 1)
    fine = refine(S.chain, factors)
    before = lambda s, _temporal: s < t  # noqa: E731
    diff = boundary(_restrict(fine, before)) - _restrict(boundary(fine), before)
    index = int(q * m)
    out = {}
    for cell, c in diff.items():
        if _is_temporal(cell) or cell.anchor[0] != index:
            raise AssertionError(f"cylinder difference has a cell off the slice time: {cell}")
        out[_to_space(cell)] = c
    return Chain(S.spatial_grid, S.k, out, check=False)


def spatial_projection(S: SpacetimeChain) -> Chain:
    """Push spatial cells to space, summing over time; temporal cells vanish."""
    if S.k >= S.spatial_grid.dim:
        raise ChainError(f"a {S.k + 1}-chain cannot live on the {S.spatial_grid.dim}-dimensional spatial grid")
    out: dict[Cell, int] = {}
    for cell, c in S.chain.items():
        if cell.axes[0] != 0:
            sc = _to_space(cell)
            out[sc] = out.get(sc, 0) + c
    return Chain(S.spatial_grid, S.k + 1, out, check=False)


def mass_decomposition(S: SpacetimeChain) -> tuple[Fraction, Fraction]:
    """(temporal mass, spatial mass); their sum is ``mass(S.chain)``."""
    temporal = Fraction(0)
    spatial = Fraction(0)
    grid = S.grid
    for cell, c in S.chain.items():
        v = abs(c) * grid.volume(cell.axes)
        if cell.axes[0] == 0:
            temporal += v
        else:
            spatial += v
    return temporal, spatial


def weighted_variation(S: SpacetimeChain, R: Mapping[tuple[tuple[int, ...], int], Fraction]) -> Fraction:
    """Variation with an orientation-dependent density.

    ``R`` maps ``(spatial axes, sign)`` to a nonnegative rational; the sign
    is that of the cell coefficient.  Spatial axes are numbered in the
    spatial grid (time axis removed).
    """
    total = Fraction(0)
    for cell, c in S.spatial_items():
        key = (tuple(a - 1 for a in cell.axes), 1 if c > 0 else -1)
        if key not in R:
            raise ValueError(f"density missing for orientation {key}")
        w = Fraction(R[key])
        if w < 0:
            raise ValueError(f"density must be nonnegative, got {w} at {key}")
        total += w * abs(c) * S.grid.volume(cell.axes)
    return total


def column_variations(S: SpacetimeChain) -> list[Fraction]:
    """Variation per column; spatial cells at the final time count in the last column."""
    n = S.columns
    out = [Fraction(0)] * n
    for cell, c in S.spatial_items():
        i = min(cell.anchor[0], n - 1)
        out[i] += abs(c) * S.grid.volume(cell.axes)
    return out


def discrete_lipschitz_constant(S: SpacetimeChain) -> Fraction:
    return max(column_variations(S)) / S.time_spacing


def _time_trace(S: SpacetimeChain, index: int) -> Chain:
    bd = boundary(S.chain)
    out = {}
    for cell, c in bd.items():
        if not _is_temporal(cell) and cell.anchor[0] == index:
            out[_to_space(cell)] = c
    return Chain(S.spatial_grid, S.k, out, check=False)


def start_trace(S: SpacetimeChain) -> Chain:
    """The k-chain ``T0`` with ``dS`` containing ``-{t0} x T0``."""
    return -_time_trace(S, 0)


def end_trace(S: SpacetimeChain) -> Chain:
    """The k-chain ``T1`` with ``dS`` containing ``+{t1} x T1``."""
    return _time_trace(S, S.columns)
