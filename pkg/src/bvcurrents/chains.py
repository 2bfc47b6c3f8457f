"""Integer-multiplicity cubical chains on a rational grid box.

A k-cell is stored as ``Cell(anchor, axes)``: the lattice coordinates of
its lowest corner and the strictly increasing tuple of axes it spans.  Its
orientation is the wedge of the spanned unit vectors in increasing order.
Chains are immutable mappings from cells to nonzero integers.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

__all__ = [
    "Grid",
    "Cell",
    "Chain",
    "ChainError",
    "OutOfBoundsError",
    "boundary",
    "cell_boundary",
    "mass",
    "product",
    "translate",
    "refine",
    "enumerate_cells",
    "chain_to_dict",
    "chain_from_dict",
    "dumps",
    "loads",
    "parse_rational",
]


class ChainError(ValueError):
    """Invalid grid, cell, or chain data."""


class OutOfBoundsError(ChainError):
    """A cell would leave the grid box."""


def parse_rational(x) -> Fraction:
    if isinstance(x, bool):
        raise ChainError(f"not a rational: {x!r}")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ChainError(f"not a rational: {x!r}") from exc
    raise ChainError(f"not an exact rational: {x!r}")


@dataclass(frozen=True)
class Grid:
    """Regular lattice over ``prod_i [origin_i, origin_i + extents_i * spacing_i]``."""

    spacing: tuple[Fraction, ...]
    origin: tuple[Fraction, ...]
    extents: tuple[int, ...]

    def __post_init__(self):
        d = len(self.extents)
        if d < 1:
            raise ChainError("grid dimension must be at least 1")
        if len(self.spacing) != d or len(self.origin) != d:
            raise ChainError("spacing, origin and extents must have the same length")
        if any(h <= 0 for h in self.spacing):
            raise ChainError("grid spacing must be positive")
        if any(int(n) != n or n < 1 for n in self.extents):
            raise ChainError("grid extents must be positive integers")

    @classmethod
    def make(cls, extents: Sequence[int], spacing=1, origin=0) -> "Grid":
        d = len(extents)
        sp = [spacing] * d if not isinstance(spacing, (list, tuple)) else spacing
        og = [origin] * d if not isinstance(origin, (list, tuple)) else origin
        return cls(
            tuple(parse_rational(h) for h in sp),
            tuple(parse_rational(o) for o in og),
            tuple(int(n) for n in extents),
        )

    @property
    def dim(self) -> int:
        return len(self.extents)

    def volume(self, axes: Iterable[int]) -> Fraction:
        v = Fraction(1)
        for a in axes:
            v *= self.spacing[a]
        return v

    def contains(self, cell: "Cell") -> bool:
        if len(cell.anchor) != self.dim:
            return False
        for i, (c, n) in enumerate(zip(cell.anchor, self.extents)):
            top = n - 1 if i in cell.axes else n
            if c < 0 or c > top:
                return False
        return True

    def coordinate(self, axis: int, index) -> Fraction:
        return self.origin[axis] + self.spacing[axis] * index

    def refined(self, factors: Sequence[int]) -> "Grid":
        return Grid(
            tuple(h / m for h, m in zip(self.spacing, factors)),
            self.origin,
            tuple(n * m for n, m in zip(self.extents, factors)),
        )

    def drop_axis(self, axis: int) -> "Grid":
        keep = [i for i in range(self.dim) if i != axis]
        return Grid(
            tuple(self.spacing[i] for i in keep),
            tuple(self.origin[i] for i in keep),
            tuple(self.extents[i] for i in keep),
        )

    def __mul__(self, other: "Grid") -> "Grid":
        return Grid(self.spacing + other.spacing, self.origin + other.origin, self.extents + other.extents)

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "spacing": [str(h) for h in self.spacing],
            "origin": [str(o) for o in self.origin],
            "extents": list(self.extents),
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "Grid":
        try:
            grid = cls(
                tuple(parse_rational(h) for h in data["spacing"]),
                tuple(parse_rational(o) for o in data["origin"]),
                tuple(int(n) for n in data["extents"]),
            )
        except (KeyError, TypeError) as exc:
            raise ChainError(f"malformed grid: {exc}") from exc
        if "dim" in data and int(data["dim"]) != grid.dim:
            raise ChainError("grid 'dim' disagrees with the length of 'extents'")
        return grid


class Cell(NamedTuple):
    anchor: tuple[int, ...]
    axes: tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.axes)


def _normalize_cell(anchor, axes) -> Cell:
    ax = tuple(int(a) for a in axes)
    if any(b <= a for a, b in zip(ax, ax[1:])):
        raise ChainError(f"cell axes must be strictly increasing, got {list(ax)}")
    return Cell(tuple(int(c) for c in anchor), ax)


class Chain:
    """Finitely supported map from k-cells of ``grid`` to nonzero integers."""

    __slots__ = ("grid", "k", "_coeffs", "_hash")

    def __init__(self, grid: Grid, k: int, coeffs: Mapping[Cell, int] | Iterable[tuple[Cell, int]] = (), *, check: bool = True):
        if k < 0 or k > grid.dim:
            raise ChainError(f"chain dimension {k} outside 0..{grid.dim}")
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        merged: dict[Cell, int] = {}
        for cell, c in items:
            if check:
                if int(c) != c:
                    raise ChainError(f"non-integer coefficient {c!r}")
                cell = _normalize_cell(cell[0], cell[1])
                if cell.k != k:
                    raise ChainError(f"cell {cell} has dimension {cell.k}, expected {k}")
                if not grid.contains(cell):
                    raise OutOfBoundsError(f"cell {cell} lies outside the grid box")
            merged[cell] = merged.get(cell, 0) + int(c)
        self.grid = grid
        self.k = k
        self._coeffs = {c: v for c, v in merged.items() if v}
        self._hash = None

    @classmethod
    def zero(cls, grid: Grid, k: int) -> "Chain":
        return cls(grid, k)

    @classmethod
    def cell(cls, grid: Grid, anchor: Sequence[int], axes: Sequence[int], coeff: int = 1) -> "Chain":
        axes = tuple(axes)
        return cls(grid, len(axes), [(Cell(tuple(anchor), axes), coeff)])

    def __iter__(self) -> Iterator[Cell]:
        return iter(self._coeffs)

    def __len__(self) -> int:
        return len(self._coeffs)

    def __bool__(self) -> bool:
        return bool(self._coeffs)

    def __getitem__(self, cell: Cell) -> int:
        return self._coeffs.get(cell, 0)

    def items(self):
        return self._coeffs.items()

    def sorted_items(self) -> list[tuple[Cell, int]]:
        return sorted(self._coeffs.items())

    def is_zero(self) -> bool:
        return not self._coeffs

    def _compatible(self, other: "Chain"):
        if not isinstance(other, Chain):
            raise TypeError("expected a Chain")
        if other.grid != self.grid:
            raise ChainError("chains live on different grids")
        if other.k != self.k:
            raise ChainError(f"cannot combine a {self.k}-chain with a {other.k}-chain")

    def __add__(self, other: "Chain") -> "Chain":
        self._compatible(other)
        out = dict(self._coeffs)
        for c, v in other._coeffs.items():
            out[c] = out.get(c, 0) + v
        return Chain(self.grid, self.k, out, check=False)

    def __neg__(self) -> "Chain":
        return Chain(self.grid, self.k, {c: -v for c, v in self._coeffs.items()}, check=False)

    def __sub__(self, other: "Chain") -> "Chain":
        return self + (-other)

    def __mul__(self, n: int) -> "Chain":
        if not isinstance(n, int):
            return NotImplemented
        return Chain(self.grid, self.k, {c: n * v for c, v in self._coeffs.items()}, check=False)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, Chain):
            return NotImplemented
        return self.grid == other.grid and self.k == other.k and self._coeffs == other._coeffs

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.grid, self.k, frozenset(self._coeffs.items())))
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join(f"{v:+d}*{c.anchor}{list(c.axes)}" for c, v in self.sorted_items()[:6])
        more = "" if len(self) <= 6 else f", ... ({len(self)} cells)"
        return f"Chain(k={self.k}, [{body}{more}])"

    def filter(self, pred) -> "Chain":
        return Chain(self.grid, self.k, {c: v for c, v in self._coeffs.items() if pred(c, v)}, check=False)


def cell_boundary(cell: Cell) -> list[tuple[Cell, int]]:
    """Faces of a cell with their incidence signs."""
    anchor, axes = cell
    out = []
    for i, a in enumerate(axes):
        sign = 1 if i % 2 == 0 else -1
        face_axes = axes[:i] + axes[i + 1 :]
        front = anchor[:a] + (anchor[a] + 1,) + anchor[a + 1 :]
        out.append((Cell(front, face_axes), sign))
        out.append((Cell(anchor, face_axes), -sign))
    return out


def boundary(T: Chain) -> Chain:
    """Cubical boundary; the boundary of a 0-chain is the zero chain."""
    if T.k == 0:
        return Chain(T.grid, 0)
    out: dict[Cell, int] = {}
    for cell, c in T.items():
        for face, sign in cell_boundary(cell):
            out[face] = out.get(face, 0) + sign * c
    return Chain(T.grid, T.k - 1, out, check=False)


def mass(T: Chain) -> Fraction:
    total = Fraction(0)
    vols: dict[tuple[int, ...], Fraction] = {}
    for cell, c in T.items():
        v = vols.get(cell.axes)
        if v is None:
            v = vols[cell.axes] = T.grid.volume(cell.axes)
        total += abs(c) * v
    return total


def product(T1: Chain, T2: Chain) -> Chain:
    """Cartesian product on the concatenated grid ``T1.grid * T2.grid``.

    Axes of the second factor are shifted past those of the first, so the
    wedge is already increasing and every product cell carries ``c1 * c2``.
    """
    d1 = T1.grid.dim
    out: dict[Cell, int] = {}
    for (a1, x1), c1 in T1.items():
        for (a2, x2), c2 in T2.items():
            out[Cell(a1 + a2, x1 + tuple(x + d1 for x in x2))] = c1 * c2
    return Chain(T1.grid * T2.grid, T1.k + T2.k, out, check=False)


def translate(T: Chain, v: Sequence[int]) -> Chain:
    v = tuple(int(x) for x in v)
    if len(v) != T.grid.dim:
        raise ChainError(f"translation vector has length {len(v)}, grid dimension is {T.grid.dim}")
    out = {}
    for (anchor, axes), c in T.items():
        cell = Cell(tuple(p + q for p, q in zip(anchor, v)), axes)
        if not T.grid.contains(cell):
            raise OutOfBoundsError(f"translate by {list(v)} moves cell {anchor}{list(axes)} out of the box")
        out[cell] = c
    return Chain(T.grid, T.k, out, check=False)


def refine(T: Chain, factor: int | Sequence[int]) -> Chain:
    """Subdivide every cell; ``factor`` is one integer or one per axis."""
    d = T.grid.dim
    factors = tuple([factor] * d if isinstance(factor, int) else factor)
    if len(factors) != d or any(int(m) != m or m < 1 for m in factors):
        raise ChainError("refinement factors must be positive integers, one per axis")
    grid = T.grid.refined(factors)
    out: dict[Cell, int] = {}
    for (anchor, axes), c in T.items():
        base = tuple(p * m for p, m in zip(anchor, factors))
        ranges = [range(factors[a]) for a in axes]
        for offs in itertools.product(*ranges):
            a = list(base)
            for ax, o in zip(axes, offs):
                a[ax] += o
            out[Cell(tuple(a), axes)] = c
    return Chain(grid, T.k, out, check=False)


def enumerate_cells(grid: Grid, k: int) -> list[Cell]:
    """All k-cells of the grid box in canonical (anchor, axes) order."""
    cells = []
    for axes in itertools.combinations(range(grid.dim), k):
        ranges = [range(n if i in axes else n + 1) for i, n in enumerate(grid.extents)]
        for anchor in itertools.product(*ranges):
            cells.append(Cell(anchor, axes))
    cells.sort()
    return cells


# ---------------------------------------------------------------------------
# file format


def chain_to_dict(T: Chain) -> dict:
    return {
        "grid": T.grid.to_dict(),
        "k": T.k,
        "cells": [{"anchor": list(c.anchor), "axes": list(c.axes), "coeff": v} for c, v in T.sorted_items()],
    }


def chain_from_dict(data: Mapping) -> Chain:
    try:
        grid = Grid.from_dict(data["grid"])
        k = int(data["k"])
        cells = data.get("cells", [])
        items = []
        for entry in cells:
            coeff = entry["coeff"]
            if isinstance(coeff, str):
                coeff = parse_rational(coeff)
            if isinstance(coeff, bool) or int(coeff) != coeff:
                raise ChainError(f"coefficient must be an integer, got {entry['coeff']!r}")
            items.append(((entry["anchor"], entry["axes"]), int(coeff)))
    except (KeyError, TypeError) as exc:
        raise ChainError(f"malformed chain file: missing or bad field {exc}") from exc
    return Chain(grid, k, items)


def dumps(T: Chain, **extra) -> str:
    data = dict(extra)
    data.update(chain_to_dict(T))
    return json.dumps(data, sort_keys=True)


def loads(text: str) -> Chain:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ChainError(f"chain file is not valid JSON: {exc}") from exc
    return chain_from_dict(data)
