"""Step functions on [0, 1] as space-time 1-chains.

The graph of a right-continuous step function ``u`` becomes a 1-chain in
(time, value) space: temporal edges along the plateaus and vertical edges
at the jumps, oriented by the jump direction.  The variation of that chain
over an interval equals the classical total variation of ``u`` there.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .chains import Cell, Chain, ChainError, Grid, parse_rational
from .spacetime import SpacetimeChain, TimeInterval, spacetime_grid

__all__ = ["StepFunction", "graph_current", "pointwise_variation", "cantor_stage"]


def _lcm_of_denominators(values) -> int:
    out = 1
    for v in values:
        out = out * v.denominator // math.gcd(out, v.denominator)
    return out


@dataclass(frozen=True)
class StepFunction:
    """``u = values[j]`` on ``[breakpoints[j], breakpoints[j+1])`` (last piece closed at 1).

    Breakpoints run from 0 to 1 inclusive, so there is one value fewer than
    breakpoints.
    """

    breakpoints: tuple[Fraction, ...]
    values: tuple[Fraction, ...]

    def __post_init__(self):
        bp = self.breakpoints
        if len(bp) < 2 or bp[0] != 0 or bp[-1] != 1:
            raise ChainError("breakpoints must start at 0 and end at 1")
        if any(b <= a for a, b in zip(bp, bp[1:])):
            raise ChainError("breakpoints must increase strictly")
        if len(self.values) != len(bp) - 1:
            raise ChainError("need exactly one value per interval between breakpoints")

    @classmethod
    def make(cls, breakpoints: Sequence, values: Sequence) -> "StepFunction":
        return cls(tuple(parse_rational(b) for b in breakpoints), tuple(parse_rational(v) for v in values))

    def __call__(self, t) -> Fraction:
        t = Fraction(t)
        if not 0 <= t <= 1:
            raise ValueError(f"{t} outside [0, 1]")
        j = 0
        while j + 1 < len(self.values) and self.breakpoints[j + 1] <= t:
            j += 1
        return self.values[j]

    def jumps(self) -> list[tuple[Fraction, Fraction]]:
        """(time, signed jump) at each interior breakpoint."""
        return [(self.breakpoints[j], self.values[j] - self.values[j - 1]) for j in range(1, len(self.values))]

    def to_dict(self) -> dict:
        return {"breakpoints": [str(b) for b in self.breakpoints], "values": [str(v) for v in self.values]}

    @classmethod
    def from_dict(cls, data) -> "StepFunction":
        try:
            return cls.make(data["breakpoints"], data["values"])
        except (KeyError, TypeError) as exc:
            raise ChainError(f"malformed step function: {exc}") from exc

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def pointwise_variation(u: StepFunction, I: TimeInterval | None = None) -> Fraction:
    """Total variation of ``u`` over ``I``: the sum of jump sizes at breakpoints in ``I``."""
    return sum((abs(j) for t, j in u.jumps() if I is None or I.contains(t)), Fraction(0))


def graph_current(u: StepFunction, time_spacing=None, value_spacing=None, value_range=None) -> SpacetimeChain:
    """Graph of ``u`` as a 1-chain on a (time, value) grid over ``[0, 1]``.

    Default spacings are the coarsest ones putting every breakpoint and
    value on a grid line; ``value_range`` defaults to the range of ``u``.
    """
    ht = Fraction(time_spacing) if time_spacing is not None else Fraction(1, _lcm_of_denominators(u.breakpoints))
    hx = Fraction(value_spacing) if value_spacing is not None else Fraction(1, _lcm_of_denominators(u.values))
    lo, hi = (min(u.values), max(u.values)) if value_range is None else map(Fraction, value_range)
    cols = Fraction(1) / ht
    if cols.denominator != 1:
        raise ChainError("time spacing must divide 1")
    extent = max(1, math.ceil((hi - lo) / hx))
    space = Grid((hx,), (lo,), (extent,))
    grid = spacetime_grid(space, int(cols), 0, 1)

    def index(v: Fraction, h: Fraction, origin: Fraction, what: str) -> int:
        q = (v - origin) / h
        if q.denominator != 1:
            raise ChainError(f"{what} {v} is not on a grid line")
        return int(q)

    out: dict[Cell, int] = {}
    for j, v in enumerate(u.values):
        x = index(v, hx, lo, "value")
        a = index(u.breakpoints[j], ht, Fraction(0), "breakpoint")
        b = index(u.breakpoints[j + 1], ht, Fraction(0), "breakpoint")
        for i in range(a, b):
            out[Cell((i, x), (0,))] = 1
    for j in range(1, len(u.values)):
        i = index(u.breakpoints[j], ht, Fraction(0), "breakpoint")
        x0, x1 = index(u.values[j - 1], hx, lo, "value"), index(u.values[j], hx, lo, "value")
        step = 1 if x1 > x0 else -1
        for x in range(min(x0, x1), max(x0, x1)):
            out[Cell((i, x), (1,))] = step
    return SpacetimeChain(Chain(grid, 1, out))


def cantor_stage(n: int) -> StepFunction:
    """Monotone staircase approximating the Cantor function at stage ``n``.

    The ``2**n`` stage-``n`` Cantor intervals each carry one jump of size
    ``2**-n``, placed one third into the interval; between jumps the
    function is constant with dyadic values.
    """
    if n < 0:
        raise ValueError("stage must be nonnegative")
    starts = [Fraction(0)]
    length = Fraction(1)
    for _ in range(n):
        length /= 3
        starts = [s for a in starts for s in (a, a + 2 * length)]
    third = length / 3
    bps = [Fraction(0)] + [s + third for s in starts] + [Fraction(1)]
    step = Fraction(1, 2**n)
    values = [j * step for j in range(len(starts) + 1)]
    return StepFunction(tuple(bps), tuple(values))
