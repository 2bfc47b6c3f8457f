"""Deformation of fine cubical cycles onto a coarse grid, and minimal fillings.

A fine k-cycle ``T`` is pushed onto the coarse grid of spacing ``m`` times
the fine spacing by homological rounding: find a fine (k+1)-chain ``W`` and
a coarse k-chain ``P`` with ``T + boundary(W) = embed(P)``.  ``W`` is
minimized first (the sweep of ``W`` records the deformation, so its mass is
the variation spent), then ``P`` among the minimizers.  Both stages are
exact integer programs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .chains import Chain, Grid, boundary, cell_boundary, enumerate_cells, mass, refine
from .exact_lp import DEFAULT_NODE_LIMIT, EQ, LE, ModelBuilder, Status, solve_ilp
from .spacetime import SpacetimeChain, end_trace, lift_spatial, start_trace, variation
from .transform import PreconditionError, SweepPlan, collapse_cone, one_flip_schedule, sweep

__all__ = [
    "DeformationResult",
    "FillResult",
    "FillError",
    "coarse_grid",
    "embed",
    "deform_to_coarse",
    "isoperimetric_fill",
    "batch_rows",
    "BATCH_HEADER",
]


class FillError(RuntimeError):
    """No coarsening inside the box collapses the cycle to zero."""

    def __init__(self, message: str, best: "DeformationResult | None"):
        super().__init__(message)
        self.best = best


def coarse_grid(grid: Grid, m: int) -> Grid:
    if any(n % m for n in grid.extents):
        raise PreconditionError(f"grid extents {list(grid.extents)} are not divisible by {m}")
    return Grid(tuple(h * m for h in grid.spacing), grid.origin, tuple(n // m for n in grid.extents))


def embed(P: Chain, m: int) -> Chain:
    """A coarse chain written as the sum of its fine subcells."""
    return refine(P, m)


@dataclass(frozen=True)
class DeformationResult:
    T: Chain
    P: Chain
    W: Chain
    S: SpacetimeChain
    m: int
    rho: Fraction
    relaxation_values: tuple[Fraction, Fraction]

    @property
    def mass_ratio(self) -> Fraction | None:
        mt = mass(self.T)
        return mass(self.P) / mt if mt else None

    @property
    def variation_ratio(self) -> Fraction | None:
        mt = mass(self.T)
        return variation(self.S) / (self.rho * mt) if mt else None

    @property
    def empirical_constants(self) -> tuple[Fraction | None, Fraction | None]:
        return self.mass_ratio, self.variation_ratio

    def verify(self) -> None:
        """Re-check every structural identity of the deformation."""
        T, P, W, S = self.T, self.P, self.W, self.S
        if boundary(T).is_zero() and not boundary(P).is_zero():
            raise AssertionError("coarse chain has nonzero boundary")
        if T + boundary(W) != embed(P, self.m):
            raise AssertionError("T + boundary(W) differs from embed(P)")
        if variation(S) != mass(W):
            raise AssertionError("variation of the deformation record differs from mass(W)")
        expected = lift_spatial(embed(P, self.m), S.grid, S.columns) - lift_spatial(T, S.grid, 0)
        if boundary(S.chain) != expected:
            raise AssertionError("boundary of the deformation record is not embed(P) at 1 minus T at 0")


def _solve_rounding(T: Chain, m: int, node_limit: int):
    fine = T.grid
    coarse = coarse_grid(fine, m)
    k = T.k
    faces = enumerate_cells(fine, k)
    wcells = enumerate_cells(fine, k + 1)
    pcells = enumerate_cells(coarse, k)

    def build(stage_two_cap):
        b = ModelBuilder()
        wv = []
        for cell in wcells:
            cost = 0 if stage_two_cap is not None else fine.volume(cell.axes)
            wv.append((cell, b.add_var(cost, integral=True), b.add_var(cost, integral=True)))
        pv = []
        for cell in pcells:
            cost = coarse.volume(cell.axes) if stage_two_cap is not None else 0
            pv.append((cell, b.add_var(cost, integral=True), b.add_var(cost, integral=True)))
        rows: dict = {}
        for cell, p, q in wv:
            for face, sign in cell_boundary(cell):
                row = rows.setdefault(face, {})
                row[p] = row.get(p, 0) + sign
                row[q] = row.get(q, 0) - sign
        for cell, p, q in pv:
            for sub, _ in embed(Chain(coarse, k, {cell: 1}, check=False), m).items():
                row = rows.setdefault(sub, {})
                row[p] = row.get(p, 0) - 1
                row[q] = row.get(q, 0) + 1
        for face in faces:
            row = {j: a for j, a in rows.get(face, {}).items() if a}
            rhs = -T[face]
            if row or rhs:
                b.add_constraint(row, EQ, rhs)
        if stage_two_cap is not None:
            cap = {}
            for cell, p, q in wv:
                cap[p] = cap[q] = fine.volume(cell.axes)
            b.add_constraint(cap, LE, stage_two_cap)
        return b.build(), wv, pv

    model, wv, pv = build(None)
    first = solve_ilp(model, node_limit=node_limit)
    if first.status is not Status.OPTIMAL:
        raise PreconditionError(f"deformation program reported {first.status}")
    model2, wv, pv = build(first.value)
    second = solve_ilp(model2, node_limit=node_limit)
    if second.status is not Status.OPTIMAL:
        raise AssertionError("second deformation stage lost feasibility")
    x = second.assignment
    W = Chain(fine, k + 1, {c: int(x[p] - x[q]) for c, p, q in wv if x[p] != x[q]}, check=False)
    P = Chain(coarse, k, {c: int(x[p] - x[q]) for c, p, q in pv if x[p] != x[q]}, check=False)
    if mass(W) != first.value:
        raise AssertionError("second deformation stage changed the mass of W")
    return P, W, (first.relaxation_value, second.relaxation_value)


def deform_to_coarse(T: Chain, m: int, *, node_limit: int = DEFAULT_NODE_LIMIT) -> DeformationResult:
    """Deform a fine cycle onto the grid coarsened by ``m``."""
    if int(m) != m or m < 1:
        raise PreconditionError("coarsening factor must be a positive integer")
    m = int(m)
    if boundary(T):
        raise PreconditionError("deformation needs a cycle (zero boundary)")
    if T.k >= T.grid.dim:
        raise PreconditionError("deformation needs k smaller than the grid dimension")
    coarse = coarse_grid(T.grid, m)
    rho = max(coarse.spacing)
    if T.is_zero():
        P = Chain(coarse, T.k)
        W = Chain(T.grid, T.k + 1)
        S = sweep(SweepPlan(T, W, (), 1))
        res = DeformationResult(T, P, W, S, m, rho, (Fraction(0), Fraction(0)))
        res.verify()
        return res
    P, W, relax = _solve_rounding(T, m, node_limit)
    schedule = one_flip_schedule(W)
    S = sweep(SweepPlan(T, W, schedule, max(1, len(schedule))))
    res = DeformationResult(T, P, W, S, m, rho, relax)
    res.verify()
    return res


@dataclass(frozen=True)
class FillResult:
    S: SpacetimeChain
    W: Chain
    m: int

    @property
    def variation(self) -> Fraction:
        return variation(self.S)

    def constant(self) -> float | None:
        """``Var(S) / mass(T)**((k+1)/k)`` (approximate: the power may be irrational)."""
        T = start_trace(self.S)
        mt = mass(T)
        if not mt or T.k < 1:
            return None
        return float(self.variation) / float(mt) ** ((T.k + 1) / T.k)


def _common_divisors(extents) -> list[int]:
    g = 0
    for n in extents:
        g = math.gcd(g, n)
    return sorted((d for d in range(1, g + 1) if g % d == 0), reverse=True)


def isoperimetric_fill(T: Chain, *, node_limit: int = DEFAULT_NODE_LIMIT) -> FillResult:
    """Collapse a cycle through a filling found by the coarsest deformation that kills it.

    Coarsening factors are tried from the coarsest common divisor of the
    grid extents downwards; the first one whose coarse chain vanishes
    supplies the filling ``W`` (``boundary(W) = -T``).
    """
    if boundary(T):
        raise PreconditionError("isoperimetric filling needs a cycle (zero boundary)")
    if T.k < 1:
        raise PreconditionError("isoperimetric filling needs k >= 1")
    if T.is_zero():
        W = Chain(T.grid, T.k + 1)
        return FillResult(sweep(SweepPlan(T, W, (), 1)), W, 1)
    best = None
    for m in _common_divisors(T.grid.extents):
        res = deform_to_coarse(T, m, node_limit=node_limit)
        if res.P.is_zero():
            S = collapse_cone(T, res.W)
            if variation(S) != mass(res.W) or end_trace(S):
                raise AssertionError("collapse record does not end at zero with Var = mass(W)")
            return FillResult(S, res.W, m)
        if best is None or mass(res.P) < mass(best.P):
            best = res
    raise FillError("no coarsening of the box collapses the cycle; it needs more room", best)


BATCH_HEADER = "instance,mass_T,rho,mass_P,mass_W,var_S,ratio_P,ratio_S"


def batch_rows(results: list[tuple[str, DeformationResult]]) -> list[str]:
    """CSV rows for a batch of deformations (exact rationals)."""
    rows = [BATCH_HEADER]
    for name, r in results:
        rows.append(
            ",".join(
                str(v)
                for v in (
                    name,
                    mass(r.T),
                    r.rho,
                    mass(r.P),
                    mass(r.W),
                    variation(r.S),
                    r.mass_ratio,
                    r.variation_ratio,
                )
            )
        )
    return rows
