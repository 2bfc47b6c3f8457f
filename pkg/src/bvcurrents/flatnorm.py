"""Exact flat norms and the deformation distance between cycles.

Every quantity is the optimum of an integer program over cell
multiplicities, solved exactly by :mod:`bvcurrents.exact_lp`.  Absolute
values are linearized by splitting each multiplicity into a positive and a
negative part.  Each result carries its witness chains, and the reported
value is re-derived from those witnesses before it is returned.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .chains import Cell, Chain, Grid, boundary, cell_boundary, chain_to_dict, enumerate_cells, mass
from .exact_lp import DEFAULT_NODE_LIMIT, EQ, LE, ModelBuilder, Status, solve_ilp
from .spacetime import SpacetimeChain, end_trace, spatial_projection, start_trace, variation
from .transform import PreconditionError, SweepPlan, batched_schedule, flip_sequence, sweep

__all__ = [
    "NormResult",
    "EqualityReport",
    "InequalityReport",
    "WitnessError",
    "EqualityFailure",
    "flat_norm",
    "flat_norm_boundaryless",
    "dist_lip",
    "verify_equality",
    "inequality_certificates",
    "default_columns_and_budget",
]


class WitnessError(AssertionError):
    """A witness failed independent re-verification."""


class EqualityFailure(AssertionError):
    """The two sides of the deformation-distance identity disagree."""

    def __init__(self, message: str, dump: dict):
        super().__init__(message + "\n" + json.dumps(dump, sort_keys=True, indent=1))
        self.dump = dump


@dataclass(frozen=True)
class NormResult:
    status: Status
    value: Fraction | None
    relaxation_value: Fraction | None
    witnesses: dict[str, Any] = field(default_factory=dict)
    nodes: int = 0

    @property
    def feasible(self) -> bool:
        return self.status is Status.OPTIMAL

    @property
    def integral(self) -> bool:
        """Whether the LP bound already matched the integer optimum."""
        return self.feasible and self.relaxation_value == self.value

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"status": str(self.status)}
        if self.value is not None:
            out["value"] = str(self.value)
        if self.relaxation_value is not None:
            out["relaxation"] = str(self.relaxation_value)
        out["integral"] = self.integral
        wit = {}
        for name, w in self.witnesses.items():
            wit[name] = w.to_dict() if isinstance(w, SpacetimeChain) else chain_to_dict(w)
        out["witness"] = wit
        return out


class _SignedVars:
    """Positive/negative variable pairs for the multiplicities of a cell list."""

    def __init__(self, builder: ModelBuilder, grid: Grid, cells: list[Cell], weight: Fraction = Fraction(1)):
        self.cells = cells
        self.plus = []
        self.minus = []
        for cell in cells:
            cost = weight * grid.volume(cell.axes)
            self.plus.append(builder.add_var(cost, integral=True))
            self.minus.append(builder.add_var(cost, integral=True))

    def chain(self, grid: Grid, k: int, x) -> Chain:
        out = {}
        for cell, p, m in zip(self.cells, self.plus, self.minus):
            v = x[p] - x[m]
            if v:
                out[cell] = int(v)
        return Chain(grid, k, out, check=False)

    def volume_row(self, grid: Grid) -> dict[int, Fraction]:
        row = {}
        for cell, p, m in zip(self.cells, self.plus, self.minus):
            vol = grid.volume(cell.axes)
            row[p] = vol
            row[m] = vol
        return row


def _boundary_rows(rows: dict[Cell, dict[int, Fraction]], svars: _SignedVars) -> None:
    """Add ``boundary(sum of svars cells)`` into per-face rows."""
    for cell, p, m in zip(svars.cells, svars.plus, svars.minus):
        for face, sign in cell_boundary(cell):
            row = rows.setdefault(face, {})
            row[p] = row.get(p, 0) + sign
            row[m] = row.get(m, 0) - sign


def _identity_rows(rows: dict[Cell, dict[int, Fraction]], svars: _SignedVars) -> None:
    for cell, p, m in zip(svars.cells, svars.plus, svars.minus):
        row = rows.setdefault(cell, {})
        row[p] = row.get(p, 0) + 1
        row[m] = row.get(m, 0) - 1


def _add_equalities(builder: ModelBuilder, faces: list[Cell], rows: dict, target: Chain) -> None:
    for face in faces:
        row = {j: a for j, a in rows.get(face, {}).items() if a}
        rhs = target[face]
        if not row and rhs == 0:
            continue
        builder.add_constraint(row, EQ, rhs)


def flat_norm(T: Chain, *, node_limit: int = DEFAULT_NODE_LIMIT) -> NormResult:
    """Minimize ``mass(Q) + mass(R)`` over integer chains with ``T = boundary(Q) + R``."""
    grid, k = T.grid, T.k
    if T.is_zero():
        return NormResult(Status.OPTIMAL, Fraction(0), Fraction(0), {"Q": Chain(grid, min(k + 1, grid.dim)), "R": T})
    b = ModelBuilder()
    faces = enumerate_cells(grid, k)
    qv = _SignedVars(b, grid, enumerate_cells(grid, k + 1)) if k < grid.dim else None
    rv = _SignedVars(b, grid, faces)
    rows: dict = {}
    if qv is not None:
        _boundary_rows(rows, qv)
    _identity_rows(rows, rv)
    _add_equalities(b, faces, rows, T)
    sol = solve_ilp(b.build(), node_limit=node_limit)
    if sol.status is not Status.OPTIMAL:
        raise WitnessError(f"flat norm program reported {sol.status}; it is always feasible")
    x = sol.assignment
    R = rv.chain(grid, k, x)
    Q = qv.chain(grid, k + 1, x) if qv is not None else None
    bq = boundary(Q) if Q is not None else Chain(grid, k)
    value = (mass(Q) if Q is not None else 0) + mass(R)
    if bq + R != T:
        raise WitnessError("flat norm witness does not decompose T")
    if value != sol.value or sol.relaxation_value > value:
        raise WitnessError(f"flat norm witness mass {value} disagrees with solver value {sol.value}")
    wit = {"R": R}
    if Q is not None:
        wit["Q"] = Q
    return NormResult(Status.OPTIMAL, value, sol.relaxation_value, wit, sol.nodes)


def flat_norm_boundaryless(T: Chain, *, node_limit: int = DEFAULT_NODE_LIMIT) -> NormResult:
    """Minimize ``mass(Q)`` over integer chains with ``boundary(Q) = T``."""
    grid, k = T.grid, T.k
    if boundary(T):
        raise PreconditionError("boundaryless flat norm needs a cycle (zero boundary)")
    if k >= grid.dim:
        if T:
            return NormResult(Status.INFEASIBLE, None, None)
        return NormResult(Status.OPTIMAL, Fraction(0), Fraction(0), {})
    if T.is_zero():
        return NormResult(Status.OPTIMAL, Fraction(0), Fraction(0), {"Q": Chain(grid, k + 1)})
    b = ModelBuilder()
    faces = enumerate_cells(grid, k)
    qv = _SignedVars(b, grid, enumerate_cells(grid, k + 1))
    rows: dict = {}
    _boundary_rows(rows, qv)
    _add_equalities(b, faces, rows, T)
    sol = solve_ilp(b.build(), node_limit=node_limit)
    if sol.status is Status.INFEASIBLE:
        return NormResult(Status.INFEASIBLE, None, sol.relaxation_value, nodes=sol.nodes)
    Q = qv.chain(grid, k + 1, sol.assignment)
    if boundary(Q) != T:
        raise WitnessError("filling witness has the wrong boundary")
    if mass(Q) != sol.value or sol.relaxation_value > sol.value:
        raise WitnessError(f"filling witness mass {mass(Q)} disagrees with solver value {sol.value}")
    return NormResult(Status.OPTIMAL, mass(Q), sol.relaxation_value, {"Q": Q}, sol.nodes)


def dist_lip(
    T0: Chain,
    T1: Chain,
    N: int,
    B: Fraction | None = None,
    *,
    node_limit: int = DEFAULT_NODE_LIMIT,
) -> NormResult:
    """Least variation of a space-time chain on ``N`` columns from ``T0`` to ``T1``.

    The evolving slice is determined by the jumps, so the program ranges
    over one spatial (k+1)-chain ``F_i`` per column (the jumps of column
    ``i``) subject to ``sum_i boundary(F_i) = T1 - T0`` and, when ``B`` is
    given, ``mass(F_i) <= B``.  The witness is the space-time chain that
    performs these jumps, rebuilt and checked independently.
    """
    if T0.grid != T1.grid or T0.k != T1.k:
        raise PreconditionError("T0 and T1 must be chains of equal dimension on the same grid")
    if boundary(T0) or boundary(T1):
        raise PreconditionError("dist_lip needs cycles (zero boundary) at both ends")
    if int(N) != N or N < 1:
        raise PreconditionError("the number of time columns must be a positive integer")
    grid, k = T0.grid, T0.k
    target = T1 - T0
    if B is not None:
        B = Fraction(B)
        if B < 0:
            raise PreconditionError("per-column budget must be nonnegative")
    if target.is_zero():
        S = flip_sequence(T0, [Chain(grid, k + 1)] * N) if k < grid.dim else None
        wit = {"S": S} if S is not None else {}
        return NormResult(Status.OPTIMAL, Fraction(0), Fraction(0), wit)
    if k >= grid.dim:
        return NormResult(Status.INFEASIBLE, None, None)

    b = ModelBuilder()
    faces = enumerate_cells(grid, k)
    top = enumerate_cells(grid, k + 1)
    columns = [_SignedVars(b, grid, top) for _ in range(N)]
    rows: dict = {}
    for col in columns:
        _boundary_rows(rows, col)
    _add_equalities(b, faces, rows, target)
    if B is not None:
        for col in columns:
            b.add_constraint(col.volume_row(grid), LE, B)
    sol = solve_ilp(b.build(), node_limit=node_limit)
    if sol.status is not Status.OPTIMAL:
        return NormResult(sol.status, None, sol.relaxation_value, nodes=sol.nodes)

    pieces = [col.chain(grid, k + 1, sol.assignment) for col in columns]
    S = flip_sequence(T0, pieces)
    _verify_dist_lip_witness(S, T0, T1, N, B, sol.value)
    if sol.relaxation_value > sol.value:
        raise WitnessError("LP relaxation exceeds the integer optimum")
    return NormResult(Status.OPTIMAL, sol.value, sol.relaxation_value, {"S": S}, sol.nodes)


def _verify_dist_lip_witness(S: SpacetimeChain, T0: Chain, T1: Chain, N: int, B, value: Fraction) -> None:
    from .spacetime import lift_spatial

    expected = lift_spatial(T1, S.grid, S.columns) - lift_spatial(T0, S.grid, 0)
    if boundary(S.chain) != expected:
        raise WitnessError("space-time witness has the wrong boundary")
    if variation(S) != value:
        raise WitnessError(f"space-time witness variation {variation(S)} differs from solver value {value}")
    if B is not None:
        per = [Fraction(0)] * N
        for cell, c in S.spatial_items():
            per[(cell.anchor[0] - 1) // 2] += abs(c) * S.grid.volume(cell.axes)
        if max(per) > B:
            raise WitnessError(f"space-time witness exceeds the per-column budget {B}")


def default_columns_and_budget(grid: Grid, k: int, v0: Fraction) -> tuple[int, Fraction]:
    """Columns and budget that make the one-cell-per-column sweep of a filling feasible."""
    vols = {grid.volume(c) for c in _axes_sets(grid.dim, k + 1)}
    vmin, vmax = min(vols), max(vols)
    return max(1, math.ceil(v0 / vmin)), vmax


def _axes_sets(d: int, k: int):
    import itertools

    return itertools.combinations(range(d), k)


@dataclass(frozen=True)
class EqualityReport:
    filling_value: Fraction
    distance_value: Fraction
    columns: int
    budget: Fraction
    projection_mass: Fraction
    sweep_variation: Fraction
    filling: NormResult
    distance: NormResult

    @property
    def equal(self) -> bool:
        return self.filling_value == self.distance_value

    def to_dict(self) -> dict:
        return {
            "equal": self.equal,
            "flatnorm0": str(self.filling_value),
            "distlip": str(self.distance_value),
            "value": str(self.distance_value),
            "columns": self.columns,
            "budget": str(self.budget),
            "projection_mass": str(self.projection_mass),
            "sweep_variation": str(self.sweep_variation),
            "relaxation": {
                "flatnorm0": str(self.filling.relaxation_value),
                "distlip": str(self.distance.relaxation_value),
            },
        }


def verify_equality(T0: Chain, T1: Chain, *, node_limit: int = DEFAULT_NODE_LIMIT) -> EqualityReport:
    """Compute both sides of ``dist_lip(T0, T1) = flat_norm_boundaryless(T1 - T0)``.

    Raises :class:`EqualityFailure` with a full dump when the values differ
    or either one-sided certificate fails.
    """
    if T0.grid != T1.grid or T0.k != T1.k:
        raise PreconditionError("T0 and T1 must be chains of equal dimension on the same grid")
    if boundary(T0) or boundary(T1):
        raise PreconditionError("verify_equality needs cycles (zero boundary) at both ends")
    diff = T1 - T0
    filling = flat_norm_boundaryless(diff, node_limit=node_limit)
    if not filling.feasible:
        raise PreconditionError("T1 - T0 is not a boundary inside the grid box")
    v0 = filling.value
    N, B = default_columns_and_budget(T0.grid, T0.k, v0)
    distance = dist_lip(T0, T1, N, B, node_limit=node_limit)

    def dump(reason):
        return {
            "reason": reason,
            "T0": chain_to_dict(T0),
            "T1": chain_to_dict(T1),
            "flatnorm0": str(v0),
            "distlip": None if distance.value is None else str(distance.value),
            "columns": N,
            "budget": str(B),
        }

    if not distance.feasible:
        raise EqualityFailure("deformation distance infeasible with the default columns and budget", dump("infeasible"))
    v1 = distance.value
    # lower certificate: Var(S) >= mass(projection) >= filling value
    S = distance.witnesses["S"]
    proj = spatial_projection(S)
    if boundary(proj) != diff:
        raise EqualityFailure("projection of the optimal evolution does not fill T1 - T0", dump("projection"))
    pm = mass(proj)
    if not (variation(S) >= pm >= v0):
        raise EqualityFailure("lower certificate fails: Var(S) >= mass(projection) >= F0", dump("lower"))
    # upper certificate: sweep of the optimal filling attains its mass within budget
    Q = filling.witnesses["Q"]
    plan = SweepPlan(T0, Q, batched_schedule(Q, B), N)
    if len(plan.schedule) > N:
        raise EqualityFailure("optimal filling does not fit the default columns", dump("upper"))
    W = sweep(plan)
    if variation(W) != mass(Q) or start_trace(W) != T0 or end_trace(W) != T1:
        raise EqualityFailure("upper certificate fails: sweep of the filling", dump("upper"))
    if v1 != v0:
        raise EqualityFailure(f"dist_lip = {v1} but F0 = {v0}", dump("values"))
    return EqualityReport(v0, v1, N, B, pm, variation(W), filling, distance)


@dataclass(frozen=True)
class InequalityReport:
    flat: Fraction
    flat0: Fraction | None
    ratio: Fraction | None
    ratio_approx: float | None

    @property
    def holds(self) -> bool:
        return self.flat0 is None or self.flat <= self.flat0

    def to_dict(self) -> dict:
        return {
            "holds": self.holds,
            "flatnorm": str(self.flat),
            "flatnorm0": None if self.flat0 is None else str(self.flat0),
            "ratio": None if self.ratio is None else str(self.ratio),
            "ratio_approx": self.ratio_approx,
        }


def inequality_certificates(T: Chain, *, node_limit: int = DEFAULT_NODE_LIMIT) -> InequalityReport:
    """Check ``flat_norm(T) <= flat_norm_boundaryless(T)`` and report an empirical constant.

    The constant is ``F0 / (F + F**((k+1)/k))``; it is exact when the power
    is rational-valued and is otherwise only reported approximately.
    """
    if boundary(T):
        raise PreconditionError("inequality certificates need a cycle (zero boundary)")
    f = flat_norm(T, node_limit=node_limit).value
    r0 = flat_norm_boundaryless(T, node_limit=node_limit)
    f0 = r0.value if r0.feasible else None
    ratio = approx = None
    if f0 is not None and f > 0 and T.k >= 1:
        k = T.k
        if k == 1:
            ratio = f0 / (f + f * f)
            approx = float(ratio)
        else:
            approx = float(f0) / (float(f) + float(f) ** ((k + 1) / k))
    report = InequalityReport(f, f0, ratio, approx)
    if not report.holds:
        raise WitnessError(f"flat norm {f} exceeds the boundaryless flat norm {f0}")
    return report
