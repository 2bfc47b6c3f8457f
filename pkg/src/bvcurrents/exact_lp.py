"""Exact rational linear and integer programming.

The simplex method runs on a fraction-free integer tableau (Edmonds/Bareiss
integer pivoting): every constraint row is scaled to integers once, and the
tableau is kept as an integer matrix ``M`` together with a common positive
denominator ``D`` so that the true tableau is ``M / D``.  All divisions are
exact.  Entries live in ``int64`` numpy arrays while they are provably small
and are promoted to Python integers otherwise, so no floating point ever
enters the solver state.

Pivoting uses Bland's rule (lowest-index entering column, lowest-index
leaving basic variable on ratio ties), which terminates and makes runs
reproducible.  Integer programs are solved by depth-first branch and bound
over the exact LP relaxation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "EQ",
    "LE",
    "GE",
    "Status",
    "Constraint",
    "LpModel",
    "LpSolution",
    "ModelBuilder",
    "ModelError",
    "NodeLimitExceeded",
    "CertificateError",
    "solve_lp",
    "solve_ilp",
    "verify_solution",
]

EQ, LE, GE = "=", "<=", ">="
_RELATIONS = (EQ, LE, GE)

DEFAULT_NODE_LIMIT = 10**6

# |entries| below this bound keep p*a - b*c inside int64.
_INT64_SAFE = 2**30


class ModelError(ValueError):
    """The model is malformed (bad index, relation, or dimension)."""


class NodeLimitExceeded(RuntimeError):
    """Branch and bound explored more nodes than allowed."""

    def __init__(self, limit: int):
        super().__init__(f"branch-and-bound node limit {limit} exceeded")
        self.limit = limit


class CertificateError(AssertionError):
    """A returned solution failed exact re-verification."""


class Status(str, enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"

    def __str__(self) -> str:
        return self.value


def _q(x) -> Fraction:
    if isinstance(x, float):
        raise ModelError("floating point coefficients are not accepted; use Fraction or int")
    return Fraction(x)


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple[tuple[int, Fraction], ...]
    relation: str
    rhs: Fraction

    def lhs(self, x: Sequence[Fraction]) -> Fraction:
        return sum((a * x[j] for j, a in self.coeffs), Fraction(0))

    def holds(self, x: Sequence[Fraction]) -> bool:
        v = self.lhs(x)
        if self.relation == EQ:
            return v == self.rhs
        if self.relation == LE:
            return v <= self.rhs
        return v >= self.rhs


@dataclass(frozen=True)
class LpModel:
    """Minimize ``objective . x`` subject to the constraints.

    ``lower_bounds[j]`` is a rational lower bound or ``None`` for a free
    variable.  ``integrality[j]`` flags variables that must be integral in
    :func:`solve_ilp` (it is ignored by :func:`solve_lp`).
    """

    num_vars: int
    objective: tuple[Fraction, ...]
    constraints: tuple[Constraint, ...]
    integrality: tuple[bool, ...]
    lower_bounds: tuple[Fraction | None, ...]

    def __post_init__(self):
        n = self.num_vars
        if n < 0:
            raise ModelError("num_vars must be nonnegative")
        if len(self.objective) != n:
            raise ModelError(f"objective has {len(self.objective)} entries, expected {n}")
        if len(self.integrality) != n:
            raise ModelError(f"integrality has {len(self.integrality)} entries, expected {n}")
        if len(self.lower_bounds) != n:
            raise ModelError(f"lower_bounds has {len(self.lower_bounds)} entries, expected {n}")
        for i, con in enumerate(self.constraints):
            if con.relation not in _RELATIONS:
                raise ModelError(f"constraint {i}: unknown relation {con.relation!r}")
            for j, _ in con.coeffs:
                if not 0 <= j < n:
                    raise ModelError(f"constraint {i} references variable {j} outside 0..{n - 1}")

    @classmethod
    def create(
        cls,
        objective: Sequence,
        constraints: Iterable[tuple[Mapping[int, object] | Iterable[tuple[int, object]], str, object]],
        integrality: Sequence[bool] | None = None,
        lower_bounds: Sequence | None = None,
    ) -> "LpModel":
        """Convenience constructor; lower bounds default to 0."""
        n = len(objective)
        cons = tuple(_make_constraint(row, rel, rhs) for row, rel, rhs in constraints)
        ints = tuple(bool(b) for b in integrality) if integrality is not None else (False,) * n
        if lower_bounds is None:
            lbs = (Fraction(0),) * n
        else:
            lbs = tuple(None if lb is None else _q(lb) for lb in lower_bounds)
        return cls(n, tuple(_q(c) for c in objective), cons, ints, lbs)

    def with_bound(self, j: int, relation: str, value: Fraction) -> "LpModel":
        """Copy of the model with ``x_j >= value`` (tightened bound) or ``x_j <= value`` (extra row)."""
        if relation == GE:
            lbs = list(self.lower_bounds)
            cur = lbs[j]
            lbs[j] = value if cur is None else max(cur, value)
            return replace(self, lower_bounds=tuple(lbs))
        con = Constraint(((j, Fraction(1)),), LE, Fraction(value))
        return replace(self, constraints=self.constraints + (con,))

    def objective_value(self, x: Sequence[Fraction]) -> Fraction:
        return sum((c * xj for c, xj in zip(self.objective, x) if c), Fraction(0))

    def is_feasible(self, x: Sequence[Fraction]) -> bool:
        if len(x) != self.num_vars:
            return False
        for xj, lb in zip(x, self.lower_bounds):
            if lb is not None and xj < lb:
                return False
        return all(con.holds(x) for con in self.constraints)

    def dump(self) -> str:
        """Plain-text LP listing for offline inspection."""

        def term(a: Fraction, j: int, first: bool) -> str:
            sign = "-" if a < 0 else ("" if first else "+")
            mag = abs(a)
            coef = "" if mag == 1 else f"{mag} "
            return f"{sign} {coef}x{j}".strip() if first else f"{sign} {coef}x{j}"

        lines = ["Minimize"]
        obj = [(j, c) for j, c in enumerate(self.objective) if c]
        lines.append(" obj: " + (" ".join(term(c, j, k == 0) for k, (j, c) in enumerate(obj)) or "0"))
        lines.append("Subject To")
        for i, con in enumerate(self.constraints):
            lhs = " ".join(term(a, j, k == 0) for k, (j, a) in enumerate(con.coeffs)) or "0"
            lines.append(f" c{i}: {lhs} {con.relation} {con.rhs}")
        lines.append("Bounds")
        for j, lb in enumerate(self.lower_bounds):
            lines.append(f" x{j} free" if lb is None else f" x{j} >= {lb}")
        ints = [f"x{j}" for j, flag in enumerate(self.integrality) if flag]
        if ints:
            lines.append("General")
            lines.append(" " + " ".join(ints))
        lines.append("End")
        return "\n".join(lines) + "\n"


def _make_constraint(row, relation: str, rhs) -> Constraint:
    items = row.items() if isinstance(row, Mapping) else row
    merged: dict[int, Fraction] = {}
    for j, a in items:
        a = _q(a)
        if a:
            merged[int(j)] = merged.get(int(j), Fraction(0)) + a
    coeffs = tuple(sorted((j, a) for j, a in merged.items() if a))
    return Constraint(coeffs, relation, _q(rhs))


class ModelBuilder:
    """Incremental construction of an :class:`LpModel`."""

    def __init__(self):
        self._obj: list[Fraction] = []
        self._int: list[bool] = []
        self._lb: list[Fraction | None] = []
        self._cons: list[Constraint] = []

    @property
    def num_vars(self) -> int:
        return len(self._obj)

    def add_var(self, cost=0, *, integral: bool = False, lower=0) -> int:
        self._obj.append(_q(cost))
        self._int.append(bool(integral))
        self._lb.append(None if lower is None else _q(lower))
        return len(self._obj) - 1

    def add_constraint(self, row, relation: str, rhs) -> int:
        if relation not in _RELATIONS:
            raise ModelError(f"unknown relation {relation!r}")
        self._cons.append(_make_constraint(row, relation, rhs))
        return len(self._cons) - 1

    def build(self) -> LpModel:
        return LpModel(
            len(self._obj), tuple(self._obj), tuple(self._cons), tuple(self._int), tuple(self._lb)
        )


@dataclass(frozen=True)
class LpSolution:
    """Result of :func:`solve_lp` / :func:`solve_ilp`.

    Certificates, all in terms of the model's own rows and variables:

    * ``duals`` (pure LP, Optimal): one multiplier per constraint proving
      optimality by weak duality.
    * ``farkas`` (Infeasible LP): multipliers proving that no point exists.
    * ``ray`` (Unbounded): an improving direction from ``assignment``.
    """

    status: Status
    value: Fraction | None = None
    assignment: tuple[Fraction, ...] | None = None
    basis: tuple[int, ...] | None = None
    duals: tuple[Fraction, ...] | None = None
    farkas: tuple[Fraction, ...] | None = None
    ray: tuple[Fraction, ...] | None = None
    relaxation_value: Fraction | None = None
    nodes: int = 0
    pivots: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


# ---------------------------------------------------------------------------
# standard form


class _StandardForm:
    """``min c'y  s.t.  A y = b, y >= 0`` with integer rows and ``b >= 0``.

    Structural columns come first (one per bounded model variable, two per
    free one), then one slack per inequality row.
    """

    def __init__(self, model: LpModel):
        self.model = model
        cols: list[tuple[int, int]] = []  # (model var, sign)
        self.var_cols: list[list[int]] = []
        for j, lb in enumerate(model.lower_bounds):
            if lb is None:
                self.var_cols.append([len(cols), len(cols) + 1])
                cols += [(j, 1), (j, -1)]
            else:
                self.var_cols.append([len(cols)])
                cols.append((j, 1))
        self.cols = cols
        n_struct = len(cols)

        rows: list[dict[int, int]] = []
        rhs: list[int] = []
        self.row_factor: list[int] = []
        slack_sign: list[int] = []
        for con in model.constraints:
            shifted = con.rhs - sum(
                (a * model.lower_bounds[j] for j, a in con.coeffs if model.lower_bounds[j] is not None),
                Fraction(0),
            )
            entries: dict[int, Fraction] = {}
            for j, a in con.coeffs:
                for c in self.var_cols[j]:
                    entries[c] = a * cols[c][1]
            scale = 1
            for v in list(entries.values()) + [shifted]:
                scale = scale * v.denominator // math.gcd(scale, v.denominator)
            sign = -1 if shifted < 0 else 1
            f = sign * scale
            rows.append({c: int(v * f) for c, v in entries.items()})
            rhs.append(int(shifted * f))
            self.row_factor.append(f)
            if con.relation == EQ:
                slack_sign.append(0)
            else:
                s = 1 if con.relation == LE else -1
                slack_sign.append(s * sign)

        self.slack_col: list[int | None] = []
        ncol = n_struct
        for s in slack_sign:
            if s:
                self.slack_col.append(ncol)
                ncol += 1
            else:
                self.slack_col.append(None)
        self.slack_sign = slack_sign
        self.n_struct = n_struct
        self.n = ncol
        self.rows = rows
        self.rhs = rhs

        obj = [Fraction(0)] * n_struct
        for c, (j, sgn) in enumerate(cols):
            obj[c] = model.objective[j] * sgn
        oscale = 1
        for v in obj:
            oscale = oscale * v.denominator // math.gcd(oscale, v.denominator)
        self.obj_scale = oscale
        self.obj = [int(v * oscale) for v in obj]
        self.obj_offset = sum(
            (model.objective[j] * lb for j, lb in enumerate(model.lower_bounds) if lb is not None),
            Fraction(0),
        )

    def to_model_point(self, y: Sequence[Fraction]) -> tuple[Fraction, ...]:
        x = []
        for j, lb in enumerate(self.model.lower_bounds):
            cs = self.var_cols[j]
            if lb is None:
                x.append(y[cs[0]] - y[cs[1]])
            else:
                x.append(lb + y[cs[0]])
        return tuple(x)

    def to_model_direction(self, d: Sequence[Fraction]) -> tuple[Fraction, ...]:
        out = []
        for j, lb in enumerate(self.model.lower_bounds):
            cs = self.var_cols[j]
            out.append(d[cs[0]] - d[cs[1]] if lb is None else d[cs[0]])
        return tuple(out)


# ---------------------------------------------------------------------------
# fraction-free tableau


class _Tableau:
    def __init__(self, sf: _StandardForm):
        m, n = len(sf.rows), sf.n
        self.m = m
        basis: list[int] = []
        art_rows: list[int] = []
        for i in range(m):
            c = sf.slack_col[i]
            if c is not None and sf.slack_sign[i] == 1:
                basis.append(c)
            else:
                basis.append(-1)
                art_rows.append(i)
        self.n_art = len(art_rows)
        self.art_start = n
        ncols = n + self.n_art
        self.ncols = ncols
        self.rhs_col = ncols
        M = np.zeros((m + 2, ncols + 1), dtype=np.int64)
        big = 0
        for i, row in enumerate(sf.rows):
            for c, v in row.items():
                M[i, c] = v
                big = max(big, abs(v))
            if sf.slack_col[i] is not None:
                M[i, sf.slack_col[i]] = sf.slack_sign[i]
            M[i, ncols] = sf.rhs[i]
            big = max(big, abs(sf.rhs[i]))
        self.unit_col = [0] * m
        for k, i in enumerate(art_rows):
            M[i, n + k] = 1
            basis[i] = n + k
        for i in range(m):
            self.unit_col[i] = basis[i]
        for c, v in enumerate(sf.obj):
            M[m, c] = v
            big = max(big, abs(v))
        # phase-one reduced costs: sum of artificials minus the artificial rows
        for i in art_rows:
            M[m + 1, :n] -= M[i, :n]
            M[m + 1, ncols] -= M[i, ncols]
        if big > _INT64_SAFE // max(1, m):
            M = M.astype(object)
        self.M = M
        self.bound = int(np.abs(M).max()) if M.dtype != object and M.size else 0
        self.D = 1
        self.basis = basis
        self.pivots = 0

    def _maybe_promote(self):
        if self.M.dtype != object and (self.bound > _INT64_SAFE or self.D > _INT64_SAFE):
            self.M = self.M.astype(object)

    def pivot(self, r: int, s: int):
        self._maybe_promote()
        M = self.M
        p = int(M[r, s])
        D = self.D
        col = M[:, s].copy()
        prow = M[r].copy()
        if p == D:
            # only rows meeting the pivot column change
            rows = np.flatnonzero(col)
            rows = rows[rows != r]
            cols = np.flatnonzero(prow)
            if len(rows):
                idx = np.ix_(rows, cols)
                upd = np.outer(col[rows], prow[cols])
                if D != 1:
                    upd //= D
                block = M[idx] - upd
                M[idx] = block
                if M.dtype != object:
                    self.bound = max(self.bound, int(np.abs(block).max()))
        else:
            col[r] = 0
            M *= p
            M -= np.outer(col, prow)
            M //= D
            M[r] = prow
            if p < 0:
                M *= -1
            if M.dtype != object:
                self.bound = int(np.abs(M).max())
        self.D = abs(p)
        self.basis[r] = s
        self.pivots += 1

    def entering(self, obj_row: int, limit: int) -> int | None:
        d = self.M[obj_row, :limit]
        idx = np.flatnonzero(d < 0)
        return int(idx[0]) if len(idx) else None

    def leaving(self, s: int) -> int | None:
        M = self.M
        col = M[: self.m, s]
        cand = np.flatnonzero(col > 0)
        best = None
        bnum = bden = 0
        for i in cand:
            i = int(i)
            num, den = int(M[i, self.rhs_col]), int(col[i])
            if best is None:
                best, bnum, bden = i, num, den
                continue
            lhs, rhs = num * bden, bnum * den
            if lhs < rhs or (lhs == rhs and self.basis[i] < self.basis[best]):
                best, bnum, bden = i, num, den
        return best

    def value(self, i: int, j: int) -> Fraction:
        return Fraction(int(self.M[i, j]), self.D)


def _run(tab: _Tableau, obj_row: int, limit: int) -> tuple[str, int | None]:
    while True:
        s = tab.entering(obj_row, limit)
        if s is None:
            return "optimal", None
        r = tab.leaving(s)
        if r is None:
            return "unbounded", s
        tab.pivot(r, s)


def solve_lp(model: LpModel) -> LpSolution:
    """Solve the LP relaxation of ``model`` exactly (integrality is ignored)."""
    if not isinstance(model, LpModel):
        raise ModelError("solve_lp expects an LpModel")
    sf = _StandardForm(model)
    tab = _Tableau(sf)
    m = tab.m

    if tab.n_art:
        _run(tab, m + 1, tab.art_start)
        phase1 = -tab.value(m + 1, tab.rhs_col)
        if phase1 > 0:
            yprime = []
            for i in range(m):
                u = tab.unit_col[i]
                cost = 1 if u >= tab.art_start else 0
                yprime.append(cost - tab.value(m + 1, u))
            farkas = tuple(yprime[i] * sf.row_factor[i] for i in range(m))
            sol = LpSolution(Status.INFEASIBLE, farkas=farkas, pivots=tab.pivots)
            verify_solution(model, sol)
            return sol
        # drive zero-level artificials out of the basis where possible
        for i in range(m):
            if tab.basis[i] >= tab.art_start:
                row = tab.M[i, : tab.art_start]
                nz = np.flatnonzero(row != 0)
                if len(nz):
                    tab.pivot(i, int(nz[0]))

    status, s = _run(tab, m, tab.art_start)
    y = [Fraction(0)] * tab.ncols
    for i, b in enumerate(tab.basis):
        y[b] = tab.value(i, tab.rhs_col)
    x = sf.to_model_point(y[: sf.n])
    basis = tuple(sorted(b for b in tab.basis if b < tab.art_start))

    if status == "unbounded":
        d = [Fraction(0)] * tab.ncols
        d[s] = Fraction(1)
        for i, b in enumerate(tab.basis):
            d[b] = -tab.value(i, s)
        ray = sf.to_model_direction(d[: sf.n])
        sol = LpSolution(Status.UNBOUNDED, assignment=x, ray=ray, basis=basis, pivots=tab.pivots)
        verify_solution(model, sol)
        return sol

    value = model.objective_value(x)
    duals = []
    for i in range(m):
        yprime = -tab.value(m, tab.unit_col[i])
        duals.append(yprime * sf.row_factor[i] / sf.obj_scale)
    sol = LpSolution(
        Status.OPTIMAL, value=value, assignment=x, basis=basis, duals=tuple(duals), pivots=tab.pivots
    )
    verify_solution(model, sol)
    return sol


# ---------------------------------------------------------------------------
# certificates


def _column_products(model: LpModel, y: Sequence[Fraction]) -> list[Fraction]:
    """``A_j^T y`` for every model variable ``j``."""
    out = [Fraction(0)] * model.num_vars
    for yi, con in zip(y, model.constraints):
        if yi:
            for j, a in con.coeffs:
                out[j] += a * yi
    return out


def _dual_signs_ok(model: LpModel, y: Sequence[Fraction]) -> bool:
    for yi, con in zip(y, model.constraints):
        if con.relation == LE and yi > 0:
            return False
        if con.relation == GE and yi < 0:
            return False
    return True


def verify_solution(model: LpModel, sol: LpSolution, *, integral: bool = False) -> None:
    """Re-check ``sol`` against ``model`` by exact substitution.

    Raises :class:`CertificateError` on any mismatch.
    """
    if sol.status is Status.OPTIMAL:
        x = sol.assignment
        if x is None or not model.is_feasible(x):
            raise CertificateError("optimal assignment violates the model")
        if model.objective_value(x) != sol.value:
            raise CertificateError("optimal value does not match the assignment")
        if integral:
            for j, flag in enumerate(model.integrality):
                if flag and x[j].denominator != 1:
                    raise CertificateError(f"variable {j} is fractional in an integral solution")
        if sol.duals is not None:
            y = sol.duals
            if len(y) != len(model.constraints) or not _dual_signs_ok(model, y):
                raise CertificateError("dual multipliers have the wrong signs")
            aty = _column_products(model, y)
            bound = sum((yi * con.rhs for yi, con in zip(y, model.constraints)), Fraction(0))
            for j, lb in enumerate(model.lower_bounds):
                r = model.objective[j] - aty[j]
                if lb is None:
                    if r != 0:
                        raise CertificateError(f"dual infeasible at free variable {j}")
                else:
                    if r < 0:
                        raise CertificateError(f"dual infeasible at variable {j}")
                    bound += lb * r
            if bound != sol.value:
                raise CertificateError(f"duality gap: primal {sol.value}, dual {bound}")
    elif sol.status is Status.INFEASIBLE:
        y = sol.farkas
        if y is None:
            return
        if len(y) != len(model.constraints) or not _dual_signs_ok(model, y):
            raise CertificateError("Farkas multipliers have the wrong signs")
        aty = _column_products(model, y)
        total = sum((yi * con.rhs for yi, con in zip(y, model.constraints)), Fraction(0))
        for j, lb in enumerate(model.lower_bounds):
            if lb is None:
                if aty[j] != 0:
                    raise CertificateError("Farkas certificate fails at a free variable")
            else:
                if aty[j] > 0:
                    raise CertificateError("Farkas certificate fails at a bounded variable")
                total -= lb * aty[j]
        if total <= 0:
            raise CertificateError("Farkas certificate does not separate")
    elif sol.status is Status.UNBOUNDED:
        x, d = sol.assignment, sol.ray
        if x is None or d is None:
            return
        if not model.is_feasible(x):
            raise CertificateError("unbounded certificate starts from an infeasible point")
        for j, lb in enumerate(model.lower_bounds):
            if lb is not None and d[j] < 0:
                raise CertificateError("ray leaves a lower bound")
        for con in model.constraints:
            v = con.lhs(d)
            if (con.relation == EQ and v != 0) or (con.relation == LE and v > 0) or (
                con.relation == GE and v < 0
            ):
                raise CertificateError("ray violates a constraint")
        if model.objective_value(d) >= 0:
            raise CertificateError("ray does not decrease the objective")


# ---------------------------------------------------------------------------
# branch and bound


def solve_ilp(model: LpModel, *, node_limit: int = DEFAULT_NODE_LIMIT) -> LpSolution:
    """Optimal solution with every integrality-flagged variable integral.

    Depth-first branch and bound: the lowest-index fractional variable is
    branched on and the floor branch is explored first.  The returned
    solution carries the root LP value in ``relaxation_value``.
    """
    root = solve_lp(model)
    if root.status is not Status.OPTIMAL:
        return replace(root, duals=None, nodes=1)
    flagged = [j for j, f in enumerate(model.integrality) if f]

    best: LpSolution | None = None
    nodes = 0
    pivots = 0
    stack: list[tuple[tuple[int, str, Fraction], ...]] = [()]
    while stack:
        branches = stack.pop()
        nodes += 1
        if nodes > node_limit:
            raise NodeLimitExceeded(node_limit)
        if branches:
            sub = model
            for j, rel, v in branches:
                sub = sub.with_bound(j, rel, v)
            sol = solve_lp(sub)
        else:
            sol = root
        pivots += sol.pivots
        if sol.status is Status.UNBOUNDED:
            return replace(sol, duals=None, nodes=nodes, pivots=pivots)
        if sol.status is not Status.OPTIMAL:
            continue
        if best is not None and sol.value >= best.value:
            continue
        frac = next((j for j in flagged if sol.assignment[j].denominator != 1), None)
        if frac is None:
            best = sol
            continue
        v = sol.assignment[frac]
        lo, hi = Fraction(math.floor(v)), Fraction(math.ceil(v))
        stack.append(branches + ((frac, GE, hi),))
        stack.append(branches + ((frac, LE, lo),))

    if best is None:
        return LpSolution(Status.INFEASIBLE, relaxation_value=root.value, nodes=nodes, pivots=pivots)
    out = LpSolution(
        Status.OPTIMAL,
        value=best.value,
        assignment=best.assignment,
        basis=best.basis,
        relaxation_value=root.value,
        nodes=nodes,
        pivots=pivots,
    )
    verify_solution(model, out, integral=True)
    return out
