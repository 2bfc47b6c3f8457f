"""The acceptance suite behind ``bvcurrents check``.

Each criterion draws its instances from ``random.Random(seed * 1000 +
number)`` and returns a :class:`CriterionResult` whose detail line contains
only exact or fixed-precision quantities (no timings), so transcripts are
byte-identical across runs with the same seed.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .bv import cantor_stage, graph_current, pointwise_variation
from .chains import Chain, Grid, boundary, mass
from .deform import deform_to_coarse, embed, isoperimetric_fill
from .fixtures import block_cycle, grow_and_vanish, square_cycle
from .flatnorm import dist_lip, flat_norm, flat_norm_boundaryless, verify_equality
from .random_instances import (
    aligned_offset,
    generic_time,
    random_cell,
    random_chain,
    random_cycle,
    random_grid,
    random_interval_endpoints,
    random_plan,
    random_rectangles,
    random_spacetime_chain,
    random_step_function,
    rectangles_cycle,
)
from .spacetime import (
    SpacetimeChain,
    TimeInterval,
    boundary_variation,
    end_trace,
    lift_spatial,
    mass_decomposition,
    slice_at,
    slice_by_cylinder,
    slice_right,
    spacetime_grid,
    spatial_projection,
    start_trace,
    variation,
)
from .transform import (
    SweepPlan,
    check_sweep_contract,
    collapse_cone,
    concatenate,
    one_flip_schedule,
    prism,
    rescale_time,
    reverse,
    sweep,
)

__all__ = ["CriterionResult", "CRITERIA", "run_one", "run_check", "format_transcript", "loglog_slope"]


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number:2d} {self.name}: {self.detail}"


def loglog_slope(xs, ys) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    lx = [math.log(float(x)) for x in xs]
    ly = [math.log(float(y)) for y in ys]
    mx, my = sum(lx) / len(lx), sum(ly) / len(ly)
    num = sum((a - mx) * (b - my) for a, b in zip(lx, ly))
    den = sum((a - mx) ** 2 for a in lx)
    return num / den


def _count(full: int, quick: bool, small: int) -> int:
    return small if quick else full


def _max_slice_mass(S: SpacetimeChain) -> Fraction:
    return max(mass(slice_right(S, S.time(i))) for i in range(S.columns))


def _boundary_formula_holds(S: SpacetimeChain, t: Fraction, sl: Chain) -> bool:
    """``boundary(S|t) == -(boundary S)|t``; for 1-chains both sides vanish by convention."""
    if S.k == 0:
        return boundary(sl).is_zero()
    return boundary(sl) == -slice_at(SpacetimeChain(boundary(S.chain)), t)


# ---------------------------------------------------------------------------


def criterion_1(rng: random.Random, quick: bool) -> CriterionResult:
    n = _count(1000, quick, 100)
    bad = 0
    cells = 0
    for _ in range(n):
        d = rng.randint(1, 4)
        k = rng.randint(0, min(3, d))
        T = random_chain(rng, random_grid(rng, d), k, 8)
        cells += len(T)
        if not boundary(boundary(T)).is_zero():
            bad += 1
    return CriterionResult(1, "chain-complex soundness", bad == 0, f"{n} chains ({cells} cells), {bad} with nonzero dd")


def criterion_2(rng: random.Random, quick: bool) -> CriterionResult:
    n = _count(500, quick, 50)
    bad = 0
    for _ in range(n):
        S = random_spacetime_chain(rng)
        tm, sm = mass_decomposition(S)
        columns = sum(
            (S.time_spacing * mass(slice_at(S, S.time(i) + S.time_spacing / 2)) for i in range(S.columns)),
            Fraction(0),
        )
        if tm + sm != mass(S.chain) or tm != columns or sm != variation(S, TimeInterval.closed(S.t0, S.t1)):
            bad += 1
    return CriterionResult(2, "mass decomposition", bad == 0, f"{n} space-time chains, {bad} violations")


def criterion_3(rng: random.Random, quick: bool) -> CriterionResult:
    n = _count(200, quick, 20)
    bad = 0
    for _ in range(n):
        S = random_spacetime_chain(rng)
        for _ in range(5):
            t = generic_time(rng, S)
            sl = slice_at(S, t)
            if not _boundary_formula_holds(S, t, sl):
                bad += 1
            elif slice_by_cylinder(S, t) != sl:
                bad += 1
    return CriterionResult(3, "slicing soundness", bad == 0, f"{n} chains x 5 times, {bad} violations")


def criterion_4(rng: random.Random, quick: bool) -> CriterionResult:
    n = _count(100, quick, 10)
    bad = 0
    tight = 0
    for i in range(n):
        if i % 2 == 0:
            S = sweep(random_plan(rng, Grid.make([3, 3])))
        else:
            space = random_grid(rng, 2, 3)
            grid = spacetime_grid(space, rng.randint(1, 3), 0, 1)
            items = [(random_cell(rng, grid, 2), rng.choice((-2, -1, 1, 2))) for _ in range(rng.randint(1, 10))]
            S = SpacetimeChain(Chain(grid, 2, items, check=False))
        if mass(spatial_projection(S)) > variation(S):
            bad += 1
            continue
        s, t = sorted((generic_time(rng, S), generic_time(rng, S)))
        I = TimeInterval.closed(s, t)
        f = flat_norm(slice_at(S, t) - slice_at(S, s)).value
        rhs = variation(S, I) + boundary_variation(S, I)
        if f > rhs:
            bad += 1
        elif f == rhs:
            tight += 1
    return CriterionResult(
        4, "projection bound and discrete Poincare", bad == 0, f"{n} instances, {bad} violations, {tight} tight"
    )


def criterion_5(rng: random.Random, quick: bool) -> CriterionResult:
    n = _count(200, quick, 20)
    bad = 0
    for _ in range(n):
        p1 = random_plan(rng)
        S1 = sweep(p1)
        p2 = random_plan(rng, p1.base.grid, base=p1.base + boundary(p1.fill))
        S2 = sweep(p2)
        C = concatenate(S1, S2)
        ok = variation(C) == variation(S1) + variation(S2)
        ok &= start_trace(C) == p1.base and end_trace(C) == p2.base + boundary(p2.fill)
        ok &= _max_slice_mass(C) == max(_max_slice_mass(S1), _max_slice_mass(S2))
        R = reverse(S1)
        ok &= variation(R) == variation(S1) and reverse(R) == S1
        ok &= start_trace(R) == end_trace(S1) and end_trace(R) == start_trace(S1)
        m = rng.choice((2, 3))
        A = rescale_time(S1, m)
        ok &= variation(A) == variation(S1) and boundary_variation(A) == boundary_variation(S1)
        t = generic_time(rng, A)
        ok &= slice_at(A, t) == slice_at(S1, t)
        bad += not ok
    return CriterionResult(5, "transform identities", bad == 0, f"{n} sweep pairs, {bad} violations")


def criterion_6(rng: random.Random, quick: bool) -> CriterionResult:
    n = _count(200, quick, 20)
    built = 0
    bad = 0
    g = Grid.make([3, 3])
    cyc = square_cycle(g)
    sq = Chain.cell(g, (0, 0), (0, 1))
    W = prism(cyc, 0, 1)
    fixed = [
        SweepPlan(cyc, -sq, one_flip_schedule(-sq), 1),
        SweepPlan(cyc, W, one_flip_schedule(W), 2),
        SweepPlan(cyc, Chain(g, 2), (), 1),
    ]
    plans = fixed + [random_plan(rng) for _ in range(n)]
    for plan in plans:
        try:
            S = sweep(plan)
            check_sweep_contract(plan, S)
            built += 1
        except AssertionError:
            bad += 1
    for side in (1, 2, 3):
        c = block_cycle(Grid.make([4, 4]), side)
        fill = -Chain(c.grid, 2, [(((i, j), (0, 1)), 1) for i in range(side) for j in range(side)])
        S = collapse_cone(c, fill)
        built += 1
        if variation(S) != mass(fill) or boundary(S.chain) != -lift_spatial(c, S.grid, 0):
            bad += 1
    return CriterionResult(6, "sweep contract", bad == 0, f"{built} constructions, {bad} violations")


def _random_cycle_pair(rng: random.Random, grid: Grid, max_cells: int):
    return random_cycle(rng, grid, 1, max_cells), random_cycle(rng, grid, 1, max_cells)


def criterion_7(rng: random.Random, quick: bool) -> CriterionResult:
    n2 = _count(50, quick, 5)
    n3 = _count(10, quick, 1)
    bad = 0
    values = []
    for i in range(n2 + n3):
        if i < n2:
            grid = Grid.make([rng.randint(2, 6), rng.randint(2, 6)])
            T0, T1 = _random_cycle_pair(rng, grid, 6)
        else:
            grid = Grid.make([4, 4, 4])
            T0, T1 = _random_cycle_pair(rng, grid, 4)
        try:
            rep = verify_equality(T0, T1)
            values.append(rep.distance_value)
            if not rep.equal:
                bad += 1
        except AssertionError:
            bad += 1
    total = sum(values, Fraction(0))
    return CriterionResult(
        7,
        "equality theorem (dist_lip = F0)",
        bad == 0,
        f"{n2} instances d=2 + {n3} instances d=3, {bad} mismatches, sum of values {total}",
    )


DEFORM_SIZES = (6, 9, 12)
DEFORM_SLOPE_LIMIT = 0.5
DEFORM_WINDOW = 4


def criterion_8(rng: random.Random, quick: bool) -> CriterionResult:
    """Paired design: each cycle shape is placed, at the same residue modulo
    the coarsening factor, in every grid size that the factor divides."""
    shapes = {3: _count(20, quick, 2), 2: _count(25, quick, 2)}
    bad = 0
    count = 0
    worst_p = worst_s = Fraction(0)
    slopes = []
    for m, nshapes in shapes.items():
        sizes = [n for n in DEFORM_SIZES if n % m == 0]
        ratios_p = {n: [] for n in sizes}
        ratios_s = {n: [] for n in sizes}
        drawn = 0
        while drawn < nshapes:
            rects = random_rectangles(rng, DEFORM_WINDOW)
            residue = (rng.randrange(m), rng.randrange(m))
            probe = rectangles_cycle(Grid.make([DEFORM_WINDOW, DEFORM_WINDOW]), rects, (0, 0))
            if probe.is_zero():
                continue
            drawn += 1
            for n in sizes:
                grid = Grid.make([n, n])
                offset = tuple(aligned_offset(rng, n, DEFORM_WINDOW, m, r) for r in residue)
                T = rectangles_cycle(grid, rects, offset)
                r = deform_to_coarse(T, m)
                count += 1
                ok = boundary(r.P).is_zero() and T + boundary(r.W) == embed(r.P, m) and variation(r.S) == mass(r.W)
                bad += not ok
                ratios_p[n].append(r.mass_ratio)
                ratios_s[n].append(r.variation_ratio)
        for ratios in (ratios_p, ratios_s):
            means = [max(sum(ratios[n], Fraction(0)) / len(ratios[n]), Fraction(1, 10**6)) for n in sizes]
            slopes.append(loglog_slope(sizes, means))
        worst_p = max([worst_p] + [max(v) for v in ratios_p.values()])
        worst_s = max([worst_s] + [max(v) for v in ratios_s.values()])
    passed = bad == 0 and all(s <= DEFORM_SLOPE_LIMIT for s in slopes)
    return CriterionResult(
        8,
        "deformation theorem",
        passed,
        f"{count} cycles, {bad} identity failures, max M(P)/M(T) {worst_p}, max Var/(rho M(T)) {worst_s}, "
        f"size slopes m=3 {slopes[0]:.4f}/{slopes[1]:.4f} m=2 {slopes[2]:.4f}/{slopes[3]:.4f} "
        f"(limit {DEFORM_SLOPE_LIMIT})",
    )


def criterion_9(rng: random.Random, quick: bool) -> CriterionResult:
    grid = Grid.make([12, 12])
    masses, vars_ = [], []
    for r in range(1, 6):
        T = block_cycle(grid, r, (3, 3))
        fill = isoperimetric_fill(T)
        masses.append(mass(T))
        vars_.append(fill.variation)
    slope = loglog_slope(masses, vars_)
    passed = abs(slope - 2) <= 0.05
    return CriterionResult(
        9,
        "isoperimetric scaling",
        passed,
        f"Var(fill) {[str(v) for v in vars_]} vs M(T) {[str(m) for m in masses]}, slope {slope:.6f} (target 2 +- 0.05)",
    )


def criterion_10(rng: random.Random, quick: bool) -> CriterionResult:
    n = _count(100, quick, 10)
    bad = 0
    for _ in range(n):
        u = random_step_function(rng)
        S = graph_current(u)
        for _ in range(3):
            a, b = random_interval_endpoints(rng, Fraction(0), Fraction(1))
            I = TimeInterval(a, b, rng.random() < 0.5, rng.random() < 0.5)
            if variation(S, I) != pointwise_variation(u, I):
                bad += 1
        if boundary(S.chain) != _graph_endpoints(S, u):
            bad += 1
    cantor_ok = True
    for stage in range(6):
        S = graph_current(cantor_stage(stage))
        cantor_ok &= variation(S, TimeInterval.closed(0, 1)) == 1
        if stage >= 1:
            cantor_ok &= variation(S, TimeInterval.closed(0, Fraction(1, 3))) == Fraction(1, 2)
    return CriterionResult(
        10, "BV bridge", bad == 0 and cantor_ok, f"{n} step functions x 3 intervals, {bad} violations, Cantor stages 0..5 {'ok' if cantor_ok else 'FAILED'}"
    )


def _graph_endpoints(S: SpacetimeChain, u) -> Chain:
    """Expected boundary of a graph current: end point minus start point."""
    space = S.spatial_grid
    x0 = int((u.values[0] - space.origin[0]) / space.spacing[0])
    x1 = int((u.values[-1] - space.origin[0]) / space.spacing[0])
    grid = S.grid
    return Chain(grid, 0, [(((S.columns, x1), ()), 1), (((0, x0), ()), -1)])


def criterion_11(rng: random.Random, quick: bool) -> CriterionResult:
    ns = range(1, 7) if not quick else range(1, 4)
    ok = True
    rows = []
    for n in ns:
        R, S = grow_and_vanish(n)
        edges = len(boundary(R))
        h = Fraction(1, n)
        top = _max_slice_mass(S)
        ok &= variation(S, TimeInterval.closed(0, 1)) == 2 * mass(R) == 2
        ok &= top >= edges * h / 2
        ok &= boundary(S.chain).is_zero()
        rows.append(f"n={n}: N={edges} max slice {top}")
    return CriterionResult(11, "growing boundary at constant variation", ok, "Var = 2 for all; " + "; ".join(rows))


def criterion_12(rng: random.Random, quick: bool, seed: int = 0) -> CriterionResult:
    n = _count(30, quick, 5)
    bad = 0
    gaps = 0
    for _ in range(n):
        grid = Grid.make([rng.randint(2, 4), rng.randint(2, 4)])
        T0, T1 = _random_cycle_pair(rng, grid, 4)
        T = T1 - T0
        f = flat_norm(T)
        Q, Rw = f.witnesses.get("Q"), f.witnesses["R"]
        bad += not (boundary(Q) + Rw == T and mass(Q) + mass(Rw) == f.value)
        f0 = flat_norm_boundaryless(T)
        bad += not (boundary(f0.witnesses["Q"]) == T and mass(f0.witnesses["Q"]) == f0.value)
        N = max(1, int(f0.value))
        d = dist_lip(T0, T1, N, Fraction(1))
        S = d.witnesses["S"]
        bd = lift_spatial(T1, S.grid, S.columns) - lift_spatial(T0, S.grid, 0)
        bad += not (boundary(S.chain) == bd and variation(S) == d.value)
        for res in (f, f0, d):
            bad += res.relaxation_value > res.value
            gaps += res.relaxation_value != res.value
    determinism = "skipped"
    if not quick:
        first = format_transcript(run_check(seed, quick=True, only=range(1, 12)))
        second = format_transcript(run_check(seed, quick=True, only=range(1, 12)))
        same = first == second
        bad += not same
        determinism = "identical" if same else "DIFFERENT"
    return CriterionResult(
        12,
        "solver integrity",
        bad == 0,
        f"{3 * n} results re-verified, LP <= ILP everywhere, {gaps} integrality gaps, transcripts {determinism}",
    )


CRITERIA: list[tuple[int, Callable]] = [
    (1, criterion_1),
    (2, criterion_2),
    (3, criterion_3),
    (4, criterion_4),
    (5, criterion_5),
    (6, criterion_6),
    (7, criterion_7),
    (8, criterion_8),
    (9, criterion_9),
    (10, criterion_10),
    (11, criterion_11),
    (12, criterion_12),
]


def run_one(number: int, seed: int = 42, quick: bool = False) -> CriterionResult:
    fn = dict(CRITERIA)[number]
    rng = random.Random(seed * 1000 + number)
    try:
        if number == 12:
            return fn(rng, quick, seed)
        return fn(rng, quick)
    except Exception as exc:  # a crash is a failed criterion, reported in the transcript
        return CriterionResult(number, fn.__name__, False, f"raised {type(exc).__name__}: {exc}")


def run_check(seed: int = 42, quick: bool = False, only=None) -> list[CriterionResult]:
    numbers = [n for n, _ in CRITERIA if only is None or n in set(only)]
    return [run_one(n, seed, quick) for n in numbers]


def format_transcript(results: list[CriterionResult]) -> str:
    lines = [r.line() for r in results]
    passed = sum(r.passed for r in results)
    lines.append(f"{passed}/{len(results)} criteria passed")
    return "\n".join(lines) + "\n"
