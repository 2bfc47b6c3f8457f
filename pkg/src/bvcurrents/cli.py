"""Command-line entry point: ``bvcurrents <verb> [files] [flags]``.

Every number is printed as an exact rational string ``"p/q"``.  Exit status
is 0 on success, 1 on a domain error (bad input data, failed precondition,
infeasible program) and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Any

from . import acceptance
from .bv import StepFunction, graph_current, pointwise_variation
from .chains import Chain, ChainError, Grid, boundary, chain_from_dict, chain_to_dict, mass, parse_rational
from .deform import FillError, deform_to_coarse, isoperimetric_fill
from .exact_lp import DEFAULT_NODE_LIMIT, ModelError, NodeLimitExceeded
from .flatnorm import (
    EqualityFailure,
    WitnessError,
    default_columns_and_budget,
    dist_lip,
    flat_norm,
    flat_norm_boundaryless,
    verify_equality,
)
from .spacetime import (
    SliceError,
    SpacetimeChain,
    TimeInterval,
    boundary_variation,
    slice_at,
    slice_left,
    slice_right,
    spatial_projection,
    stationary,
    variation,
)
from .transform import (
    ContractError,
    PreconditionError,
    SweepPlan,
    batched_schedule,
    concatenate,
    one_flip_schedule,
    prism,
    rescale_time,
    reverse,
    sweep,
)

DOMAIN_ERRORS = (
    ChainError,
    SliceError,
    PreconditionError,
    ContractError,
    ModelError,
    NodeLimitExceeded,
    FillError,
    EqualityFailure,
    WitnessError,
    ValueError,
)


class DomainError(Exception):
    """A well-formed command whose data violates a precondition."""


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# input


def _read_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DomainError(f"{path} is not valid JSON: {exc}") from exc


def parse_grid(text: str) -> Grid:
    """``4x4``, ``4x4:1/2`` (spacing) or a path to a grid / chain JSON file."""
    if text.endswith(".json"):
        data = _read_json(text)
        return Grid.from_dict(data.get("grid", data))
    shape, _, spacing = text.partition(":")
    try:
        extents = [int(n) for n in shape.lower().split("x")]
    except ValueError as exc:
        raise UsageError(f"--grid must look like 4x4 or 4x4:1/2, got {text!r}") from exc
    return Grid.make(extents, parse_rational(spacing) if spacing else 1)


def _check_grid(T: Chain, args, spatial: bool = False) -> None:
    want = getattr(args, "grid", None)
    if want is None:
        return
    have = T.grid.drop_axis(0) if spatial else T.grid
    if have != want:
        raise DomainError(f"chain grid {have.to_dict()} is not the --grid {want.to_dict()}")


def load_chain(path: str, args) -> Chain:
    data = _read_json(path)
    try:
        T = chain_from_dict(data)
    except ChainError as exc:
        raise DomainError(f"{path}: {exc}") from exc
    _check_grid(T, args, spatial="time_axis" in data)
    return T


def load_spacetime(path: str, args) -> SpacetimeChain:
    data = _read_json(path)
    try:
        S = SpacetimeChain.from_dict(data)
    except ChainError as exc:
        raise DomainError(f"{path}: {exc}") from exc
    _check_grid(S.chain, args, spatial=True)
    return S


# ---------------------------------------------------------------------------
# output


def _decimalize(obj):
    """Add ``<key>_approx`` floats next to every rational string (approximations only)."""
    if isinstance(obj, dict):
        out = {}
        for key, value in obj.items():
            out[key] = _decimalize(value)
            if isinstance(value, str):
                try:
                    out[f"{key}_approx"] = float(Fraction(value))
                except (ValueError, ZeroDivisionError):
                    pass
        return out
    if isinstance(obj, list):
        return [_decimalize(v) for v in obj]
    return obj


def emit(obj: dict, args) -> None:
    if getattr(args, "decimal", False):
        obj = _decimalize(obj)
    text = json.dumps(obj, sort_keys=True) + "\n"
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _value(x: Fraction) -> dict:
    return {"value": str(x)}


def _interval(args) -> TimeInterval | None:
    if args.interval is None:
        return None
    try:
        return TimeInterval.parse(args.interval)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"--interval: {exc}") from exc


def _norm(res, what: str) -> dict:
    out = res.to_dict()
    if not res.feasible:
        raise DomainError(f"{what} is {res.status}: " + json.dumps(out, sort_keys=True))
    return out


# ---------------------------------------------------------------------------
# verbs


def cmd_mass(args):
    return _value(mass(load_chain(args.file, args)))


def cmd_boundary(args):
    data = _read_json(args.file)
    if "time_axis" in data:
        S = load_spacetime(args.file, args)
        return SpacetimeChain(boundary(S.chain)).to_dict()
    return chain_to_dict(boundary(load_chain(args.file, args)))


def cmd_var(args):
    S = load_spacetime(args.file, args)
    I = _interval(args)
    return _value(boundary_variation(S, I) if args.boundary else variation(S, I))


def cmd_slice(args):
    S = load_spacetime(args.file, args)
    t = parse_rational(args.time)
    fn = {"generic": slice_at, "right": slice_right, "left": slice_left}[args.side]
    return chain_to_dict(fn(S, t))


def cmd_project(args):
    return chain_to_dict(spatial_projection(load_spacetime(args.file, args)))


def cmd_sweep(args):
    if len(args.files) == 1:
        data = _read_json(args.files[0])
        try:
            plan = SweepPlan.from_dict(data)
        except (KeyError, TypeError) as exc:
            raise DomainError(f"{args.files[0]}: malformed sweep plan, missing {exc}") from exc
    elif len(args.files) == 2:
        base, fill = (load_chain(p, args) for p in args.files)
        schedule = batched_schedule(fill, parse_rational(args.budget)) if args.budget else one_flip_schedule(fill)
        columns = args.time_steps if args.time_steps is not None else max(1, len(schedule))
        plan = SweepPlan(base, fill, schedule, columns)
    else:
        raise UsageError("sweep takes a plan file or a base file and a fill file")
    return sweep(plan).to_dict()


def cmd_prism(args):
    T = load_chain(args.file, args)
    if args.axis is None:
        return stationary(T, args.time_steps or 1).to_dict()
    if args.direction not in (1, -1):
        raise UsageError("--direction must be 1 or -1")
    return chain_to_dict(prism(T, args.axis, args.direction))


def cmd_concat(args):
    return concatenate(load_spacetime(args.first, args), load_spacetime(args.second, args)).to_dict()


def cmd_reverse(args):
    return reverse(load_spacetime(args.file, args)).to_dict()


def cmd_rescale(args):
    return rescale_time(load_spacetime(args.file, args), args.factor).to_dict()


def cmd_flatnorm(args):
    return _norm(flat_norm(load_chain(args.file, args), node_limit=args.node_limit), "flat norm")


def cmd_flatnorm0(args):
    return _norm(
        flat_norm_boundaryless(load_chain(args.file, args), node_limit=args.node_limit), "boundaryless flat norm"
    )


def cmd_distlip(args):
    T0, T1 = load_chain(args.first, args), load_chain(args.second, args)
    N, B = args.time_steps, None if args.budget is None else parse_rational(args.budget)
    if N is None:
        f0 = flat_norm_boundaryless(T1 - T0, node_limit=args.node_limit)
        if not f0.feasible:
            raise DomainError("T1 - T0 bounds nothing inside the grid box, so no default column count exists")
        N, default_b = default_columns_and_budget(T0.grid, T0.k, f0.value)
        B = default_b if B is None else B
    out = _norm(dist_lip(T0, T1, N, B, node_limit=args.node_limit), "deformation distance")
    out["columns"] = N
    out["budget"] = None if B is None else str(B)
    return out


def cmd_verify_equality(args):
    T0, T1 = load_chain(args.first, args), load_chain(args.second, args)
    return verify_equality(T0, T1, node_limit=args.node_limit).to_dict()


def cmd_deform(args):
    r = deform_to_coarse(load_chain(args.file, args), args.coarsen, node_limit=args.node_limit)
    return {
        "P": chain_to_dict(r.P),
        "W": chain_to_dict(r.W),
        "S": r.S.to_dict(),
        "mass_T": str(mass(r.T)),
        "mass_P": str(mass(r.P)),
        "mass_W": str(mass(r.W)),
        "var_S": str(variation(r.S)),
        "rho": str(r.rho),
        "ratio_P": None if r.mass_ratio is None else str(r.mass_ratio),
        "ratio_S": None if r.variation_ratio is None else str(r.variation_ratio),
    }


def cmd_fill(args):
    try:
        r = isoperimetric_fill(load_chain(args.file, args), node_limit=args.node_limit)
    except FillError as exc:
        raise DomainError(str(exc)) from exc
    return {"S": r.S.to_dict(), "W": chain_to_dict(r.W), "coarsen": r.m, "value": str(r.variation)}


def cmd_bv(args):
    data = _read_json(args.file)
    try:
        u = StepFunction.from_dict(data)
    except ChainError as exc:
        raise DomainError(f"{args.file}: {exc}") from exc
    I = _interval(args)
    S = graph_current(u)
    return {"value": str(variation(S, I)), "pointwise": str(pointwise_variation(u, I)), "graph": S.to_dict()}


def cmd_check(args):
    only = None
    if args.only:
        only = [int(n) for n in args.only.split(",")]
        unknown = set(only) - {n for n, _ in acceptance.CRITERIA}
        if unknown:
            raise UsageError(f"--only names unknown criteria {sorted(unknown)}")
    results = acceptance.run_check(args.seed, quick=args.quick, only=only)
    text = acceptance.format_transcript(results)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return all(r.passed for r in results)


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--grid", type=parse_grid, help="expected grid: 4x4, 4x4:1/2 or a JSON file")
    common.add_argument("--output", help="write JSON here instead of standard output")
    common.add_argument("--decimal", action="store_true", help="add *_approx float fields (approximate)")
    common.add_argument("--node-limit", type=int, default=DEFAULT_NODE_LIMIT)

    parser = _Parser(prog="bvcurrents", description="Exact cubical space-time currents.")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    def verb(name, fn, help_text, files=("file",)):
        p = sub.add_parser(name, parents=[common], help=help_text)
        for f in files:
            p.add_argument(f)
        p.set_defaults(fn=fn)
        return p

    verb("mass", cmd_mass, "mass of a chain")
    verb("boundary", cmd_boundary, "boundary of a chain")
    p = verb("var", cmd_var, "variation of a space-time chain")
    p.add_argument("--interval", help="a,b with optional oc/co/oo/cc end codes")
    p.add_argument("--boundary", action="store_true", help="variation of the boundary instead")
    p = verb("slice", cmd_slice, "slice of a space-time chain")
    p.add_argument("--time", required=True)
    p.add_argument("--side", choices=("generic", "right", "left"), default="generic")
    verb("project", cmd_project, "spatial projection of a space-time chain")
    p = verb("sweep", cmd_sweep, "sweep from a plan, or from base and fill", files=())
    p.add_argument("files", nargs="+")
    p.add_argument("--time-steps", type=int)
    p.add_argument("--budget", help="per-column variation budget (batched schedule)")
    p = verb("prism", cmd_prism, "translation prism, or the stationary prism without --axis")
    p.add_argument("--axis", type=int)
    p.add_argument("--direction", type=int, default=1)
    p.add_argument("--time-steps", type=int)
    verb("concat", cmd_concat, "concatenate two space-time chains", files=("first", "second"))
    verb("reverse", cmd_reverse, "reverse a space-time chain in time")
    p = verb("rescale", cmd_rescale, "refine the time axis")
    p.add_argument("--factor", type=int, required=True)
    verb("flatnorm", cmd_flatnorm, "flat norm by exact ILP")
    verb("flatnorm0", cmd_flatnorm0, "boundaryless flat norm by exact ILP")
    p = verb("distlip", cmd_distlip, "deformation distance by exact ILP", files=("first", "second"))
    p.add_argument("--time-steps", type=int)
    p.add_argument("--budget")
    verb("verify-equality", cmd_verify_equality, "check dist_lip = flatnorm0 with certificates", files=("first", "second"))
    p = verb("deform", cmd_deform, "deform a cycle onto a coarser grid")
    p.add_argument("--coarsen", type=int, required=True)
    verb("fill", cmd_fill, "collapse a cycle through a filling")
    p = verb("bv", cmd_bv, "variation of a step function's graph")
    p.add_argument("--interval")
    p = sub.add_parser("check", help="run the acceptance suite")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--quick", action="store_true", help="smaller instance counts")
    p.add_argument("--only", help="comma-separated criterion numbers")
    p.add_argument("--output")
    p.set_defaults(fn=cmd_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        result = args.fn(args)
        if args.verb == "check":
            return 0 if result else 1
        emit(result, args)
        return 0
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, *DOMAIN_ERRORS) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
