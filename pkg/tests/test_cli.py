import json
import subprocess
import sys

import pytest

from bvcurrents.bv import cantor_stage
from bvcurrents.chains import Chain, Grid, chain_from_dict, dumps, mass
from bvcurrents.fixtures import square_cycle, translated_cycles, unit_square
from bvcurrents.spacetime import SpacetimeChain, stationary
from bvcurrents.transform import SweepPlan, one_flip_schedule


def run(*args, cwd=None):
    return subprocess.run(
        [sys.executable, "-m", "bvcurrents", *map(str, args)], capture_output=True, text=True, cwd=cwd
    )


def ok(*args, **kw):
    proc = run(*args, **kw)
    assert proc.returncode == 0, proc.stderr
    return json.loads(proc.stdout)


@pytest.fixture
def files(tmp_path):
    T0, T1 = translated_cycles()
    g = T0.grid
    paths = {
        "T0": T0,
        "T1": T1,
        "fill": unit_square(g, (1, 0)) - unit_square(g, (0, 0)),
        "edge": Chain.cell(g, (0, 0), (0,)),
    }
    out = {}
    for name, chain in paths.items():
        p = tmp_path / f"{name}.json"
        p.write_text(dumps(chain))
        out[name] = p
    out["S"] = tmp_path / "S.json"
    out["S"].write_text(stationary(T0, 2).dumps())
    plan = SweepPlan(T0, chain_from_dict(json.loads(out["fill"].read_text())), (), 1)
    plan = SweepPlan(plan.base, plan.fill, one_flip_schedule(plan.fill), 2)
    out["plan"] = tmp_path / "plan.json"
    out["plan"].write_text(json.dumps(plan.to_dict()))
    out["u"] = tmp_path / "u.json"
    out["u"].write_text(cantor_stage(2).dumps())
    out["dir"] = tmp_path
    return out


def test_var_of_prism_is_zero(files):
    assert ok("var", files["S"], "--interval", "0,1") == {"value": "0"}
    assert ok("var", files["S"], "--interval", "0,1oo", "--boundary") == {"value": "0"}
    assert ok("var", files["S"], "--boundary") == {"value": "8"}


def test_verify_equality_on_translated_cycles(files):
    rep = ok("verify-equality", files["T0"], files["T1"])
    assert rep["value"] == "2" and rep["equal"] is True


def test_mass_boundary_and_round_trip(files):
    assert ok("mass", files["fill"]) == {"value": "2"}
    bd = ok("boundary", files["fill"])
    T0, T1 = translated_cycles()
    assert chain_from_dict(bd) == T1 - T0
    again = files["dir"] / "bd.json"
    again.write_text(json.dumps(bd))
    # the shared edge carries coefficient -2
    assert ok("mass", again) == {"value": "8"}


def test_sweep_and_space_time_verbs_round_trip(files):
    d = files["dir"]
    proc = run("sweep", files["plan"], "--output", d / "sw.json")
    assert proc.returncode == 0 and proc.stdout == ""
    sw = d / "sw.json"
    data = json.loads(sw.read_text())
    assert SpacetimeChain.from_dict(data).to_dict() == data
    assert ok("var", sw) == {"value": "2"}
    S2 = ok("sweep", files["T0"], files["fill"], "--time-steps", "3")
    assert ok("var", _write(d / "s2.json", S2)) == {"value": "2"}
    sl = ok("slice", sw, "--time", "1/8")
    assert chain_from_dict(sl) == translated_cycles()[0]
    assert chain_from_dict(ok("slice", sw, "--time", "1", "--side", "left")) == translated_cycles()[1]
    proj = ok("project", sw)
    assert mass(chain_from_dict(proj)) == 2
    rev = _write(d / "rev.json", ok("reverse", sw))
    assert chain_from_dict(ok("slice", rev, "--time", "0", "--side", "right")) == translated_cycles()[1]
    resc = ok("rescale", sw, "--factor", "3")
    assert len(resc["grid"]["extents"]) == 3 and resc["grid"]["extents"][0] == 12
    back = _write(d / "back.json", ok("sweep", files["T1"], _write(d / "negfill.json", _neg(files["fill"]))))
    cat = ok("concat", sw, back)
    assert ok("var", _write(d / "cat.json", cat)) == {"value": "4"}


def _write(path, data):
    path.write_text(json.dumps(data))
    return path


def _neg(path):
    from bvcurrents.chains import chain_to_dict

    return chain_to_dict(-chain_from_dict(json.loads(path.read_text())))


def test_prism_verbs(files):
    W = ok("prism", files["T0"], "--axis", "0", "--direction", "1")
    assert chain_from_dict(W) == chain_from_dict(json.loads(files["fill"].read_text()))
    P = ok("prism", files["T0"], "--time-steps", "4")
    assert P["grid"]["extents"][0] == 4 and P["time_axis"] == 0


def test_solver_verbs(files):
    T0, T1 = translated_cycles()
    diff = _write(files["dir"] / "diff.json", json.loads(dumps(T1 - T0)))
    f = ok("flatnorm", diff)
    assert f["value"] == "2" and f["status"] == "Optimal"
    f0 = ok("flatnorm0", diff)
    assert f0["value"] == "2" and set(f0["witness"]) == {"Q"}
    d = ok("distlip", files["T0"], files["T1"])
    assert d["value"] == "2" and d["columns"] == 2 and d["budget"] == "1"
    d3 = ok("distlip", files["T0"], files["T1"], "--time-steps", "3", "--budget", "2")
    assert d3["value"] == "2"


def test_deform_and_fill(files):
    sq = _write(files["dir"] / "sq.json", json.loads(dumps(square_cycle(Grid.make([4, 4])))))
    r = ok("deform", sq, "--coarsen", "2")
    assert r["mass_P"] == "0" and r["var_S"] == "1" and r["ratio_S"] == "1/8"
    fill = ok("fill", files["T0"])
    assert fill["value"] == "1"


def test_bv_verb(files):
    r = ok("bv", files["u"])
    assert r["value"] == "1" == r["pointwise"]
    r = ok("bv", files["u"], "--interval", "0,1/3")
    assert r["value"] == "1/2"


def test_decimal_flag_marks_approximations(files):
    r = ok("bv", files["u"], "--interval", "0,1/3", "--decimal")
    assert r["value"] == "1/2" and r["value_approx"] == 0.5


def test_grid_flag_checks_compatibility(files):
    assert ok("mass", files["T0"], "--grid", "3x3") == {"value": "4"}
    proc = run("mass", files["T0"], "--grid", "4x4")
    assert proc.returncode == 1 and "grid" in proc.stderr
    assert ok("var", files["S"], "--grid", "3x3") == {"value": "0"}


@pytest.mark.parametrize(
    "args",
    [
        ("mass", "missing.json"),
        ("mass", "T0", "--bogus"),
        ("frobnicate",),
        ("slice", "S"),
        ("var", "S", "--interval", "1"),
        ("check", "--only", "99"),
    ],
)
def test_usage_errors_exit_two(files, args):
    args = [files.get(a, a) for a in args]
    proc = run(*args)
    assert proc.returncode == 2, proc.stderr
    assert proc.stdout == ""


@pytest.mark.parametrize(
    "args,needle",
    [
        (("slice", "S", "--time", "1/2"), "jump time"),
        (("flatnorm0", "edge"), "zero boundary"),
        (("distlip", "T0", "T1", "--time-steps", "1", "--budget", "1"), "Infeasible"),
        (("deform", "T0", "--coarsen", "2"), "divisible"),
        (("concat", "S", "plan"), ""),
        (("sweep", "edge", "fill"), "zero boundary"),
    ],
)
def test_domain_errors_exit_one(files, args, needle):
    args = [files.get(a, a) for a in args]
    proc = run(*args)
    assert proc.returncode == 1, proc.stderr
    assert needle in proc.stderr


def test_malformed_chain_file_is_a_domain_error(files):
    bad = files["dir"] / "bad.json"
    bad.write_text('{"grid": {"spacing": ["1"], "origin": ["0"], "extents": [2]}, "k": 1, "cells": [{"anchor": [5], "axes": [0], "coeff": 1}]}')
    proc = run("mass", bad)
    assert proc.returncode == 1 and "outside the grid" in proc.stderr


def test_outputs_are_deterministic(files):
    a = run("distlip", files["T0"], files["T1"]).stdout
    b = run("distlip", files["T0"], files["T1"]).stdout
    assert a == b


def test_check_transcript_is_deterministic():
    a = run("check", "--seed", "7", "--quick", "--only", "1,2,5,10")
    b = run("check", "--seed", "7", "--quick", "--only", "1,2,5,10")
    assert a.returncode == 0
    assert a.stdout == b.stdout
    assert a.stdout.endswith("4/4 criteria passed\n")
    assert all(line.startswith("[PASS]") for line in a.stdout.splitlines()[:-1])
