from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gexpand.branches import AssembledSolution, GBranch
from gexpand.engine import derive
from gexpand.reduction import PdeSpec
from gexpand.verify import (
    STENCILS, EmptyGridError, Grid, branch_solution, central_weights, check_candidate, csv_text,
    discrepancy_report, draw_parameters, family_solution, residual_max, summarize, system_diff,
)
from gexpand.catalog import find_family

SMALL = {"burgers": "x=-10:10:24,t=0:4:12", "kdv": "x=-10:10:24,t=0:4:12",
         "kp": "x=-10:10:12,t=0:4:6,y=-5:5:6"}


def _grid(eq):
    return Grid.parse(SMALL[eq], eq)


# -- grids --------------------------------------------------------------------------
def test_default_grids():
    g = Grid.default("kdv")
    assert (g.x.lo, g.x.hi, g.x.count, g.t.lo, g.t.hi, g.t.count) == (-10, 10, 64, 0, 4, 64)
    assert g.y is None
    kp = Grid.default("kp")
    assert (kp.y.lo, kp.y.hi, kp.y.count) == (-5, 5, 32)


def test_grid_parse_and_points():
    g = Grid.parse("x=0:1:3,t=0:2:2", "kdv")
    X, T, Y = g.points()
    assert X.tolist() == [0, 0.5, 1, 0, 0.5, 1]
    assert T.tolist() == [0, 0, 0, 2, 2, 2]
    for bad in ("x=0:1:1", "x=1:0:4", "x=0:1", "q=0:1:3", "y=0:1:3"):
        with pytest.raises(ValueError):
            Grid.parse(bad, "kdv")


def test_central_weights_exact_on_polynomials():
    for n, (offs, w) in STENCILS.items():
        for p in range(len(offs)):
            val = float(np.dot(w, offs.astype(float) ** p))
            expected = float(np.prod(np.arange(p - n + 1, p + 1))) if p == n else 0.0
            assert val == pytest.approx(expected, abs=1e-9)
    offs, w = central_weights(1, 3)
    assert w[offs == 1][0] == pytest.approx(45 / 60)


# -- residuals ------------------------------------------------------------------------
def test_constant_has_zero_residual():
    pde = PdeSpec("burgers")
    u = AssembledSolution("burgers", (0.0, 0.0), GBranch(1.0, 0.1, 1.0, 0.0), (1.0, 0.0, -2.0), c1=3.0)
    rep = residual_max(pde, u, _grid("burgers"), {"alpha": 1.3, "beta": 0.7})
    assert rep.max_residual == 0.0 and rep.classification == "PASS"


def test_classification_is_exact_threshold():
    pde = PdeSpec("kdv")
    b = derive(pde).branches[1]
    vals = {"alpha": 1.0, "gamma": 1.0, "lambda": 1.0, "mu": 0.1, "k1": 1.0, "k2": 0.5}
    u = branch_solution(b, vals)
    rep = residual_max(pde, u, _grid("kdv"), {"alpha": 1.0, "gamma": 1.0})
    again = residual_max(pde, u, _grid("kdv"), {"alpha": 1.0, "gamma": 1.0}, tol=rep.max_residual)
    assert again.classification == "PASS"
    if rep.max_residual > 0:
        below = residual_max(pde, u, _grid("kdv"), {"alpha": 1.0, "gamma": 1.0},
                             tol=rep.max_residual * 0.999)
        assert below.classification == "FAIL"


def test_empty_grid():
    pde = PdeSpec("burgers")
    u = AssembledSolution("burgers", (0.0, 1.0), GBranch(2.0, 1.0, 1.0, 1.0), (1.0, 0.0, 0.0))
    # both x values sit on the pole xi = -1 to within rounding
    g = Grid.parse("x=-1.0000000000000002:-1:2,t=0:1:2", "burgers")
    with pytest.raises(EmptyGridError):
        residual_max(pde, u, g, {"alpha": 1.0, "beta": 1.0})


@pytest.mark.parametrize("eq", ["burgers", "kdv", "kp"])
def test_engine_branches_pass_and_perturbation_fails(eq):
    pde = PdeSpec(eq)
    rng = np.random.Generator(np.random.PCG64(11))
    symbols = list(pde.params) + ["lambda", "mu", "C"]
    for b in derive(pde).branches:
        params = draw_parameters(rng, symbols, "positive")
        u = branch_solution(b, params)
        coeffs = {p: params[p] for p in pde.params}
        rep = residual_max(pde, u, _grid(eq), coeffs, fd=True)
        assert rep.max_residual <= 1e-9
        assert rep.fd_agrees in (True, None)
        bumped = AssembledSolution(u.equation, (u.coeffs[0] + 0.1,) + u.coeffs[1:], u.gbranch, u.wave,
                                   c1=u.c1)
        assert residual_max(pde, bumped, _grid(eq), coeffs).max_residual > 1e-3


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2 ** 32), st.sampled_from(["positive", "negative", "zero"]))
def test_soundness_across_draws(seed, case):
    """A passing printed row passes on every admissible draw; a failing one fails far above tol."""
    pde = PdeSpec("kdv")
    rng = np.random.Generator(np.random.PCG64(seed))
    fam = find_family("U21")
    res = []
    for i in range(3):
        params = draw_parameters(rng, fam.symbols, case)
        rep = check_candidate(pde, lambda v: family_solution(fam, case, v), fam.id, case, i, params,
                              _grid("kdv"), 1e-7, False)
        if rep.max_residual is not None:
            res.append(rep.max_residual)
    if res and min(res) <= 1e-7:
        assert max(res) <= 1e-6


def test_draw_parameters_fix_case():
    rng = np.random.Generator(np.random.PCG64(0))
    for case in ("positive", "negative", "zero"):
        for _ in range(20):
            p = draw_parameters(rng, ["alpha", "lambda", "mu"], case)
            assert GBranch(p["lambda"], p["mu"], p["k1"], p["k2"]).case == case
            assert 0.5 <= p["alpha"] <= 3.0


def test_summarize_verdicts():
    pde = PdeSpec("burgers")
    b = derive(pde).branches[0]
    rng = np.random.Generator(np.random.PCG64(3))
    reps = [check_candidate(pde, lambda v: branch_solution(b, v), "e", "negative", i,
                            draw_parameters(rng, ["alpha", "beta", "lambda", "mu"], "negative"),
                            _grid("burgers"), 1e-7, False) for i in range(3)]
    # Burgers branches need sqrt(Delta): every negative-case draw is inadmissible
    assert all(r.status == "inadmissible" for r in reps)
    assert summarize(reps)["classification"] == "SKIP"


# -- report -------------------------------------------------------------------------
def test_report_deterministic_and_fd_consistent():
    pde = PdeSpec("kdv")
    a = discrepancy_report(pde, seed=5, draws=2, grid=_grid("kdv"))
    b = discrepancy_report(pde, seed=5, draws=2, grid=_grid("kdv"))
    assert json.dumps(a) == json.dumps(b)
    for entry in a["families"] + a["engine"]:
        for row in entry["rows"]:
            assert row["classification"] in ("PASS", "FAIL", "SKIP")
            for d in row["draws"]:
                if d["fd_agrees"] is not None:
                    assert d["fd_agrees"]
    assert all(row["classification"] == "PASS" for e in a["engine"] for row in e["rows"])


def test_system_diff_burgers():
    diff = system_diff(PdeSpec("burgers"), 0)
    assert diff["engine_equations"] == diff["printed_equations"] == 3
    top = diff["rows"][0]
    assert top["power"] == 2 and top["match"]
    assert not all(r["match"] for r in diff["rows"])


def test_rejects_nonpositive_tol():
    with pytest.raises(ValueError):
        discrepancy_report(PdeSpec("kdv"), tol=0.0)


# -- CSV ----------------------------------------------------------------------------
def test_csv_blank_line_conventions():
    g = Grid.parse("x=0:2:3,t=0:1:2", "kdv")
    X, T, Y = g.points()
    U = np.arange(6.0)
    ok = np.array([True, False, True, True, True, True])
    text = csv_text(g, X, T, Y, U, ok)
    assert text.splitlines() == ["x,t,u", "0,0,0", "", "2,0,2", "", "0,1,3", "1,1,4", "2,1,5", ""]


def test_csv_kp_has_y_column():
    g = Grid.parse("x=0:1:2,t=0:1:2,y=0:1:2", "kp")
    X, T, Y = g.points()
    text = csv_text(g, X, T, Y, np.zeros(X.size), np.ones(X.size, bool))
    assert text.startswith("x,t,y,u\n")
