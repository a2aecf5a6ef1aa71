"""The nine acceptance criteria, each at its stated tolerance.

Every test records a single ``criterion N: PASS|FAIL ...`` line (see conftest),
so the run ends with a compact scoreboard.
"""
from __future__ import annotations

import csv
import io
import json
import time

import numpy as np
import pytest

from gexpand.algebra import RatFunc
from gexpand.branches import AssembledSolution, GBranch, profile_jet
from gexpand.catalog import CASES
from gexpand.cli import main
from gexpand.engine import InadmissibleError, balance_degree, derive
from gexpand.reduction import (
    EQUATIONS, PdeSpec, apply_shift, c1_branches, integrate_once, make_traveling_ode, specialize_c1,
)
from gexpand.verify import (
    DEFAULT_TOL, FD_AGREEMENT, Grid, branch_solution, check_candidate, discrepancy_report,
    draw_parameters, equation_coeffs, residual_max, system_diff,
)


@pytest.fixture(scope="module")
def derivations():
    return {eq: derive(PdeSpec(eq)) for eq in EQUATIONS}


# 1 -----------------------------------------------------------------------------------
def test_criterion_1_riccati_certification(criterion):
    rng = np.random.Generator(np.random.PCG64(20240601))
    start = time.perf_counter()
    worst = 0.0
    checked = 0
    for case in CASES:
        for _ in range(100):
            p = draw_parameters(rng, ["lambda", "mu"], case)
            k1 = p["k1"] * rng.choice([-1.0, 1.0])
            k2 = p["k2"] * rng.choice([-1.0, 1.0])
            g = GBranch(p["lambda"], p["mu"], k1, k2)
            xi = rng.uniform(-8.0, 8.0, 200)
            _, den = profile_jet(g, "w", xi, 0)
            xi = xi[np.abs(den) > 1e-2][:50]
            assert xi.size == 50
            w, _ = profile_jet(g, "w", xi, 1)
            r = np.abs(w.derivative(1) + w.value ** 2 + g.lam * w.value + g.mu)
            worst = max(worst, float(r.max()))
            checked += xi.size
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-9 and elapsed < 1.0 and checked == 3 * 100 * 50
    criterion(1, ok, f"{checked} points, max |w'+w^2+lambda w+mu| = {worst:.2e}, {elapsed:.2f}s")
    assert worst <= 1e-9
    assert elapsed < 1.0


# 2 -----------------------------------------------------------------------------------
def test_criterion_2_balancing(criterion):
    found = {}
    for eq in EQUATIONS:
        pde = PdeSpec(eq)
        shifted = apply_shift(integrate_once(make_traveling_ode(pde)))
        found[eq] = {balance_degree(specialize_c1(shifted, b)) for b in c1_branches(shifted)}
    ok = found == {"burgers": {1}, "kdv": {2}, "kp": {2}}
    criterion(2, ok, f"m = {', '.join(f'{k}:{sorted(v)}' for k, v in found.items())}")
    assert ok


# 3 -----------------------------------------------------------------------------------
def test_criterion_3_leading_coefficients(criterion, derivations):
    checks = []
    for b in derivations["burgers"].branches:
        alpha, beta = b.omega.ring.vars("alpha", "beta")
        checks.append(b.coefficients[1] == RatFunc(2 * beta, alpha))
    for b in derivations["kdv"].branches:
        alpha, gamma, lam = b.omega.ring.vars("alpha", "gamma", "lambda")
        checks.append(b.coefficients[2] == RatFunc(-12 * gamma, alpha))
        checks.append(b.coefficients[1] == RatFunc(-12 * gamma * lam, alpha))
    for b in derivations["kp"].branches:
        k, lam = b.omega.ring.vars("k", "lambda")
        checks.append(b.coefficients[2] == RatFunc(-2 * k ** 2))
        checks.append(b.coefficients[1] == RatFunc(-2 * k ** 2 * lam))
    ok = all(checks)
    criterion(3, ok, f"{sum(checks)}/{len(checks)} exact equalities (2b/a; -12g/a, -12g*lam/a; -2k^2, -2k^2*lam)")
    assert ok


# 4 and 5 -----------------------------------------------------------------------------
def _engine_runs(derivations):
    """(equation, branch, case, draw, params) for 10 seeded draws per Delta case."""
    rng = np.random.Generator(np.random.PCG64(4))
    for eq, der in derivations.items():
        pde = der.pde
        symbols = list(pde.params) + ["lambda", "mu", "C"]
        for b in der.branches:
            for case in CASES:
                for i in range(10):
                    yield pde, b, case, i, draw_parameters(rng, symbols, case)


def test_criterion_4_engine_solutions(criterion, derivations):
    start = time.perf_counter()
    worst, ran, skipped, bad = 0.0, 0, [], []
    for pde, b, case, i, params in _engine_runs(derivations):
        rep = check_candidate(pde, lambda v, br=b: branch_solution(br, v), f"engine:{pde.equation}:{b.index}",
                              case, i, params, Grid.default(pde.equation), DEFAULT_TOL, False)
        if rep.status == "inadmissible":
            skipped.append((pde.equation, case))
            continue
        ran += 1
        if rep.classification != "PASS":
            bad.append((rep.id, case, i, rep.max_residual))
        else:
            worst = max(worst, rep.max_residual)
    elapsed = time.perf_counter() - start
    # Only the real-radical requirement of the Burgers branches may exclude draws.
    skips_ok = all(eq == "burgers" and case == "negative" for eq, case in skipped)
    ok = not bad and skips_ok and elapsed < 30.0
    criterion(4, ok, f"{ran} runs PASS (max rel. residual {worst:.2e}); "
                     f"{len(skipped)} Burgers Delta<0 draws inadmissible (sqrt(Delta)); {elapsed:.1f}s")
    assert not bad, bad[:5]
    assert skips_ok
    assert elapsed < 30.0


def test_criterion_5_discriminating_power(criterion, derivations):
    lowest, runs, weak = np.inf, 0, []
    for pde, b, case, i, params in _engine_runs(derivations):
        try:
            u = branch_solution(b, params)
        except InadmissibleError:
            continue            # same Burgers Delta < 0 draws as criterion 4
        bumped = AssembledSolution(u.equation, (u.coeffs[0] + 0.1,) + u.coeffs[1:], u.gbranch, u.wave,
                                   c1=u.c1)
        rep = residual_max(pde, bumped, Grid.default(pde.equation), equation_coeffs(pde, params))
        runs += 1
        lowest = min(lowest, rep.max_residual)
        if rep.max_residual <= 1e-3:
            weak.append((pde.equation, b.index, case, i, rep.max_residual))
    ok = not weak and runs > 0
    criterion(5, ok, f"{runs} perturbed runs, min residual {lowest:.2e} (> 1e-3 required)")
    assert not weak, weak[:5]


# 6 -----------------------------------------------------------------------------------
def test_criterion_6_catalog_classification(criterion):
    rows, disagreements, unclassified, verdicts = 0, [], [], {}
    for eq in EQUATIONS:
        rep = discrepancy_report(PdeSpec(eq), seed=0, draws=10)
        for fam in rep["families"]:
            if "/" in fam["id"]:
                continue            # corrected variants are extra, not part of the 12 x 3 table
            for row in fam["rows"]:
                rows += 1
                verdicts[(fam["id"], row["case"])] = row["classification"]
                if row["classification"] not in ("PASS", "FAIL"):
                    unclassified.append((fam["id"], row["case"]))
                for d in row["draws"]:
                    if d["status"] != "ok":
                        continue
                    if d["fd_agrees"] is not True:
                        disagreements.append((fam["id"], row["case"], d["draw"], d["cross_check_delta"]))
                    # FD must confirm the verdict: a PASS stays tiny, a FAIL stays large.
                    elif d["classification"] == "PASS" and d["fd_residual"] > FD_AGREEMENT:
                        disagreements.append((fam["id"], row["case"], d["draw"], d["fd_residual"]))
                    elif d["classification"] == "FAIL" and d["fd_residual"] <= DEFAULT_TOL:
                        disagreements.append((fam["id"], row["case"], d["draw"], d["fd_residual"]))
    passed = sorted(f"{i}{'+-0'[CASES.index(c)]}" for (i, c), v in verdicts.items() if v == "PASS")
    ok = rows == 36 and not unclassified and not disagreements
    criterion(6, ok, f"{rows} rows classified, FD agrees on every draw; PASS rows: {' '.join(passed) or 'none'}")
    assert rows == 36
    assert not unclassified
    assert not disagreements, disagreements[:5]


# 7 -----------------------------------------------------------------------------------
def test_criterion_7_system_diff(criterion, derivations):
    b_case = derivations["burgers"].cases[0].system
    k_case = derivations["kdv"].cases[0].system
    sizes_ok = len(b_case.equations) == 3 and len(k_case.equations) == 5
    ring_b = b_case.ring
    alpha, beta, a1 = ring_b.vars("alpha", "beta", "a1")
    top_b = b_case.equations[-1] == alpha * a1 * a1 / 2 - beta * a1
    ring_k = k_case.ring
    alpha, gamma, a2 = ring_k.vars("alpha", "gamma", "a2")
    top_k = k_case.equations[-1] == alpha * a2 * a2 / 2 + 6 * gamma * a2
    diffs = [system_diff(PdeSpec("burgers"), 0, derivations["burgers"]),
             system_diff(PdeSpec("kdv"), 0, derivations["kdv"])]
    emitted = all(len(d["rows"]) == d["engine_equations"] and all("delta" in r for r in d["rows"])
                  for d in diffs)
    burgers_top_printed = diffs[0]["rows"][0]["match"]
    mism = [sum(not r["match"] for r in d["rows"]) for d in diffs]
    ok = sizes_ok and top_b and top_k and emitted and burgers_top_printed
    criterion(7, ok, f"3 and 5 equations; top rows 1/2*alpha*a1^2 - beta*a1 and 1/2*alpha*a2^2 + 6*gamma*a2; "
                     f"diff emitted (mismatched printed rows: burgers {mism[0]}, kdv {mism[1]})")
    assert ok


# 8 -----------------------------------------------------------------------------------
def _read_csv(path):
    rows = [r for r in csv.reader(io.StringIO(path.read_text())) if r]
    header, data = rows[0], np.array(rows[1:], dtype=float)
    return header, data


def test_criterion_8_grid_sampling(criterion, tmp_path):
    start = time.perf_counter()
    u11 = tmp_path / "u11.csv"
    u24 = tmp_path / "u24.csv"
    c1 = main(["sample", "--family", "U11", "--params", "alpha=2,beta=1,lambda=5,mu=4,C=2,k1=2,k2=2",
               "--out", str(u11)])
    c8 = main(["sample", "--family", "U24", "--params", "alpha=1/2,gamma=1,lambda=2,mu=1/2,C=0.1,k1=1,k2=0",
               "--out", str(u24)])
    elapsed = time.perf_counter() - start
    _, d1 = _read_csv(u11)
    _, d8 = _read_csv(u24)
    finite = bool(np.isfinite(d1).all() and np.isfinite(d8).all() and len(d1) > 0 and len(d8) > 0)
    # At t = 0 the wave variable is x itself.
    prof = d8[d8[:, 1] == 0.0]
    u = prof[np.argsort(prof[:, 0]), 2]
    peak = int(np.argmax(u))
    interior = 0 < peak < len(u) - 1
    # Non-strict: far tails saturate (tanh^2 rounds to 1) and repeat the same float.
    left, right = np.diff(u[:peak + 1]), np.diff(u[peak:])
    mono = bool(np.all(left >= 0) and np.all(right <= 0)
                and u[peak] - u[0] > 1.0 and u[peak] - u[-1] > 1.0)
    ok = c1 == 0 and c8 == 0 and finite and interior and mono and elapsed < 5.0
    criterion(8, ok, f"U11 {len(d1)} pts, U24 {len(d8)} pts, all finite; U24 t=0 hump peak "
                     f"{u[peak]:.3g} at x={prof[np.argsort(prof[:, 0])][peak, 0]:.3g}; {elapsed:.2f}s")
    assert ok


# 9 -----------------------------------------------------------------------------------
def test_criterion_9_determinism(criterion, tmp_path):
    commands = {
        "derive.json": ["derive", "--equation", "kp"],
        "verify.json": ["verify", "--family", "U23", "--seed", "123", "--draws", "3"],
        "sample.csv": ["sample", "--family", "U24",
                       "--params", "alpha=1/2,gamma=1,lambda=2,mu=1/2,C=0.1,k1=1,k2=0"],
        "report.json": ["report", "--equation", "kdv", "--seed", "99", "--draws", "2",
                        "--grid", "x=-10:10:32,t=0:4:16"],
    }
    same = {}
    for name, argv in commands.items():
        blobs = []
        for rep in range(2):
            out = tmp_path / f"{rep}-{name}"
            main(argv + ["--out", str(out)])
            blobs.append(out.read_bytes())
        same[name] = blobs[0] == blobs[1] and len(blobs[0]) > 0
        if name.endswith(".json"):
            json.loads(blobs[0])
    ok = all(same.values())
    criterion(9, ok, "byte-identical reruns: " + ", ".join(f"{k}={'yes' if v else 'NO'}" for k, v in same.items()))
    assert ok
