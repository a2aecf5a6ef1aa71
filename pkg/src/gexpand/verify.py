"""PDE residuals on grids, a finite-difference oracle, and the discrepancy report."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from .algebra import RatFunc, Ring
from .branches import POLE_TOL, AssembledSolution, GBranch, SolutionMap, assemble_u
from .catalog import (CASES, NonRealError, PaperFamily, corrected_variants, numeric_row,
                      paper_catalog, printed_system)
from .engine import CoefficientBranch, InadmissibleError, derive
from .reduction import PdeSpec

DEFAULT_TOL = 1e-7
FD_AGREEMENT = 1e-4
PARAM_RANGE = (0.5, 3.0)


class EmptyGridError(ValueError):
    """Every grid point was a pole (or the grid had no points)."""


# -- grids --------------------------------------------------------------------------
@dataclass(frozen=True)
class Axis:
    name: str
    lo: float
    hi: float
    count: int

    def __post_init__(self):
        if self.count < 2:
            raise ValueError(f"axis {self.name}: need at least 2 points")
        if not self.hi > self.lo:
            raise ValueError(f"axis {self.name}: max must exceed min")

    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.count)

    def spec(self) -> str:
        return f"{self.name}={self.lo:g}:{self.hi:g}:{self.count}"


@dataclass(frozen=True)
class Grid:
    x: Axis
    t: Axis
    y: Axis | None = None

    @classmethod
    def default(cls, equation: str) -> "Grid":
        y = Axis("y", -5.0, 5.0, 32) if equation == "kp" else None
        return cls(Axis("x", -10.0, 10.0, 64), Axis("t", 0.0, 4.0, 64), y)

    @classmethod
    def parse(cls, text: str, equation: str) -> "Grid":
        """``x=min:max:n[,t=...][,y=...]``; unspecified axes keep their defaults."""
        base = cls.default(equation)
        axes = {"x": base.x, "t": base.t, "y": base.y}
        for part in filter(None, (p.strip() for p in text.split(","))):
            name, _, rng = part.partition("=")
            name = name.strip()
            if name not in axes:
                raise ValueError(f"unknown grid axis {name!r}")
            if name == "y" and equation != "kp":
                raise ValueError(f"{equation} has no y axis")
            bits = rng.split(":")
            if len(bits) != 3:
                raise ValueError(f"grid axis {name!r}: expected min:max:count")
            axes[name] = Axis(name, float(Fraction(bits[0])), float(Fraction(bits[1])), int(bits[2]))
        if equation != "kp":
            axes["y"] = None
        elif axes["y"] is None:
            axes["y"] = Axis("y", -5.0, 5.0, 32)
        return cls(axes["x"], axes["t"], axes["y"])

    def axes(self) -> list[Axis]:
        return [a for a in (self.x, self.t, self.y) if a is not None]

    def points(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Flattened (x, t, y) with x varying fastest, then t, then y."""
        ys = self.y.values() if self.y is not None else np.zeros(1)
        Y, T, X = np.meshgrid(ys, self.t.values(), self.x.values(), indexing="ij")
        return X.ravel(), T.ravel(), Y.ravel()

    def spec(self) -> str:
        return ",".join(a.spec() for a in self.axes())


# -- residuals ----------------------------------------------------------------------
def operator_terms(pde: PdeSpec, coeffs: Mapping[str, float], d) -> list[np.ndarray]:
    """Additive terms of the PDE operator from partial derivatives ``d``.

    ``d`` maps (nx, ny, nt) to arrays; ``(0, 0, 0)`` is u itself.
    """
    u = d[(0, 0, 0)]
    if pde.equation == "burgers":
        return [d[(0, 0, 1)], coeffs["alpha"] * u * d[(1, 0, 0)], coeffs["beta"] * d[(2, 0, 0)]]
    if pde.equation == "kdv":
        return [d[(0, 0, 1)], coeffs["alpha"] * u * d[(1, 0, 0)], coeffs["gamma"] * d[(3, 0, 0)]]
    ux = d[(1, 0, 0)]
    return [d[(1, 0, 1)], 6.0 * ux * ux, 6.0 * u * d[(2, 0, 0)], d[(4, 0, 0)],
            3.0 * pde.sigma2 * d[(0, 2, 0)]]


NEEDED = {
    "burgers": [(0, 0, 0), (1, 0, 0), (2, 0, 0), (0, 0, 1)],
    "kdv": [(0, 0, 0), (1, 0, 0), (3, 0, 0), (0, 0, 1)],
    "kp": [(0, 0, 0), (1, 0, 0), (2, 0, 0), (4, 0, 0), (1, 0, 1), (0, 2, 0)],
}


def relative_residual(terms: list[np.ndarray]) -> np.ndarray:
    """|sum of terms| / (1 + largest term magnitude), pointwise."""
    stack = np.abs(np.stack(terms))
    return np.abs(np.sum(terms, axis=0)) / (1.0 + stack.max(axis=0))


def jet_partials(sol: SolutionMap, pde: PdeSpec, x, t, y):
    order = max(sum(n) for n in NEEDED[pde.equation])
    u, ok = sol.xi_jet(sol.xi(x, t, y), order)
    cx, cy, ct = sol.wave
    d = {}
    for nx, ny, nt in NEEDED[pde.equation]:
        n = nx + ny + nt
        d[(nx, ny, nt)] = (cx ** nx) * (cy ** ny) * (ct ** nt) * u.derivative(n)
    return d, ok


def central_weights(deriv: int, reach: int) -> tuple[np.ndarray, np.ndarray]:
    """Central finite-difference weights on offsets -reach..reach."""
    offsets = np.arange(-reach, reach + 1, dtype=float)
    A = np.vander(offsets, increasing=True).T
    rhs = np.zeros(len(offsets))
    rhs[deriv] = math.factorial(deriv)
    return offsets, np.linalg.solve(A, rhs)


# 6th-order accurate central stencils: 7 points for orders 1-2, 9 for 3-4.
STENCILS = {n: central_weights(n, 3 if n <= 2 else 4) for n in range(1, 5)}


# Step per derivative order, in units of the coordinate's length scale.  Higher
# orders need larger steps to keep roundoff (~ eps / h^n) below truncation.
FD_STEP = {1: 0.02, 2: 0.03, 3: 0.04, 4: 0.05}
FD_MARGIN = 30.0


def fd_partials(sol: SolutionMap, pde: PdeSpec, x, t, y, scales):
    """Partials by tensor-product central differences on u(x, y, t) values.

    ``scales`` gives the length scale of each axis (x, y, t).
    """
    d = {}
    ok = np.ones(np.shape(x), dtype=bool)
    for orders in NEEDED[pde.equation]:
        acc = np.zeros(np.shape(x))
        parts, steps = [], []
        for n, scale in zip(orders, scales):
            parts.append(STENCILS[n] if n else (np.zeros(1), np.ones(1)))
            steps.append(FD_STEP[n] * scale if n else 0.0)
        hx, hy, ht = steps
        for ox, wx in zip(*parts[0]):
            for oy, wy in zip(*parts[1]):
                for ot, wt in zip(*parts[2]):
                    u, good = sol.values(x + ox * hx, t + ot * ht, y + oy * hy)
                    ok &= good
                    acc = acc + (wx * wy * wt) * np.where(good, u, 0.0)
        denom = 1.0
        for n, h in zip(orders, steps):
            if n:
                denom *= h ** n
        d[orders] = acc / denom
    return d, ok


@dataclass
class ResidualReport:
    id: str
    case: str
    draw: int
    params: dict
    status: str                     # ok | inadmissible | non-real | empty
    max_residual: float | None
    classification: str             # PASS | FAIL | SKIP
    tol: float
    points: int = 0
    poles_masked: int = 0
    fd_residual: float | None = None
    cross_check_delta: float | None = None
    fd_agrees: bool | None = None
    note: str = ""

    def to_dict(self) -> dict:
        out = asdict(self)
        for key in ("max_residual", "fd_residual", "cross_check_delta"):
            if out[key] is not None:
                out[key] = float(f"{out[key]:.6e}")
        out["params"] = {k: float(f"{v:.12g}") for k, v in self.params.items()}
        return out


def _fd_check(sol: SolutionMap, pde: PdeSpec, X, T, Y, coeffs, valid, samples: int = 48):
    """Jet vs finite-difference residuals on a strided subset away from poles."""
    g = sol.family.gbranch
    cx, cy, ct = sol.wave
    kappa = max(g.theta, 1.0)
    scales = tuple(1.0 / max(1.0, abs(c) * kappa) for c in (cx, cy, ct))
    # Largest xi-step of any stencil; near a simple pole the relative
    # truncation error scales like (h/d)^6, so stay FD_MARGIN steps away.
    h_xi = FD_STEP[4] * max(abs(c) * s for c, s in zip((cx, cy, ct), scales))
    xi = sol.xi(X, T, Y)
    margin = np.ones_like(valid)
    if xi.size:
        for p in g.poles(float(xi.min()) - 1.0, float(xi.max()) + 1.0):
            margin &= np.abs(xi - p) > FD_MARGIN * h_xi
    idx = np.flatnonzero(valid & margin)
    if idx.size == 0:
        return None, None
    idx = idx[np.linspace(0, idx.size - 1, min(samples, idx.size)).astype(int)]
    x, t, y = X[idx], T[idx], Y[idx]
    dj, _ = jet_partials(sol, pde, x, t, y)
    dfd, ok = fd_partials(sol, pde, x, t, y, scales)
    if not np.any(ok):
        return None, None
    rj = relative_residual(operator_terms(pde, coeffs, dj))[ok]
    rf = relative_residual(operator_terms(pde, coeffs, dfd))[ok]
    return float(rf.max()), float(np.max(np.abs(rj - rf)))


def residual_max(pde: PdeSpec, u: AssembledSolution, grid: Grid, coeffs: Mapping[str, float],
                 tol: float = DEFAULT_TOL, fd: bool = False, id: str = "", case: str = "",
                 draw: int = 0, params: Mapping[str, float] | None = None) -> ResidualReport:
    """Max pointwise relative residual of ``u`` over the non-pole grid points."""
    sol = assemble_u(u)
    X, T, Y = grid.points()
    d, ok = jet_partials(sol, pde, X, T, Y)
    res = relative_residual(operator_terms(pde, coeffs, d))
    valid = ok & np.isfinite(res)
    if not np.any(valid):
        raise EmptyGridError(f"{id or 'solution'}: every grid point is a pole")
    worst = float(res[valid].max())
    rep = ResidualReport(id=id, case=case or u.gbranch.case, draw=draw, params=dict(params or {}),
                         status="ok", max_residual=worst,
                         classification="PASS" if worst <= tol else "FAIL", tol=tol,
                         points=int(valid.sum()), poles_masked=int((~valid).sum()))
    if fd:
        fd_res, delta = _fd_check(sol, pde, X, T, Y, coeffs, valid)
        rep.fd_residual, rep.cross_check_delta = fd_res, delta
        rep.fd_agrees = None if delta is None else bool(delta <= FD_AGREEMENT)
    return rep


# -- parameter draws ----------------------------------------------------------------
def draw_parameters(rng: np.random.Generator, symbols: Iterable[str], case: str) -> dict[str, float]:
    """Uniform draws in [1/2, 3]; lambda gets a random sign; mu fixes the Delta case."""
    lo, hi = PARAM_RANGE
    out = {}
    for name in symbols:
        if name in ("mu", "sigma2"):
            continue
        v = float(rng.uniform(lo, hi))
        if name == "lambda":
            v = v if rng.random() < 0.5 else -v
        out[name] = v
    lam = out.setdefault("lambda", float(rng.uniform(lo, hi)))
    delta = {"positive": 1.0, "negative": -1.0, "zero": 0.0}[case] * float(rng.uniform(lo, hi))
    out["mu"] = (lam * lam - delta) / 4.0
    for name in ("k1", "k2"):
        out[name] = float(rng.uniform(lo, hi))
    return out


def equation_coeffs(pde: PdeSpec, values: Mapping[str, float]) -> dict[str, float]:
    return {p: float(values[p]) for p in pde.params}


def gbranch_from(values: Mapping[str, float]) -> GBranch:
    return GBranch(float(values["lambda"]), float(values["mu"]), float(values["k1"]), float(values["k2"]))


def branch_solution(branch: CoefficientBranch, values: Mapping[str, float]) -> AssembledSolution:
    num = branch.numeric({k: v for k, v in values.items()})
    return AssembledSolution(branch.equation, tuple(num["coeffs"]), gbranch_from(values),
                             tuple(num["wave"]), c1=num["c1"], profile="w",
                             label=f"engine:{branch.equation}:{branch.index}")


def family_solution(family: PaperFamily, case: str, values: Mapping[str, float]) -> AssembledSolution:
    vals = dict(values)
    if family.equation == "kp":
        vals.setdefault("sigma2", 1.0)
    coeffs, wave = numeric_row(family, case, vals)
    g = gbranch_from(values)
    if g.case != case:
        raise InadmissibleError(f"parameters select the {g.case} case, not {case}")
    return AssembledSolution(family.equation, coeffs, g, wave, profile=family.row(case).profile,
                             label=family.id)


def _skip(id, case, draw, params, status, note, tol) -> ResidualReport:
    cls = "FAIL" if status == "non-real" else "SKIP"
    return ResidualReport(id=id, case=case, draw=draw, params=dict(params), status=status,
                          max_residual=None, classification=cls, tol=tol, note=note)


def check_candidate(pde: PdeSpec, make, id: str, case: str, draw: int, params, grid: Grid,
                    tol: float, fd: bool) -> ResidualReport:
    try:
        sol = make(params)
    except NonRealError as exc:
        return _skip(id, case, draw, params, "non-real", str(exc), tol)
    except (InadmissibleError, ZeroDivisionError, ValueError) as exc:
        return _skip(id, case, draw, params, "inadmissible", str(exc), tol)
    try:
        return residual_max(pde, sol, grid, equation_coeffs(pde, params), tol=tol, fd=fd,
                            id=id, case=case, draw=draw, params=params)
    except EmptyGridError as exc:
        return _skip(id, case, draw, params, "empty", str(exc), tol)


def summarize(reports: list[ResidualReport]) -> dict:
    """Row verdict: PASS iff every admissible draw passes; FAIL if any fails."""
    ran = [r for r in reports if r.classification != "SKIP"]
    if not ran:
        verdict = "SKIP"
    else:
        verdict = "PASS" if all(r.classification == "PASS" for r in ran) else "FAIL"
    res = [r.max_residual for r in ran if r.max_residual is not None]
    deltas = [r.cross_check_delta for r in ran if r.cross_check_delta is not None]
    return {
        "classification": verdict,
        "max_residual": float(f"{max(res):.6e}") if res else None,
        "min_residual": float(f"{min(res):.6e}") if res else None,
        "draws_run": len(ran),
        "fd_max_delta": float(f"{max(deltas):.6e}") if deltas else None,
        "fd_agrees": all(r.fd_agrees is not False for r in ran),
    }


# -- system diff --------------------------------------------------------------------
def _union_ring(a: Ring, b: Ring) -> Ring:
    return a.extend(*[s for s in b.symbols if s not in a])


def system_diff(pde: PdeSpec, case_index: int, derivation=None) -> dict:
    """Row-by-row comparison of the engine's system with the printed one."""
    der = derivation or derive(pde)
    case = der.cases[case_index]
    printed = printed_system(pde.equation, case_index + 1)
    eng_ring = case.system.ring
    p_ring = next(iter(printed.rows.values())).ring
    ring = _union_ring(eng_ring, p_ring)
    rows = []
    eng_rows = dict(case.system.rows())
    for power in sorted(set(eng_rows) | set(printed.rows), reverse=True):
        e = eng_rows.get(power)
        p = printed.rows.get(power)
        if p is not None and "sigma2" in p_ring:
            p = p.subs({"sigma2": pde.sigma2})
        e_u = e.embed(ring) if e is not None else ring.zero()
        p_u = p.embed(ring) if p is not None else ring.zero()
        delta = e_u - p_u
        rows.append({"power": power, "engine": str(e) if e is not None else None,
                     "printed": str(p) if p is not None else None,
                     "delta": str(delta), "match": delta.is_zero()})
    out = {"c1_case": case_index + 1, "engine_equations": len(eng_rows),
           "printed_equations": len(printed.rows), "rows": rows,
           "notes": list(printed.notes)}
    if printed.c1_printed is not None and case.phi.c1_value is not None:
        pc = printed.c1_printed
        if "sigma2" in p_ring:
            pc = RatFunc(pc.num.subs({"sigma2": pde.sigma2}), pc.den.subs({"sigma2": pde.sigma2}))
        ec = case.phi.c1_value
        e_c, p_c = ec.embed(ring), pc.embed(ring)
        out["c1"] = {"engine": str(ec), "printed": str(printed.c1_printed), "match": e_c == p_c}
    return out


# -- the report ---------------------------------------------------------------------
def discrepancy_report(pde: PdeSpec, tol: float = DEFAULT_TOL, seed: int = 0, draws: int = 10,
                       grid: Grid | None = None, fd: bool = True, include_engine: bool = True,
                       include_variants: bool = True) -> dict:
    """Classify every printed row and engine branch; deterministic given ``seed``."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    grid = grid or Grid.default(pde.equation)
    der = derive(pde)
    families = [f for f in paper_catalog() if f.equation == pde.equation]
    if include_variants:
        families += [f for f in corrected_variants() if f.equation == pde.equation]
    rng = np.random.Generator(np.random.PCG64(seed))
    fam_out = []
    for fam in families:
        rows = []
        for case in CASES:
            reps = []
            for i in range(draws):
                params = draw_parameters(rng, fam.symbols, case)
                if pde.equation == "kp":
                    params["sigma2"] = float(pde.sigma2)
                reps.append(check_candidate(pde, lambda v, f=fam, c=case: family_solution(f, c, v),
                                            fam.id, case, i, params, grid, tol, fd))
            rows.append({"case": case, "printed": fam.row(case).printed, **summarize(reps),
                         "draws": [r.to_dict() for r in reps]})
        fam_out.append({"id": fam.id, "c1_case": fam.c1_case, "xi": fam.xi_printed,
                        "anchor": fam.anchor, "notes": list(fam.notes), "rows": rows})
    eng_out = []
    if include_engine:
        symbols = list(pde.params) + ["lambda", "mu", "C"]
        for b in der.branches:
            rows = []
            for case in CASES:
                reps = []
                for i in range(draws):
                    params = draw_parameters(rng, symbols, case)
                    reps.append(check_candidate(pde, lambda v, br=b: branch_solution(br, v),
                                                f"engine:{pde.equation}:{b.index}", case, i, params,
                                                grid, tol, fd))
                rows.append({"case": case, **summarize(reps), "draws": [r.to_dict() for r in reps]})
            eng_out.append({"id": f"engine:{pde.equation}:{b.index}", "c1": b.c1_label,
                            "omega": str(b.omega), "coefficients": [str(a) for a in b.coefficients],
                            "rows": rows})
    systems = [system_diff(pde, i, der) for i in range(len(der.cases))]
    return {"equation": pde.equation, "sigma2": pde.sigma2, "tol": tol, "seed": seed,
            "draws": draws, "grid": grid.spec(), "families": fam_out, "engine": eng_out,
            "systems": systems}


def report_table(report: dict) -> str:
    lines = [f"{'id':<18}{'case':<10}{'verdict':<9}{'max residual':>14}{'fd delta':>12}  draws"]
    for entry in report["families"] + report["engine"]:
        for row in entry["rows"]:
            mr = row["max_residual"]
            fdd = row["fd_max_delta"]
            lines.append(f"{entry['id']:<18}{row['case']:<10}{row['classification']:<9}"
                         f"{(f'{mr:.3e}' if mr is not None else '-'):>14}"
                         f"{(f'{fdd:.1e}' if fdd is not None else '-'):>12}  {row['draws_run']}")
    for sysd in report["systems"]:
        lines.append(f"system c1 case {sysd['c1_case']}: {sysd['engine_equations']} engine rows, "
                     f"{sysd['printed_equations']} printed rows")
        for row in sysd["rows"]:
            mark = "=" if row["match"] else "!"
            lines.append(f"  {mark} w^{row['power']}: delta = {row['delta']}")
        if "c1" in sysd:
            mark = "=" if sysd["c1"]["match"] else "!"
            lines.append(f"  {mark} c1: engine {sysd['c1']['engine']}, printed {sysd['c1']['printed']}")
    return "\n".join(lines)


# -- grid export --------------------------------------------------------------------
def sample_grid(u: AssembledSolution, grid: Grid):
    sol = assemble_u(u)
    X, T, Y = grid.points()
    vals, ok = sol.values(X, T, Y)
    ok &= np.isfinite(vals)
    if not np.any(ok):
        raise EmptyGridError("every grid point is a pole")
    return X, T, Y, vals, ok


def csv_text(grid: Grid, X, T, Y, U, ok) -> str:
    """Columns x,t[,y],u; blank line after each x-scanline and in place of poles."""
    kp = grid.y is not None
    nx = grid.x.count
    lines = ["x,t,y,u" if kp else "x,t,u"]
    for i in range(X.size):
        if ok[i]:
            cols = [X[i], T[i]] + ([Y[i]] if kp else []) + [U[i]]
            lines.append(",".join(f"{v:.10g}" for v in cols))
        elif lines[-1] != "":
            lines.append("")
        if (i + 1) % nx == 0 and lines[-1] != "":
            lines.append("")
    return "\n".join(lines) + "\n"


def write_csv(path, grid: Grid, X, T, Y, U, ok) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(csv_text(grid, X, T, Y, U, ok))


def gnuplot_script(csv_name: str, title: str, grid: Grid) -> str:
    lines = [
        "set datafile separator ','",
        f"set title '{title}'",
        "set xlabel 'x'",
        "set ylabel 't'",
        "set zlabel 'u'",
        "set hidden3d",
        "set ticslevel 0",
    ]
    if grid.y is None:
        lines.append(f"splot '{csv_name}' skip 1 using 1:2:3 with lines notitle")
    else:
        ys = grid.y.values()
        y0 = float(ys[np.argmin(np.abs(ys))])
        lines.append(f"y0 = {y0:.10g}")
        lines.append(f"splot '{csv_name}' skip 1 using 1:2:(abs($3 - y0) < 1e-9 ? $4 : 1/0) "
                     "with lines notitle")
    return "\n".join(lines) + "\n"
