"""Command-line front end.

Exit codes: 0 success / PASS, 1 verification FAIL or empty grid, 2 usage or
configuration error, 3 solver incomplete.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import verify as V
from .catalog import CASES, PaperFamily, find_family
from .engine import (CoefficientBranch, InadmissibleError, SolverIncompleteError, derivation_report,
                     derive)
from .reduction import EQUATIONS, PdeSpec

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INCOMPLETE = 0, 1, 2, 3


class UsageError(Exception):
    pass


# -- argument helpers ---------------------------------------------------------------
def parse_params(text: str | None) -> dict[str, Fraction]:
    """``name=value[,name=value...]`` with exact rational values ("1/4", "0.1", "2")."""
    out: dict[str, Fraction] = {}
    if not text:
        return out
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        name, sep, value = part.partition("=")
        name = name.strip()
        if not sep or not name:
            raise UsageError(f"bad parameter binding {part!r}; expected name=value")
        if name in out:
            raise UsageError(f"parameter {name!r} bound more than once")
        try:
            out[name] = Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise UsageError(f"parameter {name!r}: cannot read {value.strip()!r} as a number") from None
    return out


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _tol(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError("tolerance must be positive")
    return value


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gexpand", description="Traveling-wave solutions by (G'/G)-expansion.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, equation=False, family=False, grid=False):
        if equation:
            sp.add_argument("--equation", required=not family, choices=None,
                            help="burgers, kdv or kp")
        if family:
            sp.add_argument("--family", required=True,
                            help="U11..U34, U31/eta, U32/eta, or engine:<equation>:<index>")
            sp.add_argument("--params", help="bindings name=value[,name=value...]")
        if grid:
            sp.add_argument("--grid", default="", help="x=min:max:n[,t=min:max:n][,y=min:max:n]")
        sp.add_argument("--sigma2", type=int, default=1, choices=(1, -1), help="KP sign (default +1)")
        sp.add_argument("--out", help="output path (default: stdout)")

    d = sub.add_parser("derive", help="run the symbolic derivation")
    common(d, equation=True)
    d.add_argument("--format", choices=("json", "table"), default="json")

    v = sub.add_parser("verify", help="residual check of one family")
    common(v, family=True, grid=True)
    v.add_argument("--tol", type=_tol, default=V.DEFAULT_TOL)
    v.add_argument("--seed", type=_seed, default=0)
    v.add_argument("--draws", type=int, default=10, help="random draws per case when --params is absent")
    v.add_argument("--case", choices=CASES, action="append",
                   help="restrict random draws to a discriminant case (repeatable)")
    v.add_argument("--format", choices=("json", "table"), default="json")

    s = sub.add_parser("sample", help="write a solution grid as CSV plus a gnuplot script")
    common(s, family=True, grid=True)
    s.add_argument("--format", choices=("csv",), default="csv")

    r = sub.add_parser("report", help="printed-catalog vs engine discrepancy report")
    common(r, equation=True, grid=True)
    r.add_argument("--tol", type=_tol, default=V.DEFAULT_TOL)
    r.add_argument("--seed", type=_seed, default=0)
    r.add_argument("--draws", type=int, default=10)
    r.add_argument("--no-fd", action="store_true", help="skip the finite-difference cross-check")
    r.add_argument("--format", choices=("json", "table"), default="json")
    return p


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _pde(equation: str, sigma2: int) -> PdeSpec:
    if equation not in EQUATIONS:
        raise UsageError(f"unknown equation {equation!r}; expected one of {', '.join(EQUATIONS)}")
    return PdeSpec(equation, sigma2)


# -- family resolution --------------------------------------------------------------
class Target:
    """A verifiable family: a printed one or an engine branch."""

    def __init__(self, ident: str, sigma2: int):
        self.id = ident
        if ident.startswith("engine:"):
            bits = ident.split(":")
            if len(bits) != 3 or not bits[2].isdigit():
                raise UsageError(f"engine family ids look like engine:<equation>:<index>, got {ident!r}")
            self.pde = _pde(bits[1], sigma2)
            branches = derive(self.pde).branches
            idx = int(bits[2])
            if idx >= len(branches):
                raise UsageError(f"{ident}: only {len(branches)} engine branches exist")
            self.branch: CoefficientBranch | None = branches[idx]
            self.family: PaperFamily | None = None
            names = set()
            for rf in [self.branch.omega, *self.branch.coefficients, *self.branch.wave]:
                names |= rf.variables()
            if self.branch.c1 is not None:
                names |= self.branch.c1.variables()
            names -= set(self.branch.radicals)
            names |= {"lambda", "mu"}
            order = list(self.pde.params) + ["lambda", "mu", "C"]
            self.symbols = tuple(s for s in order if s in names)
        else:
            try:
                self.family = find_family(ident)
            except KeyError:
                raise UsageError(f"unknown family {ident!r}") from None
            self.branch = None
            self.pde = PdeSpec(self.family.equation, sigma2)
            self.symbols = tuple(s for s in self.family.symbols if s != "sigma2")

    @property
    def allowed(self) -> set[str]:
        return set(self.pde.params) | {"lambda", "mu", "C", "k1", "k2", "sigma2"}

    def solution(self, values, case: str | None = None):
        if self.branch is not None:
            return V.branch_solution(self.branch, values)
        g = V.gbranch_from(values)
        return V.family_solution(self.family, case or g.case, values)

    def bind(self, params: dict[str, Fraction], need_k: bool) -> dict[str, float]:
        unknown = sorted(set(params) - self.allowed)
        if unknown:
            raise UsageError(f"{self.id}: unknown parameter(s) {', '.join(unknown)}")
        required = list(self.symbols) + (["k1", "k2"] if need_k else [])
        missing = [s for s in required if s not in params]
        if missing:
            raise UsageError(f"{self.id}: unbound parameter(s) {', '.join(missing)}")
        if "sigma2" in params and params["sigma2"] != self.pde.sigma2:
            if params["sigma2"] not in (1, -1):
                raise UsageError("sigma2 must be +1 or -1")
            self.pde = PdeSpec(self.pde.equation, int(params["sigma2"]))
        values = {k: float(v) for k, v in params.items()}
        values.setdefault("k1", 1.0)
        values.setdefault("k2", 0.0)
        if self.pde.equation == "kp":
            values["sigma2"] = float(self.pde.sigma2)
        return values

    def check_assumptions(self, values) -> None:
        """Reject parameter values that divide by zero or need a negative radicand."""
        try:
            self.solution(values)
        except V.NonRealError:
            return          # a printed row that is not real: that is a FAIL, not a usage error
        except InadmissibleError as exc:
            raise UsageError(f"{self.id}: assumption violated: {exc}") from None
        except ZeroDivisionError as exc:
            raise UsageError(f"{self.id}: assumption violated (division by zero): {exc}") from None
        except ValueError as exc:
            raise UsageError(f"{self.id}: {exc}") from None


# -- commands -----------------------------------------------------------------------
def _derive_table(der) -> str:
    lines = [f"equation: {der.pde.equation}", f"traveling ODE:  {der.traveling}",
             f"integrated ODE: {der.integrated}", f"shifted ODE:    {der.shifted}"]
    for case in der.cases:
        lines.append(f"{case.phi.c1_label}  (m = {case.m})")
        lines.append(f"  phi ODE: {case.phi}")
        for power, eq in case.system.rows():
            lines.append(f"  w^{power}: {eq} = 0")
        for b in case.branches:
            coeffs = ", ".join(f"a{k} = {a}" for k, a in enumerate(b.coefficients))
            lines.append(f"  [{b.index}] omega = {b.omega}; {coeffs}"
                         f"{'' if b.verified else '  (UNVERIFIED)'}")
    return "\n".join(lines) + "\n"


def cmd_derive(args) -> int:
    pde = _pde(args.equation, args.sigma2)
    try:
        der = derive(pde)
    except SolverIncompleteError as exc:
        print(f"solver incomplete: {exc}", file=sys.stderr)
        return EXIT_INCOMPLETE
    text = _dump(derivation_report(der)) if args.format == "json" else _derive_table(der)
    _emit(text, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    target = Target(args.family, args.sigma2)
    grid = _grid(args.grid, target.pde.equation)
    params = parse_params(args.params)
    reports = []
    if params:
        values = target.bind(params, need_k=False)
        target.check_assumptions(values)
        case = V.gbranch_from(values).case
        reports.append(V.check_candidate(target.pde, target.solution, target.id, case, 0, values,
                                         grid, args.tol, fd=True))
    else:
        if args.draws < 1:
            raise UsageError("--draws must be at least 1")
        rng = np.random.Generator(np.random.PCG64(args.seed))
        for case in (args.case or CASES):
            for i in range(args.draws):
                values = V.draw_parameters(rng, target.symbols, case)
                if target.pde.equation == "kp":
                    values["sigma2"] = float(target.pde.sigma2)
                reports.append(V.check_candidate(target.pde, target.solution, target.id, case, i,
                                                 values, grid, args.tol, fd=True))
    summary = V.summarize(reports)
    verdict = summary["classification"]
    if args.format == "json":
        text = _dump({"family": target.id, "equation": target.pde.equation, "tol": args.tol,
                      "seed": args.seed if not params else None, "grid": grid.spec(),
                      **summary, "reports": [r.to_dict() for r in reports]})
    else:
        lines = [f"{target.id}: {verdict}"]
        for r in reports:
            res = f"{r.max_residual:.3e}" if r.max_residual is not None else "-"
            lines.append(f"  {r.case:<9} draw {r.draw:<3} {r.status:<13} residual {res:<10} "
                         f"{r.classification}{'  ' + r.note if r.note else ''}")
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    if verdict == "SKIP":
        print(f"{target.id}: no admissible parameter draw", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK if verdict == "PASS" else EXIT_FAIL


def _grid(text: str, equation: str) -> V.Grid:
    try:
        return V.Grid.parse(text or "", equation)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_sample(args) -> int:
    target = Target(args.family, args.sigma2)
    grid = _grid(args.grid, target.pde.equation)
    values = target.bind(parse_params(args.params), need_k=True)
    target.check_assumptions(values)
    try:
        sol = target.solution(values)
    except V.NonRealError as exc:
        print(f"{target.id}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    try:
        X, T, Y, U, ok = V.sample_grid(sol, grid)
    except V.EmptyGridError as exc:
        print(f"{target.id}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if args.out:
        out = Path(args.out)
        V.write_csv(out, grid, X, T, Y, U, ok)
        script = out.with_suffix(".gp")
        script.write_text(V.gnuplot_script(out.name, target.id, grid), encoding="utf-8")
    else:
        sys.stdout.write(V.csv_text(grid, X, T, Y, U, ok))
    return EXIT_OK


def cmd_report(args) -> int:
    pde = _pde(args.equation, args.sigma2)
    if args.draws < 1:
        raise UsageError("--draws must be at least 1")
    grid = _grid(args.grid, pde.equation)
    try:
        rep = V.discrepancy_report(pde, tol=args.tol, seed=args.seed, draws=args.draws, grid=grid,
                                   fd=not args.no_fd)
    except SolverIncompleteError as exc:
        print(f"solver incomplete: {exc}", file=sys.stderr)
        return EXIT_INCOMPLETE
    text = _dump(rep) if args.format == "json" else V.report_table(rep) + "\n"
    _emit(text, args.out)
    return EXIT_OK


COMMANDS = {"derive": cmd_derive, "verify": cmd_verify, "sample": cmd_sample, "report": cmd_report}


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SolverIncompleteError as exc:
        print(f"solver incomplete: {exc}", file=sys.stderr)
        return EXIT_INCOMPLETE


if __name__ == "__main__":
    sys.exit(main())
