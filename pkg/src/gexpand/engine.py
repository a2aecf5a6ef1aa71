"""Balance, substitute the (G'/G) ansatz, extract and solve the coefficient system."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping

from .algebra import (NoRealRootError, ParamExpr, RatFunc, Ring, StructureError, WPoly,
                      ansatz_second_derivative, merge_nonzero, reduce_radicals,
                      solve_polynomial, substitute, wpoly_derive)
from .reduction import (C1, OMEGA, PdeSpec, PhiOde, apply_shift, c1_branches,
                        integrate_once, make_traveling_ode, specialize_c1)


class NoBalanceError(ValueError):
    """The phi-ODE has no nonlinear/derivative pair that fixes the ansatz degree."""


class SolverIncompleteError(RuntimeError):
    """A step of the coefficient system is neither linear nor a solvable quadratic."""


class InadmissibleError(ValueError):
    """Numeric parameters violate a branch assumption (division by zero, radicand < 0)."""


def balance_degree(phi: PhiOde) -> int:
    """Ansatz degree ``m`` from ``p*m == m + r``.

    ``p`` is the highest power of phi in an underived monomial and ``r`` the
    highest derivative order among linear derivative monomials.
    """
    powers = [len(m) for m in phi.terms if m and all(o == 0 for o in m)]
    derivs = [m[0] for m in phi.terms if len(m) == 1 and m[0] > 0]
    p = max(powers, default=0)
    if p < 2:
        raise NoBalanceError("no nonlinear term phi^p with p >= 2")
    if not derivs:
        raise NoBalanceError("no linear derivative term")
    r = max(derivs)
    if r % (p - 1):
        raise NoBalanceError(f"balance {p}m = m + {r} has no integer solution")
    m = r // (p - 1)
    if m < 1:
        raise NoBalanceError(f"balance gives non-positive m = {m}")
    return m


def _ansatz_ring(phi: PhiOde, m: int) -> Ring:
    base = phi.pde.ring(m)
    extra = [s for s in phi.ring.symbols if s not in base]
    return base.extend(*extra)


def substitute_ansatz(phi: PhiOde, m: int) -> WPoly:
    """Substitute ``phi = sum_k a_k w^k`` and collect powers of ``w``.

    The second derivative is computed twice, by iterated derivation and by the
    closed five-term formula, and the two must agree exactly.
    """
    if m < 1:
        raise ValueError("ansatz degree must be >= 1")
    ring = _ansatz_ring(phi, m)
    ansatz = WPoly(ring, [ring.var(f"a{k}") for k in range(m + 1)])
    max_order = max((o for mono in phi.terms for o in mono), default=0)
    derivs = [ansatz]
    for _ in range(max_order):
        derivs.append(wpoly_derive(derivs[-1]))
    if max_order >= 2 and derivs[2] != ansatz_second_derivative(ansatz):
        raise AssertionError("iterated derivation disagrees with the closed second-derivative formula")
    total = WPoly(ring, [])
    for mono, coeff in phi.terms.items():
        term = WPoly(ring, [coeff.embed(ring)])
        for order in mono:
            term = term * derivs[order]
        total = total + term
    return total


@dataclass(frozen=True)
class AlgebraicSystem:
    """Equations ``eq == 0``; ``powers[i]`` is the w-power of ``equations[i]``."""

    equations: tuple
    powers: tuple
    unknowns: tuple
    assumptions: tuple = ()

    @property
    def ring(self) -> Ring:
        return self.equations[0].ring

    def rows(self) -> list[tuple[int, ParamExpr]]:
        return list(zip(self.powers, self.equations))


def extract_system(p: WPoly, unknowns, assumptions=()) -> AlgebraicSystem:
    """One equation per power of w, ascending from ``w^0``."""
    eqs = tuple(p.coeffs)
    return AlgebraicSystem(eqs, tuple(range(len(eqs))), tuple(unknowns), tuple(assumptions))


@dataclass(frozen=True)
class CoefficientBranch:
    """One solved family ``(omega, a0..am)`` for one c1 case."""

    equation: str
    m: int
    assignments: dict = field(compare=False)
    radicals: dict = field(default_factory=dict, compare=False)
    assumptions: tuple = ()
    verified: bool = False
    sigma2: int = 1
    c1_label: str = ""
    c1: RatFunc | None = field(default=None, compare=False)
    wave: tuple = field(default=(), compare=False)
    index: int = -1

    @property
    def omega(self) -> RatFunc:
        return self.assignments[OMEGA]

    @property
    def coefficients(self) -> list[RatFunc]:
        return [self.assignments[f"a{k}"] for k in range(self.m + 1)]

    @property
    def xi(self) -> str:
        if self.equation == "kp":
            return f"k*x + a*y + ({self.omega})*t"
        return f"x - ({self.omega})*t"

    def numeric(self, values: Mapping[str, object]) -> dict:
        """Evaluate the branch at concrete parameters.

        Returns ``omega``, ``c1``, ``coeffs`` (a0..am) and ``wave`` (cx, cy,
        ct) as floats.  Raises :class:`InadmissibleError` when an assumption
        fails.
        """
        vals = dict(values)
        for name, radicand in self.radicals.items():
            r = radicand.evaluate(vals)
            if r < 0 and float(r) < -1e-12:
                raise InadmissibleError(f"{radicand} >= 0 violated (value {float(r):.3g})")
            vals[name] = math.sqrt(max(float(r), 0.0))
        for cond in self.assumptions:
            v = cond.evaluate(vals)
            if v == 0 or abs(float(v)) < 1e-12:
                raise InadmissibleError(f"{cond} != 0 violated")
        try:
            out = {
                "omega": float(self.omega.evaluate(vals)),
                "c1": float(self.c1.evaluate(vals)) if self.c1 is not None else 0.0,
                "coeffs": [float(a.evaluate(vals)) for a in self.coefficients],
                "wave": tuple(float(c.evaluate(vals)) for c in self.wave),
            }
        except ZeroDivisionError as exc:
            raise InadmissibleError(str(exc)) from None
        return out

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "c1_case": self.c1_label,
            "c1": str(self.c1) if self.c1 is not None else "0",
            "omega": str(self.omega),
            "coefficients": {f"a{k}": str(a) for k, a in enumerate(self.coefficients)},
            "xi": self.xi,
            "radicals": {k: f"sqrt({v})" for k, v in self.radicals.items()},
            "assumptions": [f"{a} != 0" for a in self.assumptions]
                           + [f"{v} >= 0" for v in self.radicals.values()],
            "verified": self.verified,
        }


# -- solver -------------------------------------------------------------------------
@dataclass
class _State:
    ring: Ring
    assignments: dict
    radicals: dict
    assumptions: list
    pending: list  # (power, equation) still to use, highest power first

    def embed(self, ring: Ring) -> "_State":
        return _State(ring,
                      {k: v.embed(ring) for k, v in self.assignments.items()},
                      {k: v.embed(ring) for k, v in self.radicals.items()},
                      [a.embed(ring) for a in self.assumptions],
                      [(p, e.embed(ring)) for p, e in self.pending])


def _current(eq: ParamExpr, st: _State) -> ParamExpr:
    eq = eq.embed(st.ring)
    if st.assignments:
        eq = substitute(eq, st.assignments).num
    return reduce_radicals(eq, st.radicals)


def _assign(st: _State, name: str, value: RatFunc, nonzero, radical, pending) -> _State:
    if radical is not None:
        st = st.embed(value.ring)
        st.radicals[radical[0]] = radical[1]
    ring = st.ring
    value = value.embed(ring).reduce(st.radicals)
    assignments = {}
    for k, v in st.assignments.items():
        if v.num.depends_on(name) or v.den.depends_on(name):
            v = substitute(v.num, {name: value}) / substitute(v.den, {name: value})
            v = v.reduce(st.radicals)
        assignments[k] = v
    assignments[name] = value
    assumptions = st.assumptions + [n.embed(ring) for n in nonzero]
    return _State(ring, assignments, dict(st.radicals), assumptions,
                  [(p, e.embed(ring)) for p, e in pending])


def _pivot(eq: ParamExpr, free: list[str]) -> str | None:
    """An unknown the equation is linear in, with an unknown-free coefficient."""
    order = [OMEGA] + [u for u in reversed(free) if u != OMEGA]
    for name in order:
        if name not in free or eq.degree(name) != 1:
            continue
        coeff = eq.coefficients_in(name)[1]
        if not (coeff.variables() & set(free)):
            return name
    return None


def solve_branches(system: AlgebraicSystem) -> list[CoefficientBranch]:
    """Enumerate every branch of the triangular coefficient system.

    Equations are consumed from the highest power of w down.  An equation
    with one remaining unknown is solved as a linear or quadratic; one with
    several is solved for a pivot it is linear in (omega first); one with
    none is a consistency filter that keeps or kills the branch.  The zero
    root for the leading coefficient is discarded.
    """
    unknowns = list(system.unknowns)
    leading = max((u for u in unknowns if u.startswith("a")), key=lambda s: int(s[1:]))
    m = int(leading[1:])
    start = _State(system.ring, {}, {}, list(system.assumptions),
                   sorted(system.rows(), key=lambda r: -r[0]))
    stack = [start]
    done: list[_State] = []
    while stack:
        st = stack.pop()
        free = [u for u in unknowns if u not in st.assignments]
        if not st.pending:
            if free:
                raise SolverIncompleteError(f"unknowns {free} left undetermined")
            done.append(st)
            continue
        progressed = False
        dead = False
        for i, (power, eq) in enumerate(st.pending):
            cur = _current(eq, st)
            rest = st.pending[:i] + st.pending[i + 1:]
            present = [u for u in free if cur.depends_on(u)]
            if not present:
                if cur.is_zero():
                    stack.append(replace(st, pending=rest))
                else:
                    dead = True
                progressed = True
                break
            if len(present) == 1:
                name = present[0]
                if cur.degree(name) > 2:
                    continue
                rt = f"rt{len(st.radicals) + 1}"
                try:
                    roots = solve_polynomial(cur, name, radical_symbol=rt)
                except NoRealRootError:
                    roots = []
                except StructureError as exc:
                    raise SolverIncompleteError(str(exc)) from None
                for root in roots:
                    if name == leading and root.value.is_zero():
                        continue
                    stack.append(_assign(st, name, root.value, root.nonzero, root.radical, rest))
                progressed = True
                break
            name = _pivot(cur, present)
            if name is None:
                continue
            c0, c1 = cur.coefficients_in(name)[:2]
            stack.append(_assign(st, name, RatFunc(-c0, c1), [] if c1.is_constant() else [c1],
                                 None, rest))
            progressed = True
            break
        if dead:
            continue
        if not progressed:
            rows = ", ".join(f"w^{p}" for p, _ in st.pending)
            raise SolverIncompleteError(f"no linear or quadratic step available for rows {rows}")

    branches = []
    for st in done:
        if st.assignments[leading].is_zero():
            continue
        ok = all(_current(eq, st).is_zero() for eq in system.equations)
        if not ok:
            raise AssertionError("solved branch fails re-substitution")
        branches.append(CoefficientBranch(
            equation="", m=m,
            assignments={u: st.assignments[u] for u in unknowns},
            radicals=dict(st.radicals),
            assumptions=merge_nonzero(st.assumptions, st.ring),
            verified=ok))
    branches.sort(key=lambda b: [str(b.assignments[u]) for u in unknowns])
    return branches


# -- pipeline ------------------------------------------------------------------------
@dataclass
class CaseDerivation:
    phi: PhiOde
    m: int
    system: AlgebraicSystem
    branches: list


@dataclass
class Derivation:
    pde: PdeSpec
    traveling: object
    integrated: object
    shifted: PhiOde
    cases: list = field(default_factory=list)

    @property
    def branches(self) -> list[CoefficientBranch]:
        return [b for case in self.cases for b in case.branches]


def derive(pde: PdeSpec) -> Derivation:
    """Run the full pipeline and keep every intermediate object."""
    traveling = make_traveling_ode(pde)
    integrated = integrate_once(traveling)
    shifted = apply_shift(integrated)
    der = Derivation(pde, traveling, integrated, shifted)
    index = 0
    for c1b in c1_branches(shifted):
        phi = specialize_c1(shifted, c1b)
        m = balance_degree(phi)
        poly = substitute_ansatz(phi, m)
        ring = poly.ring
        unknowns = (OMEGA,) + tuple(f"a{k}" for k in range(m + 1))
        system = extract_system(poly, unknowns, [a.embed(ring) for a in phi.assumptions])
        solved = solve_branches(system)
        finished = []
        for b in solved:
            bring = next(iter(b.assignments.values())).ring
            c1 = substitute(c1b.value.num.embed(bring), b.assignments) / \
                substitute(c1b.value.den.embed(bring), b.assignments)
            c1 = c1.reduce(b.radicals)
            wave = tuple(substitute(c.embed(bring), {OMEGA: b.omega}).reduce(b.radicals)
                         for c in pde.wave_coordinate(pde.ring()))
            finished.append(replace(b, equation=pde.equation, sigma2=pde.sigma2,
                                    c1_label=c1b.label, c1=c1, wave=wave, index=index))
            index += 1
        der.cases.append(CaseDerivation(phi, m, system, finished))
    return der


def derive_families(pde: PdeSpec) -> list[CoefficientBranch]:
    """Every coefficient branch for every c1 case, in report order."""
    return derive(pde).branches


def leading_coefficient_law(phi: PhiOde, m: int) -> RatFunc:
    """Predicted ``a_m`` from the top-power balance of ``B*phi^2`` and ``E*phi^(r)``.

    ``D^r(w^m)`` has leading term ``(-1)^r * m(m+1)...(m+r-1) * w^(m+r)``.
    """
    B = phi.coefficient((0, 0))
    r = max(mono[0] for mono in phi.terms if len(mono) == 1 and mono[0] > 0)
    E = phi.coefficient((r,))
    rising = math.prod(range(m, m + r))
    return RatFunc(-E * ((-1) ** r * rising), B)


def derivation_report(der: Derivation) -> dict:
    """JSON-ready record of a derivation; see the README for the schema."""
    cases = []
    for case in der.cases:
        cases.append({
            "c1_case": case.phi.c1_label,
            "phi_ode": str(case.phi),
            "assumptions": [f"{a} != 0" for a in case.phi.assumptions],
            "m": case.m,
            "system": [{"power": p, "equation": f"{e} = 0"} for p, e in case.system.rows()],
            "branches": [b.to_dict() for b in case.branches],
        })
    return {
        "equation": der.pde.equation,
        "sigma2": der.pde.sigma2,
        "symbols": list(der.pde.ring().symbols),
        "wave_variable": der.pde.wave_label(),
        "traveling_ode": str(der.traveling),
        "integrated_ode": str(der.integrated),
        "shifted_ode": str(der.shifted),
        "notes": list(der.shifted.notes),
        "cases": cases,
        "branch_count": sum(len(c.branches) for c in der.cases),
    }
