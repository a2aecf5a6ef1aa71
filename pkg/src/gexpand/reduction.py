"""PDE -> traveling-wave ODE -> shifted phi-ODE.

Differential polynomials are dictionaries from monomials to coefficients.
A PDE monomial is a sorted tuple of partial-derivative multi-indices
``(nx, ny, nt)``, one per factor of ``u``; an ODE monomial is a sorted tuple
of xi-derivative orders (``(0, 1)`` is ``u*u'``, ``()`` is the constant 1).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Mapping

from .algebra import (LAMBDA, MU, ParamExpr, RatFunc, Ring, StructureError,
                      divide_exact, merge_nonzero, solve_polynomial, substitute)

EQUATIONS = ("burgers", "kdv", "kp")
EQUATION_PARAMS = {
    "burgers": ("alpha", "beta"),
    "kdv": ("alpha", "gamma"),
    "kp": ("k", "a"),
}
OMEGA, C1, CONST = "omega", "c1", "C"

Monomial = tuple


class UnsupportedFormError(ValueError):
    """A differential monomial cannot be integrated by the rules available."""


@dataclass(frozen=True)
class PdeSpec:
    """One of the three supported equations.

    ``sigma2`` only matters for ``kp`` and must be +1 or -1.  The KP
    y-wavenumber is the symbol ``a``, distinct from the nonlinearity
    coefficient ``alpha`` of Burgers/KdV.
    """

    equation: str
    sigma2: int = 1

    def __post_init__(self):
        if self.equation not in EQUATIONS:
            raise ValueError(f"unknown equation {self.equation!r}; expected one of {EQUATIONS}")
        if self.sigma2 not in (1, -1):
            raise ValueError("sigma2 must be +1 or -1")

    @property
    def params(self) -> tuple[str, ...]:
        return EQUATION_PARAMS[self.equation]

    @property
    def dimension(self) -> int:
        return 2 if self.equation == "kp" else 1

    def ring(self, m: int | None = None) -> Ring:
        """Session ring: parameters, lambda, mu, omega, a0..am, c1, C."""
        coeffs = tuple(f"a{i}" for i in range(m + 1)) if m is not None else ()
        return Ring(self.params + (LAMBDA, MU, OMEGA) + coeffs + (C1, CONST))

    def wave_coordinate(self, ring: Ring) -> tuple[ParamExpr, ParamExpr, ParamExpr]:
        """Coefficients ``(cx, cy, ct)`` of x, y, t in the wave variable."""
        if self.equation == "kp":
            return ring.var("k"), ring.var("a"), ring.var(OMEGA)
        return ring.one(), ring.zero(), -ring.var(OMEGA)

    def wave_label(self) -> str:
        return "k*x + a*y + omega*t" if self.equation == "kp" else "x - omega*t"

    def pde_terms(self, ring: Ring) -> dict[Monomial, ParamExpr]:
        """The PDE as a differential polynomial in partial derivatives of u."""
        U, UX, UT, UY = (0, 0, 0), (1, 0, 0), (0, 0, 1), (0, 1, 0)
        if self.equation == "burgers":
            return {(UT,): ring.one(), (U, UX): ring.var("alpha"), ((2, 0, 0),): ring.var("beta")}
        if self.equation == "kdv":
            return {(UT,): ring.one(), (U, UX): ring.var("alpha"), ((3, 0, 0),): ring.var("gamma")}
        inner = {(UT,): ring.one(), (U, UX): ring.const(6), ((3, 0, 0),): ring.one()}
        terms = _partial(inner, 0)
        terms[((0, 2, 0),)] = terms.get(((0, 2, 0),), ring.zero()) + 3 * self.sigma2
        return terms


def parse_pde_spec(text: str) -> tuple[PdeSpec, dict[str, Fraction]]:
    """Parse ``equation=burgers`` plus optional ``name=value`` bindings.

    Entries may be separated by newlines or commas.  Values are exact
    rationals (``1/4``, ``0.1``).  ``sigma2`` is taken from the bindings.
    """
    items: dict[str, str] = {}
    for chunk in text.replace(",", "\n").splitlines():
        chunk = chunk.strip()
        if not chunk or chunk.startswith("#"):
            continue
        if "=" not in chunk:
            raise ValueError(f"expected key=value, got {chunk!r}")
        key, value = (s.strip() for s in chunk.split("=", 1))
        if key in items:
            raise ValueError(f"{key!r} bound twice")
        items[key] = value
    if "equation" not in items:
        raise ValueError("missing equation=...")
    equation = items.pop("equation")
    bindings = {k: Fraction(v) for k, v in items.items()}
    sigma2 = int(bindings.pop("sigma2", 1))
    return PdeSpec(equation, sigma2), bindings


def _partial(terms: Mapping[Monomial, ParamExpr], axis: int) -> dict[Monomial, ParamExpr]:
    out: dict[Monomial, ParamExpr] = {}
    for mono, coeff in terms.items():
        for i, factor in enumerate(mono):
            bumped = list(factor)
            bumped[axis] += 1
            new = tuple(sorted(mono[:i] + (tuple(bumped),) + mono[i + 1:]))
            out[new] = out[new] + coeff if new in out else coeff
    return {k: v for k, v in out.items() if not v.is_zero()}


# -- ODE differential polynomials ---------------------------------------------------
def _clean(terms: Mapping[Monomial, ParamExpr]) -> dict[Monomial, ParamExpr]:
    return {k: v for k, v in terms.items() if not v.is_zero()}


def _add_into(out: dict, mono: Monomial, coeff: ParamExpr):
    out[mono] = out[mono] + coeff if mono in out else coeff


def d_dxi(terms: Mapping[Monomial, ParamExpr]) -> dict[Monomial, ParamExpr]:
    """Formal xi-derivative of an ODE differential polynomial."""
    out: dict[Monomial, ParamExpr] = {}
    for mono, coeff in terms.items():
        for i, order in enumerate(mono):
            _add_into(out, tuple(sorted(mono[:i] + (order + 1,) + mono[i + 1:])), coeff)
    return _clean(out)


def _render_mono(mono: Monomial, var: str) -> str:
    if not mono:
        return "1"
    names = []
    for order in sorted(set(mono), reverse=True):
        base = var + ("'" * order if order <= 3 else f"^({order})")
        power = mono.count(order)
        names.append(base if power == 1 else f"{base}^{power}")
    return "*".join(names)


def render_ode(terms: Mapping[Monomial, ParamExpr], var: str = "u") -> str:
    if not terms:
        return "0 = 0"
    order = sorted(terms, key=lambda m: (len(m), max(m, default=-1), m), reverse=True)
    parts = []
    for mono in order:
        coeff = terms[mono]
        body = _render_mono(mono, var)
        c = str(coeff)
        if body == "1":
            parts.append(f"({c})")
        elif c == "1":
            parts.append(body)
        else:
            parts.append(f"({c})*{body}")
    return " + ".join(parts) + " = 0"


@dataclass(frozen=True)
class ReducedOde:
    """ODE in the wave variable; ``terms[()]`` holds the integration constant."""

    pde: PdeSpec
    terms: dict = field(compare=False)
    integrations: int = 0

    @property
    def ring(self) -> Ring:
        return next(iter(self.terms.values())).ring

    @property
    def constant(self) -> ParamExpr | None:
        return self.terms.get(())

    def __str__(self):
        return render_ode(self.terms, "u")


def make_traveling_ode(pde: PdeSpec, ring: Ring | None = None) -> ReducedOde:
    """Chain rule: each partial ``(nx, ny, nt)`` becomes ``cx^nx cy^ny ct^nt u^(n)``."""
    ring = ring or pde.ring()
    cx, cy, ct = pde.wave_coordinate(ring)
    out: dict[Monomial, ParamExpr] = {}
    for mono, coeff in pde.pde_terms(ring).items():
        factor = coeff
        orders = []
        for nx, ny, nt in mono:
            factor = factor * cx ** nx * cy ** ny * ct ** nt
            orders.append(nx + ny + nt)
        _add_into(out, tuple(sorted(orders)), factor)
    return ReducedOde(pde, _clean(out), 0)


def _antiderivative(terms: Mapping[Monomial, ParamExpr]) -> dict[Monomial, ParamExpr]:
    rest = _clean(dict(terms))
    result: dict[Monomial, ParamExpr] = {}
    for _ in range(64):
        if not rest:
            return _clean(result)
        if () in rest:
            raise UnsupportedFormError("constant term cannot be integrated to a differential monomial")
        mono = max(rest, key=lambda m: (max(m), m))
        top = max(mono)
        if top == 0 or mono.count(top) != 1:
            raise UnsupportedFormError(f"{_render_mono(mono, 'u')} is not an exact derivative")
        i = mono.index(top)
        candidate = tuple(sorted(mono[:i] + (top - 1,) + mono[i + 1:]))
        # d(candidate) contains mono with multiplicity = count of (top-1) in candidate
        weight = candidate.count(top - 1)
        piece = rest[mono] / weight
        _add_into(result, candidate, piece)
        for m, c in d_dxi({candidate: piece}).items():
            _add_into(rest, m, -c)
        rest = _clean(rest)
    raise UnsupportedFormError("integration did not terminate")


def integrate_once(ode: ReducedOde) -> ReducedOde:
    """Antiderivative in xi with the integration constant stored as ``c1*C``."""
    if ode.integrations >= 1 or ode.constant is not None:
        raise UnsupportedFormError("ODE has already been integrated once")
    ring = ode.ring
    anti = _antiderivative(ode.terms)
    anti[()] = ring.var(C1) * ring.var(CONST)
    return ReducedOde(ode.pde, anti, ode.integrations + 1)


@dataclass(frozen=True)
class PhiOde:
    """ODE in ``phi = u - c1``; ``terms[()]`` is the constant part."""

    pde: PdeSpec
    terms: dict = field(compare=False)
    c1_label: str | None = None
    c1_value: RatFunc | None = field(default=None, compare=False)
    assumptions: tuple = field(default=(), compare=False)
    notes: tuple = ()

    @property
    def ring(self) -> Ring:
        return next(iter(self.terms.values())).ring

    @property
    def constant_part(self) -> ParamExpr:
        return self.terms.get((), self.ring.zero())

    def coefficient(self, mono: Monomial) -> ParamExpr:
        return self.terms.get(tuple(mono), self.ring.zero())

    def __str__(self):
        return render_ode(self.terms, "phi")


def apply_shift(ode: ReducedOde) -> PhiOde:
    """Substitute ``u = phi + c1``.

    When the non-constant part is still an exact derivative (KP has
    ``u'``, ``u'u`` and ``u'''``) it is integrated a second time (``6k^2 u'u -> 3k^2 u^2``), with the new constant again
    written ``c1*C``, before shifting.
    """
    if ode.integrations != 1:
        raise UnsupportedFormError("apply_shift expects a once-integrated ODE")
    ring = ode.ring
    terms = dict(ode.terms)
    notes = []
    body = {m: c for m, c in terms.items() if m != ()}
    try:
        again = _antiderivative(body)
    except UnsupportedFormError:
        again = None
    if again is not None:
        terms = again
        terms[()] = ring.var(C1) * ring.var(CONST)
        notes.append("second integration: previous constant absorbed, new constant c1*C")
    c1 = ring.var(C1)
    out: dict[Monomial, ParamExpr] = {}
    for mono, coeff in terms.items():
        j = mono.count(0)
        others = tuple(o for o in mono if o)
        for i in range(j + 1):
            piece = coeff * comb(j, i) * c1 ** (j - i)
            _add_into(out, tuple(sorted((0,) * i + others)), piece)
    return PhiOde(ode.pde, _clean(out), notes=tuple(notes))


class C1Branch:
    """A root ``c1 = value`` of the constant part, with its divisors."""

    __slots__ = ("value", "nonzero", "label")

    def __init__(self, value: RatFunc, nonzero=(), label=""):
        self.value = value
        self.nonzero = tuple(nonzero)
        self.label = label or f"c1 = {value}"

    def __repr__(self):
        return f"C1Branch({self.label})"


def c1_branches(phi: PhiOde) -> list[C1Branch]:
    """Roots in ``c1`` of the constant part, smallest expression first (0 first)."""
    const = phi.constant_part
    if const.is_zero():
        raise StructureError("constant part is identically zero; c1 is unconstrained")
    if const.degree(C1) < 1:
        raise StructureError("constant part does not depend on c1")
    if const.degree(C1) > 2:
        raise StructureError("constant part is more than quadratic in c1")
    roots = solve_polynomial(const, C1)
    branches = []
    for root in roots:
        if root.radical is not None:
            raise StructureError("c1 branch would need a radical")
        branches.append(C1Branch(root.value, root.nonzero))
    branches.sort(key=lambda b: (not b.value.is_zero(), str(b.value)))
    for i, b in enumerate(branches, 1):
        b.label = f"case {i}: c1 = {b.value}"
    return branches


def specialize_c1(phi: PhiOde, branch: C1Branch) -> PhiOde:
    """Substitute a c1 branch and clear denominators.

    The resulting constant part is identically zero.  Every nonconstant
    denominator multiplied through is recorded as a nonvanishing assumption.
    """
    ring = phi.ring
    subbed = {m: substitute(c, {C1: branch.value}) for m, c in phi.terms.items()}
    dens: list[ParamExpr] = []
    for r in subbed.values():
        if not r.is_polynomial() and all(r.den != d for d in dens):
            dens.append(r.den)
    scale = ring.one()
    for d in dens:
        scale = scale * d
    out = {}
    for m, r in subbed.items():
        q = divide_exact(r.num * scale, r.den)
        if q is None:
            raise StructureError("denominator clearing failed")
        out[m] = q
    out = _clean(out)
    if () in out:
        raise StructureError(f"constant part does not vanish on {branch.label}")
    assumptions = merge_nonzero(tuple(branch.nonzero) + tuple(dens))
    return PhiOde(phi.pde, out, branch.label, branch.value, assumptions, phi.notes)
