"""Exact polynomial arithmetic over named parameters.

The pieces:

* :class:`Ring` -- an ordered, fixed list of symbol names.
* :class:`ParamExpr` -- a multivariate polynomial with ``Fraction``
  coefficients over a ring.
* :class:`RatFunc` -- a numerator/denominator pair of ``ParamExpr``,
  used only where the solver has to divide by a parameter.
* :class:`WPoly` -- a polynomial in the Riccati variable ``w = G'/G`` with
  ``ParamExpr`` coefficients, closed under ``w' = -(w^2 + lambda*w + mu)``.

Everything is immutable.  No floating point is involved until
:meth:`ParamExpr.evaluate` is called with float values.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce
from typing import Iterable, Mapping, Union

Number = Union[int, Fraction]

LAMBDA = "lambda"
MU = "mu"


class StructureError(ValueError):
    """Operands live in different rings, or an operation is undefined."""


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"expected an exact number, got {type(value).__name__}")


def _grlex_key(exps: tuple[int, ...]) -> tuple:
    return (sum(exps), exps)


class Ring:
    """Ordered symbol list shared by every expression of a derivation."""

    __slots__ = ("symbols", "_index")

    def __init__(self, symbols: Iterable[str]):
        symbols = tuple(symbols)
        if len(set(symbols)) != len(symbols):
            raise StructureError(f"duplicate symbols in {symbols}")
        self.symbols = symbols
        self._index = {name: i for i, name in enumerate(symbols)}

    def __eq__(self, other):
        return isinstance(other, Ring) and other.symbols == self.symbols

    def __hash__(self):
        return hash(self.symbols)

    def __repr__(self):
        return f"Ring({', '.join(self.symbols)})"

    def __contains__(self, name):
        return name in self._index

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise StructureError(f"symbol {name!r} not in {self!r}") from None

    def var(self, name: str) -> "ParamExpr":
        exps = [0] * len(self.symbols)
        exps[self.index(name)] = 1
        return ParamExpr(self, {tuple(exps): Fraction(1)})

    def vars(self, *names: str) -> tuple["ParamExpr", ...]:
        return tuple(self.var(n) for n in names)

    def const(self, value: Number) -> "ParamExpr":
        value = _as_fraction(value)
        if value == 0:
            return ParamExpr(self, {})
        return ParamExpr(self, {(0,) * len(self.symbols): value})

    def zero(self) -> "ParamExpr":
        return ParamExpr(self, {})

    def one(self) -> "ParamExpr":
        return self.const(1)

    def monomial(self, exps: Iterable[int], coeff: Number = 1) -> "ParamExpr":
        return ParamExpr(self, {tuple(exps): _as_fraction(coeff)})

    def extend(self, *names: str) -> "Ring":
        return Ring(self.symbols + tuple(n for n in names if n not in self._index))


class ParamExpr:
    """Polynomial with exact rational coefficients over a :class:`Ring`.

    ``terms`` maps exponent tuples (one entry per ring symbol) to nonzero
    ``Fraction`` coefficients.  Equality is structural.
    """

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: Ring, terms: Mapping[tuple[int, ...], Fraction]):
        self.ring = ring
        self.terms = {e: c for e, c in terms.items() if c != 0}
        self._hash = None

    # -- construction helpers -------------------------------------------------
    def _coerce(self, other) -> "ParamExpr":
        if isinstance(other, ParamExpr):
            if other.ring != self.ring:
                raise StructureError(f"ring mismatch: {self.ring!r} vs {other.ring!r}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.const(other)
        return NotImplemented

    # -- ring operations ------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, 0) + c
        return ParamExpr(self.ring, terms)

    __radd__ = __add__

    def __neg__(self):
        return ParamExpr(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms: dict[tuple[int, ...], Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0) + c1 * c2
        return ParamExpr(self.ring, terms)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise StructureError("only non-negative integer powers are supported")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __truediv__(self, other):
        # Only exact division by a nonzero rational is allowed; anything else
        # belongs in a RatFunc.
        if isinstance(other, ParamExpr):
            if not other.is_constant():
                raise StructureError("division by a non-constant ParamExpr; use RatFunc")
            other = other.constant_value()
        other = _as_fraction(other)
        if other == 0:
            raise ZeroDivisionError("division of ParamExpr by zero")
        return ParamExpr(self.ring, {e: c / other for e, c in self.terms.items()})

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.const(other)
        if not isinstance(other, ParamExpr):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    # -- inspection -----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise StructureError(f"{self} is not constant")
        return next(iter(self.terms.values()), Fraction(0))

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def sorted_terms(self) -> list[tuple[tuple[int, ...], Fraction]]:
        """Terms in descending graded-lexicographic order."""
        return sorted(self.terms.items(), key=lambda item: _grlex_key(item[0]), reverse=True)

    def leading_term(self) -> tuple[tuple[int, ...], Fraction]:
        if not self.terms:
            raise StructureError("zero polynomial has no leading term")
        return max(self.terms.items(), key=lambda item: _grlex_key(item[0]))

    def variables(self) -> set[str]:
        used = set()
        for e in self.terms:
            used.update(self.ring.symbols[i] for i, k in enumerate(e) if k)
        return used

    def depends_on(self, name: str) -> bool:
        i = self.ring.index(name)
        return any(e[i] for e in self.terms)

    def degree(self, name: str | None = None) -> int:
        """Degree in ``name`` (total degree if omitted); -1 for zero."""
        if not self.terms:
            return -1
        if name is None:
            return max(sum(e) for e in self.terms)
        i = self.ring.index(name)
        return max(e[i] for e in self.terms)

    def coefficients_in(self, name: str) -> list["ParamExpr"]:
        """Coefficients of ``name**0, name**1, ...`` as polynomials in the rest."""
        i = self.ring.index(name)
        out: list[dict] = [{} for _ in range(max(self.degree(name), 0) + 1)]
        for e, c in self.terms.items():
            k = e[i]
            out[k][e[:i] + (0,) + e[i + 1:]] = c
        return [ParamExpr(self.ring, t) for t in out]

    # -- transformations ------------------------------------------------------
    def embed(self, ring: Ring) -> "ParamExpr":
        """Re-express in ``ring``, which must contain every symbol used here."""
        if ring == self.ring:
            return self
        slots = []
        for i, name in enumerate(self.ring.symbols):
            slots.append(ring.index(name) if name in ring else None)
        terms = {}
        for e, c in self.terms.items():
            new = [0] * len(ring.symbols)
            for i, k in enumerate(e):
                if k:
                    if slots[i] is None:
                        raise StructureError(f"{self.ring.symbols[i]!r} missing from target ring")
                    new[slots[i]] = k
            terms[tuple(new)] = c
        return ParamExpr(ring, terms)

    def subs(self, mapping: Mapping[str, "ParamExpr | Number"]) -> "ParamExpr":
        """Polynomial substitution of symbols by expressions of the same ring."""
        if not mapping:
            return self
        idx = {self.ring.index(n): (v if isinstance(v, ParamExpr) else self.ring.const(v))
               for n, v in mapping.items()}
        powers: dict[tuple[int, int], ParamExpr] = {}
        result = self.ring.zero()
        for e, c in self.terms.items():
            kept = list(e)
            factor = self.ring.one()
            for i, value in idx.items():
                k = e[i]
                if k:
                    kept[i] = 0
                    if (i, k) not in powers:
                        powers[(i, k)] = value ** k
                    factor = factor * powers[(i, k)]
            result = result + factor * ParamExpr(self.ring, {tuple(kept): c})
        return result

    def evaluate(self, values: Mapping[str, object]):
        """Evaluate with numeric values for every symbol that occurs."""
        total = 0
        for e, c in self.terms.items():
            term = c
            for i, k in enumerate(e):
                if k:
                    name = self.ring.symbols[i]
                    try:
                        term = term * values[name] ** k
                    except KeyError:
                        raise StructureError(f"no value bound for {name!r}") from None
            total = total + term
        return total

    def monomial_content(self) -> tuple[int, ...]:
        """Exponent-wise minimum over all terms (the largest monomial factor)."""
        if not self.terms:
            return (0,) * len(self.ring.symbols)
        return tuple(min(col) for col in zip(*self.terms))

    def rational_content(self) -> Fraction:
        """Positive rational ``c`` such that ``self / c`` has coprime integer coefficients."""
        if not self.terms:
            return Fraction(1)
        num = reduce(math.gcd, (c.numerator for c in self.terms.values()))
        den = reduce(lambda a, b: a * b // math.gcd(a, b),
                     (c.denominator for c in self.terms.values()))
        return Fraction(num, den)

    def shift_down(self, exps: tuple[int, ...]) -> "ParamExpr":
        """Divide by the monomial with exponents ``exps`` (must divide every term)."""
        terms = {}
        for e, c in self.terms.items():
            new = tuple(a - b for a, b in zip(e, exps))
            if min(new) < 0:
                raise StructureError("monomial does not divide polynomial")
            terms[new] = c
        return ParamExpr(self.ring, terms)

    # -- rendering ------------------------------------------------------------
    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            factors = []
            for i, k in enumerate(e):
                if k == 1:
                    factors.append(self.ring.symbols[i])
                elif k:
                    factors.append(f"{self.ring.symbols[i]}^{k}")
            mag = abs(c)
            if factors:
                body = "*".join(factors)
                if mag != 1:
                    body = f"{mag}*{body}"
            else:
                body = str(mag)
            parts.append(("-" if c < 0 else "+", body))
        text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self):
        return f"ParamExpr({self})"


def param_mul(p: ParamExpr, q: ParamExpr) -> ParamExpr:
    """Exact product; raises :class:`StructureError` on a ring mismatch."""
    if not isinstance(p, ParamExpr) or not isinstance(q, ParamExpr):
        raise StructureError("param_mul expects two ParamExpr operands")
    if p.ring != q.ring:
        raise StructureError(f"ring mismatch: {p.ring!r} vs {q.ring!r}")
    return p * q


def divide_exact(p: ParamExpr, q: ParamExpr) -> ParamExpr | None:
    """Return ``p / q`` if ``q`` divides ``p`` exactly, else ``None``.

    Single-divisor multivariate division in grlex order; with one divisor
    the remainder is zero exactly when the division is exact.
    """
    if q.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if p.ring != q.ring:
        raise StructureError("ring mismatch in divide_exact")
    lead_e, lead_c = q.leading_term()
    quotient = p.ring.zero()
    rem = p
    # Each step strictly lowers the leading monomial of rem, so this ends.
    while not rem.is_zero():
        e, c = rem.leading_term()
        diff = tuple(a - b for a, b in zip(e, lead_e))
        if min(diff) < 0:
            return None
        t = p.ring.monomial(diff, c / lead_c)
        quotient = quotient + t
        rem = rem - t * q
    return quotient


def _fraction_sqrt(c: Fraction) -> Fraction | None:
    if c < 0:
        return None
    n, d = c.numerator, c.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def poly_sqrt(p: ParamExpr) -> ParamExpr | None:
    """Exact square root ``r`` with ``r*r == p`` and positive leading coefficient."""
    if p.is_zero():
        return p
    lead_e, lead_c = p.leading_term()
    if any(k % 2 for k in lead_e):
        return None
    c = _fraction_sqrt(lead_c)
    if c is None:
        return None
    root = p.ring.monomial(tuple(k // 2 for k in lead_e), c)
    root_lead_e = tuple(k // 2 for k in lead_e)
    rem = p - root * root
    limit = len(p.terms) + 1
    for _ in range(limit * limit):
        if rem.is_zero():
            return root
        e, coeff = rem.leading_term()
        diff = tuple(a - b for a, b in zip(e, root_lead_e))
        if min(diff) < 0 or _grlex_key(diff) >= _grlex_key(root_lead_e):
            return None
        t = p.ring.monomial(diff, coeff / (2 * c))
        root = root + t
        rem = p - root * root
    return None


# -- radicals -------------------------------------------------------------------
def reduce_radicals(p: ParamExpr, radicals: Mapping[str, ParamExpr]) -> ParamExpr:
    """Rewrite ``r**k`` as ``R**(k//2) * r**(k%2)`` for each ``r = sqrt(R)``."""
    if not radicals:
        return p
    for name, radicand in radicals.items():
        if name not in p.ring or not p.depends_on(name):
            continue
        i = p.ring.index(name)
        radicand = radicand.embed(p.ring)
        out = p.ring.zero()
        for e, c in p.terms.items():
            k = e[i]
            rest = p.ring.monomial(e[:i] + (k % 2,) + e[i + 1:], c)
            out = out + rest * radicand ** (k // 2)
        p = out
    return p


# -- rational functions -----------------------------------------------------------
class RatFunc:
    """``num / den`` with ``den`` nonzero and normalized to leading coefficient 1.

    Common monomial and rational content is cancelled, and the non-monomial
    part of the denominator is divided out of the numerator when it divides
    exactly.  No general polynomial GCD is attempted.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: ParamExpr, den: ParamExpr | None = None):
        if den is None:
            den = num.ring.one()
        if num.ring != den.ring:
            raise StructureError("RatFunc numerator and denominator in different rings")
        if den.is_zero():
            raise ZeroDivisionError("RatFunc with zero denominator")
        num, den = _normalize(num, den)
        self.num = num
        self.den = den

    @property
    def ring(self) -> Ring:
        return self.num.ring

    @classmethod
    def of(cls, value, ring: Ring) -> "RatFunc":
        if isinstance(value, RatFunc):
            return value
        if isinstance(value, ParamExpr):
            return cls(value)
        return cls(ring.const(value))

    def _lift(self, other) -> "RatFunc":
        if isinstance(other, RatFunc):
            if other.ring != self.ring:
                raise StructureError("ring mismatch in RatFunc arithmetic")
            return other
        if isinstance(other, (ParamExpr, int, Fraction)):
            return RatFunc.of(other, self.ring)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        if other.num.is_zero():
            raise ZeroDivisionError("RatFunc division by zero")
        return RatFunc(self.num * other.den, self.den * other.num)

    def __pow__(self, n: int):
        return RatFunc(self.num ** n, self.den ** n)

    def __eq__(self, other):
        if isinstance(other, (ParamExpr, int, Fraction)):
            other = RatFunc.of(other, self.ring)
        if not isinstance(other, RatFunc):
            return NotImplemented
        return (self.num * other.den - other.num * self.den).is_zero()

    def __hash__(self):
        return hash((self.num, self.den))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den == self.ring.one()

    def variables(self) -> set[str]:
        return self.num.variables() | self.den.variables()

    def embed(self, ring: Ring) -> "RatFunc":
        return RatFunc(self.num.embed(ring), self.den.embed(ring))

    def reduce(self, radicals: Mapping[str, ParamExpr]) -> "RatFunc":
        return RatFunc(reduce_radicals(self.num, radicals), reduce_radicals(self.den, radicals))

    def evaluate(self, values: Mapping[str, object]):
        den = self.den.evaluate(values)
        if den == 0:
            raise ZeroDivisionError(f"denominator {self.den} vanishes")
        return self.num.evaluate(values) / den

    def __str__(self):
        if self.is_polynomial():
            return str(self.num)
        num, den = self.num, self.den
        # Clear fractional numerator coefficients for display: -beta/(2*alpha).
        scale = reduce(lambda a, b: a * b // math.gcd(a, b),
                       (c.denominator for c in num.terms.values()), 1)
        if scale != 1:
            num, den = num * scale, den * scale
        num_s, den_s = str(num), str(den)
        if len(num.terms) > 1:
            num_s = f"({num_s})"
        if len(den.terms) > 1 or "*" in den_s:
            den_s = f"({den_s})"
        return f"{num_s}/{den_s}"

    def __repr__(self):
        return f"RatFunc({self})"


def _normalize(num: ParamExpr, den: ParamExpr) -> tuple[ParamExpr, ParamExpr]:
    ring = num.ring
    if num.is_zero():
        return num, ring.one()
    common = tuple(min(a, b) for a, b in zip(num.monomial_content(), den.monomial_content()))
    if any(common):
        num, den = num.shift_down(common), den.shift_down(common)
    dmono = den.monomial_content()
    prim = den.shift_down(dmono)
    if not prim.is_constant():
        q = divide_exact(num, prim)
        if q is not None:
            num, den = q, ring.monomial(dmono)
        else:
            nmono = num.monomial_content()
            nprim = num.shift_down(nmono)
            if not nprim.is_constant():
                q = divide_exact(prim, nprim)
                if q is not None:
                    num, den = ring.monomial(nmono), ring.monomial(dmono) * q
    lead = den.leading_term()[1]
    if lead != 1:
        num, den = num / lead, den / lead
    return num, den


# -- polynomials in w = G'/G ---------------------------------------------------------
class WPoly:
    """Polynomial in ``w`` with :class:`ParamExpr` coefficients.

    ``coeffs[i]`` multiplies ``w**i``; trailing zero coefficients are dropped.
    The ring must contain ``lambda`` and ``mu`` for derivation.
    """

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: Ring, coeffs: Iterable[ParamExpr | Number]):
        cs = [c if isinstance(c, ParamExpr) else ring.const(c) for c in coeffs]
        for c in cs:
            if c.ring != ring:
                raise StructureError("WPoly coefficient from a different ring")
        while cs and cs[-1].is_zero():
            cs.pop()
        self.ring = ring
        self.coeffs = tuple(cs)

    @classmethod
    def monomial(cls, ring: Ring, k: int, coeff: ParamExpr | Number = 1) -> "WPoly":
        return cls(ring, [ring.zero()] * k + [coeff if isinstance(coeff, ParamExpr) else ring.const(coeff)])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, i: int) -> ParamExpr:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else self.ring.zero()

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        return isinstance(other, WPoly) and self.ring == other.ring and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.ring, self.coeffs))

    def __add__(self, other: "WPoly") -> "WPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        return WPoly(self.ring, [self.coeff(i) + other.coeff(i) for i in range(n)])

    def __neg__(self):
        return WPoly(self.ring, [-c for c in self.coeffs])

    def __sub__(self, other: "WPoly") -> "WPoly":
        return self + (-other)

    def __mul__(self, other) -> "WPoly":
        if isinstance(other, WPoly):
            if not self.coeffs or not other.coeffs:
                return WPoly(self.ring, [])
            out = [self.ring.zero()] * (len(self.coeffs) + len(other.coeffs) - 1)
            for i, a in enumerate(self.coeffs):
                for j, b in enumerate(other.coeffs):
                    out[i + j] = out[i + j] + a * b
            return WPoly(self.ring, out)
        return WPoly(self.ring, [c * other for c in self.coeffs])

    __rmul__ = __mul__

    def derive(self) -> "WPoly":
        return wpoly_derive(self)

    def __str__(self):
        parts = []
        for i, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            mono = "" if i == 0 else ("*w" if i == 1 else f"*w^{i}")
            parts.append(f"({c}){mono}")
        return " + ".join(parts) if parts else "0"

    def __repr__(self):
        return f"WPoly({self})"


def wpoly_derive(p: WPoly) -> WPoly:
    """Apply ``D(w**k) = -k*(mu*w**(k-1) + lambda*w**k + w**(k+1))`` linearly."""
    ring = p.ring
    lam, mu = ring.var(LAMBDA), ring.var(MU)
    out = [ring.zero()] * (len(p.coeffs) + 1)
    for k, c in enumerate(p.coeffs):
        if k == 0 or c.is_zero():
            continue
        out[k - 1] = out[k - 1] - k * mu * c
        out[k] = out[k] - k * lam * c
        out[k + 1] = out[k + 1] - k * c
    return WPoly(ring, out)


def wpoly_derive2(p: WPoly) -> WPoly:
    return wpoly_derive(wpoly_derive(p))


def ansatz_second_derivative(p: WPoly) -> WPoly:
    """Closed five-term second-derivative formula for ``sum_k a_k w**k``.

    Computed independently of :func:`wpoly_derive`; used as a cross-check.
    """
    ring = p.ring
    lam, mu = ring.var(LAMBDA), ring.var(MU)
    out = [ring.zero()] * (len(p.coeffs) + 2)
    for k, a in enumerate(p.coeffs):
        if k == 0 or a.is_zero():
            continue
        ka = k * a
        if k >= 2:
            out[k - 2] = out[k - 2] + ka * mu ** 2 * (k - 1)
        out[k - 1] = out[k - 1] + ka * mu * lam * (2 * k - 1)
        out[k] = out[k] + ka * k * (lam ** 2 + 2 * mu)
        out[k + 1] = out[k + 1] + ka * lam * (2 * k + 1)
        out[k + 2] = out[k + 2] + ka * (k + 1)
    return WPoly(ring, out)


# -- substitution of rational functions and univariate root finding -------------------
def substitute(p: ParamExpr, mapping: Mapping[str, RatFunc | ParamExpr | Number]) -> RatFunc:
    """Substitute rational functions for symbols of ``p``."""
    ring = p.ring
    values = {name: RatFunc.of(v, ring) for name, v in mapping.items()}
    slots = [(ring.index(name), value) for name, value in values.items()]
    result = RatFunc(ring.zero())
    cache: dict[tuple[int, int], RatFunc] = {}
    for e, c in p.terms.items():
        kept = list(e)
        factor = None
        for i, value in slots:
            k = e[i]
            if k:
                kept[i] = 0
                if (i, k) not in cache:
                    cache[(i, k)] = value ** k
                factor = cache[(i, k)] if factor is None else factor * cache[(i, k)]
        term = RatFunc(ring.monomial(kept, c))
        result = result + (term if factor is None else term * factor)
    return result


def sqrt_split(disc: ParamExpr) -> tuple[ParamExpr, ParamExpr]:
    """Write ``disc = outer**2 * radicand`` pulling out every square factor found.

    Square factors are found in the rational content, the monomial content
    and the remaining primitive part (if it is a perfect square).  The
    radicand is ``1`` exactly when ``disc`` is a perfect square.
    """
    ring = disc.ring
    if disc.is_zero():
        return ring.zero(), ring.one()
    content = disc.rational_content()
    prim = disc / content
    sign = 1
    if prim.leading_term()[1] < 0:
        prim, sign = -prim, -1
    mono = prim.monomial_content()
    prim = prim.shift_down(mono)
    outer = ring.monomial([k // 2 for k in mono])
    radicand = ring.monomial([k % 2 for k in mono], sign)
    root_c = _fraction_sqrt(content)
    if root_c is not None:
        outer = outer * root_c
    else:
        outer = outer / content.denominator
        radicand = radicand * (content.numerator * content.denominator)
    root_p = poly_sqrt(prim)
    if root_p is not None:
        outer = outer * root_p
    else:
        radicand = radicand * prim
    return outer, radicand


class Root:
    """One root of a univariate polynomial equation.

    ``value`` lives in ``value.ring``, which extends the input ring by the
    radical symbol when one was needed; ``radical`` is then
    ``(symbol, radicand)``.  ``nonzero`` lists the divisors that must not
    vanish for the root to be valid.
    """

    __slots__ = ("value", "nonzero", "radical")

    def __init__(self, value: RatFunc, nonzero=(), radical=None):
        self.value = value
        self.nonzero = tuple(nonzero)
        self.radical = radical

    def __repr__(self):
        extra = f", {self.radical[0]}=sqrt({self.radical[1]})" if self.radical else ""
        return f"Root({self.value}{extra})"


class NoRealRootError(ValueError):
    """Quadratic with a negative constant discriminant."""


def _nontrivial(p: ParamExpr) -> tuple[ParamExpr, ...]:
    return () if p.is_constant() else (p,)


def solve_polynomial(p: ParamExpr, name: str, radical_symbol: str = "rt1") -> list[Root]:
    """All roots of ``p == 0`` as a polynomial of degree <= 2 in ``name``.

    Roots are exact rational functions of the other symbols.  A
    discriminant that is not a perfect square gets a fresh radical symbol.
    Raises :class:`StructureError` for degree > 2 or an identically zero
    ``p``, and :class:`NoRealRootError` when the discriminant is a negative
    constant.
    """
    if p.is_zero():
        raise StructureError(f"equation is identically zero in {name!r}")
    coeffs = p.coefficients_in(name)
    ring = p.ring
    roots: list[Root] = []
    while len(coeffs) > 1 and coeffs[0].is_zero():
        coeffs = coeffs[1:]
        if not any(r.value.is_zero() for r in roots):
            roots.append(Root(RatFunc(ring.zero())))
    deg = len(coeffs) - 1
    if deg == 0:
        return roots
    if deg == 1:
        c0, c1 = coeffs
        roots.append(Root(RatFunc(-c0, c1), _nontrivial(c1)))
        return roots
    if deg > 2:
        raise StructureError(f"degree {deg} in {name!r}; only linear and quadratic steps are solved")
    c0, c1, c2 = coeffs
    disc = c1 * c1 - 4 * c2 * c0
    outer, radicand = sqrt_split(disc)
    nonzero = _nontrivial(c2)
    if radicand == ring.one():
        for s in (1, -1):
            roots.append(Root(RatFunc(-c1 + s * outer, 2 * c2), nonzero))
        return roots
    if radicand.is_constant() and radicand.constant_value() < 0:
        raise NoRealRootError(f"discriminant {disc} is negative")
    big = ring.extend(radical_symbol)
    rt = big.var(radical_symbol)
    rad = radicand.embed(big)
    for s in (1, -1):
        value = RatFunc(-c1.embed(big) + s * outer.embed(big) * rt, 2 * c2.embed(big))
        roots.append(Root(value, tuple(n.embed(big) for n in nonzero), (radical_symbol, rad)))
    return roots


def nonzero_factors(p: ParamExpr) -> list[ParamExpr]:
    """Split a nonvanishing condition ``p != 0`` into canonical factors.

    ``3*k^2 != 0`` becomes ``[k]``; a non-monomial remainder is kept as one
    factor with unit content and positive leading coefficient.
    """
    if p.is_zero():
        raise StructureError("zero cannot be assumed nonvanishing")
    ring = p.ring
    mono = p.monomial_content()
    out = [ring.var(ring.symbols[i]) for i, k in enumerate(mono) if k]
    prim = p.shift_down(mono)
    if not prim.is_constant():
        prim = prim / prim.rational_content()
        if prim.leading_term()[1] < 0:
            prim = -prim
        out.append(prim)
    return out


def merge_nonzero(items: Iterable[ParamExpr], ring: Ring | None = None) -> tuple[ParamExpr, ...]:
    """Canonical, de-duplicated, deterministically ordered assumption list."""
    seen: list[ParamExpr] = []
    for item in items:
        if ring is not None:
            item = item.embed(ring)
        for f in nonzero_factors(item):
            if f not in seen:
                seen.append(f)
    return tuple(sorted(seen, key=str))
