"""Hand-transcribed solution families and algebraic systems.

Every row is stored exactly as printed, suspected typos included; nothing
here is corrected.  Whether a row actually solves its equation is decided
by :mod:`gexpand.verify`, never assumed.

Rows are polynomials in one profile variable P (``f``, ``g`` or ``r``),
with coefficients that are exact rational functions of the equation
parameters.  Two radical symbols stand in for the printed square roots:
``sqrtD`` for sqrt(lambda^2 - 4 mu) and ``sqrtN`` for sqrt(4 mu - lambda^2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .algebra import ParamExpr, RatFunc, Ring
from .reduction import EQUATION_PARAMS

SQRT_D, SQRT_N = "sqrtD", "sqrtN"
CASES = ("positive", "negative", "zero")
FAMILY_IDS = ("U11", "U12", "U13", "U14", "U21", "U22", "U23", "U24",
              "U31", "U32", "U33", "U34")
HALF = Fraction(1, 2)


class NonRealError(ValueError):
    """A printed square root has a negative radicand for the given parameters."""


def family_ring(equation: str) -> Ring:
    extra = ("sigma2",) if equation == "kp" else ()
    return Ring(EQUATION_PARAMS[equation] + ("lambda", "mu", "C") + extra + (SQRT_D, SQRT_N))


@dataclass(frozen=True)
class PaperRow:
    case: str                      # positive | negative | zero
    profile: str                   # f | g | r
    coeffs: tuple[RatFunc, ...]    # coefficients of P^0, P^1, ...
    printed: str                   # the row as printed, in plain text


@dataclass(frozen=True)
class PaperFamily:
    id: str
    equation: str
    c1_case: int                   # 1: c1 = 0, 2: the nonzero root
    rows: tuple[PaperRow, ...]
    wave: tuple[RatFunc, RatFunc, RatFunc]   # xi = cx x + cy y + ct t
    xi_printed: str
    anchor: str
    notes: tuple[str, ...] = ()

    def row(self, case: str) -> PaperRow:
        for r in self.rows:
            if r.case == case:
                return r
        raise KeyError(case)

    @property
    def symbols(self) -> tuple[str, ...]:
        """Parameters that must be bound to evaluate every row."""
        names = set()
        for r in self.rows:
            for c in r.coeffs:
                names |= c.variables()
        for c in self.wave:
            names |= c.variables()
        names -= {SQRT_D, SQRT_N}
        names |= {"lambda", "mu"}   # the profiles always depend on them
        ring = family_ring(self.equation)
        return tuple(s for s in ring.symbols if s in names)


def radical_values(values: Mapping[str, float]) -> dict[str, float]:
    """Bind sqrtD / sqrtN; a negative radicand gives NaN (non-real row)."""
    lam, mu = float(values["lambda"]), float(values["mu"])
    d = lam * lam - 4.0 * mu
    out = dict(values)
    out[SQRT_D] = math.sqrt(d) if d >= 0 else math.nan
    out[SQRT_N] = math.sqrt(-d) if d <= 0 else math.nan
    return out


def numeric_row(family: PaperFamily, case: str, values: Mapping[str, float]):
    """Float coefficients and wave vector of one row.

    Raises :class:`NonRealError` if a coefficient needs the square root of a
    negative number, ``ZeroDivisionError`` if a printed denominator vanishes.
    """
    vals = radical_values(values)
    row = family.row(case)
    coeffs = tuple(float(c.evaluate(vals)) for c in row.coeffs)
    if any(math.isnan(c) for c in coeffs):
        raise NonRealError(f"{family.id} {case} row needs a square root of a negative number")
    wave = tuple(float(c.evaluate(vals)) for c in family.wave)
    return coeffs, wave


# -- the families -------------------------------------------------------------------
def _builders(equation: str):
    R = family_ring(equation)

    def q(p) -> RatFunc:
        return RatFunc.of(p, R)

    return R, q


def _burgers() -> list[PaperFamily]:
    R, q = _builders("burgers")
    al, be, lam, mu, C, sD, sN = R.vars("alpha", "beta", "lambda", "mu", "C", SQRT_D, SQRT_N)
    B = q(2 * be) / al

    def wave(speed):
        return (q(1), q(0), -q(speed))

    def kink(a0, name):
        return (
            PaperRow("positive", "f", (a0 + B * q(-lam * HALF), B * q(sD * HALF)),
                     f"{name} + 2beta/alpha*(-lambda/2 + sqrt(lambda^2-4mu)/2*f)"),
            PaperRow("negative", "g", (a0 + B * q(-lam * HALF), B * q(sN * HALF)),
                     f"{name} + 2beta/alpha*(-lambda/2 + sqrt(4mu-lambda^2)/2*g)"),
            PaperRow("zero", "r", (a0 + B * q(-lam * HALF), B),
                     f"{name} + 2beta/alpha*(-lambda/2 + k1/(k1*xi+k2))"),
        )

    def shifted(const_pos, const_zero, printed_pos, printed_zero):
        c0 = q(const_pos) / al
        cz = q(const_zero) / al
        return (
            PaperRow("positive", "f", (c0, q(be * sD) / al), f"{printed_pos} + beta*sqrt(lambda^2-4mu)/alpha*f"),
            PaperRow("negative", "g", (c0, q(be * sN) / al), f"{printed_pos} + beta*sqrt(4mu-lambda^2)/alpha*g"),
            PaperRow("zero", "r", (cz, B), f"{printed_zero} + 2beta/alpha*(k1/(k1*xi+k2))"),
        )

    return [
        PaperFamily("U11", "burgers", 1, kink(B, "2beta/alpha"), wave(2 * C - 2 * be),
                    "xi = x - (2C - 2beta)t", "burgers, c1 = 0, first situation"),
        PaperFamily("U12", "burgers", 1, kink(q(2 * be * mu) / al, "2beta*mu/alpha"), wave(2 * C - be * mu),
                    "xi = x - (2C - beta*mu)t", "burgers, c1 = 0, second situation"),
        PaperFamily("U13", "burgers", 2,
                    shifted(-2 * be - be * lam + 2 * C + 2 * be * mu, -2 * be + 2 * C - be * lam + 2 * be * mu,
                            "(-2beta - beta*lambda + 2C + 2beta*mu)/alpha",
                            "(-2beta + 2C - beta*lambda + 2beta*mu)/alpha"),
                    wave(2 * C - 2 * be + be * mu),
                    "xi = x - (2C - 2beta + beta*mu)t", "burgers, c1 = 2(omega - C)/alpha, first situation"),
        PaperFamily("U14", "burgers", 2,
                    shifted(-be * lam + 2 * C, -be * lam + 2 * C,
                            "(-beta*lambda + 2C)/alpha", "(-beta*lambda + 2C)/alpha"),
                    wave(2 * C - be * mu),
                    "xi = x - (2C - beta*mu)t", "burgers, c1 = 2(omega - C)/alpha, second situation"),
    ]


def _kdv() -> list[PaperFamily]:
    R, q = _builders("kdv")
    al, ga, lam, mu, C, sD, sN = R.vars("alpha", "gamma", "lambda", "mu", "C", SQRT_D, SQRT_N)
    quad = q(-3 * ga * (lam ** 2 - 4 * mu)) / al
    r2 = q(-12 * ga) / al

    def wave(speed):
        return (q(1), q(0), -q(speed))

    def even(const, const_zero, lin_zero, printed, printed_zero):
        c0, cz = q(const) / al, q(const_zero) / al
        return (
            PaperRow("positive", "f", (c0, q(0), quad), f"{printed} - 3gamma(lambda^2-4mu)/alpha*f^2"),
            PaperRow("negative", "g", (c0, q(0), quad), f"{printed} - 3gamma(lambda^2-4mu)/alpha*g^2"),
            PaperRow("zero", "r", (cz, lin_zero, r2), printed_zero),
        )

    c22 = q(-12 * ga * mu + 6 * ga * mu * lam - 3 * ga * lam ** 2) / al
    lin22 = q(12 * ga * (lam - mu)) / al
    u22 = (
        PaperRow("positive", "f", (c22, q(6 * ga * (lam - mu) * sD) / al, quad),
                 "6gamma(lambda-mu)sqrt(lambda^2-4mu)/alpha*f - 3gamma(lambda^2-4mu)/alpha*f^2"
                 " + (-12gamma*mu + 6gamma*mu*lambda - 3gamma*lambda^2)/alpha"),
        PaperRow("negative", "g", (c22, q(6 * ga * (lam - mu) * sD) / al, quad),
                 "6gamma(lambda-mu)sqrt(lambda^2-4mu)/alpha*g - 3gamma(lambda^2-4mu)/alpha*g^2"
                 " + (-12gamma*mu + 6gamma*mu*lambda - 3gamma*lambda^2)/alpha"),
        PaperRow("zero", "r", (c22, lin22, r2),
                 "(-12gamma*mu + 6gamma*mu*lambda - 3gamma*lambda^2)/alpha + 12gamma(lambda-mu)/alpha*r"
                 " - 12gamma/alpha*r^2"),
    )
    return [
        PaperFamily("U21", "kdv", 1,
                    even(-4 * ga * mu + ga * lam ** 2, -4 * ga * mu + 6 * ga * mu * lam - 5 * ga * lam ** 2,
                         lin22, "(-4gamma*mu + gamma*lambda^2)/alpha",
                         "(-4gamma*mu + 6gamma*mu*lambda - 5gamma*lambda^2)/alpha"
                         " + 12gamma(lambda-mu)/alpha*r - 12gamma/alpha*r^2"),
                    wave(ga * (4 * mu - lam ** 2)),
                    "xi = x - gamma(4mu - lambda^2)t", "kdv, c1 = 0, first situation"),
        PaperFamily("U22", "kdv", 1, u22, wave(-ga * (4 * mu - lam ** 2)),
                    "xi = x + gamma(4mu - lambda^2)t", "kdv, c1 = 0, second situation",
                    notes=("the trigonometric row reuses sqrt(lambda^2-4mu), which is not real there",)),
        PaperFamily("U23", "kdv", 2,
                    even(-4 * ga * mu + ga * lam ** 2 + 2 * C, -4 * ga * mu + ga * lam ** 2 + 2 * C, q(0),
                         "(-4gamma*mu + gamma*lambda^2 + 2C)/alpha",
                         "(-4gamma*mu + gamma*lambda^2 + 2C)/alpha - 12gamma/alpha*r^2"),
                    wave(2 * C + 4 * ga * mu - lam ** 2 * ga),
                    "xi = x - (2C + 4gamma*mu - lambda^2*gamma)t", "kdv, c1 = (2omega - 2C)/alpha, first situation"),
        PaperFamily("U24", "kdv", 2,
                    even(-12 * ga * mu + 3 * ga * lam ** 2 + 2 * C, -12 * ga * mu + 3 * ga * lam ** 2 + 2 * C, q(0),
                         "(-12gamma*mu + 3gamma*lambda^2 + 2C)/alpha",
                         "(-12gamma*mu + 3gamma*lambda^2 + 2C)/alpha - 12gamma/alpha*r^2"),
                    wave(2 * C + 4 * ga * mu + lam ** 2 * ga),
                    "xi = x - (2C + 4gamma*mu + lambda^2*gamma)t", "kdv, c1 = (2omega - 2C)/alpha, second situation"),
    ]


RATIONAL_NOTE = "rational row printed as c1/(c1*xi + C2); read as k1/(k1*xi + k2)"


def _kp_parts():
    R, q = _builders("kp")
    k, a, lam, mu, C, s2 = R.vars("k", "a", "lambda", "mu", "C", "sigma2")
    return R, q, k, a, lam, mu, C, s2


def _kp_rows(const, neg_const=None, printed=""):
    R, q, k, a, lam, mu, C, s2 = _kp_parts()
    neg_const = const if neg_const is None else neg_const
    return (
        PaperRow("positive", "f", (const, q(0), q(-k ** 2 * (lam ** 2 - 4 * mu) * HALF)),
                 f"{printed[0]} - k^2(lambda^2-4mu)/2*f^2"),
        PaperRow("negative", "g", (neg_const, q(0), q(-k ** 2 * (4 * mu - lam ** 2) * HALF)),
                 f"{printed[1]} - k^2(4mu-lambda^2)/2*g^2"),
        PaperRow("zero", "r", (const, q(0), q(-2 * k ** 2)), f"{printed[0]} - 2k^2*r^2"),
    )


def _kp() -> list[PaperFamily]:
    R, q, k, a, lam, mu, C, s2 = _kp_parts()
    speed1 = q(4 * k ** 4 * mu - 3 * s2 * a ** 2 - k ** 4 * lam ** 2) / k
    wave1 = (q(1), q(0), -speed1)
    xi1 = "xi = x - (4k^4*mu - 3sigma^2*a^2 - k^4*lambda^2)t/k"
    c31 = q(-2 * k ** 2 * mu + HALF * k ** 2 * lam ** 2)
    c32 = q(Fraction(-2, 3) * k ** 2 * mu + Fraction(1, 6) * k ** 2 * lam ** 2)
    p31 = "-2k^2*mu + k^2*lambda^2/2"
    p32 = "-2k^2*mu/3 + k^2*lambda^2/6"

    den = q(k * (-1 + 2 * k ** 3))
    x33 = q(4 * k ** 4 * mu - 2 * k ** 2 * C - k ** 4 * lam ** 2 + 6 * k ** 2 * s2 * a ** 2 - 3 * s2 * a ** 2)
    x34 = q(-4 * k ** 4 * mu + 2 * k ** 2 * C + k ** 4 * lam ** 2 + 6 * k ** 2 * s2 * a ** 2 - 3 * s2 * a ** 2)
    om33, om34 = -x33 / den, -x34 / den
    c33 = (q(-12 * k ** 2 * mu + 3 * k ** 2 * lam ** 2 - 2 * C - 6 * s2 * a ** 2) - q(2 * k ** 2) * om33) / 6
    c34 = (q(-4 * k ** 2 * mu + k ** 2 * lam ** 2 - 2 * C - 6 * s2 * a ** 2) - q(2 * k ** 2) * om34) / 6
    p33 = "(-12k^2*mu + 3k^2*lambda^2 - 2C - 6sigma^2*a^2 - 2k^2*omega)/6"
    p34 = "(-4k^2*mu + k^2*lambda^2 - 2C - 6sigma^2*a^2 - 2k^2*omega)/6"
    omega_note = "omega inside the constant term is the t-coefficient of the printed xi"
    return [
        PaperFamily("U31", "kp", 1, _kp_rows(c31, printed=(p31, p31)), wave1, xi1, "kp, c1 = 0, first situation",
                    notes=(RATIONAL_NOTE, "printed xi has no y-term and unit x-coefficient")),
        PaperFamily("U32", "kp", 1, _kp_rows(c32, printed=(p32, p32)), wave1, xi1, "kp, c1 = 0, second situation",
                    notes=(RATIONAL_NOTE, "printed xi has no y-term and unit x-coefficient",
                           "printed xi coincides with the first situation")),
        PaperFamily("U33", "kp", 2, _kp_rows(c33, -c33, printed=(p33, "-" + p33)), (q(k), q(a), om33),
                    "xi = kx + a*y - (4k^4*mu - 2k^2*C - k^4*lambda^2 + 6k^2*sigma^2*a^2 - 3sigma^2*a^2)t/(k(-1+2k^3))",
                    "kp, nonzero c1, first situation",
                    notes=(RATIONAL_NOTE, omega_note, "trigonometric row carries an extra leading minus sign")),
        PaperFamily("U34", "kp", 2, _kp_rows(c34, printed=(p34, p34)), (q(k), q(a), om34),
                    "xi = kx + a*y - (-4k^4*mu + 2k^2*C + k^4*lambda^2 + 6k^2*sigma^2*a^2 - 3sigma^2*a^2)t/(k(-1+2k^3))",
                    "kp, nonzero c1, second situation", notes=(RATIONAL_NOTE, omega_note)),
    ]


def paper_catalog() -> list[PaperFamily]:
    """All twelve printed families, ordered by id."""
    return _burgers() + _kdv() + _kp()


def corrected_variants() -> list[PaperFamily]:
    """The two c1 = 0 KP families with the full coordinate eta = kx + a*y + omega*t.

    Profiles are kept as printed; only the wave coordinate is rebuilt from
    the printed omega values.
    """
    R, q, k, a, lam, mu, C, s2 = _kp_parts()
    printed = {f.id: f for f in _kp()}
    om1 = q(4 * k ** 4 * mu - 3 * s2 * a ** 2 - k ** 4 * lam ** 2) / k
    om2 = -q(4 * k ** 4 * mu + 3 * s2 * a ** 2 - k ** 4 * lam ** 2) / k
    out = []
    for fid, om, text in (("U31", om1, "(4k^4*mu - 3sigma^2*a^2 - k^4*lambda^2)/k"),
                          ("U32", om2, "-(4k^4*mu + 3sigma^2*a^2 - k^4*lambda^2)/k")):
        base = printed[fid]
        out.append(PaperFamily(f"{fid}/eta", "kp", 1, base.rows, (q(k), q(a), om),
                               f"eta = kx + a*y + omega*t, omega = {text}", base.anchor,
                               notes=base.notes[:1] + ("coordinate rebuilt with the y-term and printed omega",)))
    return out


def find_family(family_id: str) -> PaperFamily:
    for fam in paper_catalog() + corrected_variants():
        if fam.id == family_id:
            return fam
    raise KeyError(f"unknown family {family_id!r}")


# -- printed algebraic systems ------------------------------------------------------
def system_ring(equation: str) -> Ring:
    m = 1 if equation == "burgers" else 2
    extra = ("sigma2", "C2") if equation == "kp" else ()
    return Ring(EQUATION_PARAMS[equation] + ("lambda", "mu", "omega")
                + tuple(f"a{i}" for i in range(m + 1)) + ("C",) + extra)


@dataclass(frozen=True)
class PrintedSystem:
    equation: str
    c1_case: int
    rows: dict = field(default_factory=dict)   # power of w -> ParamExpr
    c1_printed: RatFunc | None = None
    notes: tuple[str, ...] = ()


def printed_systems() -> list[PrintedSystem]:
    out = []

    R = system_ring("burgers")
    al, be, lam, mu, om, a0, a1, C = R.vars("alpha", "beta", "lambda", "mu", "omega", "a0", "a1", "C")
    for case, s in ((1, -om), (2, om - 2 * C)):
        c1 = None if case == 1 else RatFunc(2 * (om - C)) / al
        out.append(PrintedSystem("burgers", case, {
            0: s * a0 + HALF * al * a0 ** 2 + be * a0 - be * a1 * mu,
            1: s * a1 + al * a0 * a1 - be * a1 * mu,
            2: HALF * al * a1 ** 2 - be * a1,
        }, c1))

    R = system_ring("kdv")
    al, ga, lam, mu, om, a0, a1, a2, C = R.vars("alpha", "gamma", "lambda", "mu", "omega", "a0", "a1", "a2", "C")
    out.append(PrintedSystem("kdv", 1, {
        0: -om * a0 + HALF * al * a0 ** 2 + 2 * ga * a2 * mu ** 2 + ga * a1 * lam * mu,
        1: -om * a1 + al * a0 * a1 + 6 * ga * a2 * lam * mu + 2 * ga * a1 * mu + a1 * mu + a1 * lam ** 2 * ga,
        2: -om * a2 + al * a0 * a2 + HALF * al * a1 ** 2 + 4 * ga * a2 * lam ** 2 + 3 * a1 * ga * lam + 8 * a2 * mu * ga,
        3: al * a1 * a2 + 10 * ga * a2 * lam + 2 * a1 * ga,
        4: HALF * al * a2 + 6 * a2 * ga,
    }))
    s = om - 2 * C
    out.append(PrintedSystem("kdv", 2, {
        0: s * a0 + HALF * al * a0 ** 2 + 2 * ga * a2 * mu ** 2 + ga * a1 * lam * mu ** 2,
        1: s * a1 + al * a0 * a1 + 6 * ga * a2 * lam * mu + 2 * ga * a1 * mu + a1 * mu + a1 * lam ** 2 * ga,
        2: s * a2 + al * a0 * a2 + HALF * al * a1 ** 2 + 4 * ga * a2 * lam ** 2 + 3 * a1 * ga * lam + 8 * a2 * mu * ga,
        3: al * a1 * a2 + 10 * ga * a2 * lam + 2 * a1 * ga,
        4: HALF * al * a2 ** 2 + 6 * a2 * ga,
    }, RatFunc(2 * om - 2 * C) / al))

    R = system_ring("kp")
    k, a, lam, mu, om, a0, a1, a2, C, s2, C2 = R.vars(
        "k", "a", "lambda", "mu", "omega", "a0", "a1", "a2", "C", "sigma2", "C2")
    out.append(PrintedSystem("kp", 1, {
        4: 3 * k ** 2 * a2 ** 2 + 6 * k ** 4 * a2,
        3: 6 * k ** 4 * a * a2 + 10 * k ** 4 * a2 * lam + 2 * k ** 4 * a1,
        2: (3 * s2 * a ** 2 * a2 + k * om * a2 + 3 * k ** 2 * a1 ** 2 + 3 * k ** 4 * a1 * lam
            + 8 * k ** 4 * a2 * mu + 6 * k ** 2 * a0 * a1 * a2 + 4 * k ** 4 * a2 * lam ** 2),
        1: (k * om * a1 + 2 * k ** 4 * a1 * mu + a * k ** 2 * a0 * a1 + 3 * s2 * a ** 2 * a1
            + 6 * k ** 4 * a2 * lam * mu + k ** 4 * a1 * lam ** 2),
        0: k * om * a0 + k ** 4 * a1 * lam * mu + 3 * k ** 2 * a0 ** 2 + 3 * s2 * a ** 2 * a0 + 2 * k ** 4 * a2 * mu ** 2,
    }, notes=("the printed parameter alpha of the y-direction is written a",)))
    out.append(PrintedSystem("kp", 2, {
        4: 3 * k ** 2 * C2 ** 2 + 6 * k ** 4 * a2,
        3: 6 * k ** 2 * a1 * a2 + 10 * k ** 4 * a2 * lam + 2 * k ** 4 * a1,
        2: (-6 * k ** 2 * s2 * a ** 2 * a2 - 2 * k ** 2 * om * a2 + 6 * k ** 2 * a0 * a2 - 2 * k ** 2 * C * a2
            + 3 * k ** 4 * a1 * lam + 3 * k ** 2 * a1 ** 2 + k * om * a2 + 8 * k ** 4 * a2 * mu
            + 3 * s2 * a ** 2 * a2 + 4 * k ** 4 * a2 * lam ** 2),
        1: (2 * k ** 4 * a1 * mu - 2 * k ** 4 * om * a1 + 2 * k ** 4 * a1 * lam ** 2 + k * om * a1
            - 2 * k ** 2 * C * a1 + 6 * k ** 4 * a2 - 6 * k ** 2 * s2 * a ** 2 * a1 + 6 * k ** 2 * a0 * a1
            + 3 * s2 * a ** 2 * a1),
        0: (k * om * a0 - 2 * k ** 2 * C * a0 - 6 * k ** 2 * s2 * a ** 2 * a0 + 3 * k ** 2 * a0 ** 2
            + 3 * s2 * a ** 2 * a0 + 2 * k ** 4 * a2 * mu ** 2 - 2 * k ** 4 * om * a0 + k ** 4 * a1 * lam * mu),
    }, RatFunc(-C - 3 * s2 * a ** 2 - k ** 2 * om) / 3,
        notes=("the printed parameter alpha of the y-direction is written a",
               "the top row prints C2 where a2 is expected; kept as the symbol C2")))
    return out


def printed_system(equation: str, c1_case: int) -> PrintedSystem:
    for s in printed_systems():
        if s.equation == equation and s.c1_case == c1_case:
            return s
    raise KeyError((equation, c1_case))
