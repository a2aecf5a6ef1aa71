from __future__ import annotations

from fractions import Fraction

import pytest
import sympy as sp

from gexpand.algebra import RatFunc, substitute
from gexpand.engine import (
    NoBalanceError, balance_degree, derivation_report, derive, derive_families,
    leading_coefficient_law, substitute_ansatz,
)
from gexpand.reduction import (
    EQUATIONS, PdeSpec, PhiOde, apply_shift, c1_branches, integrate_once, make_traveling_ode,
    specialize_c1,
)


@pytest.fixture(scope="module")
def derivations():
    return {eq: derive(PdeSpec(eq)) for eq in EQUATIONS}


# -- balancing -----------------------------------------------------------------------
def test_balance_degrees(derivations):
    assert [c.m for c in derivations["burgers"].cases] == [1, 1]
    assert [c.m for c in derivations["kdv"].cases] == [2, 2]
    assert [c.m for c in derivations["kp"].cases] == [2, 2]


def test_balance_without_nonlinearity_fails():
    pde = PdeSpec("burgers")
    phi = apply_shift(integrate_once(make_traveling_ode(pde)))
    phi = specialize_c1(phi, c1_branches(phi)[0])
    linear = PhiOde(pde, {m: c for m, c in phi.terms.items() if m != (0, 0)})
    with pytest.raises(NoBalanceError):
        balance_degree(linear)


def test_ansatz_degree_positive():
    pde = PdeSpec("kdv")
    phi = apply_shift(integrate_once(make_traveling_ode(pde)))
    with pytest.raises(ValueError):
        substitute_ansatz(phi, 0)


# -- leading coefficients ------------------------------------------------------------
def test_leading_coefficients_exact(derivations):
    for eq, der in derivations.items():
        for case in der.cases:
            ring = case.branches[0].omega.ring
            law = leading_coefficient_law(case.phi, case.m)
            for b in case.branches:
                assert b.coefficients[-1] == law.embed(ring)
    for b in derivations["burgers"].branches:
        alpha, beta = b.omega.ring.vars("alpha", "beta")
        assert b.coefficients[1] == RatFunc(2 * beta, alpha)
    for b in derivations["kdv"].branches:
        alpha, gamma, lam = b.omega.ring.vars("alpha", "gamma", "lambda")
        assert b.coefficients[2] == RatFunc(-12 * gamma, alpha)
        assert b.coefficients[1] == RatFunc(-12 * gamma * lam, alpha)
    for b in derivations["kp"].branches:
        k, lam = b.omega.ring.vars("k", "lambda")
        assert b.coefficients[2] == RatFunc(-2 * k ** 2)
        assert b.coefficients[1] == RatFunc(-2 * k ** 2 * lam)


def test_system_sizes(derivations):
    assert [len(c.system.equations) for c in derivations["burgers"].cases] == [3, 3]
    assert [len(c.system.equations) for c in derivations["kdv"].cases] == [5, 5]


def test_branch_counts_and_verification(derivations):
    for der in derivations.values():
        assert len(der.branches) == 4
        assert all(b.verified for b in der.branches)
        assert [b.index for b in der.branches] == list(range(4))


def test_burgers_branches_need_real_radical(derivations):
    for b in derivations["burgers"].branches:
        assert set(b.radicals) == {"rt1"}
        assert str(b.radicals["rt1"]) == "lambda^2 - 4*mu"


def test_system_solutions_zero_every_row(derivations):
    """Every branch zeroes every extracted equation (rt1 reduced with its radicand)."""
    for der in derivations.values():
        for case in der.cases:
            for b in case.branches:
                ring = b.omega.ring
                for eq in case.system.equations:
                    val = substitute(eq.embed(ring), b.assignments).reduce(b.radicals)
                    assert val.is_zero()


# -- independent oracle: the original PDE, written directly in sympy ------------------
W = sp.Symbol("w")


def _D(expr, lam, mu):
    return sp.expand(sp.diff(expr, W) * -(W ** 2 + lam * W + mu))


def _pde_residual(eq, u, values, sigma2=1):
    lam, mu = values["lambda"], values["mu"]

    def D(e, n=1):
        for _ in range(n):
            e = _D(e, lam, mu)
        return e
    cx, cy, ct = values["wave"]
    if eq == "burgers":
        return sp.expand(ct * D(u) + values["alpha"] * u * cx * D(u) + values["beta"] * cx ** 2 * D(u, 2))
    if eq == "kdv":
        return sp.expand(ct * D(u) + values["alpha"] * u * cx * D(u) + values["gamma"] * cx ** 3 * D(u, 3))
    inner = ct * D(u) + 6 * u * cx * D(u) + cx ** 3 * D(u, 3)
    return sp.expand(cx * D(inner) + 3 * sigma2 * cy ** 2 * D(u, 2))


POINTS = {
    "burgers": {"alpha": Fraction(3, 2), "beta": Fraction(2, 3), "lambda": Fraction(5), "mu": Fraction(4),
                "C": Fraction(7, 5)},
    "kdv": {"alpha": Fraction(2), "gamma": Fraction(-1, 3), "lambda": Fraction(3, 2), "mu": Fraction(5, 7),
            "C": Fraction(1, 4)},
    "kp": {"k": Fraction(3, 2), "a": Fraction(-2, 5), "lambda": Fraction(1, 3), "mu": Fraction(-2),
           "C": Fraction(5, 3)},
}


@pytest.mark.parametrize("eq,sigma2", [("burgers", 1), ("kdv", 1), ("kp", 1), ("kp", -1)])
def test_branches_solve_original_pde_sympy_oracle(eq, sigma2):
    der = derive(PdeSpec(eq, sigma2))
    vals = dict(POINTS[eq])
    if eq == "burgers":
        vals["rt1"] = Fraction(3)  # lambda^2 - 4 mu = 9
    for b in der.branches:
        num = {k: sp.Rational(v.numerator, v.denominator) for k, v in vals.items()}
        ev = lambda rf: sp.Rational(rf.evaluate(vals).numerator, rf.evaluate(vals).denominator)
        coeffs = [ev(a) for a in b.coefficients]
        c1 = ev(b.c1)
        num["wave"] = tuple(ev(c) for c in b.wave)
        u = c1 + sum(a * W ** k for k, a in enumerate(coeffs))
        assert _pde_residual(eq, u, num, sigma2) == 0, b.index


def test_derivation_report_schema(derivations):
    rep = derivation_report(derivations["kdv"])
    assert rep["equation"] == "kdv" and rep["branch_count"] == 4
    assert len(rep["cases"]) == 2
    case = rep["cases"][0]
    assert set(case) == {"c1_case", "phi_ode", "assumptions", "m", "system", "branches"}
    assert case["system"][0]["power"] == 0
    assert derive_families(PdeSpec("kdv"))[0].to_dict() == case["branches"][0]


def test_sympy_oracle_rejects_perturbed_branch():
    b = derive(PdeSpec("kdv")).branches[0]
    vals = POINTS["kdv"]
    ev = lambda rf: sp.Rational(rf.evaluate(vals).numerator, rf.evaluate(vals).denominator)
    num = {k: sp.Rational(v.numerator, v.denominator) for k, v in vals.items()}
    num["wave"] = tuple(ev(c) for c in b.wave)
    coeffs = [ev(a) for a in b.coefficients]
    u = coeffs[0] + sp.Rational(1, 10) + coeffs[1] * W + coeffs[2] * W ** 2
    assert _pde_residual("kdv", u, num) != 0
