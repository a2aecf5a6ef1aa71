from __future__ import annotations

from fractions import Fraction

import pytest

from gexpand.algebra import RatFunc, StructureError
from gexpand.reduction import (
    EQUATIONS, PdeSpec, UnsupportedFormError, apply_shift, c1_branches, integrate_once,
    make_traveling_ode, parse_pde_spec, specialize_c1,
)


def _chain(eq):
    pde = PdeSpec(eq)
    trav = make_traveling_ode(pde)
    integ = integrate_once(trav)
    return pde, trav, integ, apply_shift(integ)


def test_traveling_odes():
    _, trav, _, _ = _chain("burgers")
    assert str(trav) == "(alpha)*u'*u + (beta)*u'' + (-omega)*u' = 0"
    _, trav, _, _ = _chain("kdv")
    assert str(trav) == "(alpha)*u'*u + (gamma)*u''' + (-omega)*u' = 0"
    _, trav, _, _ = _chain("kp")
    assert str(trav) == "(6*k^2)*u''*u + (6*k^2)*u'^2 + (k^4)*u^(4) + (k*omega + 3*a^2)*u'' = 0"


def test_kp_sigma_sign_enters_y_term():
    trav = make_traveling_ode(PdeSpec("kp", -1))
    assert "(k*omega - 3*a^2)*u''" in str(trav)


@pytest.mark.parametrize("eq", EQUATIONS)
def test_integration_constant_is_c1_times_C(eq):
    _, _, integ, _ = _chain(eq)
    ring = integ.ring
    assert integ.constant == ring.var("c1") * ring.var("C")


def test_kp_is_integrated_twice():
    _, _, _, shifted = _chain("kp")
    assert shifted.notes
    assert str(shifted).startswith("(3*k^2)*phi^2 + (k^4)*phi''")


def test_shift_constant_part_burgers():
    _, _, _, shifted = _chain("burgers")
    assert str(shifted.constant_part) == "1/2*alpha*c1^2 - omega*c1 + c1*C"


@pytest.mark.parametrize("eq", EQUATIONS)
def test_c1_branches_zero_first_and_constant_vanishes(eq):
    _, _, _, shifted = _chain(eq)
    branches = c1_branches(shifted)
    assert len(branches) == 2
    assert branches[0].value.is_zero()
    for b in branches:
        phi = specialize_c1(shifted, b)
        assert phi.constant_part.is_zero()


def test_c1_second_branch_values():
    _, _, _, shifted = _chain("burgers")
    b = c1_branches(shifted)[1]
    ring = shifted.ring
    omega, C, alpha = ring.vars("omega", "C", "alpha")
    assert b.value == RatFunc(2 * omega - 2 * C, alpha)


def test_double_integration_rejected():
    _, _, integ, _ = _chain("burgers")
    with pytest.raises(UnsupportedFormError):
        integrate_once(integ)
    _, trav, _, _ = _chain("kdv")
    with pytest.raises(UnsupportedFormError):
        apply_shift(trav)


def test_parse_pde_spec():
    pde, binds = parse_pde_spec("equation=kp\nsigma2=-1, k=1/2\n# comment")
    assert pde == PdeSpec("kp", -1)
    assert binds == {"k": Fraction(1, 2)}
    with pytest.raises(ValueError):
        parse_pde_spec("k=1")
    with pytest.raises(ValueError):
        parse_pde_spec("equation=kdv, alpha=1, alpha=2")
    with pytest.raises(ValueError):
        parse_pde_spec("equation=heat")


def test_pde_spec_validation():
    with pytest.raises(ValueError):
        PdeSpec("kp", 2)
    assert PdeSpec("kp").dimension == 2 and PdeSpec("kdv").dimension == 1


def test_c1_branches_need_c1_dependence():
    _, _, _, shifted = _chain("burgers")
    phi = specialize_c1(shifted, c1_branches(shifted)[0])
    with pytest.raises(StructureError):
        c1_branches(phi)
