"""
Tests for Frobenius lifts and the Lazard map t_F
"""
from fractions import Fraction

import pytest

from modules import drwalgebra as drw
from modules.errors import ConfigError, InvalidLift, PresentationError
from modules.lazard import (
    FormalForm, FrobLift, canonical_lift, estimate_v_F, parse_lift, t_F, t_F_forms, t_frob, v_F,
    v_F_forms,
)
from modules.polyring import parse_polynomial
from modules.wittcore import RingContext, add, ghost_of, mul, teichmuller, vV


CTX = RingContext(2, 1, 3)
LIFT_TEXT = "# wdrw-format 1\nlift p=2 X1 -> X1^2 + 2*X1\nprecision 3\n"


def _zz(text, ctx=CTX):
    return parse_polynomial(text, ctx.zz)


def test_parse_lift():
    F = parse_lift(LIFT_TEXT, CTX)
    assert F.precision == 3
    assert not F.is_canonical
    assert F.deltas() == [_zz('X1')]
    assert 'X1^2 + 2*X1' in F.text()


def test_parse_lift_without_context():
    F = parse_lift(LIFT_TEXT)
    assert F.ctx.p == 2 and F.ctx.names == ('X1',)


@pytest.mark.parametrize("text, error", [
    ("lift p=3 X1 -> X1^3", PresentationError),
    ("lift p=2 X9 -> X9^2", PresentationError),
    ("frob X1", PresentationError),
    ("lift p=2 X1 -> X1^2 + X1", InvalidLift),
])
def test_parse_lift_errors(text, error):
    with pytest.raises(error):
        parse_lift(text, CTX)


def test_precision_must_be_positive():
    with pytest.raises(InvalidLift):
        FrobLift(CTX, 0, (_zz('X1^2'),))


def test_canonical_t_F_is_teichmuller_on_monomials():
    for text in ('X1', 'X1^3', '1'):
        assert t_frob(_zz(text), CTX) == teichmuller(parse_polynomial(text, CTX.fp), CTX)


def test_worked_example_coordinates():
    """t_F(X) = (X, X, X^3 + X^2 + X) for F(X) = X^2 + 2X at p = 2"""
    F = parse_lift(LIFT_TEXT, CTX)
    w = t_F(F, _zz('X1'), 3)
    fp = CTX.fp
    assert w.coords == (fp.gens[0], fp.gens[0], fp.gens[0] ** 3 + fp.gens[0] ** 2 + fp.gens[0])


def test_t_F_ghost_components_follow_the_lift():
    F = parse_lift(LIFT_TEXT, CTX)
    P = _zz('X1^2 + X1')
    w = t_F(F, P, 2)
    g = ghost_of(w)
    # ghosts agree with P and F(P) mod p^(u+1)
    assert all(int(c) % 2 == 0 for c in (g[0] - P).values())
    FP = _zz('(X1^2 + 2*X1)^2 + X1^2 + 2*X1')
    assert all(int(c) % 4 == 0 for c in (g[1] - FP).values())


def test_t_F_is_a_ring_map():
    F = parse_lift(LIFT_TEXT, CTX)
    P, Q = _zz('X1^2 + 1'), _zz('X1^3 + X1')
    assert t_F(F, P + Q, 3) == add(t_F(F, P, 3), t_F(F, Q, 3))
    assert t_F(F, P * Q, 3) == mul(t_F(F, P, 3), t_F(F, Q, 3))


def test_v_F_lies_in_VW():
    F = parse_lift(LIFT_TEXT, CTX)
    for text in ('X1', 'X1^2 + X1', '3*X1^3'):
        assert vV(v_F(F, _zz(text), 3)) >= 1
    assert v_F(canonical_lift(CTX), _zz('X1'), 3).is_zero()


def test_forms_version():
    F = parse_lift(LIFT_TEXT, CTX)
    form = FormalForm.monomial_form(CTX, 1, (1,), (0,))
    image = t_F_forms(F, form, 2)
    assert image.degree == 1
    defect = v_F_forms(F, form, 2)
    assert drw.in_filtration(defect, 1)


def test_estimate_rejects_bad_mu():
    with pytest.raises(ConfigError):
        estimate_v_F(canonical_lift(CTX), (Fraction(1, 2),), mu=Fraction(3, 2))


def test_estimate_canonical_lift_holds_everywhere():
    grid = (Fraction(1, 4), Fraction(1, 2))
    estimate = estimate_v_F(canonical_lift(CTX.with_length(2)), grid, max_exponent=3)
    assert all(estimate.holds.values())
    assert estimate.delta == Fraction(1, 2)
    assert estimate.checked > 0
