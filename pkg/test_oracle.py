"""
Tests for the rational model embedding of de Rham-Witt elements
"""
import random
from fractions import Fraction

import pytest

from modules import drwalgebra as drw
from modules import oracle
from modules.errors import ExponentCapExceeded, NonIntegralExtraction
from modules.samplers import random_element
from modules.wittcore import RingContext


def test_model_operators_on_monomials():
    x = oracle.ModelForm.monomial(2, [1])
    assert oracle.model_V(x) == oracle.ModelForm.monomial(2, [Fraction(1, 2)], 2)
    assert oracle.model_F(x) == oracle.ModelForm.monomial(2, [2])
    assert oracle.model_d(oracle.ModelForm.monomial(2, [2])) == oracle.ModelForm.monomial(2, [2], 2, (0,))


def test_frobenius_of_dlog_form():
    """F(X dlog X) = X^2 dlog X"""
    form = oracle.ModelForm.monomial(2, [1], 1, (0,))
    assert oracle.model_F(form) == oracle.ModelForm.monomial(2, [2], 1, (0,))


def test_wedge_sign():
    p = 3
    a = oracle.ModelForm.monomial(p, [1, 1], 1, (1,))
    b = oracle.ModelForm.monomial(p, [1, 1], 1, (0,))
    assert oracle.model_mul(a, b) == oracle.model_scale(oracle.model_mul(b, a), -1)
    assert not oracle.model_mul(a, a)


def test_model_V_cap():
    form = oracle.ModelForm.monomial(2, [Fraction(1, 2)])
    with pytest.raises(ExponentCapExceeded):
        oracle.model_V(form, cap=1)


def test_embed_teichmuller_and_differential():
    ctx = RingContext(2, 1, 2)
    x = drw.teich_monomial([1], ctx)
    assert oracle.embed(x) == oracle.ModelForm.monomial(2, [1])
    assert oracle.embed(drw.differential(x)) == oracle.ModelForm.monomial(2, [1], 1, (0,))


def test_extract_rejects_non_integral():
    ctx = RingContext(2, 1, 2)
    with pytest.raises(NonIntegralExtraction):
        oracle.extract(oracle.ModelForm.monomial(2, [1], Fraction(1, 2)), ctx)
    with pytest.raises(NonIntegralExtraction):
        oracle.extract(oracle.ModelForm.monomial(2, [0, 1], 1, (0,)), RingContext(2, 2, 2))


def test_round_trip_and_homomorphisms():
    rng = random.Random(17)
    ctx = RingContext(3, 2, 2)
    up = ctx.with_length(3)
    for degree in (0, 1):
        for _ in range(3):
            x = random_element(ctx, rng, degree)
            assert oracle.extract(oracle.embed(x), ctx) == x
            assert oracle.extract(oracle.model_d(oracle.embed(x)), ctx) == drw.differential(x)
            assert oracle.extract(oracle.model_V(oracle.embed(x)), up) == drw.verschiebung_op(x)
