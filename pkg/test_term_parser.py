"""
Tests for the prefix term language
"""
from fractions import Fraction

import pytest

from modules import drwalgebra as drw
from modules.drwbasis import BasicDiffKey, WeightFn
from modules.errors import ConfigError, DegreeMismatch, TermSyntaxError
from modules.lazard import parse_lift
from modules.reporting import element_lines
from modules.term_parser import (
    Basic, Op, Teich, element_to_term, evaluate, evaluate_text, format_term, parse_term,
)
from modules.wittcore import RingContext


CTX = RingContext(2, 1, 2)


def test_parse_structure():
    term = parse_term("(+ (teich X1) (V (teich X1^2)))")
    assert isinstance(term, Op) and term.name == '+'
    assert isinstance(term.args[0], Teich)
    assert term.args[1].name == 'V'


def test_parse_basic():
    term = parse_term("(e 3 ; 1/2,1 ; {2})")
    assert isinstance(term, Basic)
    assert term.eta == 3
    assert term.weights == (Fraction(1, 2), Fraction(1))
    assert term.parts == (1,)


@pytest.mark.parametrize("text", [
    "",
    "X1",
    "(teich X1",
    "(V (teich X1) (teich X1))",
    "(+ (teich X1))",
    "(foo (teich X1))",
    "(e 1 ; 1)",
    "(e x ; 1 ; {})",
    "(teich X1) extra",
])
def test_syntax_errors(text):
    with pytest.raises(TermSyntaxError) as info:
        parse_term(text)
    assert info.value.code == 'syntax_error'


def test_doubling_teichmuller():
    x = evaluate_text("(+ (teich X1) (teich X1))", CTX)
    assert element_lines(x) == ['e(2; 1; {}) : 1']


def test_verschiebung_term():
    x = evaluate_text("(V (teich X1))", CTX)
    assert x.terms == {BasicDiffKey(WeightFn.of(2, [Fraction(1, 2)]), ()): 1}


def test_frobenius_term_evaluates_one_level_up():
    x = evaluate_text("(F (V (teich X1)))", CTX)
    assert x == drw.scale(2, drw.teich_monomial([1], CTX))


def test_unknown_variable_is_syntax_error():
    with pytest.raises(TermSyntaxError):
        evaluate_text("(teich Y)", CTX)


def test_weight_count_mismatch():
    with pytest.raises(TermSyntaxError):
        evaluate_text("(e 1 ; 1,1 ; {})", CTX)


def test_adding_different_degrees():
    with pytest.raises(DegreeMismatch):
        evaluate_text("(+ (teich X1) (d (teich X1)))", CTX)


def test_named_lift():
    F = parse_lift("lift p=2 X1 -> X1^2 + 2*X1", CTX)
    x = evaluate_text("(lift F X1)", CTX, {'F': F})
    assert x.degree == 0
    with pytest.raises(ConfigError):
        evaluate_text("(lift G X1)", CTX, {'F': F})


def test_canonical_lift_is_additive_on_teichmuller_monomials():
    assert evaluate_text("(lift frob X1^3)", CTX) == evaluate_text("(teich X1^3)", CTX)
    assert evaluate_text("(lift frob X1^3 + X1)", CTX) == evaluate_text("(+ (teich X1^3) (teich X1))", CTX)


def test_format_and_element_round_trip():
    text = "(+ (teich X1) (d (V (teich X1))))"
    assert format_term(parse_term(text)) == "(+ (teich X1) (d (V (teich X1))))"
    x = evaluate_text("(* (teich X1) (d (V (teich X1^3))))", CTX)
    assert evaluate(element_to_term(x), CTX) == x
