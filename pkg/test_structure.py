"""
Tests for structure decompositions over polynomial rings and etale extensions
"""
import random
from fractions import Fraction

import pytest

from modules import drwalgebra as drw
from modules.drwbasis import BasicDiffKey, WeightFn
from modules.errors import ContextMismatch, UnsupportedPresentation
from modules.etale import artin_schreier_presentation, parse_presentation, trivial_presentation
from modules.lazard import canonical_lift, parse_lift
from modules.polyring import zz_ring
from modules.samplers import random_element
from modules.structure import (
    EtaleCalculus, certified_eps, etale_recompose, etale_structure_decompose, poly_structure_decompose,
    poly_summands, recompose, zeta_certificates,
)
from modules.term_parser import evaluate_text
from modules.wittcore import RingContext

CTX = RingContext(2, 1, 2)


def test_teichmuller_is_a_single_H_summand():
    x = evaluate_text("(teich X1)", CTX)
    result = poly_structure_decompose(x)
    key = BasicDiffKey(WeightFn.of(2, [0]), ())
    assert result.h == {key: zz_ring(('X1',)).gens[0]}
    assert not result.g and not result.dg
    assert recompose(result, canonical_lift(CTX)) == x


def test_zero_has_zero_decomposition():
    result = poly_structure_decompose(drw.DrwElement.zero(CTX, 1))
    assert result.is_zero()


def test_random_round_trip_canonical():
    rng = random.Random(29)
    ctx = RingContext(2, 2, 2)
    F = canonical_lift(ctx)
    for degree in (0, 1, 2):
        for _ in range(2):
            x = random_element(ctx, rng, degree)
            result = poly_structure_decompose(x, F)
            assert recompose(result, F) == x, f"{x!r}"


def test_round_trip_general_lift():
    F = parse_lift("lift p=2 X1 -> X1^2 + 2*X1\nprecision 2", CTX)
    for text in ("(teich X1^3)", "(V (teich X1))", "(d (V (teich X1)))", "(* (teich X1) (d (teich X1^2)))"):
        x = evaluate_text(text, CTX)
        result = poly_structure_decompose(x, F, max_weight=4)
        assert recompose(result, F) == x, text


def test_lift_over_other_ring_is_rejected():
    other = RingContext(2, 2, 2)
    with pytest.raises(ContextMismatch):
        poly_structure_decompose(evaluate_text("(teich X1)", CTX), canonical_lift(other))


def test_divisibility_and_filtration_carry_over():
    x = evaluate_text("(+ (teich X1^3) (teich X1^3))", CTX)
    assert poly_structure_decompose(x).divisible_by_p_power(1)
    vx = evaluate_text("(V (teich X1))", CTX)
    result = poly_structure_decompose(vx)
    assert result.satisfies_filtration(1)
    assert not poly_structure_decompose(evaluate_text("(teich X1)", CTX)).satisfies_filtration(1)


def test_certificates_recorded_per_eps():
    x = evaluate_text("(V (teich X1))", CTX)
    grid = (Fraction(1, 2), Fraction(1, 4))
    result = poly_structure_decompose(x, eps_grid=grid)
    assert set(result.certificates) == set(grid)
    cert = result.certificates[Fraction(1, 4)]
    assert cert.value == Fraction(7, 8)
    assert cert.least == Fraction(7, 8)
    assert cert.holds
    assert result.eps_certified == Fraction(1, 2)


def test_certificate_rejects_summand_far_below_zeta():
    x = evaluate_text("(V (teich X1))", CTX)
    F = canonical_lift(CTX)
    result = poly_structure_decompose(x, F, eps_grid=(Fraction(1, 4),))
    summands = poly_summands(result, F)
    tampered = summands + [evaluate_text("(teich X1^8)", CTX), evaluate_text("(- (teich X1^8))", CTX)]
    assert drw.sum_elements(tampered, CTX, 0) == x
    certs = zeta_certificates(x, tampered, (Fraction(1, 2), Fraction(1, 4)), eta=Fraction(1, 4))
    cert = certs[Fraction(1, 4)]
    assert cert.least == -2
    assert not cert.holds
    assert certified_eps(certs) is None


def test_certificate_tolerance_is_eta():
    x = evaluate_text("(teich X1)", CTX)
    below = evaluate_text("(teich X1^2)", CTX)
    # zeta(x) = -1/4 and zeta([X1^2]) = -1/2 at eps = 1/4
    assert zeta_certificates(x, [below], (Fraction(1, 4),), eta=Fraction(1, 4))[Fraction(1, 4)].holds
    assert not zeta_certificates(x, [below], (Fraction(1, 4),), eta=Fraction(1, 8))[Fraction(1, 4)].holds


def test_push_teichmuller_s():
    pres = artin_schreier_presentation(2)
    calc = EtaleCalculus(pres)
    x = evaluate_text("(teich s2)", pres.big_ctx(2))
    form = calc.push(x)
    assert not form.components[0]
    assert form.components[1] == drw.teich_monomial([0], pres.base_ctx(2))


def test_etale_differential_of_s():
    """d on pushed forms agrees with pushing d[s] from the big ring"""
    pres = artin_schreier_presentation(2)
    calc = EtaleCalculus(pres)
    m = 2
    s = calc.push(evaluate_text("(teich s2)", pres.big_ctx(m)))
    ds = calc.d(s)
    pushed = calc.push(evaluate_text("(d (teich s2))", pres.big_ctx(m)))
    assert ds == pushed


def test_etale_decomposition_round_trip():
    pres = artin_schreier_presentation(2)
    calc = EtaleCalculus(pres)
    G = pres.big_lift(2)
    for text in ("(teich X1)", "(teich s2)", "(d (teich s2))"):
        form = calc.push(evaluate_text(text, pres.big_ctx(2)))
        result = etale_structure_decompose(form, G, max_weight=3)
        assert result.kind == 'etale'
        assert etale_recompose(result, calc, G) == form, text


def test_etale_certificates_stop_at_delta():
    pres = artin_schreier_presentation(2)
    calc = EtaleCalculus(pres)
    G = pres.big_lift(2)
    form = calc.push(evaluate_text("(teich s2)", pres.big_ctx(2)))
    result = etale_structure_decompose(form, G, max_weight=3, eps_grid=(Fraction(1), Fraction(1, 4)))
    assert result.delta == Fraction(1, 2)
    assert set(result.certificates) == {Fraction(1, 4)}
    assert result.certificates[Fraction(1, 4)].value == Fraction(0)
    above = etale_structure_decompose(form, G, max_weight=3, eps_grid=(Fraction(1),))
    assert above.certificates == {}
    assert above.eps_certified is None


def test_rank_one_falls_back_to_polynomial():
    pres = trivial_presentation(2, 1)
    calc = EtaleCalculus(pres)
    form = calc.from_base(evaluate_text("(teich X1)", pres.base_ctx(2)))
    result = etale_structure_decompose(form)
    assert result.kind == 'etale'
    assert result.h


def test_localized_presentation_is_unsupported():
    pres = parse_presentation("etale p=2 n=1 rank=1 P=X1\n")
    with pytest.raises(UnsupportedPresentation):
        EtaleCalculus(pres)
