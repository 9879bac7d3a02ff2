"""
Tests for zeta_eps, v_b and gamma_{eps,b}
"""
import math
import random
from fractions import Fraction

import pytest

from modules import drwalgebra as drw
from modules import pseudoval
from modules.etale import artin_schreier_presentation
from modules.errors import ConfigError, PreconditionViolated, UnknownInequality
from modules.polyring import parse_polynomial
from modules.samplers import random_element, random_witt
from modules.term_parser import evaluate_text
from modules.wittcore import RingContext, one, teichmuller, verschiebung

QUARTER = Fraction(1, 4)


def test_zeta_of_verschiebung_teichmuller():
    """zeta_{1/4}(V[X]) = 1 - 1/8"""
    ctx = RingContext(2, 1, 2)
    x = evaluate_text("(V (teich X1))", ctx)
    assert pseudoval.zeta(x, QUARTER) == Fraction(7, 8)
    assert pseudoval.zeta_minimizer(x, QUARTER).text() == 'e(1; 1/2; {})'


def test_zeta_of_zero_and_one():
    ctx = RingContext(3, 2, 2)
    assert pseudoval.zeta(drw.DrwElement.zero(ctx), QUARTER) == math.inf
    assert pseudoval.zeta(drw.teich_monomial([0, 0], ctx), QUARTER) == 0
    assert pseudoval.zeta_minimizer(drw.DrwElement.zero(ctx), QUARTER) is None


def test_zeta_counts_p_adic_valuation():
    ctx = RingContext(2, 1, 3)
    x = drw.teich_monomial([1], ctx)
    # 2 * n * v_p(eta) with n = 1
    assert pseudoval.zeta(drw.scale(2, x), QUARTER) == pseudoval.zeta(x, QUARTER) + 2


def test_v_weighted():
    R = RingContext(2, 2, 1).fp
    P = parse_polynomial('X1^2*X2 + X1', R)
    assert pseudoval.v_weighted(P, (1, 2)) == -4
    assert pseudoval.v_weighted(P) == -3
    assert pseudoval.v_weighted(R.zero) == math.inf


def test_gamma_values():
    ctx = RingContext(2, 1, 2)
    x = teichmuller(ctx.fp.gens[0], ctx.with_length(1))
    vx = verschiebung(x)
    assert pseudoval.gamma(vx, QUARTER).value == Fraction(7, 8)
    assert pseudoval.gamma(x, QUARTER).value == Fraction(-1, 4)
    assert pseudoval.gamma(one(ctx), QUARTER).value == 0
    assert pseudoval.gamma(vx, QUARTER).exact


def test_gamma_over_presentation_uses_best_preimage():
    pres = artin_schreier_presentation(2)
    big = pres.big_ctx(2)
    s = big.fp.gens[pres.s_offset]
    # s^2 = s + X1: the normal form has degree 1 where the raw preimage has degree 2
    w = teichmuller(s ** 2, big)
    assert pseudoval.gamma(w, QUARTER).value == Fraction(-1, 2)
    bound = pseudoval.gamma(w, QUARTER, presentation=pres)
    assert bound.value == Fraction(-1, 4)
    assert bound.exact is False
    normal = pres.normalize_witt(w)
    assert pseudoval.gamma(normal, QUARTER, presentation=pres).value == Fraction(-1, 4)
    assert bound >= pseudoval.gamma(w, QUARTER).value


def test_verschiebung_delta():
    ctx = RingContext(2, 1, 2)
    assert pseudoval.verschiebung_delta(one(ctx), Fraction(1, 2), QUARTER) == Fraction(1, 8)
    with pytest.raises(PreconditionViolated):
        pseudoval.verschiebung_delta(one(ctx), 1, QUARTER)


def test_eps_params_validation():
    with pytest.raises(ConfigError):
        pseudoval.EpsParams(0, (1,))
    with pytest.raises(ConfigError):
        pseudoval.EpsParams(QUARTER, (0,))
    assert pseudoval.EpsParams.uniform(QUARTER, 2).radii == (1, 1)


def test_unknown_inequality():
    with pytest.raises(UnknownInequality):
        pseudoval.check_inequality('triangle', [])
    with pytest.raises(UnknownInequality):
        pseudoval.sample_kind('triangle')


def test_overconvergence_report():
    ctx = RingContext(2, 1, 2)
    x = evaluate_text("(V (teich X1))", ctx)
    report = pseudoval.overconvergence_report(x, (Fraction(1, 2), QUARTER))
    assert report['slopes'][QUARTER] == Fraction(7, 8)
    assert report['minimizers'][Fraction(1, 2)] == 'e(1; 1/2; {})'


@pytest.mark.parametrize("name", sorted(pseudoval.CHECKS))
def test_catalogue_holds_on_samples(name):
    rng = random.Random(23)
    for ctx in (RingContext(2, 1, 2), RingContext(3, 2, 2)):
        if pseudoval.sample_kind(name) == 'witt':
            samples = [random_witt(ctx, rng, max_deg=3) for _ in range(4)]
        else:
            samples = [random_element(ctx, rng, rng.choice((0, 1))) for _ in range(4)]
        report = pseudoval.check_inequality(name, samples)
        assert report.passed, report.failures[:3]
