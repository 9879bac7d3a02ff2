"""
Tests for weight functions, basic differential keys and generator enumeration
"""
import math
from fractions import Fraction

import pytest

from modules.drwbasis import (
    BasicDiffKey, RebarCage, WeightFn, coeff_modulus, enumerate_G, enumerate_H, format_key,
    keys_of_weight, order_less, vp_fraction, vp_int,
)
from modules.errors import ConfigError, IndexOutsideSupport
from modules.wittcore import RingContext


def test_valuations():
    assert vp_int(12, 2) == 2
    assert vp_int(0, 3) == math.inf
    assert vp_fraction(Fraction(3, 4), 2) == -2


def test_weight_rejects_bad_denominator():
    with pytest.raises(ConfigError):
        WeightFn.of(2, [Fraction(1, 3)])
    with pytest.raises(ConfigError):
        WeightFn.of(3, [-1])


def test_weight_invariants():
    a = WeightFn.of(2, [Fraction(1, 2), 3, 0])
    assert a.support == (0, 1)
    assert a.u == 1
    assert a.vp == -1
    assert a.size == Fraction(7, 2)
    assert not a.is_integral
    # smaller valuation comes first in the support order
    assert a.sorted_support() == (0, 1)
    assert order_less(a, 0, 1)


def test_order_less_outside_support():
    a = WeightFn.of(2, [1, 0])
    with pytest.raises(IndexOutsideSupport):
        order_less(a, 0, 1)


def test_key_rejects_index_outside_support():
    with pytest.raises(IndexOutsideSupport):
        BasicDiffKey(WeightFn.of(2, [0, 1]), (0,))


def test_segments_and_fracture():
    p = 2
    integral = BasicDiffKey(WeightFn.of(p, [1, 2]), (1,))
    assert integral.segments() == [(0,), (1,)]
    assert integral.fracture == 'integral'

    d_frac = BasicDiffKey(WeightFn.of(p, [Fraction(1, 2)]), (0,))
    assert d_frac.first_segment_empty
    assert d_frac.fracture == 'd_fractional'

    pure = BasicDiffKey(WeightFn.of(p, [Fraction(1, 2)]), ())
    assert pure.fracture == 'pure_fractional'
    assert coeff_modulus(pure, 3) == 2
    assert coeff_modulus(pure, 1) == 0


def test_format_key():
    key = BasicDiffKey(WeightFn.of(2, [1, Fraction(1, 2)]), (1, 0))
    assert format_key(key, 3) == "e(3; 1,1/2; {1,2})"


def test_enumerate_H():
    keys = list(enumerate_H(1, RingContext(3, 2, 1)))
    assert len(keys) == 2
    assert all(k.weight.is_integral and k.degree == 1 for k in keys)
    assert list(enumerate_H(3, RingContext(3, 2, 1))) == []


def test_enumerate_G_one_variable():
    keys = enumerate_G(0, RingContext(2, 1, 2), 1, 1)
    assert keys == [BasicDiffKey(WeightFn.of(2, [Fraction(1, 2)]), ())]
    assert enumerate_G(1, RingContext(2, 1, 2), 1, 1) == []


def test_enumerate_G_respects_weight_bound():
    keys = enumerate_G(1, RingContext(3, 2, 2), 1, 2)
    assert keys
    for key in keys:
        assert key.weight.size <= 2
        assert key.u == 1
        assert key.degree == 1


def test_enumerators_take_prime_and_variables_from_context():
    ctx = RingContext(3, 3, 1)
    h = list(enumerate_H(2, ctx))
    assert len(h) == math.comb(3, 2)
    assert all(k.p == 3 and k.weight.n == 3 for k in h)
    g = enumerate_G(0, ctx, 1, 1)
    assert g and all(k.p == 3 and k.weight.n == 3 and k.u == 1 for k in g)
    assert enumerate_G(-1, ctx, 1, 1) == []


def test_keys_of_weight():
    keys = keys_of_weight(WeightFn.of(2, [1, 1, 0]), 1)
    assert [k.parts for k in keys] == [(0,), (1,)]


def test_rebar_cage_indices():
    laurent = RebarCage.laurent(2)
    assert laurent.indices(1, 0) == [(0,), (1,)]
    assert laurent.indices(1, 1) == [(1,), (3,)]
    assert laurent.label((3,)) == 'T^3'
    perfect = RebarCage.perfect(2)
    assert perfect.indices(2, 0) == [(0,)]
    assert perfect.indices(2, 1) == []
