"""
Tests for truncated Witt vector arithmetic
"""
import math
import random

import pytest

from modules.errors import ConfigError, ContextMismatch, LengthUnderflow, NonIntegralGhost
from modules.polyring import parse_polynomial
from modules.samplers import random_witt
from modules.wittcore import (
    RingContext, add, frobenius, ghost, ghost_of, int_from_witt, mul, one, scale, splitting_mod_p,
    sub, teichmuller, truncate, unghost, verschiebung, vV, witt_from_int, zero,
)


def _poly(text, ctx):
    return parse_polynomial(text, ctx.fp)


def test_context_rejects_composite_prime():
    """p must be prime"""
    with pytest.raises(ConfigError):
        RingContext(4, 1, 2)


def test_one_plus_one_at_p2():
    """1 + 1 = 2 = V(1) in W_2(F_2)"""
    ctx = RingContext(2, 1, 2)
    two = add(one(ctx), one(ctx))
    assert two.coords[0] == ctx.fp.zero
    assert two.coords[1] == ctx.fp.one
    assert int_from_witt(two) == 2


def test_teichmuller_sum_carries_into_second_coordinate():
    """[X] + [X] = (0, X^2) at p = 2"""
    ctx = RingContext(2, 1, 2)
    x = teichmuller(_poly('X1', ctx), ctx)
    total = add(x, x)
    assert total.coords == (ctx.fp.zero, _poly('X1^2', ctx))


def test_witt_from_int_matches_mod_p_power():
    for p in (2, 3, 5):
        ctx = RingContext(p, 1, 3)
        for c in (0, 1, p - 1, p, p * p + 1, -1):
            assert int_from_witt(witt_from_int(c, ctx)) == c % p ** 3, f"p={p} c={c}"


def test_ghost_unghost_inverse():
    ctx = RingContext(3, 2, 3)
    lift = [ctx.zz(1) + ctx.zz.gens[0], ctx.zz.gens[1] * 2, ctx.zz(0)]
    assert unghost(ghost(lift, 3), 3) == lift


def test_unghost_rejects_non_integral():
    ctx = RingContext(2, 1, 2)
    g = [ctx.zz.gens[0], ctx.zz.gens[0] + 1]
    with pytest.raises(NonIntegralGhost):
        unghost(g, 2)


def test_ring_axioms_on_random_samples():
    rng = random.Random(7)
    ctx = RingContext(3, 2, 2)
    for _ in range(5):
        x, y, z = (random_witt(ctx, rng) for _ in range(3))
        assert add(x, y) == add(y, x)
        assert mul(x, mul(y, z)) == mul(mul(x, y), z)
        assert mul(x, add(y, z)) == add(mul(x, y), mul(x, z))
        assert sub(add(x, y), y) == x


def test_frobenius_verschiebung_relations():
    """FV = p and VF = multiplication by V(1)"""
    rng = random.Random(11)
    ctx = RingContext(2, 1, 3)
    for _ in range(4):
        x = random_witt(ctx, rng)
        assert frobenius(verschiebung(x)) == scale(2, x)
        vf = verschiebung(frobenius(x))
        assert vf == mul(x, verschiebung(one(ctx.with_length(2))))


def test_teichmuller_is_multiplicative_and_frobenius_raises_power():
    ctx = RingContext(3, 1, 3)
    a, b = _poly('X1 + 1', ctx), _poly('X1^2', ctx)
    assert mul(teichmuller(a, ctx), teichmuller(b, ctx)) == teichmuller(a * b, ctx)
    assert frobenius(teichmuller(a, ctx)) == teichmuller(a ** 3, ctx.with_length(2))


def test_vv_and_truncate():
    ctx = RingContext(2, 1, 3)
    x = verschiebung(teichmuller(_poly('X1', ctx), ctx.with_length(2)))
    assert vV(x) == 1
    assert vV(zero(ctx)) == math.inf
    assert truncate(x, 1).is_zero()
    with pytest.raises(LengthUnderflow):
        truncate(x, 4)


def test_frobenius_needs_target_at_length_one():
    ctx = RingContext(2, 1, 1)
    with pytest.raises(LengthUnderflow):
        frobenius(one(ctx))


def test_mixed_contexts_raise():
    with pytest.raises(ContextMismatch):
        add(one(RingContext(2, 1, 2)), one(RingContext(2, 1, 3)))


def test_splitting_mod_p():
    ctx = RingContext(3, 1, 2)
    a0, rest = splitting_mod_p(witt_from_int(5, ctx))
    assert a0 == 2
    assert vV(rest) >= 1
    assert ghost_of(rest)[0] == 0
