"""
Tests for de Rham-Witt elements: d, V, F, products, filtrations, rewriting and kernels
"""
import random
from fractions import Fraction

import pytest

from modules import drwalgebra as drw
from modules.drwbasis import BasicDiffKey, WeightFn
from modules.errors import CoefficientOutOfRange, LengthUnderflow, PreconditionViolated, SingularSystem
from modules.linalg import solve_rational_any
from modules.samplers import random_element, random_witt
from modules.wittcore import RingContext, teichmuller


def _key(p, weights, parts=()):
    return BasicDiffKey(WeightFn.of(p, weights), parts)


@pytest.fixture
def ctx2():
    return RingContext(2, 1, 2)


def test_teichmuller_sum(ctx2):
    """[X] + [X] = 2[X] at level 2"""
    x = drw.teich_monomial([1], ctx2)
    assert x + x == drw.make_e(2, _key(2, [1]), ctx2)


def test_make_e_coefficient_range(ctx2):
    with pytest.raises(CoefficientOutOfRange):
        drw.make_e(4, _key(2, [1]), ctx2)
    # the modulus of a weight with u >= m is p^0, so the element is zero
    assert not drw.make_e(0, _key(2, [Fraction(1, 4)]), ctx2)


def test_differential_of_teichmuller(ctx2):
    x = drw.teich_monomial([1], ctx2)
    dx = drw.differential(x)
    assert dx.terms == {_key(2, [1], (0,)): 1}
    assert not drw.differential(dx)


def test_verschiebung_of_teichmuller():
    ctx1 = RingContext(2, 1, 1)
    vx = drw.verschiebung_op(drw.teich_monomial([1], ctx1))
    assert vx.level == 2
    assert vx.terms == {_key(2, [Fraction(1, 2)]): 1}
    assert drw.in_filtration(vx, 1)
    assert not drw.in_filtration(drw.teich_monomial([1], vx.ctx), 1)


def test_fv_is_p():
    rng = random.Random(3)
    ctx = RingContext(3, 2, 2)
    for degree in (0, 1):
        for _ in range(3):
            x = random_element(ctx, rng, degree)
            assert drw.frobenius_op(drw.verschiebung_op(x)) == drw.scale(3, x)


def test_frobenius_needs_level():
    with pytest.raises(LengthUnderflow):
        drw.frobenius_op(drw.DrwElement.zero(RingContext(2, 1, 0)))


def test_leibniz_and_graded_commutativity():
    rng = random.Random(5)
    ctx = RingContext(2, 2, 2)
    for _ in range(3):
        x = random_element(ctx, rng, 0)
        y = random_element(ctx, rng, 1)
        lhs = drw.differential(x * y)
        rhs = drw.differential(x) * y + x * drw.differential(y)
        assert lhs == rhs
        dy = drw.differential(y)
        assert y * drw.differential(x) == -(drw.differential(x) * y)
        assert x * dy == dy * x


def test_witt_round_trip():
    rng = random.Random(13)
    ctx = RingContext(3, 1, 3)
    for _ in range(4):
        w = random_witt(ctx, rng, max_deg=3)
        assert drw.drw_to_witt(drw.drw_from_witt(w)) == w


def test_teich_element_matches_witt_teichmuller():
    ctx = RingContext(2, 2, 2)
    P = ctx.fp.gens[0] ** 2 + ctx.fp.gens[0] * ctx.fp.gens[1]
    assert drw.drw_to_witt(drw.teich_element(P, ctx)) == teichmuller(P, ctx)


def test_projection_classes():
    ctx = RingContext(2, 1, 2)
    x = drw.make_e(1, _key(2, [Fraction(1, 2)]), ctx) + drw.teich_monomial([1], ctx)
    assert drw.project(x, 'integral') == drw.teich_monomial([1], ctx)
    assert drw.project(x, 'fractional') == drw.make_e(1, _key(2, [Fraction(1, 2)]), ctx)
    dx = drw.differential(x)
    assert set(k.fracture for k in drw.project(dx, 'd_fractional').terms) <= {'d_fractional'}


def test_divisibility(ctx2):
    x = drw.make_e(2, _key(2, [1]), ctx2)
    assert drw.is_divisible_by_p_power(x, 1)
    assert not drw.is_divisible_by_p_power(drw.teich_monomial([1], ctx2), 1)


def test_rewrite_preconditions():
    with pytest.raises(PreconditionViolated):
        drw.rewrite_mod_p(1, WeightFn.of(2, [2, 4]), (), 1)
    with pytest.raises(PreconditionViolated):
        drw.rewrite_mod_p(1, WeightFn.of(2, [1]), (0,), 1)
    with pytest.raises(PreconditionViolated):
        drw.rewrite_mod_p(1, WeightFn.of(2, [1, 3]), (), 0)


def test_rewrite_reproduces_element_mod_p():
    p, u = 2, 1
    b = WeightFn.of(p, [1, 3])
    L = (1,)
    result = drw.rewrite_mod_p(1, b, L, u)
    assert len(result.targets) == 1
    assert list(result.as_map().values()) == [1]
    level = RingContext(p, 2, u + 1)
    pieces = [
        drw.scale(t.residue, drw.teich_monomial([x * p ** u for x in t.c.as_ints()], level)
                  * drw.make_e(1, BasicDiffKey(t.a, t.parts), level))
        for t in result.targets if t.residue
    ]
    total = drw.sum_elements(pieces, level, len(L))
    diff = drw.make_e(1, BasicDiffKey(b, L), level) - total
    assert drw.is_divisible_by_p_power(diff, 1)


def test_rewrite_conditions_on_a_long_segment():
    key = _key(2, [1, 2, 2], (1,))
    assert drw.rewrite_conditions(key, 1) == ([], [], [1, 2])
    assert not drw.is_reduced(key, 1)
    assert drw.is_reduced(_key(2, [1, 2, 2], (1, 2)), 1)
    one, two, _ = drw.rewrite_conditions(_key(2, [1, 2]), 1)
    assert (one, two) == ([], [1])


def test_rewrite_splits_long_segment():
    """e(1; 1,2,2; {2}) = [X3^2] e(1; 1,2,0; {2}) + [X2^2] e(1; 1,0,2; {3})"""
    result = drw.rewrite_mod_p(1, WeightFn.of(2, [1, 2, 2]), (1,), 1)
    assert result.as_map() == {
        ((0, 0, 1), (1, 2, 0), (1,)): 1,
        ((0, 1, 0), (1, 0, 2), (2,)): 1,
    }


@pytest.mark.parametrize("p,weights,L,u", [
    (2, [1, 3], (1,), 1),
    (2, [3, 2], (), 1),
    (2, [1, 2], (), 1),
    (2, [1, 2, 2], (1,), 1),
    (2, [1, 6], (), 2),
    (2, [5, 3], (1,), 1),
    (3, [1, 5], (1,), 1),
    (3, [2, 7], (1,), 1),
    (3, [4, 3, 1], (1,), 1),
])
def test_rewrite_recursion_agrees_with_linear_solve(p, weights, L, u):
    b = WeightFn.of(p, weights)
    recursive = drw.rewrite_mod_p(1, b, L, u)
    linear = drw.rewrite_mod_p_linear(1, b, L, u)
    assert recursive.targets == linear.targets
    level = RingContext(p, len(weights), u + 1)
    pieces = [
        drw.scale(t.residue, drw.teich_monomial([x * p ** u for x in t.c.as_ints()], level)
                  * drw.make_e(1, BasicDiffKey(t.a, t.parts), level))
        for t in recursive.targets if t.residue
    ]
    diff = drw.make_e(1, BasicDiffKey(b, L), level) - drw.sum_elements(pieces, level, len(L))
    assert drw.is_divisible_by_p_power(diff, 1)


def test_rewrite_of_one_with_its_only_index_in_L():
    # L_0 is empty when L holds the whole support of b = (1)
    with pytest.raises(PreconditionViolated):
        drw.rewrite_mod_p(1, WeightFn.of(2, [1]), (0,), 1)
    with pytest.raises(PreconditionViolated):
        drw.rewrite_mod_p_linear(1, WeightFn.of(2, [1]), (0,), 1)
    with pytest.raises(PreconditionViolated):
        drw.rewrite_mod_p(1, WeightFn.of(2, [3]), (0,), 1)


def test_solve_rational_any_sets_free_unknowns_to_zero():
    assert solve_rational_any([[1, 1], [2, 2]], [3, 6]) == [3, 0]
    with pytest.raises(SingularSystem):
        solve_rational_any([[1, 1], [2, 2]], [3, 5])


def test_kernel_basis_certified_small():
    ctx = RingContext(2, 1, 2)
    for t in (0, 1):
        for m in (0, 1):
            basis = drw.kernel_basis_mod_p(t, m, ctx, 2)
            assert basis.certified, f"t={t} m={m}: {basis.expected_rank} vs {basis.brute_force_rank}"
            if m:
                assert not basis.h_part
