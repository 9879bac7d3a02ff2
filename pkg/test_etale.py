"""
Tests for etale presentations, relative perfectness and Witt vectors over them
"""
from fractions import Fraction
from pathlib import Path

import pytest

from modules.errors import MalformedTable, NotRelativelyPerfect, PresentationError
from modules.etale import (
    artin_schreier_presentation, artin_schreier_text, check_relatively_perfect, compute_constants,
    nilpotent_presentation, overconv_witt_decompose, parse_presentation, trivial_presentation,
    witt_basis_decompose, witt_basis_recompose,
)
from modules.lazard import check_lift_compatibility
from modules.polyring import parse_polynomial, zz_ring
from modules.wittcore import WittVec, add, teichmuller, verschiebung

DATA_DIR = Path(__file__).parent / 'data'


@pytest.fixture(scope='module')
def artin_schreier():
    return artin_schreier_presentation(2)


def _teich(pres, text, m):
    ctx = pres.big_ctx(m)
    return teichmuller(parse_polynomial(text, ctx.fp), ctx)


def test_artin_schreier_is_relatively_perfect(artin_schreier):
    report = check_relatively_perfect(artin_schreier)
    assert report.ok
    assert artin_schreier.loc.text(report.det) == '1'
    assert [[artin_schreier.loc.text(a) for a in row] for row in report.U0] == [['1', '0'], ['X1', '1']]


def test_artin_schreier_constants(artin_schreier):
    constants = compute_constants(artin_schreier)
    assert constants.C == 0
    assert constants.D == 1
    assert constants.E_basis == 1
    assert constants.delta == Fraction(1, 2)
    assert constants.radii_vector(artin_schreier.big_names) == (1, 1)


def test_artin_schreier_lift_is_compatible(artin_schreier):
    assert check_lift_compatibility(artin_schreier)
    assert artin_schreier.big_lift().precision == 4


def test_artin_schreier_odd_prime():
    pres = artin_schreier_presentation(3)
    assert pres.rank == 3
    assert check_relatively_perfect(pres).ok


def test_data_files_parse():
    text = (DATA_DIR / 'artin_schreier_p2.txt').read_text()
    pres = parse_presentation(text)
    assert pres.rank == 2
    assert check_relatively_perfect(pres).ok
    assert check_lift_compatibility(pres)
    assert parse_presentation(artin_schreier_text(2)).mul_lines == pres.mul_lines
    nilpotent = parse_presentation((DATA_DIR / 'nilpotent_p2.txt').read_text())
    assert not check_relatively_perfect(nilpotent).ok


def test_nilpotent_extension_is_rejected():
    pres = nilpotent_presentation(2)
    report = check_relatively_perfect(pres)
    assert not report.ok
    assert 'not a unit' in report.witness
    with pytest.raises(NotRelativelyPerfect):
        witt_basis_decompose(_teich(pres, 's2', 2), pres)
    with pytest.raises(NotRelativelyPerfect):
        compute_constants(pres)


@pytest.mark.parametrize("text, error", [
    ("mul s2 s2 = s2", PresentationError),
    ("# wdrw-format 2\netale p=2 n=1 rank=2 P=1\nmul s2 s2 = s2\n", PresentationError),
    ("etale p=2 n=1 rank=2 P=1\n", MalformedTable),
    ("etale p=2 n=1 rank=2 P=1\nmul s3 s3 = s2\n", MalformedTable),
    ("etale p=2 n=1 rank=2 P=1\nmul s2 s2 = s2^2\n", PresentationError),
    ("etale p=2 n=1 rank=2 P=1\nmul s2 s2 = s2\nlift Q -> Q^2\n", PresentationError),
    ("etale p=2 n=1 rank=2 P=1\nmul s2 s2 = s2\nbogus\n", PresentationError),
])
def test_presentation_errors(text, error):
    with pytest.raises(error):
        parse_presentation(text)


def test_witt_basis_of_teichmuller_s(artin_schreier):
    """[s2] = 0 * [s1] + [1] * [s2]"""
    w = _teich(artin_schreier, 's2', 2)
    parts = witt_basis_decompose(w, artin_schreier)
    coeff_ctx = artin_schreier.coeff_ctx(2)
    assert parts[0].is_zero()
    assert parts[1] == teichmuller(coeff_ctx.fp.one, coeff_ctx)


def test_witt_basis_round_trip(artin_schreier):
    w = add(_teich(artin_schreier, 'X1*s2 + X1^2', 2), _teich(artin_schreier, 's2', 2))
    parts = witt_basis_decompose(w, artin_schreier)
    assert witt_basis_recompose(parts, artin_schreier) == artin_schreier.normalize_witt(w)


def test_normalize_reduces_powers_of_s(artin_schreier):
    ctx = artin_schreier.big_ctx(1)
    s2 = ctx.fp.gens[1]
    assert artin_schreier.normalize(s2 ** 2) == s2 + ctx.fp.gens[0]


def test_overconvergent_decomposition_trivial_extension():
    pres = trivial_presentation(2, 1)
    ctx = pres.big_ctx(2)
    Rz = zz_ring(pres.big_names)
    x = teichmuller(ctx.fp.gens[0], ctx)
    result = overconv_witt_decompose(x, pres)
    assert result.h == {(Fraction(0),): Rz.gens[0]}
    assert result.recomposes and result.divisibility_ok

    vx = verschiebung(teichmuller(ctx.fp.gens[0], ctx.with_length(1)))
    result = overconv_witt_decompose(vx, pres)
    assert result.h == {(Fraction(1, 2),): Rz.one}
    assert result.recomposes


def test_overconvergent_decomposition_artin_schreier(artin_schreier):
    w = _teich(artin_schreier, 'X1*s2', 2)
    result = overconv_witt_decompose(w, artin_schreier)
    assert result.recomposes
    assert result.divisibility_ok
    assert result.delta == Fraction(1, 2)


CUBIC_AS = "# wdrw-format 1\netale p=2 n=1 rank=2 P=1\nmul s2 s2 = s2 + X1^3*s1\n"


def test_cubic_artin_schreier_has_small_delta():
    constants = compute_constants(parse_presentation(CUBIC_AS))
    assert constants.D == 3
    assert constants.E_basis == 3
    assert constants.delta == Fraction(1, 6)


def test_overconvergent_certification_stops_at_delta():
    pres = parse_presentation(CUBIC_AS)
    w = _teich(pres, 's2', 2)
    result = overconv_witt_decompose(w, pres, eps_grid=(Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)))
    assert result.delta == Fraction(1, 6)
    assert set(result.gamma_checks) == {Fraction(1, 8)}
    assert result.eps_certified in (None, Fraction(1, 8))

    above = overconv_witt_decompose(w, pres, eps_grid=(Fraction(1, 2), Fraction(1, 4)))
    assert above.gamma_checks == {}
    assert above.eps_certified is None


def test_overconvergent_certification_above_delta_artin_schreier(artin_schreier):
    w = _teich(artin_schreier, 's2', 2)
    result = overconv_witt_decompose(w, artin_schreier, eps_grid=(Fraction(1),))
    assert result.recomposes
    assert result.eps_certified is None


@pytest.mark.parametrize('text', [
    "etale p=2 n=1 rank=1 P=1\n",
    artin_schreier_text(2),
    CUBIC_AS,
    "etale p=2 n=1 rank=1 P=X1\n",
])
def test_constant_C_comes_from_the_preimage_of_one(text):
    pres = parse_presentation(text)
    constants = compute_constants(pres)
    unit = pres.to_big(pres.basis(0))
    assert unit == unit.ring.one
    assert constants.C == 0
    assert constants.E == constants.C + constants.D


def test_trivial_extension_constants_vanish():
    constants = compute_constants(trivial_presentation(2, 2))
    assert (constants.C, constants.D, constants.E) == (0, 0, 0)
    assert constants.delta is None
