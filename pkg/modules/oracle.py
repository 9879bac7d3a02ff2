"""
Rational de Rham model used as the embedding target of W_m Omega.

A ModelForm is a finite sum of c * X^a * dlog X_S where c is a rational with a
p-power denominator (or p-multiple), a has entries in Z[1/p] and S is a sorted
index set. In this model F multiplies exponents by p and leaves coefficients
alone, V divides exponents by p and multiplies coefficients by p, and d sends
X^a to sum_i a_i X^a dlog X_i.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Dict, Optional, Tuple

from modules.drwbasis import BasicDiffKey, WeightFn, coeff_modulus, segments, vp_fraction
from modules.errors import ContextMismatch, ExponentCapExceeded, NonIntegralExtraction
from modules.linalg import inverse_rational

Exps = Tuple[Fraction, ...]
Dlog = Tuple[int, ...]
TermKey = Tuple[Exps, Dlog]


def _merge_sign(S: Dlog, T: Dlog) -> int:
    """Sign of sorting the concatenation S + T (both sorted, disjoint)"""
    inversions = 0
    for s in S:
        inversions += sum(1 for t in T if t < s)
    return -1 if inversions % 2 else 1


@dataclass(frozen=True, eq=False)
class ModelForm:
    p: int
    n: int
    degree: int
    terms: Dict[TermKey, Fraction]

    @classmethod
    def build(cls, p: int, n: int, degree: int, raw: Dict[TermKey, Fraction]) -> 'ModelForm':
        return cls(p, n, degree, {k: Fraction(v) for k, v in raw.items() if v})

    @classmethod
    def monomial(cls, p: int, exps, coeff=1, dlog: Dlog = ()) -> 'ModelForm':
        exps = tuple(Fraction(e) for e in exps)
        return cls.build(p, len(exps), len(dlog), {(exps, tuple(sorted(dlog))): Fraction(coeff)})

    @classmethod
    def zero(cls, p: int, n: int, degree: int) -> 'ModelForm':
        return cls(p, n, degree, {})

    def __eq__(self, other):
        return (
            isinstance(other, ModelForm)
            and (self.p, self.n) == (other.p, other.n)
            and self.terms == other.terms
            and (self.degree == other.degree or not self.terms)
        )

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other: 'ModelForm') -> 'ModelForm':
        return model_add(self, other)

    def __sub__(self, other: 'ModelForm') -> 'ModelForm':
        return model_add(self, model_scale(other, -1))

    def __mul__(self, other: 'ModelForm') -> 'ModelForm':
        return model_mul(self, other)

    def __repr__(self):
        body = ' + '.join(
            f"({c})*X^({','.join(str(e) for e in a)})*dlog{list(i + 1 for i in S)}"
            for (a, S), c in sorted(self.terms.items())
        )
        return f"ModelForm(deg={self.degree}; {body or '0'})"


def _check(f: ModelForm, g: ModelForm):
    if (f.p, f.n) != (g.p, g.n):
        raise ContextMismatch("model forms over different rings")


def model_add(f: ModelForm, g: ModelForm) -> ModelForm:
    _check(f, g)
    out = dict(f.terms)
    for k, c in g.terms.items():
        out[k] = out.get(k, 0) + c
    degree = f.degree if f.terms else g.degree
    return ModelForm.build(f.p, f.n, degree, out)


def model_scale(f: ModelForm, c) -> ModelForm:
    c = Fraction(c)
    return ModelForm.build(f.p, f.n, f.degree, {k: v * c for k, v in f.terms.items()})


def model_mul(f: ModelForm, g: ModelForm) -> ModelForm:
    _check(f, g)
    out: Dict[TermKey, Fraction] = {}
    for (a, S), c in f.terms.items():
        for (b, T), e in g.terms.items():
            if set(S) & set(T):
                continue
            key = (tuple(x + y for x, y in zip(a, b)), tuple(sorted(S + T)))
            out[key] = out.get(key, 0) + _merge_sign(S, T) * c * e
    return ModelForm.build(f.p, f.n, f.degree + g.degree, out)


def model_d(f: ModelForm) -> ModelForm:
    out: Dict[TermKey, Fraction] = {}
    for (a, S), c in f.terms.items():
        for i, ai in enumerate(a):
            if not ai or i in S:
                continue
            sign = -1 if sum(1 for s in S if s < i) % 2 else 1
            key = (a, tuple(sorted(S + (i,))))
            out[key] = out.get(key, 0) + sign * c * ai
    return ModelForm.build(f.p, f.n, f.degree + 1, out)


def model_F(f: ModelForm) -> ModelForm:
    p = f.p
    return ModelForm.build(p, f.n, f.degree, {(tuple(p * e for e in a), S): c for (a, S), c in f.terms.items()})


def model_V(f: ModelForm, cap: Optional[int] = None) -> ModelForm:
    """V = p * phi^-1; cap bounds the p-exponent of exponent denominators"""
    p = f.p
    out = {}
    for (a, S), c in f.terms.items():
        b = tuple(e / p for e in a)
        if cap is not None and any(vp_fraction(e, p) < -cap for e in b if e):
            raise ExponentCapExceeded(f"exponent denominators exceed {p}^{cap}", {'cap': cap})
        out[(b, S)] = p * c
    return ModelForm.build(p, f.n, f.degree, out)


def _g_form(b: WeightFn) -> ModelForm:
    p, n = b.p, b.n
    v = b.vp
    scale = Fraction(p) ** (-v)
    raw = {}
    for i in b.support:
        raw[(b.entries, (i,))] = b.entries[i] * scale
    return ModelForm.build(p, n, 1, raw)


@lru_cache(maxsize=None)
def embed_key(key: BasicDiffKey) -> ModelForm:
    """Model form of e(1, a, I)"""
    a = key.weight
    p, n, u = a.p, a.n, a.u
    segs = segments(key)
    first = segs[0]
    if first or u == 0:
        form = ModelForm.monomial(p, a.restrict(first).entries, Fraction(p) ** u)
    else:
        form = ModelForm.monomial(p, WeightFn.zero(p, n).entries, 1)
    for seg in segs[1:]:
        form = model_mul(form, _g_form(a.restrict(seg)))
    return form


def embed_terms(terms: Dict[BasicDiffKey, int], p: int, n: int, degree: int) -> ModelForm:
    out: Dict[TermKey, Fraction] = {}
    for key, eta in terms.items():
        for k, c in embed_key(key).terms.items():
            out[k] = out.get(k, 0) + eta * c
    return ModelForm.build(p, n, degree, out)


@lru_cache(maxsize=None)
def _basis_inverse(p: int, exps: Exps, degree: int):
    weight = WeightFn(p, exps)
    keys = [BasicDiffKey(weight, L) for L in combinations(weight.support, degree)]
    dlogs = [tuple(sorted(S)) for S in combinations(weight.support, degree)]
    # column j holds the dlog coordinates of embed_key(keys[j])
    matrix = [[embed_key(k).terms.get((exps, S), Fraction(0)) for k in keys] for S in dlogs]
    return keys, dlogs, inverse_rational(matrix)


def _reduce_p_integral(value: Fraction, p: int, modulus_exp: int) -> int:
    modulus = p ** modulus_exp
    return value.numerator * pow(value.denominator, -1, modulus) % modulus


def extract_terms(f: ModelForm, m: int) -> Dict[BasicDiffKey, int]:
    """Coefficients of f in the basic differential basis, reduced at truncation m"""
    p = f.p
    by_exps: Dict[Exps, Dict[Dlog, Fraction]] = {}
    for (a, S), c in f.terms.items():
        by_exps.setdefault(a, {})[S] = c
    out: Dict[BasicDiffKey, int] = {}
    for exps, coords in by_exps.items():
        weight = WeightFn(p, exps)
        supp = set(weight.support)
        for S in coords:
            if not set(S) <= supp:
                raise NonIntegralExtraction(
                    f"dlog X_{[i + 1 for i in S]} outside the support of X^({weight.text()})",
                    {'weight': weight.text()},
                )
        keys, dlogs, inverse = _basis_inverse(p, exps, f.degree)
        if len(coords) and not keys:
            raise NonIntegralExtraction(f"degree {f.degree} form on a weight with too small support")
        vec = [coords.get(S, Fraction(0)) for S in dlogs]
        for j, key in enumerate(keys):
            eta = sum((inverse[j][i] * vec[i] for i in range(len(vec))), Fraction(0))
            if not eta:
                continue
            if eta.denominator % p == 0:
                raise NonIntegralExtraction(
                    f"coefficient {eta} of {key.text()} is not p-integral",
                    {'key': key.text(), 'value': str(eta)},
                )
            mod = coeff_modulus(key, m)
            if mod <= 0:
                continue
            residue = _reduce_p_integral(eta, p, mod)
            if residue:
                out[key] = residue
    return out


def embed(x) -> ModelForm:
    """Model form of a DrwElement"""
    return embed_terms(x.terms, x.ctx.p, x.ctx.n, x.degree)


def extract(f: ModelForm, ctx):
    """DrwElement at truncation ctx.m whose embedding agrees with f"""
    from modules.drwalgebra import DrwElement
    if (f.p, f.n) != (ctx.p, ctx.n):
        raise ContextMismatch("model form and context disagree")
    return DrwElement.from_terms(ctx, f.degree, extract_terms(f, ctx.m))
