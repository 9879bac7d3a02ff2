"""
Seeded random samples for the check suites.

Witt vectors have sparse coordinates of bounded degree; de Rham-Witt elements
are short sums of basic differentials with weights of small size.
"""
import random
from fractions import Fraction
from typing import List, Optional

from modules.drwalgebra import DrwElement
from modules.drwbasis import BasicDiffKey, WeightFn, coeff_modulus
from modules.wittcore import RingContext, WittVec


def random_poly(R, p: int, rng: random.Random, max_deg: int = 4, max_terms: int = 2):
    n = R.ngens
    terms = {}
    for _ in range(rng.randint(0, max_terms)):
        deg = rng.randint(0, max_deg)
        exps = [0] * n
        for _ in range(deg):
            if n:
                exps[rng.randrange(n)] += 1
        terms[tuple(exps)] = (terms.get(tuple(exps), 0) + rng.randint(1, p - 1)) % p
    return R.from_dict({k: v for k, v in terms.items() if v})


def random_witt(ctx: RingContext, rng: random.Random, max_deg: int = 4, max_terms: int = 2) -> WittVec:
    coords = tuple(random_poly(ctx.fp, ctx.p, rng, max_deg, max_terms) for _ in range(ctx.m))
    return WittVec(ctx, coords)


def random_key(ctx: RingContext, rng: random.Random, degree: int, max_entry: int = 2) -> Optional[BasicDiffKey]:
    """A key with u(a) < m and #I = degree, or None when n is too small"""
    p, n, m = ctx.p, ctx.n, ctx.m
    if degree > n or m == 0:
        return None
    u = rng.randrange(m)
    den = p ** u
    size = rng.randint(max(degree, 1), n) if n else 0
    support = rng.sample(range(n), size)
    entries = [Fraction(0)] * n
    for i in support:
        entries[i] = Fraction(rng.randint(1, max_entry * den), den)
    weight = WeightFn(p, tuple(entries))
    parts = tuple(rng.sample(list(weight.support), degree))
    return BasicDiffKey(weight, parts)


def random_element(ctx: RingContext, rng: random.Random, degree: int = 0, max_terms: int = 3,
                   max_entry: int = 2) -> DrwElement:
    raw = {}
    for _ in range(rng.randint(1, max_terms)):
        key = random_key(ctx, rng, degree, max_entry)
        if key is None:
            break
        mod = coeff_modulus(key, ctx.m)
        if mod <= 0:
            continue
        raw[key] = raw.get(key, 0) + rng.randrange(1, ctx.p ** mod)
    return DrwElement.from_terms(ctx, degree, raw)


def random_elements(ctx: RingContext, rng: random.Random, count: int, degree: int = 0) -> List[DrwElement]:
    return [random_element(ctx, rng, degree) for _ in range(count)]
