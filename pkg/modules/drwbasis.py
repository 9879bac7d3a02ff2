"""
Weight functions, partitions and the keys of basic Witt differentials.

Indices are 0-based in code and printed 1-based. A weight function is a tuple
of nonnegative rationals whose denominators are powers of p; the support order
compares p-adic valuations first and indices second.
"""
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Iterator, List, Optional, Sequence, Tuple, Union

from modules.errors import ConfigError, IndexOutsideSupport
from modules.wittcore import RingContext

ExtInt = Union[int, float]


def vp_int(k: int, p: int) -> ExtInt:
    if k == 0:
        return math.inf
    k = abs(k)
    v = 0
    while k % p == 0:
        k //= p
        v += 1
    return v


def vp_fraction(x: Fraction, p: int) -> ExtInt:
    if x == 0:
        return math.inf
    return vp_int(x.numerator, p) - vp_int(x.denominator, p)


@dataclass(frozen=True)
class WeightFn:
    p: int
    entries: Tuple[Fraction, ...]

    def __post_init__(self):
        fixed = []
        for value in self.entries:
            value = Fraction(value)
            if value < 0:
                raise ConfigError(f"weights must be nonnegative, got {value}")
            den = value.denominator
            while den % self.p == 0:
                den //= self.p
            if den != 1:
                raise ConfigError(f"weight {value} has a denominator that is not a power of {self.p}")
            fixed.append(value)
        object.__setattr__(self, 'entries', tuple(fixed))

    @classmethod
    def of(cls, p: int, values: Sequence) -> 'WeightFn':
        return cls(p, tuple(Fraction(v) for v in values))

    @classmethod
    def indicator(cls, p: int, n: int, indices) -> 'WeightFn':
        chosen = set(indices)
        return cls(p, tuple(Fraction(1 if i in chosen else 0) for i in range(n)))

    @classmethod
    def zero(cls, p: int, n: int) -> 'WeightFn':
        return cls(p, tuple(Fraction(0) for _ in range(n)))

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def support(self) -> Tuple[int, ...]:
        return tuple(i for i, v in enumerate(self.entries) if v)

    @property
    def size(self) -> Fraction:
        return sum(self.entries, Fraction(0))

    def vp_at(self, i: int) -> ExtInt:
        return vp_fraction(self.entries[i], self.p)

    @property
    def vp(self) -> ExtInt:
        return min((self.vp_at(i) for i in self.support), default=math.inf)

    @property
    def u(self) -> int:
        v = self.vp
        return 0 if v == math.inf else max(0, -v)

    @property
    def is_integral(self) -> bool:
        return all(v.denominator == 1 for v in self.entries)

    def as_ints(self) -> Tuple[int, ...]:
        if not self.is_integral:
            raise ConfigError(f"weight {self.text()} is not integral")
        return tuple(v.numerator for v in self.entries)

    def restrict(self, indices) -> 'WeightFn':
        chosen = set(indices)
        return WeightFn(self.p, tuple(v if i in chosen else Fraction(0) for i, v in enumerate(self.entries)))

    def scaled(self, factor) -> 'WeightFn':
        factor = Fraction(factor)
        return WeightFn(self.p, tuple(v * factor for v in self.entries))

    def __add__(self, other: 'WeightFn') -> 'WeightFn':
        return WeightFn(self.p, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: 'WeightFn') -> 'WeightFn':
        return WeightFn(self.p, tuple(a - b for a, b in zip(self.entries, other.entries)))

    def order_key(self, i: int):
        return (self.vp_at(i), i)

    def sorted_support(self) -> Tuple[int, ...]:
        return tuple(sorted(self.support, key=self.order_key))

    def min_index(self) -> Optional[int]:
        ordered = self.sorted_support()
        return ordered[0] if ordered else None

    def text(self) -> str:
        return ','.join(str(v) for v in self.entries)


def order_less(a: WeightFn, i: int, j: int) -> bool:
    """True iff i precedes j in the support order of a (valuation, then index)"""
    for idx in (i, j):
        if idx < 0 or idx >= a.n or not a.entries[idx]:
            raise IndexOutsideSupport(f"index {idx + 1} is not in the support of ({a.text()})")
    return a.order_key(i) < a.order_key(j)


@dataclass(frozen=True)
class BasicDiffKey:
    """Weight function together with a partition I of its support, I sorted by the support order"""
    weight: WeightFn
    parts: Tuple[int, ...]

    def __post_init__(self):
        supp = set(self.weight.support)
        for i in self.parts:
            if i not in supp:
                raise IndexOutsideSupport(
                    f"partition index {i + 1} is not in the support of ({self.weight.text()})",
                    {'index': i + 1, 'weight': self.weight.text()},
                )
        if len(set(self.parts)) != len(self.parts):
            raise ConfigError(f"repeated index in partition {self.parts}")
        object.__setattr__(self, 'parts', tuple(sorted(self.parts, key=self.weight.order_key)))

    @property
    def degree(self) -> int:
        return len(self.parts)

    @property
    def u(self) -> int:
        return self.weight.u

    @property
    def p(self) -> int:
        return self.weight.p

    def segments(self) -> List[Tuple[int, ...]]:
        return segments(self)

    @property
    def first_segment_empty(self) -> bool:
        return not self.segments()[0]

    @property
    def fracture(self) -> str:
        if self.u == 0:
            return 'integral'
        return 'pure_fractional' if not self.first_segment_empty else 'd_fractional'

    def sort_key(self):
        return (self.u, self.weight.size, self.weight.entries, self.parts)

    def text(self, eta=1) -> str:
        return format_key(self, eta)


def segments(key: BasicDiffKey) -> List[Tuple[int, ...]]:
    """I_0..I_t: I_0 holds the support strictly below i_1, I_l runs from i_l up to i_{l+1}"""
    ordered = key.weight.sorted_support()
    cuts = [ordered.index(i) for i in key.parts]
    bounds = [0] + cuts + [len(ordered)]
    return [tuple(ordered[bounds[l]:bounds[l + 1]]) for l in range(len(bounds) - 1)]


def coeff_modulus(key: BasicDiffKey, m: int) -> int:
    return max(m - key.u, 0)


def format_key(key: BasicDiffKey, eta=1) -> str:
    parts = ','.join(str(i + 1) for i in sorted(key.parts))
    return f"e({eta}; {key.weight.text()}; {{{parts}}})"


def enumerate_H(t: int, ctx: RingContext) -> Iterator[BasicDiffKey]:
    """Keys of d[X_{i1}]...d[X_{it}] for #I = t"""
    n, p = ctx.n, ctx.p
    if t < 0 or t > n:
        return
    for subset in combinations(range(n), t):
        yield BasicDiffKey(WeightFn.indicator(p, n, subset), subset)


def _g_keys_for_u(t: int, n: int, p: int, u: int) -> Iterator[BasicDiffKey]:
    bound = p ** u
    for a in product(range(bound), repeat=n):
        if not any(x % p for x in a):
            continue
        base = WeightFn.of(p, a)
        lowest = base.min_index()
        supp = base.support
        rest = [i for i in range(n) if i not in supp]
        candidates = [i for i in supp if i != lowest]
        for k in range(0, t + 1):
            for I in combinations(candidates, k):
                for J in combinations(rest, t - k):
                    top = [Fraction(x) for x in a]
                    for j in J:
                        top[j] += bound
                    weight = WeightFn(p, tuple(v / bound for v in top))
                    yield BasicDiffKey(weight, tuple(I) + tuple(J))


def enumerate_G(t: int, ctx: RingContext, max_u: int, max_weight,
                exact_u: Optional[int] = None) -> List[BasicDiffKey]:
    """Fractional generator keys e(1, (a + p^u chi_J)/p^u, I u J), sorted in stream order.

    a is integral with a_i < p^u and v_p(a) = 0, I avoids the least index of a,
    J lies outside Supp(a) and #I + #J = t. Keys have weight at most max_weight.
    """
    if t < 0:
        return []
    us = [exact_u] if exact_u is not None else list(range(1, max_u + 1))
    bound = Fraction(max_weight)
    keys = set()
    for u in us:
        if u < 1:
            continue
        for key in _g_keys_for_u(t, ctx.n, ctx.p, u):
            if key.weight.size <= bound:
                keys.add(key)
    return sorted(keys, key=BasicDiffKey.sort_key)


def keys_of_weight(weight: WeightFn, t: int) -> List[BasicDiffKey]:
    """All keys (weight, L) with #L = t"""
    return sorted(
        (BasicDiffKey(weight, L) for L in combinations(weight.support, t)),
        key=BasicDiffKey.sort_key,
    )


class RebarCage:
    """Index sets B(u, m) organising the mod-p splitting of Witt vectors of a base ring"""

    def __init__(self, name: str, p: int):
        self.name = name
        self.p = p

    @classmethod
    def perfect(cls, p: int) -> 'RebarCage':
        return cls('perfect', p)

    @classmethod
    def laurent(cls, p: int) -> 'RebarCage':
        return cls('laurent', p)

    def indices(self, u: int, m: int) -> List[Tuple[int, ...]]:
        if self.name == 'perfect':
            return [(0,)] if m == 0 else []
        if m == 0:
            return [(i,) for i in range(self.p ** u)]
        step = self.p ** m
        return [(i,) for i in range(self.p ** (u + m)) if i % step]

    def label(self, index: Tuple[int, ...]) -> str:
        if self.name == 'perfect':
            return '1'
        return f"T^{index[0]}"
