"""
Truncated Witt vectors W_m(F_p[X1..Xn]).

Arithmetic goes through ghost components over the integers: coordinates are
lifted to polynomials with coefficients in 0..p-1, combined componentwise on
the ghost side, inverted exactly and reduced mod p.
"""
import math
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple, Union

from sympy import isprime

from modules.errors import ConfigError, ContextMismatch, LengthUnderflow, NonIntegralGhost
from modules.polyring import (
    default_names, exact_div_int, fp_items, fp_ring, lift_to_zz, reduce_to_fp, zz_ring,
)


@dataclass(frozen=True)
class RingContext:
    """Prime p, variables X1..Xn and truncation length m (m = 0 is the zero ring)."""
    p: int
    n: int
    m: int
    names: Tuple[str, ...] = field(default=())

    def __post_init__(self):
        if not isinstance(self.p, int) or self.p < 2 or not isprime(self.p):
            raise ConfigError(f"p must be a prime, got {self.p}")
        if self.n < 0:
            raise ConfigError(f"variable count must be nonnegative, got {self.n}")
        if self.m < 0:
            raise ConfigError(f"truncation length must be nonnegative, got {self.m}")
        if not self.names:
            object.__setattr__(self, 'names', default_names(self.n))
        elif len(self.names) != self.n:
            raise ConfigError(f"expected {self.n} variable names, got {self.names}")

    @property
    def zz(self):
        return zz_ring(self.names)

    @property
    def fp(self):
        return fp_ring(self.p, self.names)

    def with_length(self, m: int) -> 'RingContext':
        return self if m == self.m else replace(self, m=m)

    def same_ring(self, other: 'RingContext') -> bool:
        return self.p == other.p and self.names == other.names


@dataclass(frozen=True)
class WittVec:
    ctx: RingContext
    coords: Tuple

    def __post_init__(self):
        if len(self.coords) != self.ctx.m:
            raise ContextMismatch(f"expected {self.ctx.m} coordinates, got {len(self.coords)}")

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __mul__(self, other):
        return mul(self, other)

    def __neg__(self):
        return neg(self)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __repr__(self):
        from modules.polyring import format_polynomial
        body = ', '.join(format_polynomial(c, self.ctx.p) for c in self.coords)
        return f"WittVec(p={self.ctx.p}, m={self.ctx.m}; {body})"


def _check_same(x: WittVec, y: WittVec):
    if x.ctx != y.ctx:
        raise ContextMismatch(
            "Witt vectors live in different contexts",
            {'left': [x.ctx.p, x.ctx.n, x.ctx.m], 'right': [y.ctx.p, y.ctx.n, y.ctx.m]},
        )


def ghost(lift: Sequence, p: int) -> List:
    """Ghost components g_u = sum_{i<=u} p^i * lift_i^(p^(u-i)) over ZZ"""
    powers = list(lift)
    out = []
    for u in range(len(lift)):
        g = powers[0] * 0 if powers else None
        for i in range(u + 1):
            g = g + p ** i * powers[i]
        out.append(g)
        if u == len(lift) - 1:
            break
        # raise every earlier coordinate one more p-th power for the next component
        for i in range(u + 1):
            powers[i] = powers[i] ** p
    return out


def unghost(g: Sequence, p: int, m: Optional[int] = None) -> List:
    """Exact inverse of ghost; raises NonIntegralGhost when a division by p^u fails"""
    m = len(g) if m is None else m
    xs: List = []
    for u in range(m):
        rest = g[u]
        for i, x in enumerate(xs):
            rest = rest - p ** i * x ** (p ** (u - i))
        q = exact_div_int(rest, p ** u)
        if q is None:
            raise NonIntegralGhost(
                f"ghost component {u} is not divisible by p^{u}",
                {'component': u, 'p': p},
            )
        xs.append(q)
    return xs


def zero(ctx: RingContext) -> WittVec:
    return WittVec(ctx, tuple(ctx.fp.zero for _ in range(ctx.m)))


def one(ctx: RingContext) -> WittVec:
    return teichmuller(ctx.fp.one, ctx)


def as_fp(c, ctx: RingContext):
    """Coerce an int, F_p polynomial or integer polynomial into ctx.fp"""
    if not hasattr(c, 'ring'):
        return ctx.fp(c)
    if c.ring == ctx.fp:
        return c
    return ctx.fp.from_dict({monom: int(v) % ctx.p for monom, v in c.iterterms() if int(v) % ctx.p})


def teichmuller(P, ctx: RingContext) -> WittVec:
    if ctx.m == 0:
        return zero(ctx)
    return WittVec(ctx, (as_fp(P, ctx),) + tuple(ctx.fp.zero for _ in range(ctx.m - 1)))


def from_coords(coords: Sequence, ctx: RingContext) -> WittVec:
    return WittVec(ctx, tuple(as_fp(c, ctx) for c in coords))


def lift_coords(x: WittVec) -> List:
    return [lift_to_zz(c, x.ctx.p, x.ctx.zz) for c in x.coords]


def ghost_of(x: WittVec) -> List:
    return ghost(lift_coords(x), x.ctx.p)


def _from_ghost(g: Sequence, ctx: RingContext) -> WittVec:
    xs = unghost(g, ctx.p, ctx.m)
    return WittVec(ctx, tuple(reduce_to_fp(c, ctx.fp) for c in xs))


def add(x: WittVec, y: WittVec) -> WittVec:
    _check_same(x, y)
    if x.ctx.m == 0:
        return x
    return _from_ghost([a + b for a, b in zip(ghost_of(x), ghost_of(y))], x.ctx)


def mul(x: WittVec, y: WittVec) -> WittVec:
    _check_same(x, y)
    if x.ctx.m == 0:
        return x
    return _from_ghost([a * b for a, b in zip(ghost_of(x), ghost_of(y))], x.ctx)


def neg(x: WittVec) -> WittVec:
    if x.ctx.m == 0:
        return x
    return _from_ghost([-a for a in ghost_of(x)], x.ctx)


def sub(x: WittVec, y: WittVec) -> WittVec:
    _check_same(x, y)
    if x.ctx.m == 0:
        return x
    return _from_ghost([a - b for a, b in zip(ghost_of(x), ghost_of(y))], x.ctx)


def witt_from_int(c: int, ctx: RingContext) -> WittVec:
    """Image of the integer c in W_m(F_p)"""
    if ctx.m == 0:
        return zero(ctx)
    const = ctx.zz(c)
    return _from_ghost([const] * ctx.m, ctx)


def scale(c: int, x: WittVec) -> WittVec:
    return mul(witt_from_int(c, x.ctx), x)


def int_from_witt(w: WittVec) -> int:
    """Integer mod p^m represented by a Witt vector with constant coordinates"""
    p, m = w.ctx.p, w.ctx.m
    modulus = p ** m
    total = 0
    for i, c in enumerate(w.coords):
        terms = dict(fp_items(c, p))
        if any(any(monom) for monom in terms):
            raise ConfigError("int_from_witt needs constant coordinates")
        a = terms.get(tuple([0] * w.ctx.n), 0)
        total += p ** i * pow(a, p ** max(m - 1, 0), modulus)
    return total % modulus


def truncate(x: WittVec, length: int) -> WittVec:
    if length > x.ctx.m:
        raise LengthUnderflow(f"cannot truncate length {x.ctx.m} to {length}")
    return WittVec(x.ctx.with_length(length), x.coords[:length])


def _frobenius_poly(P):
    # In characteristic p the p-th power only multiplies exponents.
    p = P.ring.domain.characteristic()
    return P.ring.from_dict({tuple(p * e for e in monom): c for monom, c in P.iterterms()})


def frobenius(x: WittVec, length: Optional[int] = None) -> WittVec:
    """F : W_{m} -> W_{m-1} by the ghost shift; length=m gives the same-level F (coordinatewise p-th power)"""
    m = x.ctx.m
    if length is None:
        if m <= 1:
            raise LengthUnderflow("frobenius needs a target length at m = 1")
        length = m - 1
    if length > m:
        raise LengthUnderflow(f"frobenius cannot extend length {m} to {length}")
    if length == m:
        return WittVec(x.ctx, tuple(_frobenius_poly(c) for c in x.coords))
    target = x.ctx.with_length(length)
    if length == 0:
        return zero(target)
    g = ghost(lift_coords(truncate(x, length + 1)), x.ctx.p)
    return _from_ghost(g[1:length + 1], target)


def verschiebung(x: WittVec, length: Optional[int] = None) -> WittVec:
    """V : W_m -> W_{m+1}, prepending a zero coordinate; optional truncation"""
    target = x.ctx.with_length(x.ctx.m + 1)
    out = WittVec(target, (x.ctx.fp.zero,) + tuple(x.coords))
    return out if length is None else truncate(out, length)


def verschiebung_power(x: WittVec, u: int, length: Optional[int] = None) -> WittVec:
    for _ in range(u):
        x = verschiebung(x)
    return x if length is None else truncate(x, length)


def vV(x: WittVec) -> Union[int, float]:
    """Largest u with coordinates 0..u-1 zero; math.inf for the zero vector"""
    for i, c in enumerate(x.coords):
        if c:
            return i
    return math.inf


def splitting_mod_p(w: WittVec) -> Tuple[int, WittVec]:
    """Split a constant Witt vector as Teichmuller of its first coordinate plus a V-part"""
    p = w.ctx.p
    first = dict(fp_items(w.coords[0], p)) if w.ctx.m else {}
    if any(any(monom) for monom in first):
        raise ConfigError("splitting_mod_p needs constant coordinates")
    a0 = first.get(tuple([0] * w.ctx.n), 0)
    rest = sub(w, teichmuller(w.ctx.fp(a0), w.ctx))
    return a0, rest
