"""
Frobenius lifts and the Lazard morphisms.

A FrobLift sends X_i to X_i^p + p*delta_i over the integers, understood modulo
p^N. s_F inverts the ghost map on (P, F(P), ..., F^(m-1)(P)) over exact
integers; t_F reduces the result mod p. v_F compares t_F with the canonical
lift X_i -> X_i^p, whose Lazard image of X_i is the Teichmuller lift [X_i].
"""
import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

from modules import drwalgebra as drw
from modules import pseudoval
from modules.drwalgebra import DrwElement
from modules.errors import ConfigError, InvalidLift, NonIntegralGhost, PresentationError
from modules.logger import PerformanceTimer, get_logger
from modules.polyring import (
    change_ring, exact_div_int, format_polynomial, parse_polynomial, reduce_coeffs,
    reduce_to_fp, substitute,
)
from modules.wittcore import RingContext, WittVec, sub as witt_sub, unghost

logger = get_logger('lazard')

LIFT_LINE = re.compile(r'^lift\s+(?:p\s*=\s*(\d+)\s+)?([A-Za-z_]\w*)\s*->\s*(.+)$')
PRECISION_LINE = re.compile(r'^precision\s+(\d+)$')


@dataclass(frozen=True)
class FrobLift:
    """Images of the generators under a lift of Frobenius, modulo p^precision"""
    ctx: RingContext
    precision: int
    images: Tuple = field(compare=False)

    def __post_init__(self):
        p = self.ctx.p
        if self.precision < 1:
            raise InvalidLift(f"precision must be positive, got {self.precision}")
        if len(self.images) != self.ctx.n:
            raise InvalidLift(f"expected {self.ctx.n} generator images, got {len(self.images)}")
        Rz = self.ctx.zz
        for i, img in enumerate(self.images):
            defect = img - Rz.gens[i] ** p
            if exact_div_int(defect, p) is None:
                raise InvalidLift(
                    f"image of {self.ctx.names[i]} is not congruent to {self.ctx.names[i]}^{p} mod {p}",
                    {'variable': self.ctx.names[i], 'image': format_polynomial(img)},
                )

    @property
    def is_canonical(self) -> bool:
        Rz = self.ctx.zz
        return all(img == Rz.gens[i] ** self.ctx.p for i, img in enumerate(self.images))

    def deltas(self) -> List:
        return [exact_div_int(img - self.ctx.zz.gens[i] ** self.ctx.p, self.ctx.p) for i, img in enumerate(self.images)]

    def text(self) -> str:
        lines = [f"lift p={self.ctx.p} {name} -> {format_polynomial(img)}" for name, img in zip(self.ctx.names, self.images)]
        lines.append(f"precision {self.precision}")
        return '\n'.join(lines)


def canonical_lift(ctx: RingContext, precision: Optional[int] = None) -> FrobLift:
    Rz = ctx.zz
    return FrobLift(ctx, precision or max(ctx.m, 1), tuple(g ** ctx.p for g in Rz.gens))


def parse_lift(text: str, ctx: Optional[RingContext] = None) -> FrobLift:
    """Parse 'lift p=2 X1 -> X1^2 + 2*X1' lines (one per variable) and an optional 'precision N'"""
    entries = []
    prime = ctx.p if ctx else None
    precision = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith('#'):
            continue
        match = LIFT_LINE.match(line)
        if match:
            if match.group(1):
                declared = int(match.group(1))
                if prime is not None and declared != prime:
                    raise PresentationError(f"line {lineno}: lift declared for p={declared}, context has p={prime}")
                prime = declared
            entries.append((match.group(2), match.group(3)))
            continue
        match = PRECISION_LINE.match(line)
        if match:
            precision = int(match.group(1))
            continue
        raise PresentationError(f"line {lineno}: cannot parse {line!r}", {'line': lineno})
    if prime is None:
        raise PresentationError("lift text does not declare p")
    names = tuple(name for name, _ in entries)
    if ctx is None:
        ctx = RingContext(prime, len(names), precision or 1, names)
    images = {}
    for name, body in entries:
        if name not in ctx.names:
            raise PresentationError(f"lift for unknown variable {name}; ring has {list(ctx.names)}")
        images[name] = parse_polynomial(body, ctx.zz)
    missing = [name for name in ctx.names if name not in images]
    if missing:
        raise PresentationError(f"no lift given for {missing}")
    return FrobLift(ctx, precision or max(ctx.m, 1), tuple(images[name] for name in ctx.names))


def apply_lift(F: FrobLift, P, exact: bool = False):
    """Ring map extension of the generator images, reduced mod p^N unless exact"""
    out = substitute(P, F.images, F.ctx.zz)
    return out if exact else reduce_coeffs(out, F.ctx.p ** F.precision)


def _as_zz(P, ctx: RingContext):
    if isinstance(P, int):
        return ctx.zz(P)
    if P.ring == ctx.zz:
        return P
    if P.ring.domain.is_FiniteField:
        return ctx.zz.from_dict({monom: int(c) % ctx.p for monom, c in P.iterterms()})
    return change_ring(P, ctx.zz)


def s_F(F: FrobLift, P, m: int) -> List:
    """Integer Witt coordinates whose ghost components are P, F(P), ..., F^(m-1)(P)"""
    P = _as_zz(P, F.ctx)
    ghosts = []
    current = P
    for u in range(m):
        ghosts.append(current)
        if u < m - 1:
            current = apply_lift(F, current, exact=True)
    try:
        return unghost(ghosts, F.ctx.p, m)
    except NonIntegralGhost as exc:
        raise InvalidLift(f"lift violates the delta-ring condition: {exc.message}", exc.details)


def t_F(F: FrobLift, P, m: int) -> WittVec:
    ctx = F.ctx.with_length(m)
    return WittVec(ctx, tuple(reduce_to_fp(c, ctx.fp) for c in s_F(F, P, m)))


def t_frob(P, ctx: RingContext) -> WittVec:
    """Lazard image for the canonical lift"""
    return t_F(canonical_lift(ctx), P, ctx.m)


@dataclass(frozen=True)
class FormalForm:
    """sum over terms of P * dQ_1 ... dQ_t with integer polynomials"""
    degree: int
    terms: Tuple[Tuple[object, Tuple[object, ...]], ...]

    @classmethod
    def monomial_form(cls, ctx: RingContext, coeff, exps, dvars: Sequence[int]) -> 'FormalForm':
        Rz = ctx.zz
        P = Rz.from_dict({tuple(exps): coeff})
        return cls(len(dvars), ((P, tuple(Rz.gens[i] for i in dvars)),))


def t_F_forms(F: FrobLift, form: FormalForm, m: int) -> DrwElement:
    ctx = F.ctx.with_length(m)
    pieces = []
    for P, Qs in form.terms:
        piece = drw.drw_from_witt(t_F(F, P, m))
        for Q in Qs:
            piece = drw.multiply(piece, drw.differential(drw.drw_from_witt(t_F(F, Q, m))))
        pieces.append(piece)
    return drw.sum_elements(pieces, ctx, form.degree)


def v_F(F: FrobLift, P, m: int) -> WittVec:
    return witt_sub(t_F(F, P, m), t_F(canonical_lift(F.ctx, F.precision), P, m))


def v_F_forms(F: FrobLift, form: FormalForm, m: int) -> DrwElement:
    canonical = canonical_lift(F.ctx, F.precision)
    return drw.add(t_F_forms(F, form, m), drw.neg(t_F_forms(canonical, form, m)))


def _monomials(n: int, max_total: int):
    for exps in product(range(max_total + 1), repeat=n):
        if sum(exps) <= max_total:
            yield exps


@dataclass
class VFEstimate:
    mu: Fraction
    grid: Tuple[Fraction, ...]
    delta: Optional[Fraction]
    constructive_delta: Optional[Fraction]
    holds: Dict[Fraction, bool]
    checked: int
    witnesses: List[str] = field(default_factory=list)


def estimate_v_F(F: FrobLift, eps_grid: Sequence, radii: Optional[Sequence] = None,
                 mu=Fraction(1, 2), max_exponent: int = 8, m: Optional[int] = None) -> VFEstimate:
    """Largest grid eps at which the lower bounds for v_F hold on monomials and their p-multiples.

    At eps:  gamma(v_F(X^a)) >= 1 - mu - eps * sum b_i a_i,
             gamma(v_F(x)) >= 1 - mu + gamma(t_Frob(x)) and
             zeta(v_F(x)) >= 1 - mu + zeta(t_Frob(x)) for x = p^j X^a.
    The reported delta also requires every smaller grid point to pass.
    """
    mu = Fraction(mu)
    if not 0 < mu < 1:
        raise ConfigError(f"mu must lie in (0, 1), got {mu}")
    ctx = F.ctx
    m = m or ctx.m
    grid = tuple(sorted(Fraction(e) for e in eps_grid))
    radii = tuple(Fraction(b) for b in radii) if radii else tuple(Fraction(1) for _ in range(ctx.n))
    holds = {eps: True for eps in grid}
    witnesses: List[str] = []
    checked = 0
    constructive = None
    p = ctx.p
    level_ctx = ctx.with_length(m)
    with PerformanceTimer('estimate_v_F', logger, prime=p, level_m=m):
        for exps in _monomials(ctx.n, max_exponent):
            weight = sum((b * a for b, a in zip(radii, exps)), Fraction(0))
            vf = v_F(F, ctx.zz.from_dict({exps: 1}), m)
            if m > 1 and grid:
                shifted = WittVec(level_ctx.with_length(m - 1), vf.coords[1:])
                local = pseudoval.verschiebung_delta(shifted, 1 - mu, grid[-1], radii)
                constructive = local if constructive is None else min(constructive, local)
            for j in range(m):
                x = ctx.zz.from_dict({exps: p ** j})
                vfx = v_F(F, x, m)
                tx = t_F(canonical_lift(ctx, F.precision), x, m)
                vfx_drw = drw.drw_from_witt(vfx)
                tx_drw = drw.drw_from_witt(tx)
                for eps in grid:
                    checks = [
                        pseudoval.gamma(vfx, eps, radii).value >= 1 - mu + pseudoval.gamma(tx, eps, radii).value,
                        pseudoval.zeta(vfx_drw, eps) >= 1 - mu + pseudoval.zeta(tx_drw, eps),
                    ]
                    if j == 0:
                        checks.append(pseudoval.gamma(vf, eps, radii).value >= 1 - mu - eps * weight)
                    checked += len(checks)
                    if not all(checks):
                        holds[eps] = False
                        witnesses.append(f"eps={eps} x={p ** j}*X^{list(exps)}")
    delta = None
    for eps in grid:
        if not holds[eps]:
            break
        delta = eps
    logger.info(
        f"v_F estimate: delta={delta}, constructive={constructive}",
        extra={'prime': p, 'level_m': m, 'term_count': checked},
    )
    return VFEstimate(mu, grid, delta, constructive, holds, checked, witnesses)


def check_lift_compatibility(pres) -> bool:
    """G(phi(r)) = phi(F(r)) on every lifted relation r of the presentation, mod p^N"""
    big = pres.big_lift()
    for relation in pres.lifted_relations():
        image = apply_lift(big, relation)
        if not pres.is_zero_lifted(image, big.precision):
            logger.debug("lift incompatible with relation", extra={'prime': pres.p})
            return False
    return True
