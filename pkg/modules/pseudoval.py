"""
Pseudovaluations measuring overconvergence.

zeta_eps on de Rham-Witt elements, the weighted degree valuation v_b on
polynomials and gamma_{eps,b} on Witt vectors, all with exact rational values
(math.inf for the zero element). check_inequality runs the catalogue of
inequalities relating them on sample sets and returns a CheckReport.
"""
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from modules import drwalgebra as drw
from modules.drwalgebra import DrwElement
from modules.drwbasis import BasicDiffKey, vp_int
from modules.errors import ConfigError, PreconditionViolated, UnknownInequality
from modules.logger import get_logger
from modules.polyring import fp_ring, parse_polynomial, substitute
from modules.wittcore import (
    RingContext, WittVec, add as witt_add, mul as witt_mul, neg as witt_neg, one as witt_one,
    scale as witt_scale, truncate as witt_truncate, verschiebung_power,
)

logger = get_logger('pseudoval')

ExtendedReal = Union[Fraction, float]


@dataclass(frozen=True)
class EpsParams:
    eps: Fraction
    radii: Tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, 'eps', Fraction(self.eps))
        object.__setattr__(self, 'radii', tuple(Fraction(b) for b in self.radii))
        if self.eps <= 0:
            raise ConfigError(f"eps must be positive, got {self.eps}")
        if any(b <= 0 for b in self.radii):
            raise ConfigError(f"radii must be positive, got {[str(b) for b in self.radii]}")

    @classmethod
    def uniform(cls, eps, n: int) -> 'EpsParams':
        return cls(Fraction(eps), tuple(Fraction(1) for _ in range(n)))


def m_ratio(b: Sequence[Fraction], c: Sequence[Fraction]) -> Fraction:
    return min(Fraction(ci) / Fraction(bi) for bi, ci in zip(b, c))


def M_ratio(b: Sequence[Fraction], c: Sequence[Fraction]) -> Fraction:
    return max(Fraction(ci) / Fraction(bi) for bi, ci in zip(b, c))


def _ones(n: int) -> Tuple[Fraction, ...]:
    return tuple(Fraction(1) for _ in range(n))


def term_zeta(key: BasicDiffKey, eta: int, n: int, eps: Fraction) -> ExtendedReal:
    p = key.p
    v = vp_int(eta, p)
    if v == math.inf:
        return math.inf
    jumps = key.degree + (0 if key.first_segment_empty else 1)
    return 2 * n * v + jumps * key.u - eps * key.weight.size


def zeta(x: DrwElement, eps) -> ExtendedReal:
    """zeta_eps over the canonical terms of x; math.inf for 0"""
    eps = Fraction(eps)
    return min((term_zeta(k, eta, x.ctx.n, eps) for k, eta in x.terms.items()), default=math.inf)


def zeta_minimizer(x: DrwElement, eps) -> Optional[BasicDiffKey]:
    eps = Fraction(eps)
    best = None
    for key, eta in x.sorted_terms():
        value = term_zeta(key, eta, x.ctx.n, eps)
        if best is None or value < best[0]:
            best = (value, key)
    return best[1] if best else None


def v_weighted(P, radii: Optional[Sequence] = None) -> ExtendedReal:
    """min over monomials of -sum b_i j_i; math.inf for 0"""
    if not P:
        return math.inf
    radii = tuple(Fraction(b) for b in radii) if radii is not None else _ones(P.ring.ngens)
    return min(-sum((b * j for b, j in zip(radii, monom)), Fraction(0)) for monom in P.itermonoms())


@dataclass(frozen=True)
class GammaBound:
    """gamma value; exact=False marks a lower bound computed from chosen preimages"""
    value: ExtendedReal
    exact: bool = True

    def __le__(self, other):
        return self.value <= _value(other)

    def __ge__(self, other):
        return self.value >= _value(other)


def _value(x) -> ExtendedReal:
    return x.value if isinstance(x, GammaBound) else x


def gamma_value(coords: Sequence, p: int, eps, radii: Optional[Sequence] = None) -> ExtendedReal:
    eps = Fraction(eps)
    best: ExtendedReal = math.inf
    for u, c in enumerate(coords):
        v = v_weighted(c, radii)
        if v == math.inf:
            continue
        best = min(best, u + eps * Fraction(1, p ** u) * v)
    return best


def gamma(w: WittVec, eps, radii: Optional[Sequence] = None, presentation=None) -> GammaBound:
    """
    gamma_{eps,phi,b}(w).

    Without a presentation the value is exact. With one, w is read as a preimage
    over the big ring; v_{phi,b} is a sup over preimages, so the larger of the
    values on w and on its normal form is a lower bound and exact=False.
    """
    value = gamma_value(w.coords, w.ctx.p, eps, radii)
    if presentation is None:
        return GammaBound(value)
    normal = presentation.normalize_witt(w)
    return GammaBound(max(value, gamma_value(normal.coords, w.ctx.p, eps, radii)), exact=False)


def verschiebung_delta(w: WittVec, E, eps0, radii: Optional[Sequence] = None) -> Fraction:
    """eps threshold below which gamma_eps(V(w)) >= E, from gamma_eps0(w)"""
    E, eps0 = Fraction(E), Fraction(eps0)
    if E >= 1:
        raise PreconditionViolated(f"E must be below 1, got {E}")
    g = gamma(w, eps0, radii).value
    if g >= 1:
        return eps0
    return min(eps0, eps0 * (1 - E) / (1 - g))


def overconvergence_report(x: DrwElement, eps_grid: Sequence) -> Dict:
    slopes = {}
    minimizers = {}
    for eps in eps_grid:
        eps = Fraction(eps)
        slopes[eps] = zeta(x, eps)
        key = zeta_minimizer(x, eps)
        minimizers[eps] = key.text() if key else None
    return {'is_overconvergent_trivially': True, 'slopes': slopes, 'minimizers': minimizers}


@dataclass
class CheckReport:
    name: str
    checked: int = 0
    failures: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def record(self, ok: bool, witness: str):
        self.checked += 1
        if not ok:
            self.failures.append(witness)


@dataclass(frozen=True)
class Morphism:
    """k-algebra map F_p[X1..Xn] -> F_p[Y..] given by images of the variables"""
    name: str
    source_n: int
    target_names: Tuple[str, ...]
    images: Tuple[str, ...]
    max_degree: int

    def apply(self, w: WittVec) -> WittVec:
        R = fp_ring(w.ctx.p, self.target_names)
        imgs = [parse_polynomial(text, R) for text in self.images]
        target = RingContext(w.ctx.p, len(self.target_names), w.ctx.m, self.target_names)
        coords = tuple(substitute(c, imgs, R) for c in w.coords)
        return WittVec(target, coords)


MORPHISMS = (
    Morphism('cube', 1, ('Y',), ('Y^3',), 3),
    Morphism('symmetric', 2, ('X1', 'X2'), ('X1 + X2', 'X1*X2'), 2),
    Morphism('quadratic', 1, ('X1',), ('X1^2 + X1',), 2),
)


def _eps_list(eps_grid) -> List[Fraction]:
    return [Fraction(e) for e in eps_grid]


def _check_sandwich(samples, eps_grid, radii, report):
    for w in samples:
        n = w.ctx.n or 1
        x = drw.drw_from_witt(w)
        for eps in eps_grid:
            upper = 2 * n * gamma(w, eps / (2 * n)).value
            middle = zeta(x, eps)
            lower = gamma(w, eps).value
            report.record(upper >= middle >= lower, f"sandwich eps={eps} w={w!r}: {upper} >= {middle} >= {lower}")


def _check_dzeta(samples, eps_grid, radii, report):
    for x in samples:
        dx = drw.differential(x)
        for eps in eps_grid:
            report.record(zeta(dx, eps) >= zeta(x, eps), f"dzeta eps={eps} x={x!r}")


def _check_zeta_p(samples, eps_grid, radii, report):
    for x in samples:
        px = drw.scale(x.ctx.p, x)
        n = x.ctx.n
        for eps in eps_grid:
            # terms whose coefficient survives multiplication by p at this level
            surviving = min(
                (term_zeta(k, eta, n, eps) + 2 * n for k, eta in x.terms.items()
                 if vp_int(eta, x.ctx.p) + 1 < x.ctx.m - k.u),
                default=math.inf,
            )
            report.record(zeta(px, eps) == surviving, f"zeta_p eps={eps} x={x!r}")


def _check_gamma_p(samples, eps_grid, radii, report):
    for w in samples:
        if w.ctx.m < 1:
            continue
        pw = witt_scale(w.ctx.p, w)
        shorter = witt_truncate(w, w.ctx.m - 1)
        for eps in eps_grid:
            expected = 1 + gamma(shorter, eps, radii).value
            report.record(gamma(pw, eps, radii).value == expected, f"gamma_p eps={eps} w={w!r}")


def _check_gamma_v(samples, eps_grid, radii, report):
    for w in samples:
        p = w.ctx.p
        for u in (1, 2):
            vw = verschiebung_power(w, u)
            for eps in eps_grid:
                lhs = gamma(vw, eps, radii).value
                rhs = u + gamma(w, eps / p ** u, radii).value
                report.record(lhs == rhs, f"gamma_v u={u} eps={eps} w={w!r}: {lhs} != {rhs}")


def _check_radii(samples, eps_grid, radii, report):
    for w in samples:
        n = w.ctx.n
        b = _ones(n)
        c = tuple(radii) if radii and len(radii) == n else tuple(Fraction(i + 2, 2) for i in range(n))
        if not n:
            continue
        lo, hi = m_ratio(b, c), M_ratio(b, c)
        for eps in eps_grid:
            left = gamma(w, lo * eps, b).value
            middle = gamma(w, eps, c).value
            right = gamma(w, hi * eps, b).value
            report.record(left >= middle >= right, f"radii eps={eps} c={[str(x) for x in c]} w={w!r}")


def _check_pseudovaluation_zeta(samples, eps_grid, radii, report):
    if not samples:
        return
    ctx = samples[0].ctx
    one = drw.teich_monomial([0] * ctx.n, ctx)
    for eps in eps_grid:
        report.record(zeta(DrwElement.zero(ctx, 0), eps) == math.inf, "zeta(0) = inf")
        report.record(zeta(one, eps) == 0, "zeta(1) = 0")
    for x, y in zip(samples, samples[1:]):
        for eps in eps_grid:
            zx, zy = zeta(x, eps), zeta(y, eps)
            report.record(zeta(-x, eps) == zx, f"zeta(-x) eps={eps} x={x!r}")
            if x.degree == y.degree:
                report.record(zeta(x + y, eps) >= min(zx, zy), f"zeta(x+y) eps={eps} x={x!r} y={y!r}")
            report.record(zeta(x * y, eps) >= zx + zy, f"zeta(xy) eps={eps} x={x!r} y={y!r}")


def _check_pseudovaluation_gamma(samples, eps_grid, radii, report):
    if not samples:
        return
    ctx = samples[0].ctx
    for eps in eps_grid:
        report.record(gamma(witt_one(ctx), eps, radii).value == 0, "gamma(1) = 0")
    for w, z in zip(samples, samples[1:]):
        for eps in eps_grid:
            gw, gz = gamma(w, eps, radii).value, gamma(z, eps, radii).value
            report.record(gamma(witt_neg(w), eps, radii).value == gw, f"gamma(-w) eps={eps} w={w!r}")
            report.record(gamma(witt_add(w, z), eps, radii).value >= min(gw, gz), f"gamma(w+z) eps={eps}")
            report.record(gamma(witt_mul(w, z), eps, radii).value >= gw + gz, f"gamma(wz) eps={eps}")


def _check_functoriality(samples, eps_grid, radii, report):
    for w in samples:
        n = w.ctx.n
        for morphism in MORPHISMS:
            if morphism.source_n != n:
                continue
            image = drw.drw_from_witt(morphism.apply(w))
            x = drw.drw_from_witt(w)
            scale = 2 * n * morphism.max_degree
            for outer in eps_grid:
                # eps chosen so that the source pseudovaluation is taken at a grid value
                eps = outer / scale
                lhs = zeta(image, eps)
                rhs = zeta(x, outer) / (2 * n)
                report.record(lhs >= rhs, f"functoriality {morphism.name} eps={eps} w={w!r}: {lhs} < {rhs}")


def _check_padic(samples, eps_grid, radii, report):
    if not samples:
        return
    ctx = samples[0].ctx
    p = ctx.p
    pieces = []
    for j in range(ctx.m):
        exps = [0] * ctx.n
        if ctx.n:
            exps[0] = p ** j
        pieces.append(drw.scale(p ** j, drw.teich_monomial(exps, ctx)))
    total = drw.sum_elements(pieces, ctx, 0)
    for eps in eps_grid:
        bound = min(zeta(x, eps) for x in pieces)
        report.record(zeta(total, eps) >= bound, f"padic eps={eps}")


CHECKS: Dict[str, Tuple[str, Callable]] = {
    'sandwich': ('witt', _check_sandwich),
    'dzeta': ('drw', _check_dzeta),
    'zeta_p': ('drw', _check_zeta_p),
    'gamma_p': ('witt', _check_gamma_p),
    'gamma_v': ('witt', _check_gamma_v),
    'radii': ('witt', _check_radii),
    'pseudovaluation_zeta': ('drw', _check_pseudovaluation_zeta),
    'pseudovaluation_gamma': ('witt', _check_pseudovaluation_gamma),
    'functoriality': ('witt', _check_functoriality),
    'padic': ('drw', _check_padic),
}


def check_inequality(name: str, samples: Sequence, eps_grid: Sequence = (Fraction(1, 2), Fraction(1, 4)),
                     radii: Optional[Sequence] = None) -> CheckReport:
    """Verify one catalogued inequality exactly on every sample.

    Witt-vector checks ('sandwich', 'gamma_p', 'gamma_v', 'radii', 'pseudovaluation_gamma',
    'functoriality') take WittVec samples; the others take DrwElement samples.
    """
    if name not in CHECKS:
        raise UnknownInequality(f"unknown inequality {name!r}", {'known': sorted(CHECKS)})
    _, runner = CHECKS[name]
    report = CheckReport(name)
    radii = tuple(Fraction(b) for b in radii) if radii else None
    runner(list(samples), _eps_list(eps_grid), radii, report)
    logger.debug(
        f"inequality {name}: {report.checked} checks, {len(report.failures)} failures",
        extra={'suite': name, 'term_count': report.checked},
    )
    return report


def sample_kind(name: str) -> str:
    if name not in CHECKS:
        raise UnknownInequality(f"unknown inequality {name!r}", {'known': sorted(CHECKS)})
    return CHECKS[name][0]
