"""
Structure decompositions of truncated de Rham-Witt forms.

Polynomial case: x = sum_H t_F(s_e e) + sum_G t_F(s_e) e + d(sum_G' t_F(s_e) e),
found one p-adic digit at a time. Each step splits the current remainder mod p
over the generators, subtracts the lifted generators and divides by p.

Etale case: forms over S = F_p[X][s_1..s_r] are sums [s_i] * omega_i with omega_i
over F_p[X]; generators live over the big polynomial ring and are pushed through
the quotient map before a linear solve over Z/p^m.
"""
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

from modules import drwalgebra as drw
from modules import pseudoval
from modules.drwalgebra import DrwElement
from modules.drwbasis import BasicDiffKey, WeightFn, coeff_modulus, enumerate_G, enumerate_H, segments
from modules.errors import (
    ContextMismatch, SingularSystem, UnsupportedPresentation, WeightBoundExceeded,
)
from modules.etale import EtalePresentation, _require_perfect, compute_constants, witt_basis_decompose
from modules.lazard import FormalForm, FrobLift, canonical_lift, t_F, t_F_forms
from modules.linalg import solve_mod_prime_power
from modules.logger import PerformanceTimer, get_logger
from modules.polyring import reduce_coeffs, zz_ring
from modules.wittcore import RingContext, WittVec, teichmuller, verschiebung_power

logger = get_logger('structure')

FAMILY_RANK = {'H': 0, 'G': 1, 'dG': 2}

Generator = Tuple[str, BasicDiffKey, Tuple[int, ...]]

DEFAULT_ETA = Fraction(1, 4)


@dataclass(frozen=True)
class ZetaCertificate:
    """zeta_eps(x), the least zeta_eps over the summands and the tolerance eta"""
    value: object
    least: object
    eta: Fraction

    @property
    def holds(self) -> bool:
        return self.least >= self.value - self.eta


@dataclass
class DecompositionResult:
    """Coefficient polynomials s_e per generator key, grouped by family"""
    p: int
    level: int
    degree: int
    names: Tuple[str, ...]
    h: Dict[BasicDiffKey, object] = field(default_factory=dict)
    g: Dict[BasicDiffKey, object] = field(default_factory=dict)
    dg: Dict[BasicDiffKey, object] = field(default_factory=dict)
    certificates: Dict[Fraction, ZetaCertificate] = field(default_factory=dict)
    kind: str = 'poly'
    lift: Optional[FrobLift] = None
    delta: Optional[Fraction] = None

    @property
    def eps_certified(self) -> Optional[Fraction]:
        return certified_eps(self.certificates)

    def families(self):
        for family, table in (('H', self.h), ('G', self.g), ('dG', self.dg)):
            for key in sorted(table, key=BasicDiffKey.sort_key):
                yield family, key, table[key]

    def modulus_exp(self, family: str, key: BasicDiffKey) -> int:
        return self.level if family == 'H' else coeff_modulus(key, self.level)

    def is_zero(self) -> bool:
        return not (self.h or self.g or self.dg)

    def divisible_by_p_power(self, l: int) -> bool:
        for family, key, poly in self.families():
            need = min(l, self.modulus_exp(family, key))
            if any(int(c) % self.p ** need for c in poly.coeffs()):
                return False
        return True

    def satisfies_filtration(self, u: int) -> bool:
        """p^max(u - u(e), 0) divides every s(e)"""
        for family, key, poly in self.families():
            need = min(max(u - key.u, 0), self.modulus_exp(family, key))
            if any(int(c) % self.p ** need for c in poly.coeffs()):
                return False
        return True


def _accumulate(table: Dict, family: str, key: BasicDiffKey, j, value: int):
    slot = table.setdefault((family, key), {})
    slot[tuple(j)] = slot.get(tuple(j), 0) + value


def _finish(table: Dict, p: int, m: int, degree: int, names: Tuple[str, ...], kind: str) -> DecompositionResult:
    Rz = zz_ring(names)
    result = DecompositionResult(p, m, degree, names, kind=kind)
    target = {'H': result.h, 'G': result.g, 'dG': result.dg}
    for (family, key), coeffs in table.items():
        mod = m if family == 'H' else coeff_modulus(key, m)
        poly = reduce_coeffs(Rz.from_dict(coeffs), p ** mod) if mod > 0 else Rz.zero
        if poly:
            target[family][key] = poly
    return result


# -- polynomial case --------------------------------------------------------------

def _monomials(n: int, max_total: int):
    for exps in product(range(max_total + 1), repeat=n):
        if sum(exps) <= max_total:
            yield exps


def generator_image(F: FrobLift, family: str, key: BasicDiffKey, j, level: int) -> DrwElement:
    """t_F(X^j dX_I) for H, t_F(X^j) e for G and d(t_F(X^j) e) for dG"""
    ctx = F.ctx.with_length(level)
    if family == 'H':
        form = FormalForm.monomial_form(ctx, 1, j, key.parts)
        return t_F_forms(F, form, level)
    twist = drw.drw_from_witt(t_F(F, ctx.zz.from_dict({tuple(j): 1}), level))
    base = drw.multiply(twist, drw.make_e(1, key, ctx))
    return drw.differential(base) if family == 'dG' else base


def _generators_within(ctx: RingContext, t: int, max_weight: int) -> List[Generator]:
    n = ctx.n
    out: List[Generator] = []
    for key in enumerate_H(t, ctx):
        for j in _monomials(n, max_weight - t):
            out.append(('H', key, j))
    for family, degree in (('G', t), ('dG', t - 1)):
        for key in enumerate_G(degree, ctx, ctx.m - 1, max_weight):
            room = max_weight - key.weight.size
            for j in _monomials(n, int(math.floor(room))):
                out.append((family, key, j))
    return out


def _column_rank(gen: Generator, extra=lambda key, j: 0):
    family, key, j = gen
    return (key.u, key.weight.size + sum(j), extra(key, j), FAMILY_RANK[family], key.sort_key(), j)


def _split_canonical(y: DrwElement) -> List[Tuple[Generator, int]]:
    p, t = y.ctx.p, y.degree
    by_weight: Dict[WeightFn, Dict[BasicDiffKey, int]] = {}
    for key, eta in y.terms.items():
        if eta % p:
            by_weight.setdefault(key.weight, {})[key] = eta % p
    out = []
    for c in sorted(by_weight, key=lambda w: (w.u, w.size, w.entries)):
        split = drw.weight_split(c, t)
        for gen, lam in zip(split.generators, split.solve(by_weight[c])):
            if lam:
                out.append((gen, lam))
    return out


def _split_general(y: DrwElement, F: FrobLift, max_weight: int, cache: Dict) -> List[Tuple[Generator, int]]:
    p, t, level = y.ctx.p, y.degree, y.ctx.m
    bound = max([max_weight] + [int(math.ceil(k.weight.size)) for k in y.terms])
    gens = _generators_within(y.ctx, t, bound)
    images = []
    for gen in gens:
        slot = (gen, level)
        if slot not in cache:
            cache[slot] = generator_image(F, *gen, level)
        images.append(cache[slot])
    rows = sorted({k for img in images for k in img.terms} | set(y.terms), key=BasicDiffKey.sort_key)
    A = [[img.terms.get(k, 0) % p for img in images] for k in rows]
    b = [y.terms.get(k, 0) % p for k in rows]
    order = sorted(range(len(gens)), key=lambda i: _column_rank(gens[i]))
    sol = solve_mod_prime_power(A, b, p, 1, column_order=order)
    if sol is None:
        raise WeightBoundExceeded(
            f"no decomposition mod {p} within weight {bound}; raise --max-weight",
            {'max_weight': bound, 'level': level},
        )
    return [(gen, lam) for gen, lam in zip(gens, sol) if lam]


def poly_structure_decompose(x: DrwElement, F: Optional[FrobLift] = None, max_weight: int = 6,
                             eps_grid: Sequence = (), eta=DEFAULT_ETA) -> DecompositionResult:
    """Digit-by-digit decomposition; the canonical lift splits weight by weight"""
    ctx = x.ctx
    p, m, t = ctx.p, ctx.m, x.degree
    F = F or canonical_lift(ctx)
    if F.ctx.names != ctx.names or F.ctx.p != p:
        raise ContextMismatch("Frobenius lift and form live over different rings")
    canonical = F.is_canonical
    table: Dict = {}
    cache: Dict = {}
    y = x
    with PerformanceTimer('poly_structure_decompose', logger, prime=p, level_m=m, degree=t):
        for l in range(m):
            if not y:
                break
            level = m - l
            pieces = _split_canonical(y) if canonical else _split_general(y, F, max_weight, cache)
            correction = []
            for (family, key, j), lam in pieces:
                if canonical:
                    image = drw.generator_element(family, key, j, ctx.with_length(level))
                else:
                    image = cache.get(((family, key, j), level)) or generator_image(F, family, key, j, level)
                correction.append(drw.scale(lam, image))
                _accumulate(table, family, key, j, lam * p ** l)
            rest = drw.add(y, drw.neg(drw.sum_elements(correction, ctx.with_length(level), t)))
            if any(eta % p for eta in rest.terms.values()):
                raise SingularSystem("remainder is not divisible by p after the mod-p split")
            y = DrwElement.from_terms(ctx.with_length(level - 1), t, {k: eta // p for k, eta in rest.terms.items()})
            logger.debug("digit split", extra={'step': l, 'term_count': len(pieces)})
    result = _finish(table, p, m, t, ctx.names, 'poly')
    result.lift = F
    if eps_grid:
        result.certificates = zeta_certificates(x, poly_summands(result, F), eps_grid, eta)
    return result


def poly_summands(result: DecompositionResult, F: FrobLift) -> List[DrwElement]:
    m = result.level
    ctx = F.ctx.with_length(m)
    out = []
    for family, key, poly in result.families():
        if family == 'H':
            form = FormalForm(result.degree, ((poly, tuple(ctx.zz.gens[i] for i in key.parts)),))
            out.append(t_F_forms(F, form, m))
            continue
        base = drw.multiply(drw.drw_from_witt(t_F(F, poly, m)), drw.make_e(1, key, ctx))
        out.append(drw.differential(base) if family == 'dG' else base)
    return out


def recompose(result: DecompositionResult, F: FrobLift) -> DrwElement:
    ctx = F.ctx.with_length(result.level)
    return drw.sum_elements(poly_summands(result, F), ctx, result.degree)


def form_zeta(x, eps: Fraction):
    """zeta_eps of a form; etale forms take the minimum over their components"""
    if isinstance(x, EtaleForm):
        return min((pseudoval.zeta(c, eps) for c in x.components), default=math.inf)
    return pseudoval.zeta(x, eps)


def zeta_certificates(x, summands: Sequence, eps_grid: Sequence, eta=DEFAULT_ETA,
                      delta: Optional[Fraction] = None) -> Dict[Fraction, ZetaCertificate]:
    """Per grid eps (up to delta when given): zeta(x), the least summand zeta and eta"""
    out = {}
    eta = Fraction(eta)
    for eps in eps_grid:
        eps = Fraction(eps)
        if delta is not None and eps > delta:
            continue
        least = min((form_zeta(s, eps) for s in summands), default=math.inf)
        out[eps] = ZetaCertificate(form_zeta(x, eps), least, eta)
    return out


def certified_eps(certificates: Dict[Fraction, ZetaCertificate]) -> Optional[Fraction]:
    """Largest grid eps whose certificate holds together with every smaller one"""
    best = None
    for eps in sorted(certificates):
        if not certificates[eps].holds:
            break
        best = eps
    return best


# -- etale case -------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class EtaleForm:
    """sum_i [s_i] * components[i] with components over F_p[X]"""
    calc: 'EtaleCalculus'
    degree: int
    components: Tuple[DrwElement, ...]

    @property
    def level(self) -> int:
        return self.components[0].level

    def __eq__(self, other):
        if not isinstance(other, EtaleForm):
            return NotImplemented
        return all(a == b for a, b in zip(self.components, other.components))

    def __hash__(self):
        return hash(tuple(self.components))

    def __bool__(self):
        return any(bool(c) for c in self.components)

    def __add__(self, other):
        return self.calc.add(self, other)

    def __sub__(self, other):
        return self.calc.add(self, self.calc.scale(-1, other))

    def __mul__(self, other):
        return self.calc.mul(self, other)


class EtaleCalculus:
    """de Rham-Witt arithmetic over a relatively perfect presentation with P = 1"""

    def __init__(self, pres: EtalePresentation):
        if pres.has_pinv:
            raise UnsupportedPresentation(
                "structure decompositions need P = 1", {'P': pres.P_text},
            )
        _require_perfect(pres)
        self.pres = pres
        self.p = pres.p
        self.r = pres.rank
        self._teich: Dict = {}
        self._ds: Dict = {}
        self._factor_cache: Dict = {}

    def base_ctx(self, m: int) -> RingContext:
        return self.pres.base_ctx(m)

    def big_ctx(self, m: int) -> RingContext:
        return self.pres.big_ctx(m)

    def zero(self, m: int, degree: int = 0) -> EtaleForm:
        ctx = self.base_ctx(m)
        return EtaleForm(self, degree, tuple(DrwElement.zero(ctx, degree) for _ in range(self.r)))

    def from_base(self, omega: DrwElement) -> EtaleForm:
        comps = [omega] + [DrwElement.zero(omega.ctx, omega.degree) for _ in range(self.r - 1)]
        return EtaleForm(self, omega.degree, tuple(comps))

    def from_witt(self, w: WittVec, shift: int = 0) -> EtaleForm:
        parts = witt_basis_decompose(w, self.pres, shift)
        return EtaleForm(self, 0, tuple(drw.drw_from_witt(part) for part in parts))

    def teich(self, poly, m: int, shift: int = 0) -> EtaleForm:
        """[poly] expanded in the basis [s_i^(p^shift)]"""
        key = (poly, m, shift)
        if key not in self._teich:
            self._teich[key] = self.from_witt(teichmuller(poly, self.big_ctx(m)), shift)
        return self._teich[key]

    def s_power(self, i: int, e: int, m: int) -> EtaleForm:
        return self.teich(self.pres.s_power_poly(i, e), m)

    def add(self, x: EtaleForm, y: EtaleForm) -> EtaleForm:
        comps = tuple(drw.add(a, b) for a, b in zip(x.components, y.components))
        degree = x.degree if any(x.components) else y.degree
        return EtaleForm(self, degree, comps)

    def scale(self, c: int, x: EtaleForm) -> EtaleForm:
        return EtaleForm(self, x.degree, tuple(drw.scale(c, a) for a in x.components))

    def sum(self, items: Sequence[EtaleForm], m: int, degree: int) -> EtaleForm:
        ctx = self.base_ctx(m)
        comps = []
        for k in range(self.r):
            comps.append(drw.sum_elements((item.components[k] for item in items), ctx, degree))
        return EtaleForm(self, degree, tuple(comps))

    def mul(self, x: EtaleForm, y: EtaleForm) -> EtaleForm:
        m = min(x.level, y.level)
        degree = x.degree + y.degree
        pieces = [[] for _ in range(self.r)]
        for i, a in enumerate(x.components):
            if not a:
                continue
            for j, b in enumerate(y.components):
                if not b:
                    continue
                ab = drw.multiply(a, b)
                if not ab:
                    continue
                if i == 0 or j == 0:
                    pieces[i + j].append(ab)
                    continue
                structure = self.s_power_product(i, j, m)
                for k, coeff in enumerate(structure.components):
                    if coeff:
                        pieces[k].append(drw.multiply(coeff, ab))
        ctx = self.base_ctx(m)
        return EtaleForm(self, degree, tuple(drw.sum_elements(ps, ctx, degree) for ps in pieces))

    def s_power_product(self, i: int, j: int, m: int) -> EtaleForm:
        vec = self.pres.mul_vec(self.pres.basis(i), self.pres.basis(j))
        return self.teich(self.pres.to_big(vec), m)

    def ds(self, i: int, m: int) -> EtaleForm:
        """d[s_i] from [s_i] = sum_k r_k [s_k^(p^m)] and d[s_k^(p^m)] = 0 at level m"""
        key = (i, m)
        if key not in self._ds:
            if i == 0:
                self._ds[key] = self.zero(m, 1)
            else:
                expansion = self.teich(self.pres.s_power_poly(i, 1), m, shift=m)
                pieces = []
                for k, r_k in enumerate(expansion.components):
                    if r_k:
                        dr = self.from_base(drw.differential(r_k))
                        pieces.append(self.mul(dr, self.s_power(k, self.p ** m, m)))
                self._ds[key] = self.sum(pieces, m, 1)
        return self._ds[key]

    def d(self, x: EtaleForm) -> EtaleForm:
        m = x.level
        pieces = []
        for i, omega in enumerate(x.components):
            if not omega:
                continue
            pieces.append(self.mul(self.ds(i, m), self.from_base(omega)))
            unit = [DrwElement.zero(omega.ctx, omega.degree + 1) for _ in range(self.r)]
            unit[i] = drw.differential(omega)
            pieces.append(EtaleForm(self, omega.degree + 1, tuple(unit)))
        return self.sum(pieces, m, x.degree + 1)

    def frobenius(self, x: EtaleForm) -> EtaleForm:
        """F([s_i] w) = [s_i^p] F(w)"""
        m = x.level - 1
        pieces = []
        for i, omega in enumerate(x.components):
            if omega:
                pieces.append(self.mul(self.s_power(i, self.p, m), self.from_base(drw.frobenius_op(omega))))
        return self.sum(pieces, m, x.degree)

    def verschiebung(self, x: EtaleForm) -> EtaleForm:
        """V([s_i] w) = sum_k V(r_k w) [s_k] with [s_i] = sum_k r_k F[s_k]"""
        m = x.level
        pieces = []
        for i, omega in enumerate(x.components):
            if not omega:
                continue
            expansion = self.teich(self.pres.s_power_poly(i, 1), m, shift=1)
            for k, r_k in enumerate(expansion.components):
                if not r_k:
                    continue
                moved = drw.verschiebung_op(drw.multiply(r_k, omega))
                comps = [DrwElement.zero(moved.ctx, x.degree) for _ in range(self.r)]
                comps[k] = moved
                pieces.append(EtaleForm(self, x.degree, tuple(comps)))
        return self.sum(pieces, m + 1, x.degree)

    # -- pushing forms from the big polynomial ring --

    def _factor(self, kind: str, exps: Tuple[int, ...], shift: int, m: int) -> EtaleForm:
        slot = (kind, exps, shift, m)
        if slot in self._factor_cache:
            return self._factor_cache[slot]
        big = self.big_ctx(m)
        mono = big.fp.from_dict({exps: 1})
        if kind == 'V':
            if shift >= m:
                out = self.zero(m)
            else:
                w = verschiebung_power(teichmuller(mono, big.with_length(m - shift)), shift)
                out = self.from_witt(w)
        elif kind == 'dV':
            out = self.d(self._factor('V', exps, shift, m))
        else:
            out = self.d(self.teich(mono, m + shift))
            for _ in range(shift):
                out = self.frobenius(out)
        self._factor_cache[slot] = out
        return out

    def push_key(self, key: BasicDiffKey, m: int) -> EtaleForm:
        """Image of e(1, a, I) over the big ring"""
        a = key.weight
        p, u = a.p, a.u
        segs = segments(key)
        first = segs[0]
        if first or u == 0:
            exps = a.restrict(first).scaled(p ** u).as_ints()
            out = self._factor('V', exps, u, m)
        else:
            out = self.from_base(drw.teich_monomial([0] * self.pres.n, self.base_ctx(m)))
        for seg in segs[1:]:
            b = a.restrict(seg)
            v = b.vp
            if v < 0:
                factor = self._factor('dV', b.scaled(p ** -v).as_ints(), -v, m)
            else:
                factor = self._factor('Fd', b.scaled(Fraction(1, p ** v)).as_ints(), v, m)
            out = self.mul(out, factor)
        return out

    def push(self, x: DrwElement) -> EtaleForm:
        """W(phi) from forms over the big polynomial ring"""
        m = x.level
        pieces = [self.scale(eta, self.push_key(key, m)) for key, eta in x.sorted_terms()]
        return self.sum(pieces, m, x.degree)


def _s_support(pres: EtalePresentation, key: BasicDiffKey, j) -> int:
    off = pres.s_offset
    return sum(1 for i in range(off, len(pres.big_names)) if key.weight.entries[i] or j[i])


def etale_generator_image(calc: EtaleCalculus, G: FrobLift, gen: Generator, m: int) -> EtaleForm:
    family, key, j = gen
    return calc.push(generator_image(G, family, key, j, m))


def _form_rows(form: EtaleForm) -> Dict[Tuple[int, BasicDiffKey], int]:
    out = {}
    for k, comp in enumerate(form.components):
        for key, eta in comp.terms.items():
            out[(k, key)] = eta
    return out


def etale_structure_decompose(x: EtaleForm, G: Optional[FrobLift] = None, max_weight: int = 3,
                              eps_grid: Sequence = (), eta=DEFAULT_ETA) -> DecompositionResult:
    """Solve over Z/p^m for generator coefficients on the big ring with weights up to max_weight.

    Rank one falls back to the polynomial digit iteration on the single component.
    Certificates are only issued for grid eps up to the presentation's delta.
    """
    calc = x.calc
    pres = calc.pres
    p, m, t = pres.p, x.level, x.degree
    if pres.rank == 1:
        base_lift = _base_lift(pres, m)
        result = poly_structure_decompose(x.components[0], base_lift, max_weight, eps_grid, eta)
        result.kind = 'etale'
        return result
    G = G or pres.big_lift(m)
    gens = _generators_within(pres.big_ctx(m), t, max_weight)
    images = []
    with PerformanceTimer('etale_structure_decompose', logger, prime=p, level_m=m, degree=t):
        for gen in gens:
            images.append(etale_generator_image(calc, G, gen, m))
        image_rows = [_form_rows(img) for img in images]
        target = _form_rows(x)
        rows = sorted(
            {slot for r in image_rows for slot in r} | set(target),
            key=lambda slot: (slot[0], slot[1].sort_key()),
        )
        A = [[(p ** slot[1].u) * r.get(slot, 0) for r in image_rows] for slot in rows]
        b = [(p ** slot[1].u) * target.get(slot, 0) for slot in rows]
        order = sorted(range(len(gens)), key=lambda i: _column_rank(gens[i], lambda k, j: _s_support(pres, k, j)))
        sol = solve_mod_prime_power(A, b, p, m, column_order=order)
    if sol is None:
        raise WeightBoundExceeded(
            f"no decomposition over Z/{p}^{m} with generators of weight at most {max_weight}",
            {'max_weight': max_weight, 'generators': len(gens)},
        )
    table: Dict = {}
    for (family, key, j), mu in zip(gens, sol):
        if mu:
            _accumulate(table, family, key, j, mu)
    result = _finish(table, p, m, t, pres.big_names, 'etale')
    result.lift = G
    if eps_grid:
        summands = [calc.scale(mu, images[i]) for i, mu in enumerate(sol) if mu]
        result.delta = compute_constants(pres).delta
        result.certificates = zeta_certificates(x, summands, eps_grid, eta, result.delta)
    logger.info(
        "etale decomposition solved",
        extra={'prime': p, 'level_m': m, 'degree': t, 'term_count': len(table)},
    )
    return result


def _base_lift(pres: EtalePresentation, m: int) -> FrobLift:
    ctx = pres.base_ctx(max(m, 1))
    Rz = ctx.zz
    images = []
    for name, gen in zip(ctx.names, Rz.gens):
        lifted = pres.lift_lines.get(name)
        if lifted is None:
            images.append(gen ** pres.p)
        else:
            images.append(Rz.from_dict({monom[:pres.n]: c for monom, c in lifted.iterterms()}))
    return FrobLift(ctx, max(pres.precision or 0, m, 1), tuple(images))


def etale_recompose(result: DecompositionResult, calc: EtaleCalculus, G: FrobLift) -> EtaleForm:
    m = result.level
    pieces = []
    for family, key, poly in result.families():
        for monom, c in poly.iterterms():
            image = etale_generator_image(calc, G, (family, key, monom), m)
            pieces.append(calc.scale(int(c), image))
    return calc.sum(pieces, m, result.degree)
