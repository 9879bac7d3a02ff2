"""
Elements of W_m Omega over F_p[X1..Xn] in canonical normal form.

An element is a finite map from basic differential keys (a, I) to residues
modulo p^(m - u(a)). d and V act termwise by closed formulas; products and F
go through the rational model in modules.oracle. The mod-p rewriting and the
kernel bases of the truncation maps are built on top of these operations.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from typing import Dict, Iterable, List, Optional, Tuple

from modules import oracle
from modules.drwbasis import (
    BasicDiffKey, WeightFn, coeff_modulus, enumerate_G, enumerate_H, format_key,
    keys_of_weight, vp_int,
)
from modules.errors import (
    CoefficientOutOfRange, ContextMismatch, LengthUnderflow, NonIntegralExtraction,
    NonIntegralResult, PreconditionViolated, SingularSystem,
)
from modules.linalg import rank_mod_p, solve_mod_p, solve_rational_any, solve_rational_consistent
from modules.logger import get_logger
from modules.polyring import fp_items
from modules.wittcore import (
    RingContext, WittVec, add as witt_add, teichmuller, verschiebung_power, witt_from_int,
    mul as witt_mul, zero as witt_zero,
)

logger = get_logger('drwalgebra')


@dataclass(frozen=True, eq=False)
class DrwElement:
    ctx: RingContext
    degree: int
    terms: Dict[BasicDiffKey, int] = field(default_factory=dict)

    @classmethod
    def from_terms(cls, ctx: RingContext, degree: int, raw: Dict[BasicDiffKey, int]) -> 'DrwElement':
        p = ctx.p
        terms = {}
        for key, eta in raw.items():
            if key.degree != degree:
                raise ContextMismatch(f"key {key.text()} has degree {key.degree}, expected {degree}")
            mod = coeff_modulus(key, ctx.m)
            if mod <= 0:
                continue
            eta = int(eta) % p ** mod
            if eta:
                terms[key] = eta
        return cls(ctx, degree, terms)

    @classmethod
    def zero(cls, ctx: RingContext, degree: int = 0) -> 'DrwElement':
        return cls(ctx, degree, {})

    @property
    def level(self) -> int:
        return self.ctx.m

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, DrwElement):
            return NotImplemented
        if not self.terms and not other.terms:
            return self.ctx.same_ring(other.ctx) and self.ctx.m == other.ctx.m
        return self.ctx == other.ctx and self.degree == other.degree and self.terms == other.terms

    def __hash__(self):
        return hash((self.ctx, self.degree, frozenset(self.terms.items())))

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return add(self, neg(other))

    def __neg__(self):
        return neg(self)

    def __mul__(self, other):
        return multiply(self, other)

    def sorted_terms(self) -> List[Tuple[BasicDiffKey, int]]:
        return sorted(self.terms.items(), key=lambda kv: kv[0].sort_key())

    def __repr__(self):
        body = ' + '.join(format_key(k, eta) for k, eta in self.sorted_terms()) or '0'
        return f"DrwElement(p={self.ctx.p}, m={self.ctx.m}, deg={self.degree}; {body})"


def _check(x: DrwElement, y: DrwElement):
    if not x.ctx.same_ring(y.ctx):
        raise ContextMismatch("elements over different polynomial rings")


def make_e(eta: int, key: BasicDiffKey, ctx: RingContext) -> DrwElement:
    """Single-term element e(eta, a, I) at truncation ctx.m"""
    mod = coeff_modulus(key, ctx.m)
    if mod > 0 and not 0 <= eta < ctx.p ** mod:
        raise CoefficientOutOfRange(
            f"coefficient {eta} of {key.text()} must lie in [0, {ctx.p}^{mod})",
            {'eta': eta, 'modulus': ctx.p ** mod},
        )
    return DrwElement.from_terms(ctx, key.degree, {key: eta})


def teich_monomial(exps, ctx: RingContext) -> DrwElement:
    """[X^j] for an integral exponent vector j"""
    return make_e(1, BasicDiffKey(WeightFn.of(ctx.p, exps), ()), ctx)


def add(x: DrwElement, y: DrwElement) -> DrwElement:
    _check(x, y)
    if not y.terms:
        return x if x.ctx.m <= y.ctx.m else truncate(x, y.ctx.m)
    if not x.terms:
        return y if y.ctx.m <= x.ctx.m else truncate(y, x.ctx.m)
    if x.degree != y.degree:
        raise ContextMismatch(f"cannot add degree {x.degree} and degree {y.degree}")
    ctx = x.ctx if x.ctx.m <= y.ctx.m else y.ctx
    raw = dict(x.terms)
    for key, eta in y.terms.items():
        raw[key] = raw.get(key, 0) + eta
    return DrwElement.from_terms(ctx, x.degree, raw)


def neg(x: DrwElement) -> DrwElement:
    return DrwElement.from_terms(x.ctx, x.degree, {k: -eta for k, eta in x.terms.items()})


def scale(c: int, x: DrwElement) -> DrwElement:
    return DrwElement.from_terms(x.ctx, x.degree, {k: c * eta for k, eta in x.terms.items()})


def sum_elements(items: Iterable[DrwElement], ctx: RingContext, degree: int) -> DrwElement:
    raw: Dict[BasicDiffKey, int] = {}
    for item in items:
        for key, eta in item.terms.items():
            raw[key] = raw.get(key, 0) + eta
    return DrwElement.from_terms(ctx, degree, raw)


def truncate(x: DrwElement, m: int) -> DrwElement:
    if m > x.ctx.m:
        raise LengthUnderflow(f"cannot raise truncation level {x.ctx.m} to {m}")
    return DrwElement.from_terms(x.ctx.with_length(m), x.degree, x.terms)


def differential(x: DrwElement) -> DrwElement:
    """d, termwise: zero when I_0 is empty, otherwise adjoin min(a) with factor p^max(v_p(a), 0)"""
    p = x.ctx.p
    raw: Dict[BasicDiffKey, int] = {}
    for key, eta in x.terms.items():
        if key.first_segment_empty:
            continue
        a = key.weight
        new_key = BasicDiffKey(a, key.parts + (a.min_index(),))
        v = a.vp
        factor = p ** v if v > 0 else 1
        raw[new_key] = raw.get(new_key, 0) + factor * eta
    return DrwElement.from_terms(x.ctx, x.degree + 1, raw)


def verschiebung_op(x: DrwElement, truncate_to: Optional[int] = None) -> DrwElement:
    """V : W_m -> W_{m+1}; coefficient p*eta unless v_p(a) <= 0 and I_0 is nonempty"""
    p = x.ctx.p
    target = x.ctx.with_length(x.ctx.m + 1)
    raw: Dict[BasicDiffKey, int] = {}
    for key, eta in x.terms.items():
        a = key.weight
        new_key = BasicDiffKey(a.scaled(Fraction(1, p)), key.parts)
        if a.vp > 0 or key.first_segment_empty:
            coeff = p * eta
        else:
            coeff = eta
        raw[new_key] = raw.get(new_key, 0) + coeff
    out = DrwElement.from_terms(target, x.degree, raw)
    return out if truncate_to is None else truncate(out, truncate_to)


def frobenius_op(x: DrwElement) -> DrwElement:
    """F : W_{m+1} -> W_m through the rational model"""
    if x.ctx.m < 1:
        raise LengthUnderflow("frobenius_op needs truncation level at least 1")
    target = x.ctx.with_length(x.ctx.m - 1)
    try:
        return oracle.extract(oracle.model_F(oracle.embed(x)), target)
    except NonIntegralExtraction as exc:
        raise NonIntegralResult(f"Frobenius image is not integral: {exc.message}", exc.details)


def multiply(x: DrwElement, y: DrwElement) -> DrwElement:
    """Graded-commutative product at the smaller truncation level"""
    _check(x, y)
    ctx = x.ctx if x.ctx.m <= y.ctx.m else y.ctx
    if not x.terms or not y.terms:
        return DrwElement.zero(ctx, x.degree + y.degree)
    form = oracle.model_mul(oracle.embed(x), oracle.embed(y))
    return oracle.extract(form, ctx)


def power(x: DrwElement, k: int) -> DrwElement:
    out = teich_monomial([0] * x.ctx.n, x.ctx)
    for _ in range(k):
        out = multiply(out, x)
    return out


def in_filtration(x: DrwElement, u: int) -> bool:
    """x lies in Fil^u: every term has v_p(eta) + u(a) >= u"""
    p = x.ctx.p
    return all(vp_int(eta, p) + key.u >= u for key, eta in x.terms.items())


def is_divisible_by_p_power(x: DrwElement, l: int) -> bool:
    p = x.ctx.p
    for key, eta in x.terms.items():
        mod = coeff_modulus(key, x.ctx.m)
        if eta % p ** min(l, mod):
            return False
    return True


def project(x: DrwElement, fracture: str) -> DrwElement:
    """Keep the terms of one fracture class: 'integral', 'fractional', 'pure_fractional', 'd_fractional'"""
    if fracture == 'fractional':
        keep = {k: v for k, v in x.terms.items() if k.fracture != 'integral'}
    else:
        keep = {k: v for k, v in x.terms.items() if k.fracture == fracture}
    return DrwElement(x.ctx, x.degree, keep)


def _rescaled_power_form(P, power_exp: int, divide_exp: int, ctx: RingContext) -> oracle.ModelForm:
    """Model form of (lift of P)^(p^power_exp) with exponents divided by p^divide_exp"""
    p = ctx.p
    lifted = ctx.zz.from_dict({monom: c for monom, c in fp_items(P, p)})
    raised = lifted ** (p ** power_exp)
    scale_exp = Fraction(1, p ** divide_exp)
    raw = {}
    for monom, c in raised.iterterms():
        raw[(tuple(Fraction(e) * scale_exp for e in monom), ())] = Fraction(int(c))
    return oracle.ModelForm.build(p, ctx.n, 0, raw)


def drw_from_witt(w: WittVec) -> DrwElement:
    """Identify W_m(F_p[X]) with the degree-0 part of W_m Omega"""
    ctx = w.ctx
    m, p = ctx.m, ctx.p
    if m == 0:
        return DrwElement.zero(ctx, 0)
    total = oracle.ModelForm.zero(p, ctx.n, 0)
    for u, coord in enumerate(w.coords):
        if not coord:
            continue
        piece = _rescaled_power_form(coord, m - 1 - u, m - 1, ctx)
        total = oracle.model_add(total, oracle.model_scale(piece, p ** u))
    return oracle.extract(total, ctx)


def drw_to_witt(x: DrwElement) -> WittVec:
    """Witt vector of a degree-0 element: sum of V^u(eta [X^(p^u a)])"""
    if x.degree != 0:
        raise ContextMismatch("only degree-0 elements are Witt vectors")
    ctx = x.ctx
    total = witt_zero(ctx)
    for key, eta in x.sorted_terms():
        u = key.u
        inner_ctx = ctx.with_length(ctx.m - u)
        exps = key.weight.scaled(ctx.p ** u).as_ints()
        monom = ctx.fp.from_dict({tuple(exps): 1})
        inner = witt_mul(witt_from_int(eta, inner_ctx), teichmuller(monom, inner_ctx))
        total = witt_add(total, verschiebung_power(inner, u))
    return total


def teich_element(P, ctx: RingContext) -> DrwElement:
    return drw_from_witt(teichmuller(P, ctx))


@dataclass(frozen=True)
class RewriteTarget:
    c: WeightFn
    a: WeightFn
    parts: Tuple[int, ...]
    residue: int
    exact: Fraction


@dataclass(frozen=True)
class RewriteResult:
    eta: int
    b: WeightFn
    L: Tuple[int, ...]
    u: int
    targets: Tuple[RewriteTarget, ...]

    def as_map(self) -> Dict[Tuple, int]:
        return {(t.c.entries, t.a.entries, t.parts): t.residue for t in self.targets if t.residue}


def _rewrite_targets(b: WeightFn, t: int, u: int) -> List[Tuple[WeightFn, WeightFn, Tuple[int, ...]]]:
    p = b.p
    bound = p ** u
    ints = b.as_ints()
    supp = b.support
    P_set = [i for i in supp if ints[i] % bound == 0]
    Q_set = [i for i in supp if ints[i] % bound]
    base = [ints[i] % bound if i in Q_set else 0 for i in range(b.n)]
    q_weight = WeightFn.of(p, base)
    lowest = q_weight.min_index()
    choices = [i for i in Q_set if i != lowest]
    out = []
    for l in range(0, t + 1):
        for chosen in combinations(P_set, l):
            a_vals = list(base)
            for i in chosen:
                a_vals[i] = bound
            for S in combinations(choices, t - l):
                a = WeightFn.of(p, a_vals)
                c = WeightFn.of(p, [(x - y) // bound for x, y in zip(ints, a_vals)])
                out.append((c, a, tuple(chosen) + tuple(S)))
    return out


def _check_rewrite_source(b: WeightFn, L: Tuple[int, ...], u: int) -> BasicDiffKey:
    if u < 1:
        raise PreconditionViolated(f"u must be at least 1, got {u}")
    if not b.is_integral or b.vp != 0:
        raise PreconditionViolated(f"b = ({b.text()}) must be integral with v_p(b) = 0")
    source = BasicDiffKey(b, L)
    if source.first_segment_empty:
        raise PreconditionViolated(
            f"partition {[i + 1 for i in L]} of ({b.text()}) has empty first segment",
            {'b': b.text(), 'L': [i + 1 for i in L]},
        )
    return source


def _shifted_form(shift: Tuple[int, ...], key: BasicDiffKey, u: int) -> oracle.ModelForm:
    p = key.p
    return oracle.model_mul(
        oracle.ModelForm.monomial(p, [x * p ** u for x in shift]),
        oracle.embed_key(key),
    )


def _make_targets(eta: int, candidates, values: Dict[Tuple, Fraction]) -> Tuple[RewriteTarget, ...]:
    targets = []
    for c, a, parts in candidates:
        key = BasicDiffKey(a, parts)
        p = a.p
        value = values.get((c.as_ints(), key), Fraction(0))
        if value.denominator % p == 0:
            raise SingularSystem(f"rewriting coefficient {value} is not p-integral")
        residue = (eta * value.numerator * pow(value.denominator, -1, p)) % p
        targets.append(RewriteTarget(c, a, key.parts, residue, value * eta))
    return tuple(targets)


def rewrite_mod_p_linear(eta: int, b: WeightFn, L, u: int) -> RewriteResult:
    """The rewriting of e(eta, b, L) read off one rational system over every reduced target"""
    L = tuple(L)
    source = _check_rewrite_source(b, L, u)
    candidates = _rewrite_targets(b, len(L), u)
    target_form = oracle.embed_key(source)
    dlogs = sorted({S for (_, S) in target_form.terms} | {
        tuple(sorted(S)) for S in combinations(b.support, len(L))
    })
    columns = []
    for c, a, parts in candidates:
        form = _shifted_form(c.as_ints(), BasicDiffKey(a, parts), u)
        columns.append([form.terms.get((b.entries, S), Fraction(0)) for S in dlogs])
    rhs = [target_form.terms.get((b.entries, S), Fraction(0)) for S in dlogs]
    matrix = [[col[i] for col in columns] for i in range(len(dlogs))]
    solution = solve_rational_consistent(matrix, rhs) if candidates else []
    values = {
        (c.as_ints(), BasicDiffKey(a, parts)): value
        for (c, a, parts), value in zip(candidates, solution)
    }
    return RewriteResult(eta, b, L, u, _make_targets(eta, candidates, values))


def rewrite_conditions(key: BasicDiffKey, u: int) -> Tuple[List[int], List[int], List[int]]:
    """
    Indices witnessing the three obstructions to (a, I) being reduced at level u.

    one: a_i > p^u anywhere on the support
    two: a_i = p^u inside I_0
    three: a_i = p^u inside some I_l, l >= 1, with #I_l >= 2
    """
    bound = key.p ** u
    ints = key.weight.as_ints()
    segs = key.segments()
    one = [i for i in key.weight.sorted_support() if ints[i] > bound]
    two = [i for i in segs[0] if ints[i] == bound]
    three = [i for seg in segs[1:] if len(seg) >= 2 for i in seg if ints[i] == bound]
    return one, two, three


def is_reduced(key: BasicDiffKey, u: int) -> bool:
    return not any(rewrite_conditions(key, u))


def _partitions(weight: WeightFn, t: int) -> List[BasicDiffKey]:
    """Partitions of size t whose first segment keeps min(weight)"""
    out = []
    for S in combinations(weight.sorted_support(), t):
        key = BasicDiffKey(weight, S)
        if not key.first_segment_empty:
            out.append(key)
    return out


def _peeled(key: BasicDiffKey, i: int, u: int) -> List[Tuple[Tuple[int, ...], BasicDiffKey]]:
    """[X_i^(p^u)] e(1, b, J) with b = a - p^u 1_i, v_p(b) = 0 and J_0 nonempty"""
    p = key.p
    ints = list(key.weight.as_ints())
    ints[i] -= p ** u
    b = WeightFn.of(p, ints)
    if not b.support or b.vp != 0:
        return []
    shift = tuple(int(j == i) for j in range(len(ints)))
    return [(shift, J) for J in _partitions(b, key.degree)]


def _rewrite_step(key: BasicDiffKey, u: int) -> List[Tuple[Tuple[int, ...], BasicDiffKey, Fraction]]:
    """
    One step of the rewriting: e(1, a, I) as a rational combination of
    [X_i^(p^u)] e(1, b, J) with |b| = |a| - p^u and of reduced e(1, a, J').

    A witness of the first two obstructions is peeled off alone; the third
    obstruction peels every index of value p^u that sits in a long segment.
    min(a) is kept out of every J so the peeled factor never touches it.
    """
    one, two, three = rewrite_conditions(key, u)
    peel = [(one + two)[0]] if one or two else three
    n = key.weight.n
    zero = (0,) * n
    columns = [item for i in peel for item in _peeled(key, i, u)]
    columns += [(zero, J) for J in _partitions(key.weight, key.degree) if is_reduced(J, u)]
    target = oracle.embed_key(key)
    forms = [_shifted_form(shift, J, u) for shift, J in columns]
    rows = sorted(set(target.terms).union(*(f.terms for f in forms)))
    matrix = [[f.terms.get(row, Fraction(0)) for f in forms] for row in rows]
    rhs = [target.terms.get(row, Fraction(0)) for row in rows]
    try:
        solution = solve_rational_any(matrix, rhs)
    except SingularSystem as exc:
        raise SingularSystem(f"no rewriting step for {format_key(key)} at u={u}: {exc}") from exc
    return [(shift, J, value) for (shift, J), value in zip(columns, solution) if value]


def rewrite_mod_p(eta: int, b: WeightFn, L, u: int) -> RewriteResult:
    """
    Write e(eta, b, L) as a combination of [X^(p^u c)] e(eta, a, I) with reduced (a, I).

    Terms meeting an obstruction are replaced by their rewriting step and the
    peeled factors accumulate in c; each step lowers |a| by p^u or lands on a
    reduced key, so the recursion stops once every term is reduced.
    """
    L = tuple(L)
    source = _check_rewrite_source(b, L, u)
    steps: Dict[BasicDiffKey, List] = {}
    pending: Dict[Tuple, Fraction] = {((0,) * b.n, source): Fraction(1)}
    reduced: Dict[Tuple, Fraction] = {}
    while pending:
        (c, key), coeff = max(pending.items(), key=lambda item: item[0][1].weight.size)
        del pending[(c, key)]
        if is_reduced(key, u):
            reduced[(c, key)] = reduced.get((c, key), Fraction(0)) + coeff
            continue
        if key not in steps:
            steps[key] = _rewrite_step(key, u)
            logger.debug("rewrite step", extra={'key': format_key(key), 'u': u, 'term_count': len(steps[key])})
        for shift, J, value in steps[key]:
            child = (tuple(x + y for x, y in zip(c, shift)), J)
            pending[child] = pending.get(child, Fraction(0)) + coeff * value
    candidates = _rewrite_targets(b, len(L), u)
    known = {(c.as_ints(), BasicDiffKey(a, parts)) for c, a, parts in candidates}
    stray = [key for (c, key), value in reduced.items() if value and (c, key) not in known]
    if stray:
        raise SingularSystem(f"rewriting of {format_key(source)} left unexpected terms {[format_key(k) for k in stray]}")
    return RewriteResult(eta, b, L, u, _make_targets(eta, candidates, reduced))


@dataclass(frozen=True)
class WeightSplit:
    """Generators of the mod-p module on one weight c and the square system they span"""
    weight: WeightFn
    degree: int
    generators: Tuple[Tuple[str, BasicDiffKey, Tuple[int, ...]], ...]
    keys: Tuple[BasicDiffKey, ...]
    columns: Tuple[Tuple[int, ...], ...]

    def solve(self, values: Dict[BasicDiffKey, int]) -> List[int]:
        p = self.weight.p
        matrix = [[col[i] for col in self.columns] for i in range(len(self.keys))]
        rhs = [values.get(k, 0) % p for k in self.keys]
        return solve_mod_p(matrix, rhs, p)


def weight_generators(c: WeightFn, t: int) -> List[Tuple[str, BasicDiffKey, Tuple[int, ...]]]:
    """(family, generator key, twist j) with [X^j] * generator of weight c"""
    p, n = c.p, c.n
    u = c.u
    if u == 0:
        ints = c.as_ints()
        out = []
        for I in combinations(c.support, t):
            j = tuple(ints[i] - (1 if i in I else 0) for i in range(n))
            out.append(('H', BasicDiffKey(WeightFn.indicator(p, n, I), I), j))
        return out
    bound = p ** u
    floors = [v.numerator // v.denominator for v in c.entries]
    a_vals = [int((v - f) * bound) for v, f in zip(c.entries, floors)]
    a = WeightFn.of(p, a_vals)
    lowest = a.min_index()
    frac_supp = [i for i in a.support if i != lowest]
    integral_ones = [i for i in range(n) if c.entries[i].denominator == 1 and c.entries[i] >= 1]
    out = []
    for family, degree in (('G', t), ('dG', t - 1)):
        if degree < 0:
            continue
        for k in range(0, degree + 1):
            for I in combinations(frac_supp, k):
                for J in combinations(integral_ones, degree - k):
                    top = [Fraction(x) for x in a_vals]
                    for i in J:
                        top[i] += bound
                    gen_weight = WeightFn(p, tuple(v / bound for v in top))
                    j = tuple(int(cv - gv) for cv, gv in zip(c.entries, gen_weight.entries))
                    out.append((family, BasicDiffKey(gen_weight, tuple(I) + tuple(J)), j))
    return out


def generator_element(family: str, key: BasicDiffKey, j, ctx: RingContext) -> DrwElement:
    """[X^j] e for H and G generators, d([X^j] e) for dG generators"""
    base = multiply(teich_monomial(j, ctx), make_e(1, key, ctx))
    return differential(base) if family == 'dG' else base


@lru_cache(maxsize=None)
def _weight_split(p: int, n: int, entries: Tuple[Fraction, ...], t: int) -> WeightSplit:
    c = WeightFn(p, entries)
    ctx = RingContext(p, n, c.u + 1)
    keys = tuple(keys_of_weight(c, t))
    gens = tuple(weight_generators(c, t))
    columns = []
    for family, key, j in gens:
        element = generator_element(family, key, j, ctx)
        columns.append(tuple(element.terms.get(k, 0) % p for k in keys))
    return WeightSplit(c, t, gens, keys, tuple(columns))


def weight_split(c: WeightFn, t: int) -> WeightSplit:
    return _weight_split(c.p, c.n, c.entries, t)


@dataclass
class KernelBasis:
    degree: int
    level: int
    h_part: List[BasicDiffKey]
    g_part: List[BasicDiffKey]
    dg_part: List[BasicDiffKey]
    relations: Dict[BasicDiffKey, List[Tuple[str, BasicDiffKey, Tuple[int, ...], int]]]
    expected_rank: int
    brute_force_rank: int
    stray_coordinates: int

    @property
    def certified(self) -> bool:
        return self.expected_rank == self.brute_force_rank and self.stray_coordinates == 0


def _weights_with_u(n: int, p: int, u: int, max_weight: int, min_support: int) -> List[WeightFn]:
    den = p ** u
    out = []
    for nums in product(range(max_weight * den + 1), repeat=n):
        if sum(nums) > max_weight * den:
            continue
        w = WeightFn(p, tuple(Fraction(k, den) for k in nums))
        if w.u == u and len(w.support) >= min_support:
            out.append(w)
    return sorted(out, key=lambda w: (w.size, w.entries))


def kernel_basis_mod_p(t: int, m: int, ctx: RingContext, max_weight: int) -> KernelBasis:
    """Basis of Ker(W_{m+1}Omega^t -> W_mOmega^t) mod p over F_p[X], perfect base

    Generators: H(t) for m = 0, G(t) and d G(t-1) with u = m otherwise. Each key
    ebar(1, c, L) of the kernel is split as sum P_e e + d(sum P_e e) with P_e = lambda X^j
    and |j| + |a(e)| = |c|; the brute-force rank of the twisted generators inside
    the degree-bounded slice is compared with the number of kernel keys.
    """
    p, n = ctx.p, ctx.n
    if m == 0:
        h_part = list(enumerate_H(t, ctx))
        g_part, dg_part = [], []
    else:
        h_part = []
        g_part = enumerate_G(t, ctx, m, max_weight, exact_u=m)
        dg_part = enumerate_G(t - 1, ctx, m, max_weight, exact_u=m)
    level_ctx = ctx.with_length(m + 1)
    relations = {}
    rows = []
    expected = 0
    stray = 0
    for c in _weights_with_u(n, p, m, max_weight, max(t, 1) if m else t):
        split = weight_split(c, t)
        expected += len(split.keys)
        for family, key, j in split.generators:
            element = generator_element(family, key, j, level_ctx)
            stray += sum(1 for k, eta in element.terms.items() if k.u < m and eta % p)
            rows.append({k: eta % p for k, eta in element.terms.items() if k.u == m})
        for k in split.keys:
            unit = {k: 1}
            coeffs = split.solve(unit)
            relations[k] = [
                (family, key, j, lam) for (family, key, j), lam in zip(split.generators, coeffs) if lam
            ]
    all_keys = sorted({k for row in rows for k in row}, key=BasicDiffKey.sort_key)
    index = {k: i for i, k in enumerate(all_keys)}
    matrix = []
    for row in rows:
        vec = [0] * len(all_keys)
        for k, eta in row.items():
            vec[index[k]] = eta
        matrix.append(vec)
    rank = rank_mod_p(matrix, p) if matrix and all_keys else 0
    logger.debug(
        "kernel basis computed",
        extra={'degree': t, 'level_m': m, 'term_count': expected, 'prime': p},
    )
    return KernelBasis(t, m, h_part, g_part, dg_part, relations, expected, rank, stray)
