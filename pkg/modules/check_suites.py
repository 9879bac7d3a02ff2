"""
Check Suites Module
Seeded property checks over the Witt, de Rham-Witt, pseudovaluation, Lazard,
relative perfectness and structure engines.

Every suite is a list of named jobs. Each job gets its own random.Random seeded
from (seed, job index), so results do not depend on --threads.
"""
import math
import random
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from math import comb
from typing import Callable, Dict, List, Optional, Tuple

from modules import drwalgebra as drw
from modules import oracle
from modules import pseudoval
from modules import wittcore as wc
from modules.drwalgebra import DrwElement
from modules.drwbasis import BasicDiffKey, RebarCage, WeightFn
from modules.errors import ConfigError, WdrwError
from modules.etale import (
    artin_schreier_presentation, check_relatively_perfect, compute_constants, nilpotent_presentation,
    overconv_witt_decompose, trivial_presentation, witt_basis_decompose, witt_basis_recompose,
)
from modules.lazard import (
    FormalForm, FrobLift, apply_lift, canonical_lift, check_lift_compatibility, estimate_v_F,
    s_F, t_F, t_frob, v_F, v_F_forms,
)
from modules.logger import PerformanceTimer, get_logger
from modules.polyring import reduce_coeffs
from modules.pseudoval import CheckReport
from modules.samplers import random_element, random_poly, random_witt
from modules.structure import (
    DecompositionResult, EtaleCalculus, ZetaCertificate, etale_generator_image, etale_recompose,
    etale_structure_decompose, form_zeta, poly_structure_decompose, poly_summands, recompose,
)
from modules.wittcore import RingContext

logger = get_logger('checks')

Job = Callable[[random.Random], List[CheckReport]]


@dataclass(frozen=True)
class SuiteParams:
    prime: int = 2
    n_vars: int = 1
    length: int = 2
    samples: int = 20
    seed: int = 0
    eps_grid: Tuple[Fraction, ...] = (Fraction(1, 2), Fraction(1, 4))
    radii: Optional[Tuple[Fraction, ...]] = None
    max_weight: int = 3
    threads: int = 1
    eta: Fraction = Fraction(1, 4)

    @property
    def ctx(self) -> RingContext:
        return RingContext(self.prime, self.n_vars, self.length)


def _degrees(ctx: RingContext, top: int = 2) -> List[int]:
    return list(range(min(ctx.n, top) + 1))


def _random_lift(ctx: RingContext, rng: random.Random, precision: int) -> FrobLift:
    """X_i -> X_i^p + p * delta_i with small random delta_i over the integers"""
    Rz = ctx.zz
    images = []
    for gen in Rz.gens:
        delta = random_poly(Rz, ctx.p, rng, max_deg=2, max_terms=2)
        images.append(gen ** ctx.p + ctx.p * delta)
    return FrobLift(ctx, precision, tuple(images))


# -- witt ------------------------------------------------------------------------------

def _witt_jobs(params: SuiteParams) -> List[Tuple[str, Job]]:
    ctx = params.ctx
    p = ctx.p

    def ring_axioms(rng):
        report = CheckReport('witt_ring_axioms')
        for _ in range(params.samples):
            x, y, z = (random_witt(ctx, rng) for _ in range(3))
            report.record(x + y == y + x, f"commutative add x={x!r} y={y!r}")
            report.record(x * y == y * x, f"commutative mul x={x!r} y={y!r}")
            report.record((x + y) + z == x + (y + z), f"associative add x={x!r}")
            report.record((x * y) * z == x * (y * z), f"associative mul x={x!r}")
            report.record(x * (y + z) == x * y + x * z, f"distributive x={x!r}")
            report.record((x + (-x)).is_zero(), f"x - x = 0 x={x!r}")
            report.record(wc.one(ctx) * x == x, f"1 * x = x x={x!r}")
        return [report]

    def ghost_hom(rng):
        report = CheckReport('witt_ghost')
        for _ in range(params.samples):
            x, y = random_witt(ctx, rng), random_witt(ctx, rng)
            gx, gy = wc.ghost_of(x), wc.ghost_of(y)
            gs, gm = wc.ghost_of(x + y), wc.ghost_of(x * y)
            for u in range(ctx.m):
                modulus = p ** (u + 1)
                report.record(not reduce_coeffs(gs[u] - gx[u] - gy[u], modulus), f"ghost add u={u} x={x!r}")
                report.record(not reduce_coeffs(gm[u] - gx[u] * gy[u], modulus), f"ghost mul u={u} x={x!r}")
        return [report]

    def frobenius_verschiebung(rng):
        report = CheckReport('witt_fv')
        for _ in range(params.samples):
            x = random_witt(ctx, rng)
            fv = wc.frobenius(wc.verschiebung(x))
            report.record(fv == wc.scale(p, x), f"FV = p x={x!r}")
        return [report]

    def teichmuller(rng):
        report = CheckReport('witt_teichmuller')
        for _ in range(params.samples):
            P, Q = random_poly(ctx.fp, p, rng), random_poly(ctx.fp, p, rng)
            lhs = wc.teichmuller(P * Q, ctx)
            rhs = wc.teichmuller(P, ctx) * wc.teichmuller(Q, ctx)
            report.record(lhs == rhs, f"[PQ] = [P][Q] P={P} Q={Q}")
        return [report]

    return [('ring_axioms', ring_axioms), ('ghost', ghost_hom), ('fv', frobenius_verschiebung),
            ('teichmuller', teichmuller)]


# -- dga ---------------------------------------------------------------------------------

def _dga_jobs(params: SuiteParams) -> List[Tuple[str, Job]]:
    ctx = params.ctx
    p, m = ctx.p, ctx.m
    up = ctx.with_length(m + 1)

    def differential_square(rng):
        report = CheckReport('dga_d_squared')
        leibniz = CheckReport('dga_leibniz')
        graded = CheckReport('dga_graded_commutative')
        for _ in range(params.samples):
            s, t = rng.choice(_degrees(ctx)), rng.choice(_degrees(ctx))
            x, y = random_element(ctx, rng, s), random_element(ctx, rng, t)
            dx = drw.differential(x)
            report.record(not drw.differential(dx), f"d(dx) = 0 x={x!r}")
            if s + t > ctx.n:
                continue
            lhs = drw.differential(x * y)
            rhs = dx * y + drw.scale((-1) ** s, x * drw.differential(y))
            leibniz.record(lhs == rhs, f"Leibniz x={x!r} y={y!r}")
            graded.record(x * y == drw.scale((-1) ** (s * t), y * x), f"xy = +-yx x={x!r} y={y!r}")
        return [report, leibniz, graded]

    def frobenius_identities(rng):
        fv = CheckReport('dga_fv')
        fdv = CheckReport('dga_fdv')
        df = CheckReport('dga_df_pfd')
        for _ in range(params.samples):
            degree = rng.choice(_degrees(ctx))
            x = random_element(ctx, rng, degree)
            vx = drw.verschiebung_op(x)
            fv.record(drw.frobenius_op(vx) == drw.scale(p, x), f"FV = p x={x!r}")
            fdv.record(drw.frobenius_op(drw.differential(vx)) == drw.differential(x), f"FdV = d x={x!r}")
            y = random_element(up, rng, degree)
            lhs = drw.differential(drw.frobenius_op(y))
            rhs = drw.scale(p, drw.frobenius_op(drw.differential(y)))
            df.record(lhs == rhs, f"dF = pFd y={y!r}")
        return [fv, fdv, df]

    def projection_formula(rng):
        report = CheckReport('dga_v_projection')
        for _ in range(params.samples):
            s, t = rng.choice(_degrees(ctx)), rng.choice(_degrees(ctx))
            if s + t > ctx.n:
                continue
            x = random_element(ctx, rng, s)
            y = random_element(up, rng, t)
            lhs = drw.verschiebung_op(x * drw.frobenius_op(y))
            rhs = drw.verschiebung_op(x) * y
            report.record(lhs == rhs, f"V(x Fy) = V(x) y x={x!r} y={y!r}")
        return [report]

    def teichmuller_frobenius(rng):
        teich = CheckReport('dga_frobenius_teichmuller')
        dteich = CheckReport('dga_frobenius_dteichmuller')
        for _ in range(params.samples):
            r = random_poly(ctx.fp, p, rng, max_deg=3)
            teich.record(
                drw.frobenius_op(drw.teich_element(r, up)) == drw.teich_element(r ** p, ctx),
                f"F[r] = [r^p] r={r}",
            )
            lhs = drw.frobenius_op(drw.differential(drw.teich_element(r, up)))
            rhs = drw.teich_element(r ** (p - 1), ctx) * drw.differential(drw.teich_element(r, ctx))
            dteich.record(lhs == rhs, f"F d[r] = [r^(p-1)] d[r] r={r}")
        return [teich, dteich]

    return [('d_squared', differential_square), ('frobenius', frobenius_identities),
            ('projection', projection_formula), ('teichmuller', teichmuller_frobenius)]


# -- oracle ---------------------------------------------------------------------------------

def _oracle_jobs(params: SuiteParams) -> List[Tuple[str, Job]]:
    ctx = params.ctx
    up = ctx.with_length(ctx.m + 1)

    def round_trip(rng):
        report = CheckReport('oracle_round_trip')
        hom = CheckReport('oracle_homomorphism')
        for _ in range(params.samples):
            s, t = rng.choice(_degrees(ctx)), rng.choice(_degrees(ctx))
            x, y = random_element(ctx, rng, s), random_element(ctx, rng, t)
            fx = oracle.embed(x)
            report.record(oracle.extract(fx, ctx) == x, f"extract(embed x) = x x={x!r}")
            hom.record(oracle.extract(oracle.model_d(fx), ctx) == drw.differential(x), f"d x={x!r}")
            hom.record(
                oracle.extract(oracle.model_V(fx), up) == drw.verschiebung_op(x), f"V x={x!r}",
            )
            if s == t:
                hom.record(oracle.extract(fx + oracle.embed(y), ctx) == x + y, f"x + y x={x!r} y={y!r}")
            if s + t <= ctx.n:
                hom.record(oracle.extract(fx * oracle.embed(y), ctx) == x * y, f"xy x={x!r} y={y!r}")
        return [report, hom]

    return [('round_trip', round_trip)]


# -- structure -------------------------------------------------------------------------------

def _structure_jobs(params: SuiteParams) -> List[Tuple[str, Job]]:
    ctx = params.ctx
    F = canonical_lift(ctx)

    def uniqueness(rng):
        report = CheckReport('structure_round_trip')
        zero = CheckReport('structure_zero')
        for degree in _degrees(ctx):
            result = poly_structure_decompose(DrwElement.zero(ctx, degree), F, params.max_weight)
            zero.record(result.is_zero(), f"decompose(0) = 0 degree={degree}")
        for _ in range(params.samples):
            x = random_element(ctx, rng, rng.choice(_degrees(ctx)))
            try:
                result = poly_structure_decompose(x, F, params.max_weight)
            except WdrwError as exc:
                report.record(False, f"decompose x={x!r}: {exc.message}")
                continue
            report.record(recompose(result, F) == x, f"recompose(decompose x) = x x={x!r}")
            again = poly_structure_decompose(recompose(result, F), F, params.max_weight)
            report.record(list(again.families()) == list(result.families()), f"unique map x={x!r}")
        return [report, zero]

    return [('uniqueness', uniqueness)]


# -- rewrite ---------------------------------------------------------------------------------

def _integral_weights(n: int, p: int, max_size: int) -> List[WeightFn]:
    out = []
    for ints in product(range(max_size + 1), repeat=n):
        if 0 < sum(ints) <= max_size:
            b = WeightFn.of(p, ints)
            if b.vp == 0:
                out.append(b)
    return out


def _rewrite_jobs(params: SuiteParams) -> List[Tuple[str, Job]]:
    ctx = params.ctx
    p, n = ctx.p, ctx.n

    def enumerate_rewrites(rng):
        count = CheckReport('rewrite_count')
        residue = CheckReport('rewrite_mod_p')
        agreement = CheckReport('rewrite_agreement')
        for b in _integral_weights(n, p, params.max_weight):
            support = b.sorted_support()
            for size in range(len(support) + 1):
                for L in combinations(support, size):
                    key = BasicDiffKey(b, tuple(L))
                    if key.first_segment_empty:
                        continue
                    for u in (1, 2):
                        result = drw.rewrite_mod_p(1, b, L, u)
                        linear = drw.rewrite_mod_p_linear(1, b, L, u)
                        agreement.record(result.targets == linear.targets,
                                         f"b=({b.text()}) L={list(L)} u={u}: recursive and linear differ")
                        expected = comb(len(b.support) - 1, len(L))
                        count.record(len(result.targets) == expected,
                                     f"b=({b.text()}) L={list(L)} u={u}: {len(result.targets)} != {expected}")
                        level = ctx.with_length(u + 1)
                        pieces = [
                            drw.scale(t.residue, drw.teich_monomial([x * p ** u for x in t.c.as_ints()], level)
                                      * drw.make_e(1, BasicDiffKey(t.a, t.parts), level))
                            for t in result.targets if t.residue
                        ]
                        total = drw.sum_elements(pieces, level, len(L))
                        diff = drw.make_e(1, key, level) - total
                        residue.record(drw.is_divisible_by_p_power(diff, 1), f"b=({b.text()}) L={list(L)} u={u}")
        return [count, residue, agreement]

    return [('rewrite', enumerate_rewrites)]


# -- kernel ---------------------------------------------------------------------------------

def _kernel_jobs(params: SuiteParams) -> List[Tuple[str, Job]]:
    ctx = params.ctx
    jobs = []
    for t in _degrees(ctx):
        for m in range(min(ctx.m, 2) + 1):
            def run(rng, t=t, m=m):
                report = CheckReport(f"kernel_t{t}_m{m}")
                basis = drw.kernel_basis_mod_p(t, m, ctx, min(params.max_weight, 3))
                report.record(basis.certified, f"rank {basis.expected_rank} vs brute force {basis.brute_force_rank}, "
                                               f"{basis.stray_coordinates} stray")
                if m >= 1:
                    report.record(not basis.h_part, "H-part must be empty above level 0")
                return [report]
            jobs.append((f"kernel_t{t}_m{m}", run))
    return jobs


# -- pseudoval ---------------------------------------------------------------------------------

def _pseudoval_jobs(params: SuiteParams) -> List[Tuple[str, Job]]:
    ctx = params.ctx
    jobs = []
    for name in pseudoval.CHECKS:
        def run(rng, name=name):
            if pseudoval.sample_kind(name) == 'witt':
                samples = [random_witt(ctx, rng, max_deg=3) for _ in range(params.samples)]
            else:
                samples = [random_element(ctx, rng, rng.choice(_degrees(ctx))) for _ in range(params.samples)]
            return [pseudoval.check_inequality(name, samples, params.eps_grid, params.radii)]
        jobs.append((name, run))
    return jobs


# -- lazard ------------------------------------------------------------------------------------

def _lazard_jobs(params: SuiteParams) -> List[Tuple[str, Job]]:
    ctx = params.ctx
    p, m = ctx.p, ctx.m

    def canonical(rng):
        report = CheckReport('lazard_teichmuller')
        for exps in product(range(4), repeat=ctx.n):
            P = ctx.zz.from_dict({exps: 1})
            report.record(t_frob(P, ctx) == wc.teichmuller(P, ctx), f"t_Frob(X^{list(exps)}) = [X^a]")
        worked = RingContext(2, 1, 3)
        F = FrobLift(worked, 3, (worked.zz.gens[0] ** 2 + 2 * worked.zz.gens[0],))
        X = worked.fp.gens[0]
        report.record(t_F(F, worked.zz.gens[0], 3).coords == (X, X, X ** 3 + X ** 2 + X),
                      "t_F(X) = (X, X, X^3 + X^2 + X) for F(X) = X^2 + 2X")
        return [report]

    def perturbed(rng):
        ghost = CheckReport('lazard_ghost')
        hom = CheckReport('lazard_homomorphism')
        in_v = CheckReport('lazard_v_F_in_VW')
        product_rule = CheckReport('lazard_product_formula')
        injective = CheckReport('lazard_mod_p_injective')
        for _ in range(max(1, params.samples // 4)):
            F = _random_lift(ctx, rng, m)
            base = canonical_lift(ctx, F.precision)
            for _ in range(4):
                P = random_poly(ctx.zz, p, rng, max_deg=3)
                Q = random_poly(ctx.zz, p, rng, max_deg=3)
                expected = [P]
                for _ in range(m - 1):
                    expected.append(apply_lift(F, expected[-1], exact=True))
                ghost.record(wc.ghost(s_F(F, P, m), p) == expected, f"ghost(s_F(P)) P={P}")
                tP, tQ = t_F(F, P, m), t_F(F, Q, m)
                hom.record(t_F(F, P + Q, m) == tP + tQ, f"t_F(P+Q) P={P} Q={Q}")
                hom.record(t_F(F, P * Q, m) == tP * tQ, f"t_F(PQ) P={P} Q={Q}")
                vP = v_F(F, P, m)
                in_v.record(not vP.coords[0], f"v_F(P) in V(W) P={P}")
                lhs = v_F(F, P * Q, m)
                rhs = vP * tQ + t_F(base, P, m) * v_F(F, Q, m)
                product_rule.record(lhs == rhs, f"v_F(PQ) P={P} Q={Q}")
            for exps in product(range(7), repeat=ctx.n):
                if sum(exps) > 6:
                    continue
                mono = ctx.zz.from_dict({exps: 1})
                first = t_F(F, mono, m).coords[0]
                injective.record(first == ctx.fp.from_dict({exps: 1}), f"t_F(X^{list(exps)}) mod p")
        return [ghost, hom, in_v, product_rule, injective]

    def forms(rng):
        report = CheckReport('lazard_v_F_forms_fil1')
        for _ in range(max(1, params.samples // 4)):
            F = _random_lift(ctx, rng, m)
            degree = rng.choice(_degrees(ctx, 1))
            dvars = rng.sample(range(ctx.n), degree)
            exps = tuple(rng.randint(0, 2) for _ in range(ctx.n))
            form = FormalForm.monomial_form(ctx, 1, exps, dvars)
            report.record(drw.in_filtration(v_F_forms(F, form, m), 1), f"v_F(X^{list(exps)} dX_{dvars}) in Fil^1")
        return [report]

    def estimate(rng):
        report = CheckReport('lazard_estimate')
        F = _random_lift(ctx, rng, m)
        result = estimate_v_F(F, params.eps_grid, params.radii, max_exponent=8 if ctx.n == 1 else 4)
        if result.delta is not None:
            below = [eps for eps in result.grid if eps <= result.delta]
            report.record(all(result.holds[eps] for eps in below), f"bounds fail below delta={result.delta}")
        report.record(result.checked > 0, "estimate checked nothing")
        canonical_estimate = estimate_v_F(canonical_lift(ctx), params.eps_grid, params.radii, max_exponent=4)
        report.record(all(canonical_estimate.holds.values()), "canonical lift has v_F = 0")
        return [report]

    return [('canonical', canonical), ('perturbed', perturbed), ('forms', forms), ('estimate', estimate)]


# -- relative perfectness --------------------------------------------------------------------

def _perfect_jobs(params: SuiteParams) -> List[Tuple[str, Job]]:
    def cages(rng):
        report = CheckReport('rebar_cages')
        p = params.prime
        perfect, laurent = RebarCage.perfect(p), RebarCage.laurent(p)
        for u in range(3):
            report.record(perfect.indices(u, 0) == [(0,)], f"perfect B({u},0)")
            report.record(perfect.indices(u, 1) == [], f"perfect B({u},1)")
            report.record(len(laurent.indices(u, 0)) == p ** u, f"laurent B({u},0)")
            for m in (1, 2):
                report.record(len(laurent.indices(u, m)) == p ** (u + m) - p ** u, f"laurent B({u},{m})")
        return [report]

    def presentations(rng):
        report = CheckReport('relatively_perfect')
        pres = artin_schreier_presentation(2)
        rel = check_relatively_perfect(pres)
        report.record(rel.ok and rel.det == pres.loc.one(), "Artin-Schreier det(U0) = 1")
        report.record(check_relatively_perfect(trivial_presentation(params.prime, max(params.n_vars, 1))).ok, "trivial extension")
        report.record(not check_relatively_perfect(nilpotent_presentation(2)).ok, "nilpotent extension is rejected")
        constants = compute_constants(pres)
        report.record(constants.delta == Fraction(1, 2), f"Artin-Schreier delta = {constants.delta}")
        report.record(check_lift_compatibility(pres), "Artin-Schreier lift commutes with the relation")
        return [report]

    def witt_basis(rng):
        report = CheckReport('witt_basis_round_trip')
        divisibility = CheckReport('witt_basis_v_divisibility')
        pres = artin_schreier_presentation(2)
        for _ in range(params.samples):
            m = rng.randint(1, min(params.length, 3))
            big = pres.big_ctx(m)
            w = random_witt(big, rng, max_deg=3)
            depth = rng.randrange(m)
            w = wc.verschiebung_power(wc.truncate(w, m - depth), depth)
            parts = witt_basis_decompose(w, pres)
            report.record(witt_basis_recompose(parts, pres) == pres.normalize_witt(w), f"round trip w={w!r}")
            target_depth = wc.vV(pres.normalize_witt(w))
            part_depth = min(wc.vV(part) for part in parts)
            divisibility.record(target_depth == part_depth, f"V-depth {target_depth} vs parts {part_depth}")
        return [report, divisibility]

    return [('cages', cages), ('presentations', presentations), ('witt_basis', witt_basis)]


# -- main: decomposition equivalences ---------------------------------------------------------

def _reverify(report: CheckReport, result: DecompositionResult, x, summands, label: str) -> None:
    """Recompute every attached certificate from x and the summands"""
    for eps, cert in sorted(result.certificates.items()):
        least = min((form_zeta(s, eps) for s in summands), default=math.inf)
        again = ZetaCertificate(form_zeta(x, eps), least, cert.eta)
        report.record(cert == again, f"certificate eps={eps} {label}")
    certified = result.eps_certified
    if certified is not None:
        report.record(all(c.holds for e, c in result.certificates.items() if e <= certified),
                      f"certified eps={certified} {label}")


def _main_jobs(params: SuiteParams) -> List[Tuple[str, Job]]:
    ctx = params.ctx
    F = canonical_lift(ctx)

    def equivalences(rng):
        divisible = CheckReport('main_divisibility')
        filtration = CheckReport('main_filtration')
        for _ in range(params.samples):
            x = random_element(ctx, rng, rng.choice(_degrees(ctx)))
            lam = ctx.p ** rng.randrange(ctx.m)
            x = drw.scale(lam, x)
            result = poly_structure_decompose(x, F, params.max_weight)
            for l in range(1, ctx.m + 1):
                divisible.record(result.divisible_by_p_power(l) == drw.is_divisible_by_p_power(x, l),
                                 f"p^{l} | x iff p^{l} | s(e) x={x!r}")
                filtration.record(result.satisfies_filtration(l) == drw.in_filtration(x, l),
                                  f"Fil^{l} criterion x={x!r}")
        return [divisible, filtration]

    def general_lift(rng):
        report = CheckReport('main_general_lift')
        certs = CheckReport('main_certificates')
        for _ in range(max(1, params.samples // 5)):
            G = _random_lift(ctx, rng, ctx.m)
            x = random_element(ctx, rng, rng.choice(_degrees(ctx, 1)), max_terms=2)
            try:
                result = poly_structure_decompose(x, G, params.max_weight, params.eps_grid, params.eta)
            except WdrwError as exc:
                report.record(False, f"decompose x={x!r}: {exc.message}")
                continue
            report.record(recompose(result, G) == x, f"recompose x={x!r}")
            _reverify(certs, result, x, poly_summands(result, G), f"x={x!r}")
        return [report, certs]

    def etale(rng):
        report = CheckReport('main_etale')
        certs = CheckReport('main_etale_certificates')
        pres = artin_schreier_presentation(2)
        calc = EtaleCalculus(pres)
        m = 2
        G = pres.big_lift(m)
        R = pres.big_ctx(m).fp
        X, s = R.gens
        delta = compute_constants(pres).delta
        for poly in (X, s, X * s, s + X ** 2):
            for form in (calc.teich(poly, m), calc.d(calc.teich(poly, m))):
                label = f"[{poly}] degree {form.degree}"
                try:
                    result = etale_structure_decompose(form, G, max(params.max_weight, 2), params.eps_grid, params.eta)
                except WdrwError as exc:
                    report.record(False, f"decompose {label}: {exc.message}")
                    continue
                report.record(etale_recompose(result, calc, G) == form, f"recompose {label}")
                certs.record(all(eps <= delta for eps in result.certificates), f"eps above delta {label}")
                summands = [
                    calc.scale(int(c), etale_generator_image(calc, G, (family, key, monom), m))
                    for family, key, poly_e in result.families() for monom, c in poly_e.iterterms()
                ]
                _reverify(certs, result, form, summands, label)
        return [report, certs]

    def overconvergent(rng):
        report = CheckReport('main_overconvergent_witt')
        pres = artin_schreier_presentation(2)
        big = pres.big_ctx(2)
        X, s = big.fp.gens
        samples = [wc.teichmuller(s, big), wc.teichmuller(X * s, big), wc.verschiebung(wc.teichmuller(s, big.with_length(1)))]
        samples.extend(random_witt(big, rng, max_deg=2) for _ in range(max(1, params.samples // 5)))
        for w in samples:
            result = overconv_witt_decompose(w, pres, eps_grid=params.eps_grid)
            report.record(result.recomposes, f"recomposes w={w!r}")
            report.record(result.divisibility_ok, f"divisibility pattern w={w!r}")
        return [report]

    return [('equivalences', equivalences), ('general_lift', general_lift), ('etale', etale),
            ('overconvergent', overconvergent)]


SUITES: Dict[str, Callable[[SuiteParams], List[Tuple[str, Job]]]] = {
    'witt': _witt_jobs,
    'dga': _dga_jobs,
    'oracle': _oracle_jobs,
    'structure': _structure_jobs,
    'rewrite': _rewrite_jobs,
    'kernel': _kernel_jobs,
    'pseudoval': _pseudoval_jobs,
    'lazard': _lazard_jobs,
    'perfect': _perfect_jobs,
    'main': _main_jobs,
}


def _run_job(name: str, job: Job, seed: int, index: int) -> List[CheckReport]:
    rng = random.Random(seed * 1000003 + index)
    try:
        return job(rng)
    except WdrwError as exc:
        failed = CheckReport(name)
        failed.record(False, f"{type(exc).__name__}: {exc.message}")
        return [failed]


def run_suite(suite: str, params: SuiteParams) -> List[CheckReport]:
    """
    Run one named suite.

    Args:
        suite: one of SUITES
        params: ring, sampling and threading parameters

    Returns:
        CheckReport list in job order
    """
    if suite not in SUITES:
        raise ConfigError(f"unknown check suite {suite!r}", {'known': sorted(SUITES)})
    jobs = SUITES[suite](params)
    results: Dict[int, List[CheckReport]] = {}
    with PerformanceTimer('check_suite', logger, suite=suite, prime=params.prime, level_m=params.length):
        if params.threads > 1 and len(jobs) > 1:
            with ThreadPoolExecutor(max_workers=params.threads) as executor:
                future_to_index = {
                    executor.submit(_run_job, name, job, params.seed, i): i
                    for i, (name, job) in enumerate(jobs)
                }
                for future in as_completed(future_to_index):
                    results[future_to_index[future]] = future.result()
        else:
            for i, (name, job) in enumerate(jobs):
                results[i] = _run_job(name, job, params.seed, i)
    reports = [report for i in sorted(results) for report in results[i]]
    failed = sum(1 for r in reports if not r.passed)
    logger.info(
        f"suite {suite}: {len(reports) - failed}/{len(reports)} checks passed",
        extra={'suite': suite, 'term_count': sum(r.checked for r in reports)},
    )
    return reports
