"""
Commands shared by the command line and the JSON API.

Each command returns a CommandResult holding plain-text lines, the JSON
document and whether the run counts as a success (only check suites fail).
"""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

from modules import pseudoval
from modules import reporting
from modules.check_suites import SuiteParams, run_suite
from modules.drwalgebra import DrwElement, drw_to_witt
from modules.errors import ConfigError, DegreeMismatch
from modules.etale import (
    EtalePresentation, check_relatively_perfect, compute_constants, overconv_witt_decompose,
    parse_presentation, witt_basis_decompose,
)
from modules.lazard import FrobLift, canonical_lift, estimate_v_F, parse_lift, t_F, v_F
from modules.logger import get_logger
from modules.polyring import parse_polynomial
from modules.settings import Settings, parse_fraction, parse_fraction_list
from modules.structure import EtaleCalculus, etale_structure_decompose, poly_structure_decompose
from modules.term_parser import evaluate_text
from modules.wittcore import RingContext

logger = get_logger('commands')

LIFT_NAME = 'F'


@dataclass(frozen=True)
class CommandOptions:
    settings: Settings
    eps: Optional[Fraction] = None
    radii: Optional[Tuple[Fraction, ...]] = None
    lift_text: Optional[str] = None
    presentation_text: Optional[str] = None
    estimate: bool = False

    @classmethod
    def from_mapping(cls, body: Dict[str, Any], settings: Settings) -> 'CommandOptions':
        """Options from an API request body; keys mirror the command-line flags"""
        def integer(name):
            value = body.get(name)
            if value is None:
                return None
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"'{name}' must be an integer", {'field': name})
            return value

        def rational(name):
            value = body.get(name)
            return None if value is None else parse_fraction(str(value))

        radii = body.get('radii')
        if isinstance(radii, list):
            radii = ','.join(str(r) for r in radii)
        overrides = settings.with_overrides(
            prime=integer('prime'), n_vars=integer('vars'), length=integer('len'),
            max_weight=integer('max_weight'), samples=integer('samples'), seed=integer('seed'),
            threads=integer('threads'), mu=rational('mu'), eta=rational('eta'),
        )
        return cls(
            settings=overrides,
            eps=rational('eps'),
            radii=parse_fraction_list(radii) if radii else None,
            lift_text=body.get('lift'),
            presentation_text=body.get('presentation'),
            estimate=bool(body.get('estimate', False)),
        )

    @property
    def eps_value(self) -> Fraction:
        return self.eps if self.eps is not None else self.settings.eps

    @property
    def eps_grid(self) -> Tuple[Fraction, ...]:
        return (self.eps,) if self.eps is not None else self.settings.eps_grid


@dataclass
class CommandResult:
    lines: List[str]
    doc: Dict[str, Any]
    ok: bool = True
    extra: Dict[str, Any] = field(default_factory=dict)

    def render(self, as_json: bool) -> str:
        return reporting.render(self.doc if as_json else self.lines, as_json)


def ring_context(opts: CommandOptions) -> RingContext:
    s = opts.settings
    return RingContext(s.prime, s.n_vars, s.length)


def load_presentation(opts: CommandOptions) -> Optional[EtalePresentation]:
    if not opts.presentation_text:
        return None
    pres = parse_presentation(opts.presentation_text)
    if pres.p != opts.settings.prime:
        logger.info(f"presentation fixes p={pres.p}", extra={'prime': pres.p})
    return pres


def load_lift(opts: CommandOptions, ctx: RingContext) -> Optional[FrobLift]:
    if not opts.lift_text:
        return None
    return parse_lift(opts.lift_text, ctx)


def _evaluate(term: str, opts: CommandOptions, pres: Optional[EtalePresentation] = None) -> DrwElement:
    if pres is not None:
        return evaluate_text(term, pres.big_ctx(opts.settings.length), {'G': pres.big_lift(opts.settings.length)})
    ctx = ring_context(opts)
    lift = load_lift(opts, ctx)
    return evaluate_text(term, ctx, {LIFT_NAME: lift} if lift else None)


def _radii(opts: CommandOptions, count: int) -> Optional[Tuple[Fraction, ...]]:
    if opts.radii is None:
        return None
    if len(opts.radii) != count:
        raise ConfigError(f"--radii needs {count} entries, got {len(opts.radii)}")
    return opts.radii


# -- commands ------------------------------------------------------------------------------

def eval_command(term: str, opts: CommandOptions) -> CommandResult:
    pres = load_presentation(opts)
    x = _evaluate(term, opts, pres)
    if pres is None:
        return CommandResult(reporting.element_lines(x), reporting.element_to_json(x))
    form = EtaleCalculus(pres).push(x)
    lines, components = [], []
    for k, comp in enumerate(form.components):
        if comp:
            lines.append(f"[s{k + 1}] *")
            lines.extend('  ' + line for line in reporting.element_lines(comp))
        components.append(reporting.element_to_json(comp))
    return CommandResult(lines or ['0'], {'degree': form.degree, 'level': form.level, 'components': components})


def decompose_command(term: str, opts: CommandOptions) -> CommandResult:
    s = opts.settings
    pres = load_presentation(opts)
    x = _evaluate(term, opts, pres)
    if pres is not None:
        calc = EtaleCalculus(pres)
        form = calc.push(x)
        result = etale_structure_decompose(form, pres.big_lift(s.length), s.max_weight, opts.eps_grid, s.eta)
    else:
        F = load_lift(opts, x.ctx) or canonical_lift(x.ctx)
        result = poly_structure_decompose(x, F, s.max_weight, opts.eps_grid, s.eta)
    return CommandResult(reporting.decomposition_lines(result), reporting.decomposition_to_json(result))


def zeta_command(term: str, opts: CommandOptions) -> CommandResult:
    x = _evaluate(term, opts)
    eps = opts.eps_value
    value = pseudoval.zeta(x, eps)
    key = pseudoval.zeta_minimizer(x, eps)
    doc = reporting.element_to_json(x)
    doc.update({
        'eps': reporting.fraction_text(eps),
        'zeta': reporting.fraction_text(value),
        'minimizer': key.text() if key else None,
        'overconvergence': reporting.overconvergence_to_json(
            pseudoval.overconvergence_report(x, opts.settings.eps_grid)
        ),
    })
    return CommandResult([reporting.zeta_line(value)], doc)


def gamma_command(term: str, opts: CommandOptions) -> CommandResult:
    pres = load_presentation(opts)
    x = _evaluate(term, opts, pres)
    if x.degree != 0:
        raise DegreeMismatch(f"gamma is defined on Witt vectors; the term has degree {x.degree}")
    w = drw_to_witt(x)
    eps = opts.eps_value
    if pres is not None:
        w = pres.normalize_witt(w)
        radii = _radii(opts, len(pres.big_names)) or compute_constants(pres).radii_vector(pres.big_names)
    else:
        radii = _radii(opts, x.ctx.n)
    bound = pseudoval.gamma(w, eps, radii, presentation=pres)
    doc = reporting.witt_to_json(w)
    doc.update({
        'eps': reporting.fraction_text(eps),
        'gamma': reporting.fraction_text(bound.value),
        'exact': bound.exact,
        'radii': [reporting.fraction_text(b) for b in radii] if radii else None,
    })
    return CommandResult([reporting.gamma_line(bound.value, bound.exact)], doc)


def lazard_command(poly_text: str, opts: CommandOptions) -> CommandResult:
    s = opts.settings
    ctx = ring_context(opts)
    F = load_lift(opts, ctx) or canonical_lift(ctx)
    P = parse_polynomial(poly_text, ctx.zz)
    image = t_F(F, P, s.length)
    defect = v_F(F, P, s.length)
    lines = ['# t_F'] + reporting.witt_lines(image) + ['# v_F'] + reporting.witt_lines(defect)
    doc = {'lift': F.text(), 't_F': reporting.witt_to_json(image), 'v_F': reporting.witt_to_json(defect)}
    if opts.estimate:
        estimate = estimate_v_F(F, s.eps_grid, _radii(opts, ctx.n), s.mu)
        lines += ['# estimate'] + reporting.estimate_lines(estimate)
        doc['estimate'] = reporting.estimate_to_json(estimate)
    return CommandResult(lines, doc)


def witt_command(term: Optional[str], opts: CommandOptions) -> CommandResult:
    s = opts.settings
    pres = load_presentation(opts)
    if pres is None:
        if not term:
            raise ConfigError("witt needs a term or --presentation")
        x = _evaluate(term, opts)
        if x.degree != 0:
            raise DegreeMismatch(f"witt prints Witt vectors; the term has degree {x.degree}")
        w = drw_to_witt(x)
        return CommandResult(reporting.witt_lines(w), reporting.witt_to_json(w))
    report = check_relatively_perfect(pres)
    constants = compute_constants(pres) if report.ok else None
    lines = reporting.relperfect_lines(pres, report, constants)
    doc = reporting.relperfect_to_json(pres, report, constants)
    if term and report.ok:
        x = _evaluate(term, opts, pres)
        if x.degree != 0:
            raise DegreeMismatch(f"witt prints Witt vectors; the term has degree {x.degree}")
        w = drw_to_witt(x)
        parts = witt_basis_decompose(w, pres)
        for k, part in enumerate(parts):
            lines.append(f"r{k + 1} (coefficient of [s{k + 1}]):")
            lines.extend('  ' + line for line in reporting.witt_lines(part))
        overconv = overconv_witt_decompose(w, pres, s.eta, s.eps_grid)
        lines.extend(reporting.overconv_witt_lines(overconv))
        doc['basis_parts'] = [reporting.witt_to_json(part) for part in parts]
        doc['overconvergent'] = reporting.overconv_witt_to_json(overconv)
    return CommandResult(lines, doc)


def check_command(suite: str, opts: CommandOptions) -> CommandResult:
    s = opts.settings
    params = SuiteParams(
        prime=s.prime, n_vars=s.n_vars, length=s.length, samples=s.samples, seed=s.seed,
        eps_grid=s.eps_grid, radii=_radii(opts, s.n_vars), max_weight=s.max_weight, threads=s.threads,
        eta=s.eta,
    )
    reports = run_suite(suite, params)
    result = CommandResult(reporting.check_lines(reports), reporting.check_to_json(suite, reports),
                           ok=all(r.passed for r in reports))
    result.extra['csv'] = reporting.generate_csv_report(suite, reports)
    return result


COMMANDS = {
    'eval': eval_command,
    'decompose': decompose_command,
    'zeta': zeta_command,
    'gamma': gamma_command,
    'lazard': lazard_command,
    'witt': witt_command,
    'check': check_command,
}
