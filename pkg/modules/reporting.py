"""
Reporting Module
Renders engine results as plain text, schema-stable JSON documents and CSV exports
"""
import csv
import io
import json
import math
from datetime import datetime
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

from modules.drwalgebra import DrwElement
from modules.drwbasis import BasicDiffKey, format_key, vp_int
from modules.polyring import format_polynomial
from modules.wittcore import WittVec

FORMAT_HEADER = '# wdrw-format 1'


def fraction_text(value) -> str:
    if value is None:
        return 'none'
    if value == math.inf:
        return 'inf'
    if value == -math.inf:
        return '-inf'
    return str(Fraction(value))


def _json_value(value):
    if isinstance(value, Fraction):
        return str(value)
    raise TypeError(f"cannot serialise {type(value).__name__}")


def key_to_json(key: BasicDiffKey) -> Dict[str, Any]:
    return {
        'weights': [str(w) for w in key.weight.entries],
        'parts': [i + 1 for i in sorted(key.parts)],
    }


# -- elements -------------------------------------------------------------------------

def element_lines(x: DrwElement) -> List[str]:
    """One line per term in stream order: `e(eta; a; I) : v_p(eta)`"""
    p = x.ctx.p
    lines = [f"{format_key(key, eta)} : {vp_int(eta, p)}" for key, eta in x.sorted_terms()]
    return lines or ['0']


def element_to_json(x: DrwElement, cert: Optional[Dict] = None) -> Dict[str, Any]:
    """
    Serialise an element in the stable schema.

    Args:
        x: element of W_m Omega^t
        cert: optional certification block {eps: ..., bounds: ...}

    Returns:
        {degree, level, terms: [{eta, weights, parts, coeff}], cert?}
    """
    p = x.ctx.p
    terms = []
    for key, eta in x.sorted_terms():
        entry = {'eta': eta}
        entry.update(key_to_json(key))
        entry['coeff'] = vp_int(eta, p)
        terms.append(entry)
    doc = {'degree': x.degree, 'level': x.level, 'terms': terms}
    if cert is not None:
        doc['cert'] = cert
    return doc


def witt_lines(w: WittVec) -> List[str]:
    return [f"w{u} = {format_polynomial(c, w.ctx.p)}" for u, c in enumerate(w.coords)]


def witt_to_json(w: WittVec) -> Dict[str, Any]:
    return {
        'prime': w.ctx.p,
        'level': w.ctx.m,
        'variables': list(w.ctx.names),
        'coords': [format_polynomial(c, w.ctx.p) for c in w.coords],
    }


# -- pseudovaluations ------------------------------------------------------------------

def zeta_line(value) -> str:
    return f"ζ = {fraction_text(value)}"


def gamma_line(value, exact: bool = True) -> str:
    suffix = '' if exact else ' (lower bound)'
    return f"γ = {fraction_text(value)}{suffix}"


def overconvergence_to_json(report: Dict) -> Dict[str, Any]:
    return {
        'is_overconvergent_trivially': report['is_overconvergent_trivially'],
        'slopes': {fraction_text(e): fraction_text(v) for e, v in report['slopes'].items()},
        'minimizers': {fraction_text(e): k for e, k in report['minimizers'].items()},
    }


# -- decompositions ------------------------------------------------------------------

def decomposition_lines(result) -> List[str]:
    lines = [f"# decomposition p={result.p} level={result.level} degree={result.degree} kind={result.kind}"]
    for family, key, poly in result.families():
        lines.append(f"{family:<2} {format_key(key)} -> {format_polynomial(poly)}")
    if result.is_zero():
        lines.append('(all coefficients vanish)')
    if result.certificates:
        lines.append('certification:')
        for eps in sorted(result.certificates):
            cert = result.certificates[eps]
            lines.append(
                f"  eps={fraction_text(eps)} zeta(x)={fraction_text(cert.value)} "
                f"min summand={fraction_text(cert.least)} eta={fraction_text(cert.eta)} "
                f"{'holds' if cert.holds else 'fails'}"
            )
    if result.certificates or result.delta is not None:
        lines.append(f"certified eps: {fraction_text(result.eps_certified)} (delta {fraction_text(result.delta)})")
    return lines


def decomposition_to_json(result) -> Dict[str, Any]:
    entries = []
    for family, key, poly in result.families():
        entry = {'family': family, 'poly': format_polynomial(poly)}
        entry.update(key_to_json(key))
        entries.append(entry)
    doc = {
        'degree': result.degree,
        'level': result.level,
        'kind': result.kind,
        'variables': list(result.names),
        'map': entries,
    }
    if result.certificates or result.delta is not None:
        grid = sorted(result.certificates)
        doc['cert'] = {
            'eps': [fraction_text(eps) for eps in grid],
            'bounds': [
                {'zeta': fraction_text(result.certificates[eps].value),
                 'min_summand': fraction_text(result.certificates[eps].least),
                 'eta': fraction_text(result.certificates[eps].eta),
                 'holds': result.certificates[eps].holds}
                for eps in grid
            ],
            'eps_certified': fraction_text(result.eps_certified),
            'delta': fraction_text(result.delta),
        }
    return doc


def overconv_witt_lines(result) -> List[str]:
    lines = [f"# witt decomposition level={result.level}"]
    for a, h in result.sorted_items():
        lines.append(f"a=({','.join(str(x) for x in a)}) -> {format_polynomial(h)}")
    lines.append(f"recomposes: {result.recomposes}")
    lines.append(f"divisibility: {result.divisibility_ok}")
    lines.append(f"certified eps: {fraction_text(result.eps_certified)} (delta {fraction_text(result.delta)})")
    return lines


def overconv_witt_to_json(result) -> Dict[str, Any]:
    return {
        'level': result.level,
        'h': [
            {'a': [fraction_text(x) for x in a], 'poly': format_polynomial(h)}
            for a, h in result.sorted_items()
        ],
        'recomposes': result.recomposes,
        'divisibility_ok': result.divisibility_ok,
        'eps_certified': fraction_text(result.eps_certified),
        'delta': fraction_text(result.delta),
        'gamma_checks': {fraction_text(e): ok for e, ok in sorted(result.gamma_checks.items())},
    }


# -- lazard ----------------------------------------------------------------------------

def estimate_to_json(estimate) -> Dict[str, Any]:
    return {
        'mu': fraction_text(estimate.mu),
        'grid': [fraction_text(e) for e in estimate.grid],
        'delta': fraction_text(estimate.delta),
        'constructive_delta': fraction_text(estimate.constructive_delta),
        'holds': {fraction_text(e): ok for e, ok in estimate.holds.items()},
        'checked': estimate.checked,
        'witnesses': estimate.witnesses[:10],
    }


def estimate_lines(estimate) -> List[str]:
    lines = [f"mu = {fraction_text(estimate.mu)}"]
    for eps in estimate.grid:
        lines.append(f"  eps={fraction_text(eps)}: {'holds' if estimate.holds[eps] else 'fails'}")
    lines.append(f"delta = {fraction_text(estimate.delta)}")
    lines.append(f"constructive delta = {fraction_text(estimate.constructive_delta)}")
    return lines


# -- presentations --------------------------------------------------------------------

def matrix_lines(loc, M) -> List[str]:
    return ['[' + ', '.join(loc.text(a) for a in row) + ']' for row in M]


def relperfect_lines(pres, report, constants=None) -> List[str]:
    lines = [f"relatively perfect: {'yes' if report.ok else 'no'}"]
    lines.append(f"det = {pres.loc.text(report.det)}")
    if report.ok:
        lines.append('U0 =')
        lines.extend('  ' + line for line in matrix_lines(pres.loc, report.U0))
    else:
        lines.append(f"witness: {report.witness}")
    if constants is not None:
        lines.append(
            f"C = {fraction_text(constants.C)}, D = {fraction_text(constants.D)}, "
            f"E = {fraction_text(constants.E)}, E_b = {fraction_text(constants.E_basis)}, "
            f"delta = {fraction_text(constants.delta)}"
        )
        radii = ', '.join(f"{name}={fraction_text(b)}" for name, b in constants.radii.items())
        lines.append(f"radii: {radii}")
    return lines


def relperfect_to_json(pres, report, constants=None) -> Dict[str, Any]:
    doc = {
        'ok': report.ok,
        'det': pres.loc.text(report.det),
        'U0': [[pres.loc.text(a) for a in row] for row in report.U0] if report.ok else None,
        'witness': report.witness or None,
    }
    if constants is not None:
        doc['constants'] = {
            'C': fraction_text(constants.C),
            'D': fraction_text(constants.D),
            'E': fraction_text(constants.E),
            'E_basis': fraction_text(constants.E_basis),
            'delta': fraction_text(constants.delta),
            'radii': {name: fraction_text(b) for name, b in constants.radii.items()},
        }
    return doc


# -- check suites ------------------------------------------------------------------------

def check_lines(reports: Sequence) -> List[str]:
    lines = []
    for report in reports:
        status = 'PASS' if report.passed else 'FAIL'
        lines.append(f"{status} {report.name}: {report.checked - len(report.failures)}/{report.checked}")
        for failure in report.failures[:5]:
            lines.append(f"    {failure}")
    passed = sum(1 for r in reports if r.passed)
    lines.append(f"{passed}/{len(reports)} checks passed")
    return lines


def check_to_json(suite: str, reports: Sequence) -> Dict[str, Any]:
    return {
        'suite': suite,
        'passed': all(r.passed for r in reports),
        'checks': [
            {'name': r.name, 'checked': r.checked, 'failed': len(r.failures), 'failures': r.failures[:10]}
            for r in reports
        ],
    }


def generate_csv_report(suite: str, reports: Sequence) -> str:
    """
    Generate CSV report from check-suite results.

    Args:
        suite: suite name
        reports: CheckReport list

    Returns:
        CSV content as string
    """
    output = io.StringIO()
    headers = ['Suite', 'Check', 'Status', 'Checked', 'Failed', 'First Failure', 'Run Date']
    writer = csv.DictWriter(output, fieldnames=headers)
    writer.writeheader()
    stamp = datetime.now().strftime('%Y-%m-%d %H:%M:%S')
    for report in reports:
        writer.writerow({
            'Suite': suite,
            'Check': report.name,
            'Status': 'Pass' if report.passed else 'Fail',
            'Checked': report.checked,
            'Failed': len(report.failures),
            'First Failure': report.failures[0] if report.failures else '',
            'Run Date': stamp,
        })
    return output.getvalue()


def render(doc, as_json: bool) -> str:
    if as_json:
        return json.dumps(doc, indent=2, sort_keys=False, default=_json_value)
    return '\n'.join(doc)
