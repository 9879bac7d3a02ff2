"""
Tests for the seeded property check suites
"""
from dataclasses import replace

import pytest

from modules.check_suites import SUITES, SuiteParams, run_suite
from modules.errors import ConfigError
from modules.reporting import check_to_json, generate_csv_report


SMALL = SuiteParams(prime=2, n_vars=1, length=2, samples=3, seed=1, max_weight=2)


def test_unknown_suite():
    with pytest.raises(ConfigError):
        run_suite('nope', SMALL)


def test_suite_names():
    assert set(SUITES) == {'witt', 'dga', 'oracle', 'structure', 'rewrite', 'kernel',
                           'pseudoval', 'lazard', 'perfect', 'main'}


@pytest.mark.parametrize("suite", ['witt', 'dga', 'oracle', 'structure', 'rewrite', 'kernel', 'pseudoval'])
def test_small_suites_pass(suite):
    reports = run_suite(suite, SMALL)
    assert reports
    failed = [(r.name, r.failures[:2]) for r in reports if not r.passed]
    assert not failed, failed
    assert any(r.checked for r in reports)


def test_suites_at_odd_prime_two_variables():
    params = SuiteParams(prime=3, n_vars=2, length=2, samples=2, seed=4, max_weight=2)
    for suite in ('witt', 'dga'):
        reports = run_suite(suite, params)
        assert all(r.passed for r in reports), [r.failures[:1] for r in reports if not r.passed]


def test_perfect_suite():
    reports = run_suite('perfect', SMALL)
    assert all(r.passed for r in reports), [(r.name, r.failures[:1]) for r in reports if not r.passed]


def test_threads_do_not_change_results():
    serial = run_suite('witt', SMALL)
    threaded = run_suite('witt', replace(SMALL, threads=3))
    assert [(r.name, r.checked, len(r.failures)) for r in serial] == \
           [(r.name, r.checked, len(r.failures)) for r in threaded]


def test_reports_render():
    reports = run_suite('oracle', SMALL)
    doc = check_to_json('oracle', reports)
    assert doc['suite'] == 'oracle'
    assert doc['passed'] is True
    csv_text = generate_csv_report('oracle', reports)
    assert csv_text.splitlines()[0] == 'Suite,Check,Status,Checked,Failed,First Failure,Run Date'
    assert len(csv_text.strip().splitlines()) == len(reports) + 1


def test_lazard_suite():
    reports = run_suite('lazard', SMALL)
    assert {r.name for r in reports} >= {'lazard_teichmuller', 'lazard_ghost', 'lazard_estimate'}
    assert all(r.passed for r in reports), [(r.name, r.failures[:1]) for r in reports if not r.passed]


def test_main_suite():
    reports = run_suite('main', SMALL)
    names = {r.name for r in reports}
    assert {'main_divisibility', 'main_filtration', 'main_etale', 'main_etale_certificates',
            'main_overconvergent_witt'} <= names
    assert all(r.passed for r in reports), [(r.name, r.failures[:1]) for r in reports if not r.passed]
    etale = next(r for r in reports if r.name == 'main_etale')
    assert etale.checked == 8


def test_dga_suite_acceptance_size():
    params = SuiteParams(prime=3, n_vars=2, length=3, samples=15, seed=2, max_weight=2)
    reports = run_suite('dga', params)
    assert all(r.checked for r in reports if r.name in ('dga_d_squared', 'dga_fv'))
    assert all(r.passed for r in reports), [(r.name, r.failures[:1]) for r in reports if not r.passed]


def test_rewrite_suite_cross_checks_linear_solve():
    params = SuiteParams(prime=2, n_vars=2, length=2, samples=1, seed=0, max_weight=4)
    reports = {r.name: r for r in run_suite('rewrite', params)}
    assert set(reports) == {'rewrite_count', 'rewrite_mod_p', 'rewrite_agreement'}
    assert reports['rewrite_agreement'].checked
    assert all(r.passed for r in reports.values()), [(r.name, r.failures[:1]) for r in reports.values()]
