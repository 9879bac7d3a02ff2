"""
Tests for the wdrw command line
"""
import json
from pathlib import Path

import pytest

import wdrw

DATA_DIR = Path(__file__).parent / 'data'


def run(capsys, *argv):
    code = wdrw.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_eval_doubling(capsys):
    code, out, _ = run(capsys, 'eval', '--prime', '2', '--vars', '1', '--len', '2', '(+ (teich X1) (teich X1))')
    assert code == 0
    assert out.strip() == 'e(2; 1; {}) : 1'


def test_eval_json(capsys):
    code, out, _ = run(capsys, 'eval', '--json', '(+ (teich X1) (teich X1))')
    doc = json.loads(out)
    assert code == 0
    assert doc['degree'] == 0 and doc['level'] == 2
    assert doc['terms'] == [{'eta': 2, 'weights': ['1'], 'parts': [], 'coeff': 1}]


def test_zeta(capsys):
    code, out, _ = run(capsys, 'zeta', '--eps', '1/4', '(V (teich X1))')
    assert code == 0
    assert out.strip() == 'ζ = 7/8'


def test_gamma(capsys):
    code, out, _ = run(capsys, 'gamma', '--eps', '1/4', '(V (teich X1))')
    assert code == 0
    assert out.strip() == 'γ = 7/8'


def test_syntax_error_exits_2(capsys):
    code, out, err = run(capsys, 'eval', '(teich X1')
    assert code == 2
    assert out == ''
    assert err.startswith('error: syntax_error:')


def test_decimal_eps_is_rejected(capsys):
    code, _, err = run(capsys, 'zeta', '--eps', '0.25', '(teich X1)')
    assert code == 2
    assert 'config_error' in err


def test_gamma_needs_degree_zero(capsys):
    code, _, err = run(capsys, 'gamma', '(d (teich X1))')
    assert code == 2
    assert 'degree_mismatch' in err


def test_missing_file_is_config_error(capsys, tmp_path):
    code, _, err = run(capsys, 'witt', '--presentation', str(tmp_path / 'missing.txt'))
    assert code == 2
    assert 'cannot read presentation file' in err


def test_lazard_worked_example(capsys):
    code, out, _ = run(capsys, 'lazard', '--len', '3', '--lift', str(DATA_DIR / 'lift_p2.txt'), 'X1')
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == '# t_F'
    assert 'w2 = X1^3 + X1^2 + X1' in lines


def test_decompose_teichmuller(capsys):
    code, out, _ = run(capsys, 'decompose', '--json', '(teich X1)')
    doc = json.loads(out)
    assert code == 0
    assert doc['kind'] == 'poly'
    assert doc['map'] == [{'family': 'H', 'poly': 'X1', 'weights': ['0'], 'parts': []}]
    assert len(doc['cert']['eps']) == 4
    assert all(bound['holds'] for bound in doc['cert']['bounds'])
    assert doc['cert']['eps_certified'] == '1/2'


def test_witt_presentation_report(capsys):
    code, out, _ = run(capsys, 'witt', '--presentation', str(DATA_DIR / 'artin_schreier_p2.txt'))
    assert code == 0
    assert 'relatively perfect: yes' in out
    assert 'det = 1' in out
    assert 'delta = 1/2' in out


def test_witt_nilpotent_is_not_perfect(capsys):
    code, out, _ = run(capsys, 'witt', '--presentation', str(DATA_DIR / 'nilpotent_p2.txt'))
    assert code == 0
    assert 'relatively perfect: no' in out


def test_witt_needs_a_term_or_presentation(capsys):
    code, _, err = run(capsys, 'witt')
    assert code == 2


def test_check_writes_csv(capsys, tmp_path):
    target = tmp_path / 'witt.csv'
    code, out, _ = run(capsys, 'check', 'witt', '--samples', '2', '--csv', str(target))
    assert code == 0
    assert out.strip().endswith('checks passed')
    assert target.read_text().startswith('Suite,Check,Status')


def test_unknown_suite_is_argparse_error(capsys):
    with pytest.raises(SystemExit) as info:
        wdrw.main(['check', 'nope'])
    assert info.value.code == 2


def test_settings_from_environment(capsys, monkeypatch):
    monkeypatch.setenv('WDRW_LEN', '3')
    code, out, _ = run(capsys, 'eval', '--json', '(teich X1)')
    assert json.loads(out)['level'] == 3
