"""
Tests for configuration and structured logging
"""
import io
import json
from fractions import Fraction

import pytest

from modules.errors import ConfigError
from modules.logger import PerformanceTimer, get_logger, setup_logging
from modules.settings import get_settings, load_settings, parse_fraction, parse_fraction_list


def test_defaults():
    s = load_settings()
    assert (s.prime, s.n_vars, s.length) == (2, 1, 2)
    assert s.eps == Fraction(1, 4)
    assert s.eps_grid == (Fraction(1, 2), Fraction(1, 4), Fraction(1, 8), Fraction(1, 16))
    assert not s.debug


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv('WDRW_PRIME', '3')
    monkeypatch.setenv('WDRW_EPS_GRID', '1/3,1/9')
    monkeypatch.setenv('WDRW_DEBUG', 'true')
    s = load_settings()
    assert s.prime == 3
    assert s.eps_grid == (Fraction(1, 3), Fraction(1, 9))
    assert s.debug


def test_bad_environment_values_fall_back(monkeypatch):
    monkeypatch.setenv('WDRW_LEN', 'three')
    monkeypatch.setenv('WDRW_EPS', '0.25')
    s = load_settings()
    assert s.length == 2
    assert s.eps == Fraction(1, 4)


def test_settings_are_cached(monkeypatch):
    first = get_settings()
    monkeypatch.setenv('WDRW_PRIME', '5')
    assert get_settings() is first


def test_with_overrides_ignores_none():
    s = load_settings().with_overrides(prime=3, n_vars=None)
    assert s.prime == 3 and s.n_vars == 1


@pytest.mark.parametrize('text', ['0.25', '1e-2', '', 'a/b', '1/0'])
def test_parse_fraction_rejects(text):
    with pytest.raises(ConfigError):
        parse_fraction(text)


def test_parse_fraction_list():
    assert parse_fraction_list('1, 1/2,') == (Fraction(1), Fraction(1, 2))


def test_json_log_records_carry_extra_fields(monkeypatch):
    monkeypatch.delenv('LOG_FORMAT', raising=False)
    stream = io.StringIO()
    setup_logging(stream=stream, default_format='json')
    get_logger('structure').info('split done', extra={'prime': 2, 'level_m': 3})
    record = json.loads(stream.getvalue().strip().splitlines()[-1])
    assert record['message'] == 'split done'
    assert record['prime'] == 2 and record['level_m'] == 3


def test_performance_timer_logs_duration(monkeypatch):
    monkeypatch.setenv('LOG_LEVEL', 'DEBUG')
    stream = io.StringIO()
    setup_logging(stream=stream, default_format='json')
    with PerformanceTimer('suite_witt', get_logger('check_suites'), suite='witt') as timer:
        pass
    record = json.loads(stream.getvalue().strip().splitlines()[-1])
    assert record['message'] == 'suite_witt completed'
    assert record['suite'] == 'witt'
    assert record['duration_ms'] == timer.duration_ms


def test_text_format_for_the_command_line(monkeypatch):
    monkeypatch.delenv('LOG_FORMAT', raising=False)
    stream = io.StringIO()
    setup_logging(stream=stream, default_format='text')
    get_logger('cli').warning('careful')
    assert ' - wdrw.cli - WARNING - careful' in stream.getvalue()
