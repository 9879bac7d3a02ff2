"""
Runtime configuration from environment variables (and .env files).
"""
import os
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional, Tuple

from modules.errors import ConfigError

try:
    from dotenv import load_dotenv
    HAS_DOTENV = True
except ImportError:  # pragma: no cover
    HAS_DOTENV = False


def _int_env(name: str, default: int, minimum: int = 1) -> int:
    try:
        return max(minimum, int(os.getenv(name, str(default))))
    except (TypeError, ValueError):
        return default


def _env_flag(name: str, default: bool = False) -> bool:
    value = os.getenv(name)
    if value is None:
        return default
    return value.lower() == 'true'


def parse_fraction(text: str) -> Fraction:
    """Parse an exact rational such as '1/4' or '3'. Decimals are rejected."""
    text = (text or '').strip()
    if not text or '.' in text or 'e' in text.lower():
        raise ConfigError(f"expected an exact rational like 1/4, got {text!r}")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"expected an exact rational like 1/4, got {text!r}")


def parse_fraction_list(text: str) -> Tuple[Fraction, ...]:
    return tuple(parse_fraction(part) for part in text.split(',') if part.strip())


def _fraction_env(name: str, default: str) -> Fraction:
    try:
        return parse_fraction(os.getenv(name, default))
    except ConfigError:
        return parse_fraction(default)


def _fraction_list_env(name: str, default: str) -> Tuple[Fraction, ...]:
    try:
        return parse_fraction_list(os.getenv(name, default))
    except ConfigError:
        return parse_fraction_list(default)


@dataclass(frozen=True)
class Settings:
    prime: int = 2
    n_vars: int = 1
    length: int = 2
    max_weight: int = 6
    threads: int = 1
    samples: int = 20
    seed: int = 0
    eps: Fraction = Fraction(1, 4)
    eta: Fraction = Fraction(1, 4)
    mu: Fraction = Fraction(1, 2)
    eps_grid: Tuple[Fraction, ...] = (Fraction(1, 2), Fraction(1, 4), Fraction(1, 8), Fraction(1, 16))
    debug: bool = False

    def with_overrides(self, **overrides) -> 'Settings':
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


def load_settings(env_file: Optional[str] = None) -> Settings:
    """Build settings from the process environment, loading .env first when available"""
    if HAS_DOTENV:
        load_dotenv(env_file) if env_file else load_dotenv()
    return Settings(
        prime=_int_env('WDRW_PRIME', 2, minimum=2),
        n_vars=_int_env('WDRW_VARS', 1, minimum=0),
        length=_int_env('WDRW_LEN', 2, minimum=1),
        max_weight=_int_env('WDRW_MAX_WEIGHT', 6, minimum=0),
        threads=_int_env('WDRW_THREADS', 1),
        samples=_int_env('WDRW_SAMPLES', 20),
        seed=_int_env('WDRW_SEED', 0, minimum=0),
        eps=_fraction_env('WDRW_EPS', '1/4'),
        eta=_fraction_env('WDRW_ETA', '1/4'),
        mu=_fraction_env('WDRW_MU', '1/2'),
        eps_grid=_fraction_list_env('WDRW_EPS_GRID', '1/2,1/4,1/8,1/16'),
        debug=_env_flag('WDRW_DEBUG'),
    )


_settings = None


def get_settings() -> Settings:
    global _settings
    if _settings is None:
        _settings = load_settings()
    return _settings


def reset_settings() -> None:
    """Forget the cached settings so the next get_settings() re-reads the environment"""
    global _settings
    _settings = None
