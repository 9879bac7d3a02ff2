import pytest

from modules.settings import reset_settings

WDRW_VARIABLES = (
    'WDRW_PRIME', 'WDRW_VARS', 'WDRW_LEN', 'WDRW_EPS', 'WDRW_ETA', 'WDRW_MU', 'WDRW_EPS_GRID',
    'WDRW_MAX_WEIGHT', 'WDRW_SAMPLES', 'WDRW_SEED', 'WDRW_THREADS', 'WDRW_DEBUG',
)


@pytest.fixture(autouse=True)
def _fresh_settings(monkeypatch):
    """Each test reads WDRW_* from its own environment"""
    for name in WDRW_VARIABLES + ('LOG_LEVEL',):
        monkeypatch.delenv(name, raising=False)
    reset_settings()
    yield
    reset_settings()
