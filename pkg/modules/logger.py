"""
Logging for the wdrw engines and the API.

The command line logs plain text to stderr, the API logs JSON records to stdout.
Records may carry engine context (prime, level_m, degree, term_count, suite, step)
through ``extra=``; JSON output keeps those keys as top-level fields.
"""
import json
import logging
import os
import sys
import time
from datetime import datetime, timezone
from typing import Optional, TextIO

try:
    from pythonjsonlogger import jsonlogger
except ImportError:  # pragma: no cover
    jsonlogger = None

try:
    import sentry_sdk
    from sentry_sdk.integrations.flask import FlaskIntegration
except ImportError:  # pragma: no cover
    sentry_sdk = None

try:
    from flask import has_request_context, request as flask_request
except ImportError:  # pragma: no cover
    flask_request = None

    def has_request_context() -> bool:
        return False


ROOT_LOGGER = 'wdrw'
CONTEXT_FIELDS = ('prime', 'level_m', 'degree', 'term_count', 'suite', 'step', 'duration_ms', 'status_code')
TEXT_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


class RequestIdFilter(logging.Filter):
    """Stamp request_id on every record; '-' outside an API request"""

    def filter(self, record: logging.LogRecord) -> bool:
        if getattr(record, 'request_id', None):
            return True
        request_id = None
        if has_request_context():
            request_id = getattr(flask_request, 'request_id', None) or flask_request.headers.get('X-Request-ID')
        record.request_id = request_id or '-'
        return True


class PlainJsonFormatter(logging.Formatter):
    """JSON records when python-json-logger is unavailable"""

    def format(self, record: logging.LogRecord) -> str:
        doc = {
            'timestamp': datetime.fromtimestamp(record.created, timezone.utc).isoformat(),
            'level': record.levelname,
            'logger': record.name,
            'message': record.getMessage(),
        }
        doc.update({key: getattr(record, key) for key in CONTEXT_FIELDS if hasattr(record, key)})
        if getattr(record, 'request_id', '-') != '-':
            doc['request_id'] = record.request_id
        if record.exc_info:
            doc['exception'] = self.formatException(record.exc_info)
        return json.dumps(doc, default=str)


def _formatter(fmt: str) -> logging.Formatter:
    if fmt != 'json':
        return logging.Formatter(TEXT_FORMAT, datefmt='%Y-%m-%d %H:%M:%S')
    if jsonlogger is None:
        return PlainJsonFormatter()
    return jsonlogger.JsonFormatter('%(timestamp)s %(name)s %(levelname)s %(message)s', timestamp=True)


def _level() -> int:
    debug = os.getenv('WDRW_DEBUG', '').lower() == 'true'
    name = os.getenv('LOG_LEVEL', 'DEBUG' if debug else 'INFO').upper()
    return getattr(logging, name, logging.INFO)


def _init_sentry(app, logger: logging.Logger) -> None:
    dsn = os.getenv('SENTRY_DSN')
    if not (dsn and sentry_sdk and app):
        return
    environment = os.getenv('ENVIRONMENT', 'production')
    sentry_sdk.init(
        dsn=dsn,
        integrations=[FlaskIntegration()],
        traces_sample_rate=float(os.getenv('SENTRY_TRACES_SAMPLE_RATE', '0.1')),
        environment=environment,
        before_send=lambda event, hint: event if event.get('level') in ('error', 'fatal') else None,
    )
    logger.info(f"Sentry initialized for environment: {environment}")


def setup_logging(app=None, stream: Optional[TextIO] = None, default_format: str = 'json') -> logging.Logger:
    """Configure the wdrw logger hierarchy.

    Args:
        app: Flask app; enables Sentry when SENTRY_DSN is set
        stream: output stream, stdout by default (the CLI passes stderr)
        default_format: 'json' or 'text', used when LOG_FORMAT is unset

    Returns:
        The root 'wdrw' logger
    """
    level = _level()
    handler = logging.StreamHandler(stream or sys.stdout)
    handler.setLevel(level)
    handler.addFilter(RequestIdFilter())
    handler.setFormatter(_formatter(os.getenv('LOG_FORMAT', default_format).lower()))

    logger = logging.getLogger(ROOT_LOGGER)
    logger.setLevel(level)
    logger.handlers = [handler]
    logger.propagate = False
    _init_sentry(app, logger)
    return logger


def init_logger(app=None, stream: Optional[TextIO] = None, default_format: str = 'json') -> logging.Logger:
    """Process entry points call this once (app.py, wdrw.py)"""
    return setup_logging(app, stream=stream, default_format=default_format)


def get_logger(name: str = ROOT_LOGGER) -> logging.Logger:
    """Logger under the wdrw hierarchy ('structure' -> 'wdrw.structure')"""
    if name != ROOT_LOGGER and not name.startswith(ROOT_LOGGER + '.'):
        name = f"{ROOT_LOGGER}.{name}"
    return logging.getLogger(name)


class PerformanceTimer:
    """Time a block and log it with its engine context.

    Completion is logged at DEBUG; a failure is logged at WARNING and the
    exception still propagates.
    """

    def __init__(self, operation_name: str, logger: Optional[logging.Logger] = None, **context):
        self.operation_name = operation_name
        self.logger = logger or get_logger()
        self.context = context
        self.duration_ms: Optional[int] = None
        self._start = 0.0

    def __enter__(self) -> 'PerformanceTimer':
        self._start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb) -> bool:
        self.duration_ms = int((time.perf_counter() - self._start) * 1000)
        extra = {'duration_ms': self.duration_ms, **self.context}
        if exc_type is None:
            self.logger.debug(f"{self.operation_name} completed", extra=extra)
        else:
            self.logger.warning(f"{self.operation_name} failed: {exc_val}", extra=extra)
        return False
