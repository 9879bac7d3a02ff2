"""
wdrw Flask Application
JSON API over the Witt vector, de Rham-Witt and overconvergence engines
"""
import os
import time
from typing import Any, Dict, Optional
from uuid import uuid4

from flask import Flask, request, jsonify, has_request_context
from flask_cors import CORS
from werkzeug.exceptions import HTTPException

# Swagger UI at /apidocs when flasgger is installed
try:
    from flasgger import Swagger
except ImportError:  # pragma: no cover - optional dependency
    Swagger = None  # type: ignore

try:
    import sentry_sdk
except ImportError:  # pragma: no cover - optional dependency
    sentry_sdk = None

from modules.commands import COMMANDS, CommandOptions
from modules.errors import USER_ERRORS, WdrwError
from modules.logger import init_logger, PerformanceTimer
from modules.settings import get_settings

app = Flask(__name__)
app.config['MAX_CONTENT_LENGTH'] = 1024 * 1024

logger = init_logger(app)
logger.info("wdrw API starting", extra={
    'prime': get_settings().prime,
    'level_m': get_settings().length,
})

APP_VERSION = os.getenv("APP_VERSION", "1.0.0")
APP_START_TIME = time.time()
REQUEST_ID_HEADER = 'X-Request-ID'


def _ensure_request_id() -> Optional[str]:
    """Create or reuse a request ID for the active request context."""
    if not has_request_context():
        return None

    request_id = getattr(request, 'request_id', None)
    if request_id:
        return request_id

    inbound_request_id = request.headers.get(REQUEST_ID_HEADER, '').strip()
    request.request_id = inbound_request_id or f'req_{uuid4().hex}'
    return request.request_id


# CORS: allowed origins from CORS_ORIGINS (comma-separated); "*" outside production.
_cors_origins_env = os.getenv("CORS_ORIGINS", "").strip()
if _cors_origins_env:
    _cors_origins = [o.strip() for o in _cors_origins_env.split(",") if o.strip()]
elif os.getenv("ENVIRONMENT", "production").lower() != "production":
    _cors_origins = ["*"]
else:
    _cors_origins = []

CORS(app,
     origins=_cors_origins,
     allow_headers=["Content-Type", REQUEST_ID_HEADER],
     expose_headers=["Content-Type", REQUEST_ID_HEADER],
     methods=["GET", "POST", "OPTIONS"]
)


# ============================================================================
# GLOBAL ERROR HANDLERS
# ============================================================================

def build_error_response(error_code: str, message: str, status_code: int, details: dict = None):
    """Build standardized error response"""
    response = {
        "error": {
            "code": error_code,
            "message": message,
            "status": status_code
        },
        "success": False
    }
    if details:
        response["error"]["details"] = details
    request_id = _ensure_request_id()
    if request_id:
        response["request_id"] = request_id
    return response


# status -> (error code, log level) for HTTP errors raised by Flask itself
HTTP_ERRORS = {
    400: ('BAD_REQUEST', 'warning'),
    404: ('NOT_FOUND', 'info'),
    405: ('METHOD_NOT_ALLOWED', 'warning'),
    413: ('REQUEST_TOO_LARGE', 'warning'),
}


def _http_error_message(status: int, error: HTTPException) -> str:
    if status == 404:
        return f"Resource not found: {request.path}"
    if status == 405:
        return f"Method {request.method} not allowed for {request.path}"
    if status == 413:
        return f"Request body exceeds {app.config['MAX_CONTENT_LENGTH'] // 1024} KB"
    return error.description or "Bad request"


def http_error(error: HTTPException):
    status = error.code
    code, level = HTTP_ERRORS[status]
    if request.path != '/favicon.ico':
        getattr(logger, level)(f"HTTP {status}", extra={'status_code': status, 'path': request.path})
    return jsonify(build_error_response(code, _http_error_message(status, error), status)), status


for _status in HTTP_ERRORS:
    app.register_error_handler(_status, http_error)


@app.errorhandler(WdrwError)
def engine_error(error):
    """Engine errors: input problems are 400, failed computations 422"""
    status = 400 if isinstance(error, USER_ERRORS) else 422
    logger.info("Engine error", extra={
        'status_code': status,
        'path': request.path,
        'step': error.code
    })
    body = error.to_dict()
    return jsonify(build_error_response(body['code'], body['message'], status, body['details'] or None)), status


@app.errorhandler(500)
def internal_server_error(error):
    logger.error("Internal server error", extra={'status_code': 500, 'path': request.path}, exc_info=True)
    return jsonify(build_error_response("INTERNAL_ERROR", "The engine failed unexpectedly", 500)), 500


@app.errorhandler(Exception)
def handle_unexpected_error(error):
    """Anything not handled above; HTTP errors keep their own status"""
    if isinstance(error, HTTPException):
        code = error.name.upper().replace(' ', '_')
        return jsonify(build_error_response(code, error.description, error.code)), error.code

    error_id = f"ERR-{int(time.time())}"
    logger.error("Unexpected error", extra={'path': request.path, 'status_code': 500}, exc_info=True)
    if sentry_sdk is not None:
        sentry_sdk.capture_exception(error)
    return jsonify(build_error_response(
        "UNEXPECTED_ERROR", "An unexpected error occurred", 500, {"error_id": error_id}
    )), 500


# ============================================================================
# REQUEST LIFECYCLE HOOKS
# ============================================================================

@app.before_request
def log_request_start():
    """Stamp request id and start time"""
    _ensure_request_id()
    request.start_time = time.time()


@app.after_request
def log_request_end(response):
    """Log completed requests with timing"""
    request_id = _ensure_request_id()
    if request_id:
        response.headers[REQUEST_ID_HEADER] = request_id

    if request.path in {'/health', '/ready'}:
        return response

    duration_ms = None
    if hasattr(request, 'start_time'):
        duration_ms = int((time.time() - request.start_time) * 1000)

    logger.info("Request completed", extra={
        'status_code': response.status_code,
        'duration_ms': duration_ms,
    })
    return response


# Swagger docs
if Swagger is not None:
    swagger_template = {
        "info": {
            "title": "wdrw API",
            "description": (
                "Exact computations with truncated Witt vectors and de Rham-Witt forms over "
                "F_p[X1..Xn]: normal forms, structure decompositions, overconvergence "
                "pseudovaluations, Lazard images and property check suites.\n\n"
                "Rationals are passed as strings such as \"1/4\"; lift and presentation "
                "files are passed as text."
            ),
            "version": APP_VERSION,
        },
        "basePath": "/",
        "schemes": ["https", "http"],
    }
    swagger = Swagger(app, template=swagger_template)
else:
    swagger = None


# ============================================================================
# HEALTH
# ============================================================================

def _build_health_payload() -> Dict[str, Any]:
    checks = {}
    try:
        settings = get_settings()
        checks['settings'] = {'status': 'ok', 'prime': settings.prime, 'len': settings.length}
    except WdrwError as exc:
        checks['settings'] = {'status': 'error', 'message': exc.message}
    checks['swagger'] = {'status': 'ok' if swagger is not None else 'warning'}
    failures = [name for name, check in checks.items() if check['status'] == 'error']
    warnings = [name for name, check in checks.items() if check['status'] == 'warning']
    return {
        'status': 'unhealthy' if failures else ('degraded' if warnings else 'healthy'),
        'ready': not failures,
        'service': 'wdrw',
        'version': APP_VERSION,
        'uptime_seconds': max(0, int(time.time() - APP_START_TIME)),
        'timestamp': time.strftime('%Y-%m-%dT%H:%M:%SZ', time.gmtime()),
        'checks': checks,
        'failures': failures,
        'warnings': warnings,
    }


@app.route('/health', methods=['GET'])
def health():
    """Health endpoint with runtime details."""
    return jsonify(_build_health_payload()), 200


@app.route('/ready', methods=['GET'])
def ready():
    """Readiness probe that returns 503 when configuration cannot be loaded."""
    payload = _build_health_payload()
    return jsonify(payload), 200 if payload.get('ready') else 503


# ============================================================================
# ENGINE ROUTES
# ============================================================================

def _run_command(name: str, field: str, required: bool = True):
    body = request.get_json(silent=True)
    if not isinstance(body, dict):
        return jsonify(build_error_response("BAD_REQUEST", "request body must be a JSON object", 400)), 400
    argument = body.get(field)
    if required and not (isinstance(argument, str) and argument.strip()):
        return jsonify(build_error_response(
            "BAD_REQUEST", f"'{field}' is required", 400, {'field': field}
        )), 400
    opts = CommandOptions.from_mapping(body, get_settings())
    with PerformanceTimer(f"api_{name}", logger, prime=opts.settings.prime, level_m=opts.settings.length):
        result = COMMANDS[name](argument, opts)
    payload = {'success': True}
    payload.update(result.doc)
    if name == 'check':
        payload['success'] = result.ok
    return jsonify(payload), 200


@app.route('/api/eval', methods=['POST'])
def api_eval():
    """Normal form of a term
    ---
    tags:
      - Forms
    parameters:
      - in: body
        name: body
        required: true
        schema:
          type: object
          required: [term]
          properties:
            term:
              type: string
              example: "(+ (teich X1) (teich X1))"
            prime:
              type: integer
              example: 2
            vars:
              type: integer
              example: 1
            len:
              type: integer
              example: 2
            lift:
              type: string
              description: lift file text, available in terms as (lift F P)
            presentation:
              type: string
              description: etale presentation text; the term is then read over X1..Xn, s2..sr
    responses:
      200:
        description: "{degree, level, terms: [{eta, weights, parts, coeff}]}"
      400:
        description: Syntax or configuration error
    """
    return _run_command('eval', 'term')


@app.route('/api/decompose', methods=['POST'])
def api_decompose():
    """Structure decomposition of a form
    ---
    tags:
      - Decompositions
    parameters:
      - in: body
        name: body
        required: true
        schema:
          type: object
          required: [term]
          properties:
            term:
              type: string
              example: "(d (teich X1^3))"
            max_weight:
              type: integer
              example: 6
            eps:
              type: string
              description: certify at this epsilon only (default grid WDRW_EPS_GRID)
            lift:
              type: string
            presentation:
              type: string
    responses:
      200:
        description: "{degree, level, kind, variables, map: [{family, weights, parts, poly}], cert?}"
      422:
        description: No decomposition within the weight bound
    """
    return _run_command('decompose', 'term')


@app.route('/api/zeta', methods=['POST'])
def api_zeta():
    """zeta_eps of a form
    ---
    tags:
      - Pseudovaluations
    parameters:
      - in: body
        name: body
        required: true
        schema:
          type: object
          required: [term]
          properties:
            term:
              type: string
              example: "(V (teich X1))"
            eps:
              type: string
              example: "1/4"
    responses:
      200:
        description: element document plus zeta, minimizer and slopes over the grid
    """
    return _run_command('zeta', 'term')


@app.route('/api/gamma', methods=['POST'])
def api_gamma():
    """gamma_{eps,b} of a Witt vector
    ---
    tags:
      - Pseudovaluations
    parameters:
      - in: body
        name: body
        required: true
        schema:
          type: object
          required: [term]
          properties:
            term:
              type: string
              example: "(V (teich X1))"
            eps:
              type: string
            radii:
              type: array
              items:
                type: string
            presentation:
              type: string
    responses:
      200:
        description: Witt coordinates with gamma and whether the value is exact
    """
    return _run_command('gamma', 'term')


@app.route('/api/lazard', methods=['POST'])
def api_lazard():
    """Lazard image t_F and defect v_F of a polynomial
    ---
    tags:
      - Lazard
    parameters:
      - in: body
        name: body
        required: true
        schema:
          type: object
          required: [poly]
          properties:
            poly:
              type: string
              example: "X1"
            lift:
              type: string
              example: "lift p=2 X1 -> X1^2 + 2*X1"
            estimate:
              type: boolean
              default: false
    responses:
      200:
        description: "{lift, t_F, v_F, estimate?}"
    """
    return _run_command('lazard', 'poly')


@app.route('/api/witt', methods=['POST'])
def api_witt():
    """Witt coordinates, or the relative perfectness report of a presentation
    ---
    tags:
      - Etale
    parameters:
      - in: body
        name: body
        required: true
        schema:
          type: object
          properties:
            term:
              type: string
              example: "(teich s2)"
            presentation:
              type: string
    responses:
      200:
        description: Witt coordinates or {ok, det, U0, constants, basis_parts?, overconvergent?}
    """
    return _run_command('witt', 'term', required=False)


@app.route('/api/check', methods=['POST'])
def api_check():
    """Run a property check suite
    ---
    tags:
      - Checks
    parameters:
      - in: body
        name: body
        required: true
        schema:
          type: object
          required: [suite]
          properties:
            suite:
              type: string
              enum: [witt, dga, oracle, structure, rewrite, kernel, pseudoval, lazard, perfect, main]
            samples:
              type: integer
              example: 10
            seed:
              type: integer
    responses:
      200:
        description: "{suite, passed, checks: [{name, checked, failed, failures}]}; success mirrors passed"
    """
    return _run_command('check', 'suite')


if __name__ == '__main__':
    port = int(os.getenv('PORT', '5000'))
    debug = get_settings().debug or os.getenv('FLASK_ENV', 'production') == 'development'
    app.run(host='0.0.0.0', port=port, debug=debug)
