# SOD calculus API
# Flask application that replays, checks and explains decompositions over HTTP

from flask import Flask, request, jsonify
from flask_cors import CORS
import logging
from datetime import datetime, timezone
from src.api_handler import handle_check, handle_explain, handle_replay
from src.config import Config
from src.errors import (
    DslSemanticError, DslSyntaxError, InvalidParams, InvalidPreset, SodCalcError, TraceFormatError,
)
from src.utils import setup_logging

setup_logging()
logger = logging.getLogger(__name__)

app = Flask(__name__)
CORS(app)

SERVICE = "SOD Calculus API"
CLIENT_ERRORS = (InvalidParams, InvalidPreset, DslSyntaxError, DslSemanticError, TraceFormatError)


def _json_body():
    """Return the JSON body, or an error response when the request has none"""
    if not request.is_json:
        return None, (jsonify({"error": "Content-Type must be application/json"}), 400)
    data = request.get_json(silent=True)
    if data is None:
        return None, (jsonify({"error": "Request body is not valid JSON"}), 400)
    return data, None


def _run(handler, data):
    """Call a handler and map domain errors onto HTTP status codes"""
    try:
        return jsonify(handler(data)), 200
    except CLIENT_ERRORS as e:
        logger.warning(f"Rejected request: {str(e)}")
        return jsonify(e.to_dict()), 400
    except SodCalcError as e:
        logger.error(f"Request failed: {str(e)}")
        return jsonify(e.to_dict()), 500
    except Exception as e:
        logger.error(f"Error processing request: {str(e)}")
        return jsonify({"error": "Internal server error"}), 500


@app.route('/api/replay', methods=['POST'])
def replay():
    """
    Replay the main theorem.
    Accepts {"n", "d", "m"} or {"preset"} and returns the final decomposition and trace.
    """
    data, error = _json_body()
    if error:
        return error
    return _run(handle_replay, data)


@app.route('/api/check', methods=['POST'])
def check():
    """
    Check a trace given as {"trace": [header, step, ...]}.
    Rejected traces answer 422 with the first failing step.
    """
    data, error = _json_body()
    if error:
        return error
    response, status = _run(handle_check, data)
    if status == 200 and not response.get_json()["ok"]:
        status = 422
    return response, status


@app.route('/api/explain', methods=['POST'])
def explain():
    """Explain a vanishing query {"n", "d"?, "m"?, "p", "q"}"""
    data, error = _json_body()
    if error:
        return error
    return _run(handle_explain, data)


@app.route('/health', methods=['GET'])
def health_check():
    """Health check endpoint"""
    return jsonify({
        "status": "healthy",
        "service": SERVICE,
        "timestamp": datetime.now(timezone.utc).isoformat()
    })


@app.route('/', methods=['GET'])
def root():
    """Root endpoint with API info"""
    return jsonify({
        "service": SERVICE,
        "version": "1.0.0",
        "endpoints": {
            "/api/replay": "POST - Replay the main theorem for {n, d, m} or {preset}",
            "/api/check": "POST - Check a trace {trace: [...]}",
            "/api/explain": "POST - Explain Hom(p, q) = 0 for {n, d, m, p, q}",
            "/health": "GET - Health check"
        }
    })


if __name__ == '__main__':
    logger.info(f"Starting {SERVICE} on port {Config.PORT}")
    app.run(host='0.0.0.0', port=Config.PORT, debug=Config.FLASK_DEBUG)
