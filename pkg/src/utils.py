# Utility functions for the SOD calculus tools

import os
import re
import json
import logging
from datetime import datetime, timezone
from typing import List, Dict, Any, Optional

import colorlog

from .config import Config

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(log_color)s%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def setup_logging(level: Optional[str] = None) -> logging.Logger:
    """
    Install a colored stream handler on the root logger

    Args:
        level: Log level name; defaults to SODCALC_LOG_LEVEL

    Returns:
        The root logger
    """
    handler = colorlog.StreamHandler()
    handler.setFormatter(colorlog.ColoredFormatter(
        LOG_FORMAT,
        log_colors={
            'DEBUG': 'cyan',
            'INFO': 'green',
            'WARNING': 'yellow',
            'ERROR': 'red',
            'CRITICAL': 'red,bg_white',
        },
    ))
    root = logging.getLogger()
    root.handlers = [handler]
    root.setLevel((level or Config.LOG_LEVEL).upper())
    return root


def save_run_log(kind: str, payload: Dict[str, Any]) -> str:
    """
    Save a record of a CLI or API run for audit purposes

    Args:
        kind: Run kind (replay, check, sweep, ...)
        payload: JSON-serialisable summary of the run

    Returns:
        Path to the saved log file, or "" when it could not be written
    """
    try:
        logs_dir = Config.LOG_DIR
        os.makedirs(logs_dir, exist_ok=True)

        timestamp = datetime.now(timezone.utc).strftime("%Y%m%d_%H%M%S_%f")
        params = payload.get('params') or {}
        tag = "_".join(f"{k}{params[k]}" for k in ('n', 'd', 'm') if k in params) or 'run'
        filename = sanitize_filename(f"{timestamp}_{kind}_{tag}.json")
        log_path = os.path.join(logs_dir, filename)

        log_data = dict(payload)
        log_data['_metadata'] = {
            'logged_at': datetime.now(timezone.utc).isoformat(),
            'kind': kind,
            'log_file': filename,
        }

        with open(log_path, 'w', encoding='utf-8') as f:
            json.dump(log_data, f, indent=2, ensure_ascii=False)

        logger.debug(f"Run logged to {log_path}")
        return log_path

    except Exception as e:
        logger.error(f"Failed to save run log: {str(e)}")
        return ""


def validate_params_payload(data: Dict[str, Any]) -> List[str]:
    """
    Validate the parameter part of a request body

    Either a preset name or all of n, d and m must be present.

    Args:
        data: Request data to validate

    Returns:
        List of validation errors (empty if valid)
    """
    errors = []

    if not isinstance(data, dict):
        return ["Request body must be a JSON object"]

    if 'preset' in data:
        if not isinstance(data['preset'], str):
            errors.append("Field preset must be of type str")
        return errors

    for field in ('n', 'd', 'm'):
        if field not in data:
            errors.append(f"Missing required field: {field}")
        elif isinstance(data[field], bool) or not isinstance(data[field], int):
            errors.append(f"Field {field} must be of type int")

    return errors


def validate_explain_payload(data: Dict[str, Any]) -> List[str]:
    """Validate an explain request: n plus the two block literals p and q."""
    if not isinstance(data, dict):
        return ["Request body must be a JSON object"]
    errors = []
    if 'n' not in data:
        errors.append("Missing required field: n")
    for field in ('n', 'd', 'm'):
        if field in data and (isinstance(data[field], bool) or not isinstance(data[field], int)):
            errors.append(f"Field {field} must be of type int")
    for field in ('p', 'q'):
        if field not in data:
            errors.append(f"Missing required field: {field}")
        elif not isinstance(data[field], str):
            errors.append(f"Field {field} must be of type str")
    return errors


def sanitize_filename(filename: str) -> str:
    """
    Sanitize a filename to be safe for filesystem use

    Args:
        filename: Original filename

    Returns:
        Sanitized filename
    """
    safe_filename = re.sub(r'[<>:"/\\|?*()]', '_', filename)
    safe_filename = safe_filename.replace(' ', '_')
    safe_filename = re.sub(r'_{2,}', '_', safe_filename)
    safe_filename = safe_filename.strip('_')

    if not safe_filename:
        safe_filename = 'unnamed_file'

    return safe_filename
