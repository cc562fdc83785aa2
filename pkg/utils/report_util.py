"""
Report utilities for the SXI++ pipeline
Provides helper functions for writing text and JSON reports
"""
import json
import logging
import math
import os
from typing import Any, Dict

import numpy as np

# Configure logging
logger = logging.getLogger(__name__)


def to_jsonable(value: Any) -> Any:
    """
    Convert numpy scalars/arrays and tuples into plain JSON types

    Non-finite floats become None so that the document stays valid JSON.

    Args:
        value: Any nested structure of dicts, lists and numbers

    Returns:
        Structure made of dict, list, str, int, float, bool and None only
    """
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def dumps(payload: Dict[str, Any]) -> str:
    """Serialize a report deterministically (sorted keys, repr floats)"""
    return json.dumps(to_jsonable(payload), sort_keys=True, indent=2, ensure_ascii=False)


def write_json_report(payload: Dict[str, Any], path: str) -> str:
    """
    Write a JSON report

    Args:
        payload: Report content
        path: Output file path

    Returns:
        The path written
    """
    ensure_parent(path)
    with open(path, "w", encoding="utf-8") as f:
        f.write(dumps(payload))
        f.write("\n")
    logger.info(f"Saved JSON report to {path}")
    return path


def write_text_report(text: str, path: str) -> str:
    """Write a plain-text report and return its path"""
    ensure_parent(path)
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)
        if not text.endswith("\n"):
            f.write("\n")
    logger.info(f"Saved text report to {path}")
    return path


def ensure_parent(path: str) -> None:
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)
