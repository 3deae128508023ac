"""JSON report helpers shared by the command line and library users."""

from __future__ import annotations

import json
import math
from enum import Enum

import numpy as np

from pgarch import __version__

__all__ = ["jsonable", "certificate_record", "dumps"]


def jsonable(obj):
    """Convert to plain JSON types; non-finite floats become strings."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


def certificate_record(cert, spec) -> dict:
    """Certificate fields plus the model fingerprint and tool version."""
    record = cert.to_dict()
    record["spec_fingerprint"] = spec.fingerprint()
    record["tool_version"] = __version__
    return jsonable(record)


def dumps(doc) -> str:
    return json.dumps(jsonable(doc), indent=2, allow_nan=False)
