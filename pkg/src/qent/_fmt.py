"""Output formatting: every float leaves the package with 12 significant digits."""

import json

import numpy as np


def fmt(x):
    return f"{float(x) + 0.0:.12g}"


def round12(x):
    return float(fmt(x))


def jsonable(obj):
    """Recursively convert numpy/tuple content to JSON types, rounding floats."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return round12(obj)
    return obj


def dumps(obj):
    return json.dumps(jsonable(obj), indent=2)
