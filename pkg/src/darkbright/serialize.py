"""Canonical JSON output: sorted keys, floats printed with ``%.12g``."""

from __future__ import annotations

import json
import math
from fractions import Fraction

import numpy as np


def _canon(obj):
    if isinstance(obj, dict):
        return {str(k): _canon(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canon(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x) or math.isinf(x):
            return str(x)
        return float(f"{x:.12g}")
    if isinstance(obj, (complex, np.complexfloating)):
        return [_canon(obj.real), _canon(obj.imag)]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, np.ndarray):
        return _canon(obj.tolist())
    if hasattr(obj, "to_dict"):
        return _canon(obj.to_dict())
    return obj


def dumps(obj) -> str:
    return json.dumps(_canon(obj), sort_keys=True, indent=2) + "\n"


def as_fraction(x: float, max_denominator: int = 10_000) -> str:
    """Best small-denominator rational approximation, for human-readable output."""
    return str(Fraction(float(x)).limit_denominator(max_denominator))
