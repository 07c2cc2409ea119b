"""Small input-validation helpers in the spirit of ``sklearn.utils.validation``.

Each helper returns the validated value as a float so it can be used inline::

    self.length_cm = check_positive(length_cm, "length_cm")
"""

import math

import numpy as np

from .exceptions import ValidationError


def _as_float(value, name):
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise ValidationError(f"{name} must be a real number, got {value!r}") from None
    if math.isnan(out):
        raise ValidationError(f"{name} must not be NaN")
    return out


def check_finite(value, name):
    out = _as_float(value, name)
    if not math.isfinite(out):
        raise ValidationError(f"{name} must be finite, got {out}")
    return out


def check_positive(value, name, allow_inf=False):
    out = _as_float(value, name)
    if not out > 0 or (math.isinf(out) and not allow_inf):
        raise ValidationError(f"{name} must be > 0, got {out}")
    return out


def check_non_negative(value, name, allow_inf=False):
    out = _as_float(value, name)
    if out < 0 or (math.isinf(out) and not allow_inf):
        raise ValidationError(f"{name} must be >= 0, got {out}")
    return out


def check_fraction(value, name):
    """Validate a dimensionless efficiency in the closed interval [0, 1]."""
    out = _as_float(value, name)
    if not 0.0 <= out <= 1.0:
        raise ValidationError(f"{name} must lie in [0, 1], got {out}")
    return out


def check_int(value, name, minimum=None):
    if isinstance(value, bool) or int(value) != value:
        raise ValidationError(f"{name} must be an integer, got {value!r}")
    out = int(value)
    if minimum is not None and out < minimum:
        raise ValidationError(f"{name} must be >= {minimum}, got {out}")
    return out


def check_increasing(values, name):
    """Validate a non-empty, strictly increasing 1-D axis and return it as an array."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValidationError(f"{name} must be a non-empty 1-D sequence")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite values")
    if arr.size > 1 and not np.all(np.diff(arr) > 0):
        raise ValidationError(f"{name} must be strictly increasing")
    return arr
