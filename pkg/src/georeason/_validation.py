"""Small input-validation helpers in the spirit of ``sklearn.utils.validation``."""

from __future__ import annotations

import math
from numbers import Integral, Real

import numpy as np

from .errors import ValidationError


def check_unit_interval(value, name: str) -> float:
    """Return ``value`` as float, raising unless it lies in [0, 1]."""
    if isinstance(value, bool) or not isinstance(value, Real):
        raise ValidationError(f"{name} must be a real number, got {type(value).__name__}")
    value = float(value)
    if not (0.0 <= value <= 1.0):
        raise ValidationError(f"{name} must lie in [0, 1], got {value}")
    return value


def check_positive(value, name: str, *, allow_zero: bool = False, allow_inf: bool = False) -> float:
    if isinstance(value, bool) or not isinstance(value, Real):
        raise ValidationError(f"{name} must be a real number, got {type(value).__name__}")
    value = float(value)
    if math.isnan(value) or (math.isinf(value) and not allow_inf):
        raise ValidationError(f"{name} must be finite, got {value}")
    if value < 0 or (value == 0 and not allow_zero):
        bound = ">= 0" if allow_zero else "> 0"
        raise ValidationError(f"{name} must be {bound}, got {value}")
    return value


def check_int(value, name: str, *, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, Integral):
        raise ValidationError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if minimum is not None and value < minimum:
        raise ValidationError(f"{name} must be >= {minimum}, got {value}")
    return value


def check_latlon(lat, lon, name: str = "coordinate") -> tuple[float, float]:
    lat = float(lat)
    lon = float(lon)
    if not (-90.0 <= lat <= 90.0):
        raise ValidationError(f"{name}: latitude {lat} outside [-90, 90]")
    if not (-180.0 < lon <= 180.0):
        raise ValidationError(f"{name}: longitude {lon} outside (-180, 180]")
    return lat, lon


def check_probability_vector(p, name: str = "p", *, atol: float = 1e-9) -> np.ndarray:
    arr = np.asarray(p, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValidationError(f"{name} must be a non-empty 1-d vector")
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise ValidationError(f"{name} must be finite and non-negative")
    if abs(arr.sum() - 1.0) > atol:
        raise ValidationError(f"{name} must sum to 1 (got {arr.sum():.12g})")
    return arr


def check_reward_vector(rewards, name: str = "rewards") -> np.ndarray:
    arr = np.asarray(rewards, dtype=float)
    if arr.ndim != 1:
        raise ValidationError(f"{name} must be 1-d")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} must be finite")
    return arr
