"""Small input-validation helpers used at module boundaries."""

from __future__ import annotations

import numpy as np

from .errors import ParameterError, ValidationError


def check_matrix(x, name: str, n_cols: int | None = None) -> np.ndarray:
    """Coerce ``x`` to a finite 2-D float64 array, optionally fixing width."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise ValidationError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if n_cols is not None and arr.shape[1] != n_cols:
        raise ValidationError(
            f"{name} has {arr.shape[1]} columns, expected {n_cols}"
        )
    if arr.size and not np.isfinite(arr).all():
        raise ValidationError(f"{name} contains non-finite values")
    return arr


def check_vector(x, name: str, length: int | None = None) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64).ravel()
    if length is not None and arr.shape[0] != length:
        raise ValidationError(f"{name} has length {arr.shape[0]}, expected {length}")
    if arr.size and not np.isfinite(arr).all():
        raise ValidationError(f"{name} contains non-finite values")
    return arr


def check_positive(value, name: str):
    if not value > 0:
        raise ParameterError(f"{name} must be positive, got {value!r}")
    return value


def check_in_range(value, name: str, lo, hi, *, inclusive_hi: bool = True):
    ok = lo <= value <= hi if inclusive_hi else lo <= value < hi
    if not ok:
        bracket = "]" if inclusive_hi else ")"
        raise ParameterError(f"{name} must lie in [{lo}, {hi}{bracket}, got {value!r}")
    return value
