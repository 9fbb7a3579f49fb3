"""Input validation helpers shared by the functional API and the estimators."""

import math
import numbers

import numpy as np
from sklearn.utils.validation import check_array


class BandwidthError(ValueError):
    """Raised when the Gaussian kernel underflows for a query point."""

    def __init__(self, message, query_index=None):
        super().__init__(message)
        self.query_index = query_index


def check_bandwidth(t):
    if isinstance(t, bool) or not isinstance(t, numbers.Real):
        raise TypeError(f"bandwidth must be a real number, got {type(t).__name__}")
    t = float(t)
    if not (t > 0 and math.isfinite(t)):
        raise ValueError(f"bandwidth must be positive and finite, got {t}")
    return t


def check_alpha(alpha):
    alpha = float(alpha)
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    return alpha


def check_points(X, n_features=None, name="X"):
    """Return ``X`` as a finite float64 2-D array.

    A 1-D input is read as a single point.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    X = check_array(X, dtype=np.float64, ensure_all_finite=True, input_name=name)
    if n_features is not None and X.shape[1] != n_features:
        raise ValueError(
            f"{name} has {X.shape[1]} coordinates, expected {n_features}"
        )
    return X


def check_weights(weights, n):
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (n,):
        raise ValueError(f"weights must have shape ({n},), got {w.shape}")
    if not np.all(np.isfinite(w)) or np.any(w <= 0):
        raise ValueError("weights must be positive and finite")
    return w


def check_positive_int(value, name, minimum=1):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise TypeError(f"{name} must be an integer, got {type(value).__name__}")
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return int(value)
