"""Input validation helpers shared by the estimators and circuit functions."""

import numpy as np

N_PIXELS = 64
INTENSITY_MAX = 16
N_CLASSES = 10


def ensure_2d(X, n_features, name="X"):
    """Coerce to a float64 matrix with the given column count (1D becomes one row)."""
    A = np.asarray(X, dtype=float)
    if A.ndim == 1:
        A = A.reshape(1, -1)
    if A.ndim != 2 or A.shape[1] != n_features:
        raise ValueError(
            f"{name} must have {n_features} columns, got shape {np.shape(X)}"
        )
    return A


def check_pixel_array(X, name="pixel input"):
    """Validate 8x8 digit intensities: shape (n, 64) or (64,), values in 0..16."""
    A = ensure_2d(X, N_PIXELS, name)
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} contains non-finite values")
    if A.min(initial=0.0) < 0 or A.max(initial=0.0) > INTENSITY_MAX:
        raise ValueError(f"{name} intensities must lie in 0..{INTENSITY_MAX}")
    return A


def check_voltage_array(X, n_columns=N_CLASSES, name="voltage input"):
    """Validate rectified voltage vectors: finite and non-negative."""
    A = ensure_2d(X, n_columns, name)
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} contains non-finite values")
    if A.min(initial=0.0) < 0:
        raise ValueError(f"{name} must be non-negative (rectified)")
    return A


def check_label_array(y, n_samples=None, name="labels"):
    """Validate digit labels: integers in 0..9, optionally of a given length."""
    arr = np.asarray(y)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if not np.issubdtype(arr.dtype, np.integer):
        if not np.all(arr == arr.astype(int)):
            raise ValueError(f"{name} must be integers")
        arr = arr.astype(int)
    if arr.size and (arr.min() < 0 or arr.max() >= N_CLASSES):
        raise ValueError(f"{name} must lie in 0..{N_CLASSES - 1}")
    if n_samples is not None and arr.shape[0] != n_samples:
        raise ValueError(
            f"{name} has {arr.shape[0]} entries, expected {n_samples}"
        )
    return arr.astype(np.int64)
