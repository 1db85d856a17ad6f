"""Input checks shared by the functional API and the estimators."""
from __future__ import annotations

import numbers

import numpy as np

from .core import Dataset, ValidationError


def check_signal(x, name="x") -> np.ndarray:
    """Return ``x`` as a finite 1D float64 array.

    A column vector of shape (n, 1) is accepted and flattened.
    """
    a = np.asarray(x, dtype=np.float64)
    if a.ndim == 2 and a.shape[1] == 1:
        a = a[:, 0]
    if a.ndim != 1:
        raise ValidationError(f"{name} must be one-dimensional, got shape {a.shape}")
    bad = np.flatnonzero(~np.isfinite(a))
    if bad.size:
        raise ValidationError(f"{name}[{bad[0]}] is not finite ({a[bad[0]]!r})")
    return a


def check_positive(value, name) -> float:
    if not isinstance(value, numbers.Real) or not np.isfinite(value) or value <= 0:
        raise ValidationError(f"{name} must be a finite positive number, got {value!r}")
    return float(value)


def as_dataset(X, names=None) -> Dataset:
    """Coerce an array-like, a DataFrame or a Dataset to :class:`Dataset`."""
    if isinstance(X, Dataset):
        return X
    if names is None and hasattr(X, "columns"):
        names = [str(c) for c in X.columns]
    a = np.asarray(X, dtype=np.float64)
    if a.ndim == 1:
        a = a[:, None]
    if names is None:
        names = [f"f{j}" for j in range(a.shape[1])]
    return Dataset(a, tuple(names))
