"""Feature-space slicing along one axis through narrow hypercylinders."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import as_dataset
from .core import Dataset, Slice1D, SliceSpec, ValidationError


@dataclass(frozen=True, eq=False)
class ColumnStats:
    mean: np.ndarray
    sd: np.ndarray

    def apply(self, values: np.ndarray) -> np.ndarray:
        return (values - self.mean) / self.sd

    def invert(self, values: np.ndarray) -> np.ndarray:
        return values * self.sd + self.mean


def column_stats(ds: Dataset) -> ColumnStats:
    if ds.n_rows < 2:
        raise ValidationError(f"standardization needs at least 2 rows, got {ds.n_rows}")
    v = ds.values
    sd = v.std(axis=0, ddof=1)
    # rounding in the mean can leave a constant column with sd > 0;
    # a spread whose square underflows also counts as constant
    constant = np.flatnonzero((np.ptp(v, axis=0) == 0) | ~(sd > np.finfo(np.float64).tiny))
    if constant.size:
        names = ", ".join(repr(ds.names[j]) for j in constant)
        raise ValidationError(f"constant column(s) cannot be standardized: {names}")
    return ColumnStats(v.mean(axis=0), sd)


def standardize(ds: Dataset) -> tuple[Dataset, ColumnStats]:
    """Zero-mean, unit sample-standard-deviation columns."""
    stats = column_stats(ds)
    return ds.with_values(stats.apply(ds.values)), stats


def add_uniform_noise(ds: Dataset, amplitude: float, seed: int) -> Dataset:
    """Add i.i.d. Uniform[-amplitude, amplitude] noise to every value.

    Row ``i`` draws from its own stream keyed by ``(seed, i)``, so a value's
    perturbation depends only on the seed, its row index and its column.
    """
    if not amplitude >= 0:
        raise ValidationError(f"amplitude must be non-negative, got {amplitude!r}")
    if amplitude == 0 or ds.n_rows == 0:
        return ds
    m = ds.n_features
    noise = np.empty_like(ds.values)
    for i in range(ds.n_rows):
        noise[i] = np.random.default_rng([int(seed), i]).uniform(-amplitude, amplitude, m)
    return ds.with_values(ds.values + noise)


def grid_anchors(n_features: int, values: Sequence[float], free_index: int) -> list[tuple[float, ...]]:
    """Cartesian product of ``values`` over the ``n_features - 1`` pinned axes.

    Repeated entries in ``values`` are kept, so the product is taken over
    the list as given.
    """
    if n_features < 1:
        raise ValidationError(f"need at least one feature, got {n_features}")
    if not 0 <= free_index < n_features:
        raise ValidationError(f"free_index {free_index} out of range for {n_features} features")
    values = [float(v) for v in values]
    if not values:
        raise ValidationError("grid values must be non-empty")
    return list(itertools.product(values, repeat=n_features - 1))


def _check_spec(ds: Dataset, spec: SliceSpec) -> None:
    if spec.n_features != ds.n_features:
        raise ValidationError(
            f"anchor has {len(spec.anchor)} values; dataset needs {ds.n_features - 1}"
        )
    if spec.free_index >= ds.n_features:
        raise ValidationError(f"free_index {spec.free_index} out of range")


def axis_distance(ds: Dataset, free_index: int, anchor: Sequence[float]) -> np.ndarray:
    """Euclidean distance of every row to the line through ``anchor``
    parallel to axis ``free_index``."""
    pinned = np.delete(ds.values, free_index, axis=1)
    return np.sqrt(((pinned - np.asarray(anchor, dtype=np.float64)) ** 2).sum(axis=1))


def take_slice(ds: Dataset, spec: SliceSpec) -> Slice1D:
    """Rows within ``spec.radius`` of the anchor line, boundary included.

    The slice is sorted by coordinate with row index breaking ties.
    ``spec.min_points`` is not applied here.
    """
    _check_spec(ds, spec)
    rows = np.flatnonzero(axis_distance(ds, spec.free_index, spec.anchor) <= spec.radius)
    coords = ds.values[rows, spec.free_index]
    order = np.lexsort((rows, coords))
    return Slice1D(coords[order], rows[order])


class Standardizer(TransformerMixin, BaseEstimator):
    """Scale columns to mean 0 and sample standard deviation 1.

    Unlike :class:`sklearn.preprocessing.StandardScaler` the scale uses the
    ``N - 1`` denominator, and constant columns are rejected.
    """

    def fit(self, X, y=None):
        ds = as_dataset(X)
        stats = column_stats(ds)
        self.mean_ = stats.mean
        self.scale_ = stats.sd
        self.n_features_in_ = ds.n_features
        return self

    def transform(self, X):
        check_is_fitted(self)
        X = as_dataset(X).values
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} features, got {X.shape[1]}")
        return (X - self.mean_) / self.scale_

    def inverse_transform(self, X):
        check_is_fitted(self)
        return np.asarray(X, dtype=np.float64) * self.scale_ + self.mean_
