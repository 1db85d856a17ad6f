"""End-to-end procedures: slice-based feature selection and interstice mapping."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.feature_selection import SelectorMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import as_dataset, check_positive
from .core import Dataset, SliceSpec, ValidationError
from .linkage import single_linkage_1d
from .relevance import find_interstices, relevance
from .slicer import add_uniform_noise, axis_distance, grid_anchors, standardize, take_slice

# The grid is the literal value list used for the circles/squares run,
# repeated -2 included; see README.
DEFAULT_GRID = (-2.0, -2.0, 0.0, 1.0, 2.0)

_CAMEL = {
    "gridValues": "grid_values",
    "minSlicePoints": "min_slice_points",
    "noiseAmplitude": "noise_amplitude",
    "r": "radius",
}


@dataclass(frozen=True)
class FeatureSelectionConfig:
    grid_values: tuple[float, ...] = DEFAULT_GRID
    radius: float = 2.0
    alpha: float = 4.0
    min_slice_points: float = 150
    noise_amplitude: float = 0.2
    seed: int = 0
    occurrence: str = "root"
    standardize: bool = True

    def __post_init__(self):
        object.__setattr__(self, "grid_values", tuple(float(v) for v in self.grid_values))
        check_positive(self.radius, "radius")
        check_positive(self.alpha, "alpha")
        if not self.min_slice_points >= 0:
            raise ValidationError("min_slice_points must be non-negative")
        if not self.noise_amplitude >= 0:
            raise ValidationError("noise_amplitude must be non-negative")
        if not self.grid_values:
            raise ValidationError("grid_values must be non-empty")
        if self.occurrence not in ("root", "any"):
            raise ValidationError(f"unknown occurrence rule {self.occurrence!r}")

    @classmethod
    def from_mapping(cls, d: Mapping) -> "FeatureSelectionConfig":
        """Build from a config document; camelCase and snake_case keys both work."""
        known = {f.name for f in fields(cls)}
        kw = {}
        for k, v in d.items():
            key = _CAMEL.get(k, k)
            if key in known:
                kw[key] = v
        return cls(**kw)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["grid_values"] = list(self.grid_values)
        return d


@dataclass(frozen=True)
class FeatureReportRow:
    name: str
    occurrences: int
    mean_relevance: float
    product: float
    n_slices: int = 0
    """Slices that passed the population filter."""

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class SliceResult:
    free_index: int
    anchor: tuple[float, ...]
    population: int
    rho: float
    occurred: bool


@dataclass
class FeatureSelectionResult:
    rows: list[FeatureReportRow]
    slices: list[SliceResult] = field(repr=False)

    @property
    def populations(self) -> np.ndarray:
        return np.array([s.population for s in self.slices], dtype=np.int64)


def prepare_dataset(ds: Dataset, cfg: FeatureSelectionConfig) -> Dataset:
    """Standardize (when configured), then add the configured noise."""
    if cfg.standardize:
        ds, _ = standardize(ds)
    return add_uniform_noise(ds, cfg.noise_amplitude, cfg.seed)


def _retained_slices(ds: Dataset, free_index: int, cfg) -> Iterable[tuple[tuple, np.ndarray]]:
    for anchor in grid_anchors(ds.n_features, cfg.grid_values, free_index):
        inside = np.flatnonzero(axis_distance(ds, free_index, anchor) <= cfg.radius)
        if inside.size > cfg.min_slice_points:
            yield anchor, inside


def run_feature_selection(ds: Dataset, cfg: Optional[FeatureSelectionConfig] = None,
                          prepared: bool = False) -> FeatureSelectionResult:
    """Score every feature by the clusterings found along its slices.

    For each feature, a slice is taken at every grid anchor of the other
    features. Slices holding more than ``min_slice_points`` points are
    scored; a feature's occurrences count the slices where a clustering was
    found and its mean relevance averages rho over those slices only.
    """
    cfg = cfg or FeatureSelectionConfig()
    if ds.n_features < 2:
        raise ValidationError("feature selection needs at least two features")
    if not prepared:
        ds = prepare_dataset(ds, cfg)
    rows, slices = [], []
    for i, name in enumerate(ds.names):
        rhos, n_slices = [], 0
        col = ds.values[:, i]
        for anchor, inside in _retained_slices(ds, i, cfg):
            n_slices += 1
            rep = relevance(single_linkage_1d(col[inside], inside), cfg.alpha, cfg.occurrence)
            slices.append(SliceResult(i, anchor, int(inside.size), rep.rho, rep.occurred))
            if rep.occurred:
                rhos.append(rep.rho)
        occ = len(rhos)
        mean_rel = float(np.mean(rhos)) if rhos else 0.0
        rows.append(FeatureReportRow(name, occ, mean_rel, occ * mean_rel, n_slices))
    rows.sort(key=lambda r: -r.product)
    return FeatureSelectionResult(rows, slices)


def select_features(ds: Dataset, cfg: Optional[FeatureSelectionConfig] = None,
                    prepared: bool = False) -> list[FeatureReportRow]:
    """Feature table sorted by ``occurrences * mean_relevance``, best first."""
    return run_feature_selection(ds, cfg, prepared).rows


@dataclass(frozen=True, eq=False)
class SliceHistogram:
    edges: np.ndarray
    counts: np.ndarray
    mean: float
    n_slices: int

    @property
    def defined(self) -> bool:
        return self.n_slices > 0

    def to_dict(self) -> dict:
        return {
            "edges": self.edges.tolist(),
            "counts": self.counts.tolist(),
            "mean": self.mean if self.defined else None,
            "n_slices": self.n_slices,
        }


def slice_population_histogram(ds: Dataset, cfg: Optional[FeatureSelectionConfig] = None,
                               bins=20, prepared: bool = False) -> SliceHistogram:
    """Histogram of point counts over all retained slices of all features.

    ``mean`` is NaN and ``defined`` is False when no slice is retained.
    """
    cfg = cfg or FeatureSelectionConfig()
    if not prepared:
        ds = prepare_dataset(ds, cfg)
    pops = [inside.size for i in range(ds.n_features)
            for _, inside in _retained_slices(ds, i, cfg)]
    if not pops:
        return SliceHistogram(np.empty(0), np.empty(0, dtype=np.int64), math.nan, 0)
    counts, edges = np.histogram(pops, bins=bins)
    return SliceHistogram(edges, counts, float(np.mean(pops)), len(pops))


@dataclass(frozen=True)
class InterstitialPatch:
    anchor: tuple[float, ...]
    free_index: int
    xa: float
    xb: float
    radius: float
    rho: float = 0.0

    def __post_init__(self):
        if not self.xa < self.xb:
            raise ValidationError(f"empty patch [{self.xa}, {self.xb}]")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["anchor"] = list(self.anchor)
        return d


def detect_interstices(ds: Dataset, free_index: int, anchors: Sequence[Sequence[float]],
                       radius: float, alpha: float = 4.0, min_slice_points: float = 100,
                       occurrence: str = "root") -> list[InterstitialPatch]:
    """Mark the interstices found along slices through each anchor.

    Patches come out ordered by anchor, then by ``xa``. Only slices with more
    than ``min_slice_points`` points are examined.
    """
    check_positive(radius, "radius")
    patches = []
    for anchor in anchors:
        spec = SliceSpec(free_index, tuple(anchor), radius)
        s = take_slice(ds, spec)
        if len(s) <= min_slice_points:
            continue
        rep = relevance(single_linkage_1d(s.coords, s.rows), alpha, occurrence)
        if not rep.occurred:
            continue
        for it in find_interstices(s, rep):
            patches.append(InterstitialPatch(spec.anchor, free_index, it.xa, it.xb, radius, rep.rho))
    return patches


def merge_intervals(intervals: Iterable[tuple[float, float]]) -> list[tuple[float, float]]:
    """Union of closed intervals as a sorted list of disjoint intervals."""
    out: list[list[float]] = []
    for a, b in sorted(intervals):
        if out and a <= out[-1][1]:
            out[-1][1] = max(out[-1][1], b)
        else:
            out.append([a, b])
    return [(a, b) for a, b in out]


def interval_iou(intervals: Iterable[tuple[float, float]], truth: tuple[float, float]) -> float:
    """Intersection over union of an interval set against one interval."""
    merged = merge_intervals(intervals)
    lo, hi = truth
    inter = sum(max(0.0, min(b, hi) - max(a, lo)) for a, b in merged)
    union = sum(b - a for a, b in merged) + (hi - lo) - inter
    return inter / union if union > 0 else 0.0


class SliceRelevanceSelector(SelectorMixin, BaseEstimator):
    """Unsupervised filter that keeps the features whose slices cluster best.

    Parameters
    ----------
    n_features_to_select : int, default=2
        Number of top-scoring features kept by ``transform``.
    grid_values, radius, alpha, min_slice_points, noise_amplitude, seed,
    occurrence, standardize
        See :class:`FeatureSelectionConfig`.

    Attributes
    ----------
    report_ : list of FeatureReportRow
        Per-feature statistics, best first.
    scores_ : ndarray of shape (n_features,)
        ``occurrences * mean_relevance`` in input column order.
    occurrences_, mean_relevance_ : ndarray of shape (n_features,)
    slice_populations_ : ndarray
        Point counts of all retained slices.
    """

    def __init__(self, n_features_to_select=2, grid_values=DEFAULT_GRID, radius=2.0,
                 alpha=4.0, min_slice_points=150, noise_amplitude=0.2, seed=0,
                 occurrence="root", standardize=True):
        self.n_features_to_select = n_features_to_select
        self.grid_values = grid_values
        self.radius = radius
        self.alpha = alpha
        self.min_slice_points = min_slice_points
        self.noise_amplitude = noise_amplitude
        self.seed = seed
        self.occurrence = occurrence
        self.standardize = standardize

    def _config(self) -> FeatureSelectionConfig:
        return FeatureSelectionConfig(
            grid_values=self.grid_values, radius=self.radius, alpha=self.alpha,
            min_slice_points=self.min_slice_points, noise_amplitude=self.noise_amplitude,
            seed=self.seed, occurrence=self.occurrence, standardize=self.standardize,
        )

    def fit(self, X, y=None):
        ds = as_dataset(X)
        result = run_feature_selection(ds, self._config())
        by_name = {r.name: r for r in result.rows}
        ordered = [by_name[n] for n in ds.names]
        self.report_ = result.rows
        self.scores_ = np.array([r.product for r in ordered])
        self.occurrences_ = np.array([r.occurrences for r in ordered])
        self.mean_relevance_ = np.array([r.mean_relevance for r in ordered])
        self.slice_populations_ = result.populations
        self.n_features_in_ = ds.n_features
        if hasattr(X, "columns"):
            self.feature_names_in_ = np.asarray(ds.names, dtype=object)
        return self

    def _get_support_mask(self):
        check_is_fitted(self)
        k = min(int(self.n_features_to_select), self.n_features_in_)
        mask = np.zeros(self.n_features_in_, dtype=bool)
        mask[np.argsort(-self.scores_, kind="stable")[:k]] = True
        return mask


class IntersticeDetector(BaseEstimator):
    """Locate separation patches between clusters along one feature axis.

    Slices parallel to ``free_index`` are taken through every anchor; where a
    slice shows a clustering, the gap between its clusters is kept as a
    patch.

    Parameters
    ----------
    free_index : int, default=0
    anchors : sequence of tuples, optional
        Explicit anchors (values of the other features). When omitted the
        anchors are the grid of ``anchor_values`` over the pinned axes.
    anchor_values : sequence of float, default=0, 0.01, ..., 1
    radius : float, default=0.1
    alpha : float, default=4
    min_slice_points : float, default=100
    occurrence : {"root", "any"}, default="root"
    standardize : bool, default=False

    Attributes
    ----------
    patches_ : list of InterstitialPatch
    intervals_ : list of (float, float)
        Union of the patch intervals along the free axis.
    """

    def __init__(self, free_index=0, anchors=None, anchor_values=None, radius=0.1,
                 alpha=4.0, min_slice_points=100, occurrence="root", standardize=False):
        self.free_index = free_index
        self.anchors = anchors
        self.anchor_values = anchor_values
        self.radius = radius
        self.alpha = alpha
        self.min_slice_points = min_slice_points
        self.occurrence = occurrence
        self.standardize = standardize

    def _anchors(self, n_features):
        if self.anchors is not None:
            return [tuple(a) for a in self.anchors]
        values = self.anchor_values
        if values is None:
            values = np.round(np.linspace(0.0, 1.0, 101), 2)
        return grid_anchors(n_features, values, self.free_index)

    def fit(self, X, y=None):
        ds = as_dataset(X)
        if not 0 <= self.free_index < ds.n_features:
            raise ValueError(f"free_index {self.free_index} out of range")
        self.stats_ = None
        if self.standardize:
            ds, self.stats_ = standardize(ds)
        self.patches_ = detect_interstices(
            ds, self.free_index, self._anchors(ds.n_features), self.radius,
            self.alpha, self.min_slice_points, self.occurrence,
        )
        self.intervals_ = merge_intervals((p.xa, p.xb) for p in self.patches_)
        self.n_features_in_ = ds.n_features
        return self

    def predict(self, X):
        """1 for points lying inside a marked patch, else 0."""
        check_is_fitted(self)
        ds = as_dataset(X)
        values = ds.values
        if self.stats_ is not None:
            values = self.stats_.apply(values)
        ds = ds.with_values(values)
        out = np.zeros(ds.n_rows, dtype=np.int64)
        x = values[:, self.free_index]
        for p in self.patches_:
            near = axis_distance(ds, self.free_index, p.anchor) <= p.radius
            out[near & (x >= p.xa) & (x <= p.xb)] = 1
        return out
