"""Seeded generators for the synthetic experiments.

Every generator is a pure function of its parameters and ``seed``; the
seed may be an int, a :class:`numpy.random.SeedSequence` or a Generator.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Literal, Optional

import numpy as np

from .core import Dataset, ValidationError

SHAPE_FEATURES = ("gamma", "perimeter", "area", "rel_perimeter", "circularity")
CIRCLE, SQUARE = 0, 1


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def gen_poisson_uniform(lam: float, lo: float = 0.0, hi: float = 1.0, seed=None,
                        fixed_count: Optional[int] = None) -> np.ndarray:
    """Homogeneous Poisson process of intensity ``lam`` on ``[lo, hi)``.

    Points are built from i.i.d. Exponential(lam) gaps starting at ``lo``, so
    their number is Poisson with mean ``lam * (hi - lo)``. With
    ``fixed_count`` the process is conditioned on that many points instead
    (sorted i.i.d. uniforms).
    """
    if not (math.isfinite(lam) and lam > 0):
        raise ValidationError(f"intensity must be positive, got {lam!r}")
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise ValidationError(f"invalid interval [{lo}, {hi})")
    rng = _rng(seed)
    if fixed_count is not None:
        if fixed_count < 0:
            raise ValidationError("fixed_count must be non-negative")
        return np.sort(rng.uniform(lo, hi, fixed_count))

    span = hi - lo
    mean = lam * span
    chunk = int(mean + 6 * math.sqrt(mean) + 16)
    parts, t = [], lo
    while True:
        pts = t + np.cumsum(rng.exponential(1.0 / lam, chunk))
        inside = pts < hi
        parts.append(pts[inside])
        if not inside.all():
            break
        t = pts[-1]
    return np.concatenate(parts)


def gen_normal(count: int, mu: float = 0.0, sigma: float = 0.1, seed=None) -> np.ndarray:
    if count < 0:
        raise ValidationError(f"count must be non-negative, got {count}")
    if not sigma > 0:
        raise ValidationError(f"sigma must be positive, got {sigma!r}")
    return _rng(seed).normal(mu, sigma, count)


@dataclass(frozen=True)
class TwoClusterModel:
    """Dense ``[0, x1)``, sparse ``[x1, x2)``, dense ``[x2, 1)``."""

    x1: float = 0.4
    x2: float = 0.6
    lambda1: float = 140.0
    lambda2: float = 20.0
    lambda3: float = 120.0

    def __post_init__(self):
        if not 0 <= self.x1 <= self.x2 <= 1:
            raise ValidationError(f"need 0 <= x1 <= x2 <= 1, got x1={self.x1}, x2={self.x2}")
        if min(self.lambda1, self.lambda2, self.lambda3) < 0:
            raise ValidationError("intensities must be non-negative")
        if not self.lambda2 < min(self.lambda1, self.lambda3):
            raise ValidationError("the interstice must be sparser than both clusters")

    @property
    def intervals(self):
        return ((0.0, self.x1, self.lambda1),
                (self.x1, self.x2, self.lambda2),
                (self.x2, 1.0, self.lambda3))

    def expected_counts(self) -> tuple[float, float, float]:
        return tuple(lam * (b - a) for a, b, lam in self.intervals)

    def to_dict(self) -> dict:
        return asdict(self)


def gen_two_cluster_model(model: TwoClusterModel, seed=None,
                          fixed_count: bool = False) -> np.ndarray:
    """Union of three independent uniform processes, sorted.

    ``fixed_count=True`` places exactly ``round(lambda * length)`` points in
    each interval instead of a Poisson number.
    """
    children = _rng(seed).spawn(3)
    parts = []
    for (a, b, lam), child in zip(model.intervals, children):
        if b <= a or lam == 0:
            continue
        n = int(round(lam * (b - a))) if fixed_count else None
        parts.append(gen_poisson_uniform(lam, a, b, child, fixed_count=n))
    if not parts:
        return np.empty(0)
    return np.sort(np.concatenate(parts))


@dataclass(frozen=True)
class ShapeRecord:
    kind: Literal["circle", "square"]
    gamma: float

    @property
    def features(self) -> tuple[float, float, float, float, float]:
        g = self.gamma
        if self.kind == "circle":
            return (g, 2 * math.pi * g, math.pi * g * g, 2 * math.pi, 1.0)
        if self.kind == "square":
            return (g, 4 * g, g * g, 4.0, math.pi / 4)
        raise ValidationError(f"unknown shape kind {self.kind!r}")


def gen_shapes(count: int = 5000, seed=None, n_circles: Optional[int] = None) -> Dataset:
    """Circles of radius gamma and squares of side gamma, gamma ~ U[1, 2].

    Columns are gamma, perimeter, area, perimeter / gamma and circularity
    ``4 pi area / perimeter**2``; the last two are written as their exact
    per-kind constants. Labels: 0 circle, 1 square. Rows are shuffled.
    """
    if n_circles is None:
        if count < 2 or count % 2:
            raise ValidationError(f"count must be an even number >= 2, got {count}")
        n_circles = count // 2
    if not 0 <= n_circles <= count:
        raise ValidationError("n_circles must lie in [0, count]")
    rng = _rng(seed)
    gamma = rng.uniform(1.0, 2.0, count)
    circle = np.arange(count) < n_circles
    values = np.empty((count, 5))
    values[:, 0] = gamma
    values[:, 1] = np.where(circle, 2 * math.pi * gamma, 4 * gamma)
    values[:, 2] = np.where(circle, math.pi * gamma ** 2, gamma ** 2)
    values[:, 3] = np.where(circle, 2 * math.pi, 4.0)
    values[:, 4] = np.where(circle, 1.0, math.pi / 4)
    labels = np.where(circle, CIRCLE, SQUARE)
    perm = rng.permutation(count)
    return Dataset(values[perm], SHAPE_FEATURES, labels[perm])


def gen_elongated_2d(count: int = 1000, gap: float = 0.2, seed=None) -> tuple[Dataset, dict]:
    """Two vertical uniform bands in the unit square split by an empty band.

    The empty band has width ``gap`` and is centred on ``f1 = 0.5``. Returns
    the dataset and ground truth ``{"gap": [lo, hi], ...}``.
    """
    if count < 2:
        raise ValidationError(f"count must be >= 2, got {count}")
    if not 0 < gap < 1:
        raise ValidationError(f"gap must lie in (0, 1), got {gap!r}")
    rng = _rng(seed)
    lo, hi = 0.5 - gap / 2, 0.5 + gap / 2
    n_left = count // 2
    n_right = count - n_left
    x = np.concatenate([rng.uniform(0.0, lo, n_left), rng.uniform(hi, 1.0, n_right)])
    y = rng.uniform(0.0, 1.0, count)
    labels = np.r_[np.zeros(n_left, dtype=np.int64), np.ones(n_right, dtype=np.int64)]
    truth = {"gap": [lo, hi], "bands": [[0.0, lo], [hi, 1.0]], "count": count}
    return Dataset(np.column_stack([x, y]), ("f1", "f2"), labels), truth


def gen_blob_2d(count: int = 1000, center=(0.5, 0.5), sigma: float = 0.1, seed=None) -> Dataset:
    """Single isotropic Gaussian cluster; a control with nothing to separate."""
    if count < 0:
        raise ValidationError("count must be non-negative")
    if not sigma > 0:
        raise ValidationError(f"sigma must be positive, got {sigma!r}")
    pts = _rng(seed).normal(np.asarray(center, dtype=float), sigma, (count, 2))
    return Dataset(pts, ("f1", "f2"), np.zeros(count, dtype=np.int64))


def signal_dataset(x, name: str = "x") -> Dataset:
    """Wrap a 1D signal as a one-column dataset."""
    return Dataset(np.asarray(x, dtype=float).reshape(-1, 1), (name,))
