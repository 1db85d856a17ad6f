"""Shared data model: datasets, merge trees, pruned trees, reports, slices.

All containers are frozen dataclasses holding read-only numpy arrays, so
they can be handed to worker threads without copying.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np


class ValidationError(ValueError):
    """Raised when an input violates a data-model invariant."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Dataset:
    """N x M table of finite reals with column names and optional labels.

    Row identity is the 0-based row index; every report refers to rows by it.
    """

    values: np.ndarray
    names: tuple[str, ...]
    labels: Optional[np.ndarray] = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise ValidationError("values must be a 2D table")
        names = tuple(str(n) for n in self.names)
        if values.shape[1] < 1:
            raise ValidationError("a dataset needs at least one column")
        if len(names) != values.shape[1]:
            raise ValidationError(
                f"{len(names)} column names for {values.shape[1]} columns"
            )
        _check_names(names)
        _check_finite(values)
        object.__setattr__(self, "values", _frozen(values))
        object.__setattr__(self, "names", names)
        if self.labels is not None:
            labels = np.asarray(self.labels)
            if labels.shape != (values.shape[0],):
                raise ValidationError(
                    f"expected {values.shape[0]} labels, got {labels.size}"
                )
            if labels.size and not np.issubdtype(labels.dtype, np.integer):
                as_int = labels.astype(np.int64)
                if not np.array_equal(as_int, labels):
                    raise ValidationError("labels must be integers")
                labels = as_int
            object.__setattr__(self, "labels", _frozen(labels.astype(np.int64)))

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_features(self) -> int:
        return self.values.shape[1]

    def column(self, key) -> np.ndarray:
        """Column by index or by name."""
        if isinstance(key, str):
            try:
                key = self.names.index(key)
            except ValueError:
                raise KeyError(f"no column named {key!r}") from None
        return self.values[:, key]

    def with_values(self, values: np.ndarray) -> "Dataset":
        return Dataset(values, self.names, self.labels)

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        if self.names != other.names or self.values.shape != other.values.shape:
            return False
        if (self.labels is None) != (other.labels is None):
            return False
        if self.labels is not None and not np.array_equal(self.labels, other.labels):
            return False
        # bit equality, so -0.0 and 0.0 differ
        return self.values.tobytes() == other.values.tobytes()

    __hash__ = None


def _check_names(names: Sequence[str]) -> None:
    seen = set()
    for j, n in enumerate(names):
        if not n:
            raise ValidationError(f"column {j} has an empty name")
        if n in seen:
            raise ValidationError(f"duplicate column name {n!r}")
        seen.add(n)


def _check_finite(values: np.ndarray) -> None:
    bad = ~np.isfinite(values)
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise ValidationError(
            f"non-finite value {values[i, j]!r} at row {i}, column {j}"
        )


def validate_dataset(
    raw: Iterable[Sequence[float]],
    names: Optional[Sequence[str]] = None,
    labels: Optional[Sequence[int]] = None,
    n_columns: Optional[int] = None,
) -> Dataset:
    """Build a :class:`Dataset` from a rectangular table of reals.

    ``n_columns`` fixes the width when ``raw`` has no rows; otherwise the
    width comes from the first row (or from ``names``).
    """
    rows = [list(r) for r in raw]
    if rows:
        width = len(rows[0])
        for i, r in enumerate(rows):
            if len(r) != width:
                raise ValidationError(
                    f"ragged table: row {i} has {len(r)} values, expected {width}"
                )
    else:
        width = n_columns if n_columns is not None else (len(names) if names else 0)
    if names is None:
        names = [f"f{j}" for j in range(width)]
    values = np.array(rows, dtype=np.float64).reshape(len(rows), width)
    return Dataset(values, tuple(names), None if labels is None else np.asarray(labels))


@dataclass(frozen=True, eq=False)
class MergeTree:
    """One-dimensional single-linkage dendrogram.

    Leaves ``0..N-1`` are the input points in input order; merge ``k``
    creates node ``N + k`` from ``left[k]`` and ``right[k]`` at
    ``heights[k]``. ``left`` is always the run lying to the left.
    """

    coords: np.ndarray
    rows: np.ndarray
    left: np.ndarray
    right: np.ndarray
    heights: np.ndarray
    sizes: np.ndarray = field(init=False)

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=np.float64)
        n = coords.shape[0]
        rows = np.asarray(self.rows, dtype=np.int64)
        left = np.asarray(self.left, dtype=np.int64)
        right = np.asarray(self.right, dtype=np.int64)
        heights = np.asarray(self.heights, dtype=np.float64)
        if rows.shape != (n,):
            raise ValidationError("one source row per leaf required")
        m = max(n - 1, 0)
        if left.shape != (m,) or right.shape != (m,) or heights.shape != (m,):
            raise ValidationError(f"{n} leaves need exactly {m} merges")
        if m and np.any(np.diff(heights) < 0):
            raise ValidationError("merge heights must be non-decreasing")
        sizes = np.ones(n + m, dtype=np.int64)
        used = np.zeros(n + m, dtype=bool)
        for k in range(m):
            a, b = left[k], right[k]
            node = n + k
            for c in (a, b):
                if not 0 <= c < node or used[c]:
                    raise ValidationError(f"merge {k} has an invalid child {c}")
                used[c] = True
            sizes[node] = sizes[a] + sizes[b]
        for name, arr in (("coords", coords), ("rows", rows), ("left", left),
                          ("right", right), ("heights", heights)):
            object.__setattr__(self, name, _frozen(arr))
        object.__setattr__(self, "sizes", _frozen(sizes))

    @property
    def n_leaves(self) -> int:
        return self.coords.shape[0]

    @property
    def n_nodes(self) -> int:
        return self.sizes.shape[0]

    @property
    def root(self) -> int:
        return self.n_nodes - 1

    @property
    def root_height(self) -> float:
        """H, the height of the final merge (0 for fewer than two leaves)."""
        return float(self.heights[-1]) if self.heights.size else 0.0

    def node_height(self, node: int) -> float:
        n = self.n_leaves
        return 0.0 if node < n else float(self.heights[node - n])

    def children(self, node: int) -> tuple[int, int]:
        k = node - self.n_leaves
        if k < 0:
            raise ValueError(f"node {node} is a leaf")
        return int(self.left[k]), int(self.right[k])

    def leaves_under(self, node: int) -> list[int]:
        n = self.n_leaves
        out, stack = [], [node]
        while stack:
            v = stack.pop()
            if v < n:
                out.append(v)
            else:
                k = v - n
                stack.append(int(self.right[k]))
                stack.append(int(self.left[k]))
        return out

    def members(self, node: int) -> frozenset[int]:
        """Source rows below ``node``."""
        return frozenset(int(self.rows[v]) for v in self.leaves_under(node))

    def __eq__(self, other):
        if not isinstance(other, MergeTree):
            return NotImplemented
        return all(
            getattr(self, f).tobytes() == getattr(other, f).tobytes()
            and getattr(self, f).shape == getattr(other, f).shape
            for f in ("coords", "rows", "left", "right", "heights")
        )

    __hash__ = None


@dataclass(frozen=True)
class LeafBranch:
    """A leaf of the streak-pruned tree.

    ``rows`` are all source rows under the top of the contracted chain, so
    absorbed streak points travel with the cluster that swallowed them.
    """

    rows: frozenset[int]
    formation_height: float
    split_height: float

    @property
    def length(self) -> float:
        return self.split_height - self.formation_height

    def to_dict(self) -> dict:
        return {
            "rows": sorted(self.rows),
            "formation_height": self.formation_height,
            "split_height": self.split_height,
            "length": self.length,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LeafBranch":
        return cls(frozenset(int(r) for r in d["rows"]),
                   float(d["formation_height"]), float(d["split_height"]))


@dataclass(frozen=True)
class PrunedTree:
    threshold: float
    leaf_branches: tuple[LeafBranch, ...]
    root_height: float
    root_split: bool = False
    """True when both children of the final merge qualify."""


@dataclass(frozen=True)
class RelevanceReport:
    rho: float
    H: float
    occurred: bool
    branches: tuple[LeafBranch, ...]
    degenerate: bool = False

    def __post_init__(self):
        if not 0.0 <= self.rho <= 1.0:
            raise ValidationError(f"rho={self.rho} outside [0, 1]")
        if not self.occurred and self.rho != 0.0:
            raise ValidationError("rho must be 0 when nothing occurred")

    def to_dict(self) -> dict:
        return {
            "rho": self.rho,
            "H": self.H,
            "occurred": self.occurred,
            "degenerate": self.degenerate,
            "branches": [b.to_dict() for b in self.branches],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RelevanceReport":
        return cls(
            rho=float(d["rho"]),
            H=float(d["H"]),
            occurred=bool(d["occurred"]),
            branches=tuple(LeafBranch.from_dict(b) for b in d["branches"]),
            degenerate=bool(d.get("degenerate", False)),
        )


@dataclass(frozen=True)
class SliceSpec:
    """Axis-aligned hypercylinder: all features but ``free_index`` pinned to
    ``anchor`` and a tolerance ``radius`` around that line."""

    free_index: int
    anchor: tuple[float, ...]
    radius: float
    min_points: int = 0

    def __post_init__(self):
        object.__setattr__(self, "anchor", tuple(float(a) for a in self.anchor))
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise ValidationError(f"radius must be finite and positive, got {self.radius}")
        if self.free_index < 0:
            raise ValidationError("free_index must be non-negative")
        if self.min_points < 0:
            raise ValidationError("min_points must be non-negative")

    @property
    def n_features(self) -> int:
        return len(self.anchor) + 1


@dataclass(frozen=True, eq=False)
class Slice1D:
    coords: np.ndarray
    rows: np.ndarray

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=np.float64).reshape(-1)
        rows = np.asarray(self.rows, dtype=np.int64).reshape(-1)
        if coords.shape != rows.shape:
            raise ValidationError("coords and rows must have equal length")
        if np.unique(rows).size != rows.size:
            raise ValidationError("slice rows must be distinct")
        object.__setattr__(self, "coords", _frozen(coords))
        object.__setattr__(self, "rows", _frozen(rows))

    def __len__(self):
        return self.coords.shape[0]
