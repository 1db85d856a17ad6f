"""Exact single-linkage clustering of one-dimensional signals.

On a line, two runs of points can only be joined through the gap that
separates them, so the dendrogram is obtained by sorting the points and
closing the consecutive gaps from smallest to largest. Equal gaps close
left to right in sorted order; the brute-force oracle uses the same rule.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin

from ._validation import check_signal
from .core import MergeTree, ValidationError

ORACLE_LIMIT = 512


class OracleLimitError(ValueError):
    pass


def _sort_order(x: np.ndarray) -> np.ndarray:
    # coordinate first, input position breaks ties
    return np.lexsort((np.arange(x.shape[0]), x))


def _source_rows(rows, n):
    if rows is None:
        return np.arange(n, dtype=np.int64)
    rows = np.asarray(rows, dtype=np.int64)
    if rows.shape != (n,):
        raise ValidationError(f"expected {n} source rows, got {rows.size}")
    return rows


def single_linkage_1d(x, rows=None) -> MergeTree:
    """Single-linkage dendrogram of a 1D signal in O(N log N).

    Parameters
    ----------
    x : array-like of shape (n,)
        Finite coordinates. Duplicates are kept and merge at height 0.
    rows : array-like of shape (n,), optional
        Source-row index of each point, carried into the tree. Defaults to
        ``0..n-1``.

    Returns
    -------
    MergeTree
        Leaf ``i`` is ``x[i]``. Merge heights are the sorted consecutive gaps
        of ``sorted(x)``.
    """
    x = check_signal(x)
    n = x.shape[0]
    rows = _source_rows(rows, n)
    if n < 2:
        return MergeTree(x, rows, [], [], [])

    order = _sort_order(x)
    xs = x[order]
    gaps = xs[1:] - xs[:-1]
    gap_order = np.argsort(gaps, kind="stable")

    # runs are tracked by their endpoints: run_end[start] and run_start[end]
    run_end = list(range(n))
    run_start = list(range(n))
    node_at = order.tolist()  # node currently owning the run starting at rank
    left = np.empty(n - 1, dtype=np.int64)
    right = np.empty(n - 1, dtype=np.int64)
    for k, g in enumerate(gap_order.tolist()):
        s = run_start[g]
        e = run_end[g + 1]
        left[k] = node_at[s]
        right[k] = node_at[g + 1]
        run_end[s] = e
        run_start[e] = s
        node_at[s] = n + k
    return MergeTree(x, rows, left, right, gaps[gap_order])


def single_linkage_naive(x, rows=None, limit: int = ORACLE_LIMIT) -> MergeTree:
    """Textbook single linkage by exhaustive search; an O(N^3) oracle.

    At every step the two clusters with the smallest minimum pairwise
    distance are merged. Among equal distances the pair whose closest points
    come first in sorted order wins, which matches :func:`single_linkage_1d`.
    """
    x = check_signal(x)
    n = x.shape[0]
    if n > limit:
        raise OracleLimitError(f"oracle limited to {limit} points, got {n}")
    rows = _source_rows(rows, n)
    if n < 2:
        return MergeTree(x, rows, [], [], [])

    rank = np.empty(n, dtype=np.int64)
    rank[_sort_order(x)] = np.arange(n)
    dist = np.abs(x[:, None] - x[None, :])
    lo = np.minimum(rank[:, None], rank[None, :])
    hi = np.maximum(rank[:, None], rank[None, :])

    label = np.arange(n)  # cluster id per point
    node_of = {i: i for i in range(n)}
    left, right, heights = [], [], []
    for k in range(n - 1):
        cross = label[:, None] != label[None, :]
        d = np.where(cross, dist, np.inf)
        best = d.min()
        cand = cross & (dist == best)
        lo_c = np.where(cand, lo, n)
        best_lo = lo_c.min()
        hi_c = np.where(cand & (lo == best_lo), hi, n)
        i, j = np.unravel_index(np.argmin(hi_c), hi_c.shape)
        a, b = label[i], label[j]
        if rank[label == a].min() > rank[label == b].min():
            a, b = b, a
        left.append(node_of[a])
        right.append(node_of[b])
        heights.append(best)
        label[label == b] = a
        node_of[a] = n + k
        del node_of[b]
    return MergeTree(x, rows, left, right, heights)


@dataclass(frozen=True)
class Cut:
    k: int
    clusters: tuple[frozenset[int], ...]
    """Source-row sets, ordered left to right along the axis."""


def _alive_after(tree: MergeTree, n_merges: int) -> list[int]:
    n = tree.n_leaves
    alive = set(range(n))
    for k in range(n_merges):
        alive.discard(int(tree.left[k]))
        alive.discard(int(tree.right[k]))
        alive.add(n + k)
    return sorted(alive)


def cut(tree: MergeTree, k: int) -> Cut:
    """Partition obtained by undoing the last ``min(k, N) - 1`` merges."""
    if k < 1:
        raise ValidationError(f"k must be at least 1, got {k}")
    n = tree.n_leaves
    if n == 0:
        return Cut(k, ())
    kk = min(k, n)
    nodes = _alive_after(tree, n - kk)
    groups = []
    for v in nodes:
        leaves = tree.leaves_under(v)
        groups.append((float(tree.coords[leaves].min()), min(leaves), tree.members(v)))
    groups.sort(key=lambda g: (g[0], g[1]))
    return Cut(k, tuple(g[2] for g in groups))


def cut_labels(tree: MergeTree, k: int) -> np.ndarray:
    """Cluster index per leaf (input order), numbered left to right."""
    n = tree.n_leaves
    labels = np.empty(n, dtype=np.int64)
    if n == 0:
        return labels
    kk = min(max(k, 1), n)
    nodes = _alive_after(tree, n - kk)
    groups = []
    for v in nodes:
        leaves = tree.leaves_under(v)
        groups.append((float(tree.coords[leaves].min()), min(leaves), leaves))
    groups.sort(key=lambda g: (g[0], g[1]))
    for idx, (_, _, leaves) in enumerate(groups):
        labels[leaves] = idx
    return labels


class SingleLinkage1D(ClusterMixin, BaseEstimator):
    """Single-linkage clustering of a 1D signal, cut at ``n_clusters``.

    Parameters
    ----------
    n_clusters : int, default=2
        Number of clusters kept when cutting the dendrogram.

    Attributes
    ----------
    tree_ : MergeTree
    labels_ : ndarray of shape (n_samples,)
        Cluster index per sample, numbered left to right along the axis.
    """

    def __init__(self, n_clusters=2):
        self.n_clusters = n_clusters

    def fit(self, X, y=None):
        if not isinstance(self.n_clusters, (int, np.integer)) or self.n_clusters < 1:
            raise ValueError(f"n_clusters must be a positive integer, got {self.n_clusters!r}")
        self.tree_ = single_linkage_1d(X)
        self.labels_ = cut_labels(self.tree_, self.n_clusters)
        return self
