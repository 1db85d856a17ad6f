"""Streak pruning, the relevance index and interstice extraction.

A dendrogram node *qualifies* when it holds at least ``n = N / alpha``
points. Nodes below the threshold are streaks: thin branches that mostly
collect points from sparse regions. Pruning keeps the qualifying nodes, and
contracting merges each chain of single-qualifying-child nodes into one
branch. A branch runs from the merge that first made it big enough
(``formation_height``) to the merge that joins it to another qualifying
subtree (``split_height``).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from ._validation import check_positive
from .linkage import single_linkage_1d
from .core import LeafBranch, MergeTree, PrunedTree, RelevanceReport, Slice1D, ValidationError

Occurrence = Literal["root", "any"]


def prune_and_contract(tree: MergeTree, alpha: float) -> PrunedTree:
    """Drop sub-threshold subtrees and contract streak-absorption chains.

    Leaf branches are returned left to right along the axis.
    """
    alpha = check_positive(alpha, "alpha")
    n_leaves = tree.n_leaves
    threshold = n_leaves / alpha
    H = tree.root_height
    if n_leaves == 0 or tree.sizes[tree.root] < threshold:
        return PrunedTree(threshold, (), H, False)

    sizes = tree.sizes
    heights = tree.heights
    root = tree.root
    root_split = False
    if root >= n_leaves:
        a, b = tree.children(root)
        root_split = bool(sizes[a] >= threshold and sizes[b] >= threshold)

    branches = []
    stack = [(root, H)]
    while stack:
        top, split_h = stack.pop()
        v = top
        while True:
            if v < n_leaves:
                formation = 0.0
                break
            k = v - n_leaves
            a, b = int(tree.left[k]), int(tree.right[k])
            qa, qb = sizes[a] >= threshold, sizes[b] >= threshold
            if qa and qb:
                h = float(heights[k])
                # right pushed first so the left subtree is emitted first
                stack.append((b, h))
                stack.append((a, h))
                formation = None
                break
            if qa:
                v = a
            elif qb:
                v = b
            else:
                formation = float(heights[k])
                break
        if formation is not None:
            branches.append(LeafBranch(tree.members(top), formation, float(split_h)))
    return PrunedTree(threshold, tuple(branches), H, root_split)


def relevance(tree: MergeTree, alpha: float = 4.0, occurrence: Occurrence = "root") -> RelevanceReport:
    """Relevance of the cluster structure in a 1D dendrogram.

    Parameters
    ----------
    tree : MergeTree
    alpha : float, default=4
        Streak threshold; branches need at least ``N / alpha`` points.
    occurrence : {"root", "any"}, default="root"
        ``"root"`` counts a clustering only when both sides of the final
        merge qualify, i.e. the top-down sweep starting at two clusters does
        not stop immediately. ``"any"`` accepts any split with two
        qualifying sides anywhere in the pruned tree.

    Returns
    -------
    RelevanceReport
        ``rho`` is the second-longest pruned branch over the root height
        when a clustering occurred, else 0. Fewer than two points or a zero
        root height give a degenerate report.
    """
    if occurrence not in ("root", "any"):
        raise ValidationError(f"occurrence must be 'root' or 'any', got {occurrence!r}")
    pruned = prune_and_contract(tree, alpha)
    branches = tuple(sorted(pruned.leaf_branches, key=lambda b: -b.length))
    H = pruned.root_height
    if tree.n_leaves < 2 or H == 0.0:
        return RelevanceReport(0.0, H, False, branches, degenerate=True)
    if occurrence == "root":
        occurred = pruned.root_split
    else:
        occurred = len(branches) >= 2
    rho = branches[1].length / H if occurred else 0.0
    return RelevanceReport(rho, H, occurred, branches)


@dataclass(frozen=True)
class Interstice:
    xa: float
    xb: float
    left_rows: frozenset[int]
    right_rows: frozenset[int]

    @property
    def width(self) -> float:
        return self.xb - self.xa

    def to_dict(self) -> dict:
        return {
            "xa": self.xa,
            "xb": self.xb,
            "left_rows": sorted(self.left_rows),
            "right_rows": sorted(self.right_rows),
        }


def find_interstices(slice1d: Slice1D, report: RelevanceReport) -> list[Interstice]:
    """Gaps between consecutive qualifying clusters of a slice.

    Each interstice spans from the largest coordinate of the left cluster to
    the smallest coordinate of the right one. Neighbouring clusters that
    touch (equal boundary coordinates) yield no interstice.
    """
    if not report.occurred:
        raise ValidationError("no clustering occurred in this report")
    coord_of = dict(zip(slice1d.rows.tolist(), slice1d.coords.tolist()))
    spans = []
    for b in report.branches:
        try:
            cs = [coord_of[r] for r in b.rows]
        except KeyError as exc:
            raise ValidationError(f"report row {exc.args[0]} is not in the slice") from None
        spans.append((min(cs), max(cs), b.rows))
    spans.sort(key=lambda s: (s[0], s[1]))
    out = []
    for (_, xa, lrows), (xb, _, rrows) in zip(spans, spans[1:]):
        if xa < xb:
            out.append(Interstice(xa, xb, lrows, rrows))
    return out


def relevance_of_signal(x, alpha: float = 4.0, occurrence: Occurrence = "root", rows=None) -> RelevanceReport:
    """Shortcut: build the dendrogram of ``x`` and score it."""
    return relevance(single_linkage_1d(np.asarray(x, dtype=float), rows), alpha, occurrence)
