"""Minimal SVG dendrogram drawing (presentation only)."""
from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

from .core import MergeTree


def dendrogram_svg(tree: MergeTree, width: int = 800, height: int = 400,
                   margin: int = 30, title: str = "") -> str:
    """Leaves sit on a baseline in sorted order; merges are drawn as brackets
    at their heights."""
    n = tree.n_leaves
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
             f'viewBox="0 0 {width} {height}">',
             '<rect width="100%" height="100%" fill="white"/>']
    if title:
        parts.append(f'<text x="{margin}" y="{margin * 0.6:.1f}" font-size="12">{escape(title)}</text>')
    if n:
        order = np.lexsort((np.arange(n), tree.coords))
        slot = np.empty(n)
        slot[order] = np.arange(n)
        span = max(n - 1, 1)
        xs = list(margin + slot * (width - 2 * margin) / span)
        H = tree.root_height or 1.0
        base = height - margin

        def y_of(h):
            return base - (h / H) * (height - 2 * margin)

        ys = [base] * n
        for k in range(tree.heights.shape[0]):
            a, b = int(tree.left[k]), int(tree.right[k])
            y = y_of(float(tree.heights[k]))
            parts.append(
                f'<path d="M{xs[a]:.2f},{ys[a]:.2f} V{y:.2f} H{xs[b]:.2f} V{ys[b]:.2f}" '
                'fill="none" stroke="black" stroke-width="0.6"/>'
            )
            xs.append((xs[a] + xs[b]) / 2)
            ys.append(y)
        parts.append(f'<line x1="{margin}" y1="{base}" x2="{width - margin}" y2="{base}" '
                     'stroke="#999" stroke-width="0.5"/>')
    parts.append("</svg>")
    return "\n".join(parts)
