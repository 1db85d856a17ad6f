"""CSV and JSON serialization for datasets, merge trees and reports.

Floats are written with ``repr`` so a write/read cycle is bit-exact.
"""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import TextIO, Union

import numpy as np

from .core import Dataset, MergeTree, RelevanceReport, ValidationError, validate_dataset

PathLike = Union[str, Path]
LABEL_COLUMN = "label"


def _open(target, mode):
    if isinstance(target, (str, Path)):
        return open(target, mode, newline="")
    return target


def read_dataset_csv(source: Union[PathLike, TextIO]) -> Dataset:
    """Read a CSV with a header row; a final ``label`` column becomes labels."""
    fh = _open(source, "r")
    try:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ValidationError("empty CSV: header row missing") from None
        has_labels = bool(header) and header[-1] == LABEL_COLUMN
        names = header[:-1] if has_labels else header
        rows, labels = [], []
        for lineno, rec in enumerate(reader, start=2):
            if not rec or all(not c.strip() for c in rec):
                continue
            if len(rec) != len(header):
                raise ValidationError(
                    f"line {lineno}: {len(rec)} fields, header has {len(header)}"
                )
            try:
                vals = [float(c) for c in (rec[:-1] if has_labels else rec)]
                if has_labels:
                    labels.append(int(rec[-1]))
            except ValueError as exc:
                raise ValidationError(f"line {lineno}: {exc}") from None
            rows.append(vals)
    finally:
        if fh is not source:
            fh.close()
    return validate_dataset(rows, names=names,
                            labels=labels if has_labels else None,
                            n_columns=len(names))


def write_dataset_csv(ds: Dataset, target: Union[PathLike, TextIO]) -> None:
    fh = _open(target, "w")
    try:
        w = csv.writer(fh, lineterminator="\n")
        header = list(ds.names)
        if ds.labels is not None:
            header.append(LABEL_COLUMN)
        w.writerow(header)
        for i in range(ds.n_rows):
            rec = [repr(float(v)) for v in ds.values[i]]
            if ds.labels is not None:
                rec.append(str(int(ds.labels[i])))
            w.writerow(rec)
    finally:
        if fh is not target:
            fh.close()


def dataset_to_csv_string(ds: Dataset) -> str:
    buf = io.StringIO()
    write_dataset_csv(ds, buf)
    return buf.getvalue()


def write_merges_csv(tree: MergeTree, target: Union[PathLike, TextIO]) -> None:
    """Export merges as ``merge_index,left,right,height``.

    Nodes ``0..N-1`` are leaves, node ``N+k`` is the k-th merge.
    """
    fh = _open(target, "w")
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["merge_index", "left", "right", "height"])
        for k in range(tree.heights.shape[0]):
            w.writerow([k, int(tree.left[k]), int(tree.right[k]),
                        repr(float(tree.heights[k]))])
    finally:
        if fh is not target:
            fh.close()


def read_merges_csv(source, coords, rows=None) -> MergeTree:
    """Rebuild a :class:`MergeTree` from an exported merge table and the leaves."""
    fh = _open(source, "r")
    try:
        reader = csv.DictReader(fh)
        recs = sorted(reader, key=lambda r: int(r["merge_index"]))
    finally:
        if fh is not source:
            fh.close()
    coords = np.asarray(coords, dtype=np.float64)
    if rows is None:
        rows = np.arange(coords.shape[0])
    return MergeTree(
        coords=coords,
        rows=rows,
        left=[int(r["left"]) for r in recs],
        right=[int(r["right"]) for r in recs],
        heights=[float(r["height"]) for r in recs],
    )


def tree_to_dict(tree: MergeTree) -> dict:
    return {
        "coords": [float(c) for c in tree.coords],
        "rows": [int(r) for r in tree.rows],
        "merges": [
            {"left": int(a), "right": int(b), "height": float(h)}
            for a, b, h in zip(tree.left, tree.right, tree.heights)
        ],
    }


def tree_from_dict(d: dict) -> MergeTree:
    merges = d["merges"]
    return MergeTree(
        coords=d["coords"],
        rows=d["rows"],
        left=[m["left"] for m in merges],
        right=[m["right"] for m in merges],
        heights=[m["height"] for m in merges],
    )


def report_to_json(report: RelevanceReport, **kw) -> str:
    return json.dumps(report.to_dict(), **kw)


def report_from_json(text: str) -> RelevanceReport:
    return RelevanceReport.from_dict(json.loads(text))
