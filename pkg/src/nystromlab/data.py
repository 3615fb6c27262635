"""Datasets and their on-disk formats.

Two text formats are supported:

``csv``
    One row per point, comma separated. A final column whose entries are all
    ``+1``/``-1`` is taken as the label column.
``sparse``
    ``label idx:val idx:val ...`` with 1-based feature indices.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass

import numpy as np

from nystromlab.errors import DataError

FORMATS = ("csv", "sparse")


@dataclass(frozen=True)
class Dataset:
    points: np.ndarray
    labels: np.ndarray | None = None

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if pts.ndim != 2:
            raise DataError("points must be a 2-d array")
        object.__setattr__(self, "points", pts)
        if self.labels is not None:
            y = np.asarray(self.labels, dtype=float).ravel()
            if y.shape[0] != pts.shape[0]:
                raise DataError(f"{y.shape[0]} labels for {pts.shape[0]} points")
            if not np.all(np.isin(y, (-1.0, 1.0))):
                raise DataError("labels must be -1 or +1")
            object.__setattr__(self, "labels", y)

    def __len__(self):
        return self.points.shape[0]

    @property
    def dim(self):
        return self.points.shape[1]

    def subset(self, idx):
        idx = np.asarray(idx, dtype=int)
        return Dataset(self.points[idx], None if self.labels is None else self.labels[idx])


def _to_binary(raw, line_numbers):
    classes = np.unique(raw)
    if set(classes.tolist()) <= {-1.0, 1.0}:
        return raw
    if classes.size != 2:
        first_two = list(dict.fromkeys(raw.tolist()))[:2]
        bad = next(i for i, v in enumerate(raw) if v not in first_two)
        raise DataError(f"labels take {classes.size} distinct values; expected two classes", line_numbers[bad])
    return np.where(raw == classes[1], 1.0, -1.0)


def _ingest_csv(path, labels):
    rows, line_numbers = [], []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                values = [float(c) for c in row]
            except ValueError as exc:
                raise DataError(f"cannot parse number ({exc})", lineno) from None
            if rows and len(values) != len(rows[0]):
                raise DataError(f"expected {len(rows[0])} columns, found {len(values)}", lineno)
            rows.append(values)
            line_numbers.append(lineno)
    if not rows:
        raise DataError(f"{path}: no data rows")
    A = np.array(rows)
    if not np.all(np.isfinite(A)):
        raise DataError("non-finite value in file")
    if labels is None:
        labels = A.shape[1] > 1 and bool(np.all(np.isin(A[:, -1], (-1.0, 1.0))))
    if labels:
        if A.shape[1] < 2:
            raise DataError("label column requested but rows have a single column")
        return Dataset(A[:, :-1], _to_binary(A[:, -1], line_numbers))
    return Dataset(A)


def _ingest_sparse(path, dim):
    raw_labels, entries, line_numbers = [], [], []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            tokens = line.split()
            if not tokens:
                continue
            try:
                raw_labels.append(float(tokens[0]))
                feats = {}
                for tok in tokens[1:]:
                    idx, val = tok.split(":")
                    idx = int(idx)
                    if idx < 1:
                        raise DataError(f"feature index {idx} must be >= 1", lineno)
                    feats[idx] = float(val)
            except DataError:
                raise
            except ValueError as exc:
                raise DataError(f"malformed entry ({exc})", lineno) from None
            entries.append(feats)
            line_numbers.append(lineno)
    if not entries:
        raise DataError(f"{path}: no data rows")
    max_idx = max((max(f) for f in entries if f), default=0)
    if dim is None:
        dim = max_idx
    elif max_idx > dim:
        raise DataError(f"feature index {max_idx} exceeds declared dimension {dim}")
    X = np.zeros((len(entries), max(dim, 1)))
    for row, feats in enumerate(entries):
        for idx, val in feats.items():
            X[row, idx - 1] = val
    if not np.all(np.isfinite(X)):
        raise DataError("non-finite value in file")
    return Dataset(X, _to_binary(np.array(raw_labels), line_numbers))


def ingest(path, format="csv", labels=None, dim=None) -> Dataset:
    """Read a dataset file.

    ``labels=None`` auto-detects a trailing label column in CSV files. Labels
    drawn from any two classes are mapped to -1 (smaller) and +1 (larger).
    """
    if format not in FORMATS:
        raise DataError(f"unknown dataset format {format!r}")
    if not os.path.exists(path):
        raise DataError(f"{path}: no such file")
    if format == "csv":
        return _ingest_csv(path, labels)
    return _ingest_sparse(path, dim)


def write_dataset(path, data: Dataset, format="csv"):
    """Write ``data`` so that :func:`ingest` returns identical values."""
    X, y = data.points, data.labels
    with open(path, "w", newline="") as fh:
        if format == "csv":
            w = csv.writer(fh, lineterminator="\n")
            for i, row in enumerate(X):
                cells = [repr(float(v)) for v in row]
                if y is not None:
                    cells.append("+1" if y[i] > 0 else "-1")
                w.writerow(cells)
        elif format == "sparse":
            if y is None:
                raise DataError("sparse format requires labels")
            d = X.shape[1]
            for i, row in enumerate(X):
                # the last feature is always written so the dimension survives the round trip
                nz = [j for j in range(d) if row[j] != 0.0 or j == d - 1]
                feats = " ".join(f"{j + 1}:{float(row[j])!r}" for j in nz)
                fh.write(f"{'+1' if y[i] > 0 else '-1'} {feats}\n")
        else:
            raise DataError(f"unknown dataset format {format!r}")
