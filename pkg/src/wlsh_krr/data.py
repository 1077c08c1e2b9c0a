"""CSV datasets and feature standardization."""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import IngestionError, InvalidArgument

# (rows, columns including the label) of the prepared CSVs.
EXPECTED_SHAPES = {
    "wine": (6497, 12),
    "insurance": (9822, 86),
    "ct": (53500, 385),
    "covertype": (581012, 55),
}

# Default train/test sizes per dataset.
DEFAULT_SPLITS = {
    "wine": (4000, 2497),
    "insurance": (5822, 4000),
    "ct": (35000, 18500),
    "covertype": (500000, 81012),
}


@dataclass(eq=False)
class Dataset:
    """Features, labels and the standardization applied to the features.

    ``feature_means``/``feature_sds`` are zeros/ones until :func:`standardize`
    is called; ``kept_columns`` indexes the original feature columns that
    survived (constant columns are dropped).
    """

    features: np.ndarray
    labels: np.ndarray
    name: str = ""
    feature_means: np.ndarray | None = None
    feature_sds: np.ndarray | None = None
    kept_columns: np.ndarray | None = None
    header: list[str] | None = field(default=None, repr=False)

    def __post_init__(self):
        self.features = np.atleast_2d(np.asarray(self.features, dtype=float))
        self.labels = np.asarray(self.labels, dtype=float)
        d = self.features.shape[1]
        if self.feature_means is None:
            self.feature_means = np.zeros(d)
        if self.feature_sds is None:
            self.feature_sds = np.ones(d)
        if self.kept_columns is None:
            self.kept_columns = np.arange(d)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    def subset(self, idx) -> "Dataset":
        return Dataset(self.features[idx], self.labels[idx], self.name, self.feature_means,
                       self.feature_sds, self.kept_columns, self.header)

    def transform(self, X) -> np.ndarray:
        """Apply this dataset's standardization to raw feature rows."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return (X[:, self.kept_columns] - self.feature_means) / self.feature_sds


def load_csv(path, label_column="last", has_header: bool = False, delimiter: str | None = None,
             name: str | None = None, expected_shape: tuple[int, int] | None = None) -> Dataset:
    """Read a numeric delimited file.

    Args:
        path: File to read.
        label_column: Column index of the label, or ``"last"``.
        has_header: Skip (and keep) the first row as column names.
        delimiter: Field separator; sniffed from ``,``/``;``/tab when omitted.
        name: Dataset name; a key of :data:`EXPECTED_SHAPES` triggers a shape check.
        expected_shape: Explicit ``(rows, columns)`` to verify.

    Raises:
        IngestionError: missing file, ragged rows or non-numeric cells, with location.
    """
    path = Path(path)
    if not path.is_file():
        raise IngestionError(f"no such file: {path}")
    with path.open(newline="") as fh:
        text = fh.read()
    if delimiter is None:
        first = text.split("\n", 1)[0]
        delimiter = max([",", ";", "\t"], key=first.count)
    rows = list(csv.reader(text.splitlines(), delimiter=delimiter))
    header = None
    start = 0
    if has_header and rows:
        header, start = [h.strip() for h in rows[0]], 1
    data = []
    width = None
    for lineno, row in enumerate(rows[start:], start=start + 1):
        if not row or all(not c.strip() for c in row):
            continue
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise IngestionError(f"{path}: row {lineno} has {len(row)} fields, expected {width}", row=lineno)
        vals = []
        for col, cell in enumerate(row):
            try:
                vals.append(float(cell))
            except ValueError:
                raise IngestionError(
                    f"{path}: non-numeric cell {cell!r} at row {lineno}, column {col}", row=lineno, column=col
                ) from None
        data.append(vals)
    if not data:
        raise IngestionError(f"{path}: no data rows")
    arr = np.asarray(data)
    if not np.all(np.isfinite(arr)):
        bad = np.argwhere(~np.isfinite(arr))[0]
        raise IngestionError(f"{path}: non-finite value at row {bad[0] + start + 1}, column {bad[1]}",
                             row=int(bad[0] + start + 1), column=int(bad[1]))
    shape = expected_shape or EXPECTED_SHAPES.get((name or "").lower())
    if shape is not None and arr.shape != tuple(shape):
        raise IngestionError(f"{path}: shape {arr.shape} does not match expected {tuple(shape)}")
    ncol = arr.shape[1]
    lc = ncol - 1 if label_column == "last" else int(label_column)
    if not -ncol <= lc < ncol:
        raise IngestionError(f"{path}: label column {label_column} out of range")
    lc %= ncol
    feat_cols = [c for c in range(ncol) if c != lc]
    if header is not None:
        header = [header[c] for c in feat_cols] + [header[lc]]
    return Dataset(arr[:, feat_cols], arr[:, lc], name or path.stem, header=header)


def save_csv(ds: Dataset, path, header: bool = False) -> None:
    """Write features then label, 17 significant digits (round-trips float64)."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        if header:
            names = ds.header or [f"x{i}" for i in range(ds.d)] + ["y"]
            w.writerow(names)
        for row, y in zip(ds.features, ds.labels):
            w.writerow([format(v, ".17g") for v in row] + [format(y, ".17g")])


def standardize(ds: Dataset) -> Dataset:
    """Zero-mean, unit (population) sd features; constant columns dropped with a warning."""
    if ds.n < 2:
        raise InvalidArgument("standardization needs at least two rows")
    X = ds.features
    mean = X.mean(axis=0)
    centered = X - mean
    sd = np.sqrt(np.mean(centered**2, axis=0))
    keep = sd > 1e-12 * np.maximum(1.0, np.abs(mean))
    if not np.all(keep):
        warnings.warn(f"dropping constant feature columns {np.flatnonzero(~keep).tolist()}", stacklevel=2)
    Z = centered[:, keep] / sd[keep]
    # One refinement pass removes the roundoff left by the first.
    m2 = Z.mean(axis=0)
    s2 = np.sqrt(np.mean((Z - m2) ** 2, axis=0))
    Z = (Z - m2) / s2
    # compose with any standardization ds already carries
    prev_m, prev_s = ds.feature_means[keep], ds.feature_sds[keep]
    means = prev_m + (mean[keep] + m2 * sd[keep]) * prev_s
    sds = prev_s * sd[keep] * s2
    kept = ds.kept_columns[keep]
    return Dataset(Z, ds.labels.copy(), ds.name, means, sds, kept, ds.header)


