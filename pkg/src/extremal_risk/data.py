"""Dataset container and the CSV dialect shared by every command.

The dialect is fixed: comma delimiter, ``.`` decimals, UTF-8, one header row,
unquoted numerics. Values are written with 17 significant digits so a write
followed by a read reproduces every float exactly.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DataError, ParameterError

PREPROCESS_MODES = ("none", "danube")


@dataclass(frozen=True)
class Dataset:
    """Immutable feature matrix (n x d, nonnegative) with target ``H``."""

    feature_names: tuple[str, ...]
    rows: np.ndarray
    target: np.ndarray
    target_name: str = "H"

    def __post_init__(self):
        rows = np.array(self.rows, dtype=float, copy=True)
        target = np.array(self.target, dtype=float, copy=True).ravel()
        if rows.ndim == 1:
            rows = rows[:, None]
        names = tuple(str(s) for s in self.feature_names)
        if rows.ndim != 2 or rows.shape[0] != target.shape[0]:
            raise DataError("feature rows and target must have the same number of rows")
        if rows.shape[0] < 1:
            raise DataError("dataset must contain at least one row")
        if len(names) != rows.shape[1]:
            raise DataError("one feature name per column is required")
        if len(set(names) | {self.target_name}) != len(names) + 1:
            raise DataError("feature and target names must be distinct")
        if not (np.all(np.isfinite(rows)) and np.all(np.isfinite(target))):
            raise DataError("dataset contains non-finite values")
        if np.any(rows < 0) or np.any(target < 0):
            raise DataError("features and target must be nonnegative")
        rows.flags.writeable = False
        target.flags.writeable = False
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "feature_names", names)

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def n_features(self) -> int:
        return self.rows.shape[1]

    def subset(self, index) -> "Dataset":
        return Dataset(self.feature_names, self.rows[index], self.target[index], self.target_name)

    def select_columns(self, names: Sequence[str]) -> "Dataset":
        missing = [s for s in names if s not in self.feature_names]
        if missing:
            raise DataError(f"unknown feature column(s): {', '.join(missing)}")
        idx = [self.feature_names.index(s) for s in names]
        return Dataset(tuple(names), self.rows[:, idx], self.target, self.target_name)


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def write_csv(dataset: Dataset, path) -> None:
    header = list(dataset.feature_names) + [dataset.target_name]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row, h in zip(dataset.rows, dataset.target):
            w.writerow([_fmt(v) for v in row] + [_fmt(h)])


def read_table(path) -> tuple[list[str], np.ndarray]:
    """Parse a numeric CSV into its header and an (n, k) float matrix."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"{path}: no such file")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        if not header or any(h == "" for h in header):
            raise DataError(f"{path}: header has empty column names")
        seen = set()
        for h in header:
            if h in seen:
                raise DataError(f"{path}: duplicate column '{h}'")
            seen.add(h)
        values = []
        for lineno, rec in enumerate(reader, start=2):
            if not rec or all(c.strip() == "" for c in rec):
                continue
            if len(rec) != len(header):
                raise DataError(
                    f"{path}:{lineno}: expected {len(header)} fields, found {len(rec)}"
                )
            row = []
            for col, cell in zip(header, rec):
                try:
                    v = float(cell)
                except ValueError:
                    raise DataError(
                        f"{path}:{lineno}: column '{col}': non-numeric cell {cell!r}"
                    ) from None
                if not math.isfinite(v):
                    raise DataError(f"{path}:{lineno}: column '{col}': non-finite value {cell!r}")
                row.append(v)
            values.append(row)
    if not values:
        raise DataError(f"{path}: no data rows")
    return header, np.array(values, dtype=float)


def danube_normalize(table: np.ndarray, names: Sequence[str]) -> np.ndarray:
    """Shift each column by its minimum and divide by its range."""
    lo = table.min(axis=0)
    span = table.max(axis=0) - lo
    flat = np.flatnonzero(span == 0)
    if flat.size:
        raise DataError(f"column '{names[flat[0]]}' has zero range; cannot normalize")
    return (table - lo) / span


def load_csv(
    path,
    target_column: str = "H",
    preprocess: str = "none",
    feature_columns: Sequence[str] | None = None,
) -> Dataset:
    """Load a dataset; every non-target column is a feature unless listed explicitly."""
    if preprocess not in PREPROCESS_MODES:
        raise ParameterError(f"unknown preprocessing mode {preprocess!r}")
    header, table = read_table(path)
    if target_column not in header:
        raise DataError(f"{path}: target column '{target_column}' not found")
    if preprocess == "danube":
        table = danube_normalize(table, header)
    t = header.index(target_column)
    if feature_columns is None:
        feature_columns = [h for h in header if h != target_column]
    missing = [c for c in feature_columns if c not in header]
    if missing:
        raise DataError(f"{path}: feature column(s) not found: {', '.join(missing)}")
    if target_column in feature_columns:
        raise DataError(f"{path}: target column '{target_column}' listed as a feature")
    idx = [header.index(c) for c in feature_columns]
    neg = np.argwhere(table[:, idx + [t]] < 0)
    if neg.size:
        r, c = neg[0]
        raise DataError(
            f"{path}:{r + 2}: column '{([*feature_columns, target_column])[c]}': negative value"
        )
    return Dataset(tuple(feature_columns), table[:, idx], table[:, t], target_column)


def load_predictions(spec: str) -> np.ndarray:
    """Read a +-1 prediction column given as ``FILE`` or ``FILE:COLUMN``."""
    path, _, column = spec.partition(":")
    if column and not Path(spec).is_file():
        header, table = read_table(path)
        if column not in header:
            raise DataError(f"{path}: prediction column '{column}' not found")
        values = table[:, header.index(column)]
    else:
        header, table = read_table(spec)
        values = table[:, 0]
    bad = np.flatnonzero((values != 1) & (values != -1))
    if bad.size:
        raise DataError(f"{path}:{bad[0] + 2}: prediction must be +1 or -1, got {values[bad[0]]}")
    return values.astype(int)
