"""Dataset model, CSV ingestion, encoding and the score orientation contract.

Every score vector produced in this package follows one orientation: the
lowest score marks the most anomalous case.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

NUMERIC = "numeric"
CATEGORICAL = "categorical"
ORIENTATION = "lowest = most anomalous"

_TRUE = {"1", "true"}
_FALSE = {"0", "false"}


class DatasetError(ValueError):
    """Raised for malformed input data."""


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Column:
    """A single named column, either numeric (float) or categorical (str)."""

    name: str
    kind: str
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.kind == NUMERIC:
            vals = np.asarray(self.values, dtype=np.float64)
            if not np.all(np.isfinite(vals)):
                raise DatasetError(f"column {self.name!r} contains non-finite values")
        elif self.kind == CATEGORICAL:
            vals = np.asarray([str(v) for v in self.values], dtype=object)
        else:
            raise DatasetError(f"unknown column kind {self.kind!r}")
        object.__setattr__(self, "values", _readonly(vals))

    @property
    def classes(self) -> list[str]:
        """Sorted observed class set (categorical columns only)."""
        if self.kind != CATEGORICAL:
            raise DatasetError(f"column {self.name!r} is not categorical")
        return sorted(set(self.values.tolist()))


@dataclass(frozen=True)
class Dataset:
    """Rectangular mixed-type data with optional per-case HDA labels.

    Cases are addressed by 1-based ids in row order.
    """

    columns: tuple[Column, ...]
    labels: np.ndarray | None = None

    def __post_init__(self) -> None:
        cols = tuple(self.columns)
        if not cols:
            raise DatasetError("dataset has no columns")
        names = [c.name for c in cols]
        if len(set(names)) != len(names):
            raise DatasetError(f"duplicate column names in {names}")
        n = len(cols[0].values)
        if n == 0:
            raise DatasetError("dataset has no cases")
        for c in cols:
            if len(c.values) != n:
                raise DatasetError(f"column {c.name!r} has {len(c.values)} values, expected {n}")
        object.__setattr__(self, "columns", cols)
        if self.labels is not None:
            lab = np.asarray(self.labels, dtype=bool)
            if lab.shape != (n,):
                raise DatasetError(f"labels have shape {lab.shape}, expected ({n},)")
            object.__setattr__(self, "labels", _readonly(lab))

    @classmethod
    def from_arrays(
        cls,
        numeric: Mapping[str, Sequence[float]] | None = None,
        categorical: Mapping[str, Sequence[Any]] | None = None,
        labels: Sequence[bool] | None = None,
    ) -> Dataset:
        """Build a dataset from plain mappings (numeric columns first)."""
        cols = [Column(k, NUMERIC, np.asarray(v, dtype=float)) for k, v in (numeric or {}).items()]
        cols += [Column(k, CATEGORICAL, np.asarray(v, dtype=object)) for k, v in (categorical or {}).items()]
        return cls(tuple(cols), None if labels is None else np.asarray(labels, dtype=bool))

    @property
    def n_cases(self) -> int:
        return len(self.columns[0].values)

    @property
    def ids(self) -> np.ndarray:
        return np.arange(1, self.n_cases + 1)

    @property
    def numeric_columns(self) -> tuple[Column, ...]:
        return tuple(c for c in self.columns if c.kind == NUMERIC)

    @property
    def categorical_columns(self) -> tuple[Column, ...]:
        return tuple(c for c in self.columns if c.kind == CATEGORICAL)

    def column(self, name: str) -> Column:
        for c in self.columns:
            if c.name == name:
                return c
        raise KeyError(name)

    def numeric_matrix(self) -> np.ndarray:
        """Raw (unnormalized) ``n x p_c`` matrix of the numeric columns."""
        cols = self.numeric_columns
        if not cols:
            return np.empty((self.n_cases, 0))
        return np.column_stack([c.values for c in cols])

    def class_combinations(self) -> np.ndarray:
        """Per-case tuple of all categorical values, as an object array of tuples."""
        cats = self.categorical_columns
        out = np.empty(self.n_cases, dtype=object)
        out[:] = list(zip(*(c.values.tolist() for c in cats))) if cats else [()] * self.n_cases
        return out

    def subset_columns(self, kind: str) -> Dataset:
        return Dataset(tuple(c for c in self.columns if c.kind == kind), self.labels)

    def take(self, rows: Sequence[int]) -> Dataset:
        """Return a dataset with the given 0-based rows, in that order."""
        rows = np.asarray(rows, dtype=int)
        cols = tuple(Column(c.name, c.kind, c.values[rows]) for c in self.columns)
        return Dataset(cols, None if self.labels is None else self.labels[rows])


@dataclass(frozen=True)
class ContinuousView:
    """The numeric columns of a dataset: the attributes used for density."""

    dataset: Dataset
    columns: tuple[Column, ...]

    @property
    def p_c(self) -> int:
        return len(self.columns)

    def as_dataset(self) -> Dataset:
        return Dataset(self.columns, self.dataset.labels)


@dataclass(frozen=True)
class ScoreVector:
    """Per-case anomaly scores; the lowest value is the most anomalous case.

    Attributes:
        values: Read-only float array of length n.
        role: Free-form tag such as ``"aas"``, ``"ads"`` or ``"hds"``.
        provenance: Optional per-case string labels describing how each
            score was produced.
        meta: Extra detector output (e.g. SECODA's ``ultimate_arity``).
    """

    values: np.ndarray
    role: str = "scores"
    provenance: np.ndarray | None = None
    meta: Mapping[str, Any] = field(default_factory=dict)

    orientation = ORIENTATION

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 1:
            raise ValueError(f"scores must be 1-D, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("scores must be finite")
        object.__setattr__(self, "values", _readonly(vals))
        if self.provenance is not None:
            prov = np.asarray(self.provenance, dtype=object)
            if prov.shape != vals.shape:
                raise ValueError("provenance length does not match scores")
            object.__setattr__(self, "provenance", _readonly(prov))
        object.__setattr__(self, "meta", MappingProxyType(dict(self.meta)))

    def __len__(self) -> int:
        return len(self.values)

    def ranking(self) -> np.ndarray:
        """0-based case indices from most to least anomalous (ties by id)."""
        return np.lexsort((np.arange(len(self.values)), self.values))


@dataclass(frozen=True)
class EncodedMatrix:
    """Dummy-encoded, min-max normalized matrix with the column mapping.

    ``sources[j]`` is ``(source column name, class or None)`` for encoded
    column ``j``.
    """

    values: np.ndarray
    sources: tuple[tuple[str, str | None], ...]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


def _parse_float(token: str) -> float:
    val = float(token)
    if not math.isfinite(val):
        raise ValueError(token)
    return val


def _parse_label(token: str, line: int, name: str) -> bool:
    t = token.strip().lower()
    if t in _TRUE:
        return True
    if t in _FALSE:
        return False
    raise DatasetError(f"invalid label {token!r} at row {line}, column {name}")


def load_dataset(
    path: str | Path,
    schema: Mapping[str, str] | None = None,
    label_column: str | None = None,
) -> Dataset:
    """Read a CSV file with a header row into a :class:`Dataset`.

    Args:
        path: CSV file (UTF-8, comma separated, ``.`` decimal separator).
        schema: Optional ``{column: "numeric" | "categorical"}``. Columns not
            listed are inferred: numeric when every value parses as a finite
            float, categorical otherwise.
        label_column: Optional name of a ``{0, 1, true, false}`` column that
            holds the ground-truth HDA labels; it is removed from the features.

    Raises:
        FileNotFoundError: ``path`` does not exist.
        DatasetError: empty file, duplicate header names, missing values, or
            a non-numeric token in a declared numeric column. Row numbers in
            messages are file line numbers (the header is row 1).
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r]
    if not rows:
        raise DatasetError(f"{path} is empty")
    header = [h.strip() for h in rows[0]]
    if len(set(header)) != len(header):
        dupes = sorted({h for h in header if header.count(h) > 1})
        raise DatasetError(f"duplicate header names: {dupes}")
    body = rows[1:]
    if not body:
        raise DatasetError(f"{path} has a header but no data rows")
    for line, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise DatasetError(f"row {line} has {len(row)} fields, expected {len(header)}")
    schema = dict(schema or {})
    unknown = set(schema) - set(header)
    if unknown:
        raise DatasetError(f"schema names unknown columns: {sorted(unknown)}")
    if label_column is not None and label_column not in header:
        raise DatasetError(f"label column {label_column!r} not in header")

    columns = []
    labels = None
    for j, name in enumerate(header):
        raw = [row[j].strip() for row in body]
        for line, tok in enumerate(raw, start=2):
            if tok == "":
                raise DatasetError(f"missing value at row {line}, column {name}")
        if name == label_column:
            labels = np.array([_parse_label(t, line, name) for line, t in enumerate(raw, start=2)])
            continue
        kind = schema.get(name)
        if kind is None:
            try:
                vals = [_parse_float(t) for t in raw]
                kind = NUMERIC
            except ValueError:
                kind = CATEGORICAL
        if kind == NUMERIC:
            vals = []
            for line, tok in enumerate(raw, start=2):
                try:
                    vals.append(_parse_float(tok))
                except ValueError:
                    raise DatasetError(
                        f"non-numeric value {tok!r} at row {line}, column {name}"
                    ) from None
            columns.append(Column(name, NUMERIC, np.array(vals)))
        elif kind == CATEGORICAL:
            columns.append(Column(name, CATEGORICAL, np.array(raw, dtype=object)))
        else:
            raise DatasetError(f"unknown kind {kind!r} for column {name}")
    if not columns:
        raise DatasetError("no feature columns")
    return Dataset(tuple(columns), labels)


def write_dataset(ds: Dataset, path: str | Path, label_column: str = "hda") -> None:
    """Write ``ds`` as CSV (labels, if present, as a trailing 0/1 column)."""
    header = [c.name for c in ds.columns]
    cols = []
    for c in ds.columns:
        cols.append([repr(float(v)) for v in c.values] if c.kind == NUMERIC else list(c.values))
    if ds.labels is not None:
        header.append(label_column)
        cols.append(["1" if v else "0" for v in ds.labels])
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(zip(*cols))


def _minmax(col: np.ndarray) -> np.ndarray:
    lo, hi = col.min(), col.max()
    if hi == lo:
        return np.zeros_like(col, dtype=np.float64)
    return (col - lo) / (hi - lo)


def encode(ds: Dataset, include_categoricals: bool = True) -> EncodedMatrix:
    """One-hot encode categoricals and min-max normalize every column to [0, 1].

    Constant columns (including single-class dummies) map to zeros. With
    ``include_categoricals=False`` only the numeric columns are encoded.
    """
    blocks = []
    sources: list[tuple[str, str | None]] = []
    for c in ds.columns:
        if c.kind == NUMERIC:
            blocks.append(_minmax(c.values.astype(np.float64)))
            sources.append((c.name, None))
        elif include_categoricals:
            for cls in c.classes:
                blocks.append(_minmax((c.values == cls).astype(np.float64)))
                sources.append((c.name, cls))
    values = np.column_stack(blocks) if blocks else np.empty((ds.n_cases, 0))
    return EncodedMatrix(_readonly(values), tuple(sources))


def continuous_view(ds: Dataset) -> ContinuousView:
    """View over the numeric columns; raises if there are none."""
    cols = ds.numeric_columns
    if not cols:
        raise DatasetError("dataset has no numeric columns; density attributes are required")
    return ContinuousView(ds, cols)


def rank_of(scores: ScoreVector | Sequence[float], case_id: int) -> int:
    """1-based rank of a case under ascending scores, ties by ascending id."""
    vals = scores.values if isinstance(scores, ScoreVector) else np.asarray(scores, dtype=float)
    n = len(vals)
    if not 1 <= case_id <= n:
        raise KeyError(f"unknown case id {case_id}")
    order = np.lexsort((np.arange(n), vals))
    ranks = np.empty(n, dtype=int)
    ranks[order] = np.arange(1, n + 1)
    return int(ranks[case_id - 1])


def ranks(values: Iterable[float]) -> np.ndarray:
    """1-based ranks for all cases (same ordering as :func:`rank_of`)."""
    vals = np.asarray(list(values) if not isinstance(values, np.ndarray) else values, dtype=float)
    order = np.lexsort((np.arange(len(vals)), vals))
    out = np.empty(len(vals), dtype=int)
    out[order] = np.arange(1, len(vals) + 1)
    return out
