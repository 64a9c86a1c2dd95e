"""Tabular data matrix, CSV ingestion, schema inference and label derivation.

The central structure is a fixed-shape matrix of people (rows) by attributes
(columns). The whole grid is allocated once, zero-filled, and rows are then
overwritten in place; there is deliberately no append path. The header is kept
separate from the data rows, so data row 0 is the first person, not the column
names.

Cells are plain Python values: floats (numeric), non-empty strings
(categorical tokens) or the MISSING sentinel. MISSING is distinct from the
0.0 fill value and from every token.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from .errors import (
    BoundsError,
    ColumnNotFoundError,
    CsvFormatError,
    LabelError,
    SchemaError,
    ShapeError,
)

SUCCESSFUL = "successful"
UNSUCCESSFUL = "unsuccessful"
LABEL_COLUMN = "success"
MISSING_TOKEN = "?"

NUMERIC = "numeric"
CATEGORICAL = "categorical"

FEATURE = "feature"
LABEL = "label"
IGNORED = "ignored"


class _Missing:
    """Singleton sentinel for an absent cell value."""

    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "MISSING"


MISSING = _Missing()

Value = Union[float, str, _Missing]


def is_missing(v) -> bool:
    return v is MISSING


def token_of(v) -> str:
    """Categorical token for a cell: strings pass through, numbers use their
    shortest round-trip form, missing becomes the "?" token."""
    if v is MISSING:
        return MISSING_TOKEN
    if isinstance(v, str):
        return v
    return repr(v)


def _norm_cell(v) -> Value:
    if v is MISSING:
        return MISSING
    if isinstance(v, bool):
        raise ShapeError("cell values must be numbers, strings or MISSING, not bool")
    if isinstance(v, int):
        v = float(v)
    if isinstance(v, float):
        if not math.isfinite(v):
            raise ShapeError("numeric cells must be finite")
        return v
    if isinstance(v, str):
        if not v:
            raise ShapeError("categorical cells must be non-empty (use MISSING)")
        return v
    raise ShapeError(f"unsupported cell type: {type(v).__name__}")


class Dataset:
    """Fixed-shape matrix of people (rows) by attributes (columns).

    ``Dataset(n_rows, n_cols)`` allocates the full zero-filled grid in one
    shot; rows are then replaced in place with :meth:`set_row`. Element access
    is constant-time. Datasets are mutable while being loaded and treated as
    immutable afterwards.
    """

    __slots__ = ("n_rows", "n_cols", "header", "cells", "ignored_columns")

    def __init__(self, n_rows: int, n_cols: int, header: Sequence[str] | None = None):
        if n_cols < 1:
            raise ShapeError(f"dataset needs at least one column, got {n_cols}")
        if n_rows < 0:
            raise ShapeError(f"row count must be non-negative, got {n_rows}")
        self.n_rows = n_rows
        self.n_cols = n_cols
        self.cells: list[list[Value]] = [[0.0] * n_cols for _ in range(n_rows)]
        self.header: list[str] = []
        self.ignored_columns: frozenset[str] = frozenset()
        self.set_header(header if header is not None
                        else [f"col{j}" for j in range(n_cols)])

    def set_header(self, names: Sequence[str]) -> None:
        names = list(names)
        if len(names) != self.n_cols:
            raise ShapeError(
                f"header has {len(names)} names for {self.n_cols} columns")
        seen = set()
        for name in names:
            if not name:
                raise SchemaError("column names must be non-empty")
            if name in seen:
                raise SchemaError(f"duplicate column name: {name!r}")
            seen.add(name)
        self.header = names

    def _check_row_index(self, i: int) -> None:
        if not 0 <= i < self.n_rows:
            raise BoundsError(f"row index {i} out of range [0, {self.n_rows})")

    def set_row(self, i: int, row: Sequence[Value]) -> None:
        """Replace row ``i`` (a row of zeros, initially) with real values."""
        self._check_row_index(i)
        if len(row) != self.n_cols:
            raise ShapeError(
                f"row has {len(row)} values for {self.n_cols} columns")
        self.cells[i] = [_norm_cell(v) for v in row]

    def get(self, i: int, j: int) -> Value:
        """Cell at data row ``i``, column ``j`` (constant time)."""
        self._check_row_index(i)
        if not 0 <= j < self.n_cols:
            raise BoundsError(f"column index {j} out of range [0, {self.n_cols})")
        return self.cells[i][j]

    def row(self, i: int) -> list[Value]:
        """Copy of data row ``i`` (one whole person)."""
        self._check_row_index(i)
        return list(self.cells[i])

    def find_column(self, name: str) -> int:
        """Index of the first header entry equal to ``name`` (exact match)."""
        for j, col in enumerate(self.header):
            if col == name:
                return j
        raise ColumnNotFoundError(name)

    def __repr__(self):
        return f"Dataset({self.n_rows}x{self.n_cols})"


_NUM_LEAD = frozenset("+-.0123456789")


def _parse_field(s: str) -> Value:
    if s == "" or s == "NA":
        return MISSING
    if s[0] in _NUM_LEAD:
        try:
            v = float(s)
        except ValueError:
            return s
        if math.isfinite(v):
            return v
    return s


def load_csv(path, delimiter: str = ",", ignored: Iterable[str] = ()) -> Dataset:
    """Load a CSV file into a Dataset.

    The file is read twice: a counting pass sizes the matrix, then the grid is
    allocated once and filled row by row (no incremental growth). The first
    record is the header. Fields that parse as finite real numbers become
    numeric cells; empty fields and the literal ``NA`` become MISSING;
    everything else is a categorical token.

    ``ignored`` names columns that downstream schema inference will mark as
    ignored; they are still loaded (columns are never dropped).
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvFormatError("empty file", line=1) from None
        n_rows = sum(1 for _ in reader)

    d = Dataset(n_rows, len(header), header=header)
    d.ignored_columns = frozenset(ignored)

    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        next(reader)
        n_cols = d.n_cols
        for i, record in enumerate(reader):
            if len(record) != n_cols:
                raise CsvFormatError(
                    f"expected {n_cols} fields, got {len(record)}", line=i + 2)
            d.set_row(i, [_parse_field(s) for s in record])
    return d


def save_csv(d: Dataset, path, delimiter: str = ",") -> None:
    """Write a Dataset back to CSV (missing cells as empty fields)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, delimiter=delimiter)
        writer.writerow(d.header)
        for row in d.cells:
            writer.writerow(
                ["" if v is MISSING else (repr(v) if isinstance(v, float) else v)
                 for v in row])


@dataclass(frozen=True)
class ColumnSpec:
    """One column's place in the learning problem."""

    index: int
    name: str
    kind: str  # NUMERIC | CATEGORICAL
    role: str  # FEATURE | LABEL | IGNORED


@dataclass(frozen=True)
class Schema:
    columns: tuple[ColumnSpec, ...]

    def features(self) -> list[ColumnSpec]:
        return [c for c in self.columns if c.role == FEATURE]

    def label(self) -> ColumnSpec:
        labels = [c for c in self.columns if c.role == LABEL]
        if len(labels) != 1:
            raise SchemaError(f"schema must have exactly one label column, "
                              f"found {len(labels)}")
        return labels[0]

    def spec(self, index: int) -> ColumnSpec:
        for c in self.columns:
            if c.index == index:
                return c
        raise SchemaError(f"no column with index {index} in schema")


def infer_schema(d: Dataset, label_column: str,
                 extra_ignored: Iterable[str] = ()) -> Schema:
    """Derive per-column kinds and roles from the loaded cells.

    A column is numeric iff every non-missing cell is numeric and it has at
    least two distinct non-missing values; otherwise it is categorical.
    Entirely-missing columns and columns named in the dataset's ignored set
    are marked ignored; ``label_column`` gets the label role.
    """
    j_label = d.find_column(label_column)
    ignored_names = set(d.ignored_columns) | set(extra_ignored)
    cols = []
    cells = d.cells
    for j in range(d.n_cols):
        all_numeric = True
        distinct = set()
        for i in range(d.n_rows):
            v = cells[i][j]
            if v is MISSING:
                continue
            if not isinstance(v, float):
                all_numeric = False
            distinct.add(v)
        if j == j_label:
            role = LABEL
        elif not distinct:
            role = IGNORED
        elif d.header[j] in ignored_names:
            role = IGNORED
        else:
            role = FEATURE
        kind = NUMERIC if (all_numeric and len(distinct) >= 2) else CATEGORICAL
        cols.append(ColumnSpec(j, d.header[j], kind, role))
    return Schema(tuple(cols))


class LabeledDataset:
    """A dataset plus its schema and the score mean used to binarize success.

    Every row's label cell is "successful" or "unsuccessful". Instances are
    treated as immutable once constructed and may be read concurrently.
    """

    def __init__(self, dataset: Dataset, schema: Schema, label_mean: float,
                 n_dropped: int = 0):
        self.dataset = dataset
        self.schema = schema
        self.label_mean = label_mean
        self.n_dropped = n_dropped
        self._encoded = None
        j = schema.label().index
        for i in range(dataset.n_rows):
            v = dataset.cells[i][j]
            if v != SUCCESSFUL and v != UNSUCCESSFUL:
                raise SchemaError(
                    f"row {i}: label cell must be '{SUCCESSFUL}' or "
                    f"'{UNSUCCESSFUL}', got {v!r}")

    @property
    def n_rows(self) -> int:
        return self.dataset.n_rows

    def encoded(self):
        """Cached columnar view used by the split-search kernels."""
        if self._encoded is None:
            from .encode import encode_labeled

            self._encoded = encode_labeled(self)
        return self._encoded


def derive_label(d: Dataset, score_column: str,
                 label_name: str = LABEL_COLUMN) -> LabeledDataset:
    """Binarize a numeric score column into the success label.

    Computes the arithmetic mean of the non-missing scores, then labels each
    row "successful" when its score is strictly greater than the mean and
    "unsuccessful" otherwise (a score exactly equal to the mean is
    unsuccessful). Rows with a missing score are dropped; the count is kept on
    the result. The score column's role is set to ignored so the label's own
    definition cannot leak back in as a feature.
    """
    if label_name == score_column:
        raise LabelError("label column name must differ from the score column")
    j = d.find_column(score_column)
    keep = []
    for i in range(d.n_rows):
        v = d.cells[i][j]
        if v is MISSING:
            continue
        if not isinstance(v, float):
            raise LabelError(
                f"score column {score_column!r} has non-numeric values")
        keep.append(i)
    if not keep:
        raise LabelError(f"score column {score_column!r} has no usable values")
    mean = math.fsum(d.cells[i][j] for i in keep) / len(keep)

    try:
        j_lab = d.find_column(label_name)
        header = list(d.header)
        n_cols = d.n_cols
    except ColumnNotFoundError:
        j_lab = d.n_cols
        header = list(d.header) + [label_name]
        n_cols = d.n_cols + 1

    out = Dataset(len(keep), n_cols, header=header)
    out.ignored_columns = d.ignored_columns
    for r, i in enumerate(keep):
        row = list(d.cells[i])
        label = SUCCESSFUL if d.cells[i][j] > mean else UNSUCCESSFUL
        if j_lab == len(row):
            row.append(label)
        else:
            row[j_lab] = label
        out.set_row(r, row)

    schema = infer_schema(out, label_name)
    if schema.columns[j].role == FEATURE:
        cols = list(schema.columns)
        old = cols[j]
        cols[j] = ColumnSpec(old.index, old.name, old.kind, IGNORED)
        schema = Schema(tuple(cols))
    return LabeledDataset(out, schema, mean, n_dropped=d.n_rows - len(keep))
