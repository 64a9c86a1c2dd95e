"""Columnar numeric views of datasets for the split-search kernels and batch
classification.

Numeric columns become float64 arrays with NaN marking missing cells;
categorical columns become int32 code arrays with a per-column token table in
first-appearance order (missing cells carry the "?" token's code). Both
backends consume the same views, so candidate order and arithmetic agree.
"""

from __future__ import annotations

import numpy as np

from .dataset import MISSING, NUMERIC, SUCCESSFUL, Dataset, Schema, token_of
from .errors import ColumnNotFoundError, SchemaError


class EncodedColumn:
    __slots__ = ("kind", "values", "codes", "tokens", "token_index",
                 "scratch_s", "scratch_u", "scratch_order")

    def __init__(self, kind, values=None, codes=None, tokens=None):
        self.kind = kind
        self.values = values
        self.codes = codes
        self.tokens = tokens
        self.token_index = None if tokens is None else \
            {t: c for c, t in enumerate(tokens)}
        if tokens is not None:
            # per-column scratch for the categorical kernel; dirty-reset by
            # the kernel so one allocation serves every node
            n = len(tokens)
            # np.longlong (not int64) so the buffer format matches the
            # compiled kernel's `long long` memoryviews on every platform
            self.scratch_s = np.zeros(n, dtype=np.longlong)
            self.scratch_u = np.zeros(n, dtype=np.longlong)
            self.scratch_order = np.empty(n, dtype=np.intc)
        else:
            self.scratch_s = self.scratch_u = self.scratch_order = None


class EncodedMatrix:
    __slots__ = ("labels", "feature_cols", "columns", "n_rows")

    def __init__(self, labels, feature_cols, columns, n_rows):
        self.labels = labels
        self.feature_cols = feature_cols
        self.columns = columns
        self.n_rows = n_rows


def _encode_numeric(cells, j, n) -> np.ndarray:
    vals = np.empty(n, dtype=np.float64)
    for i in range(n):
        v = cells[i][j]
        vals[i] = np.nan if v is MISSING else v
    return vals


def _encode_numeric_lenient(cells, j, n) -> np.ndarray:
    # external records may put anything in a numeric column; non-numbers act
    # as missing, matching the question-evaluation rule
    vals = np.empty(n, dtype=np.float64)
    for i in range(n):
        v = cells[i][j]
        vals[i] = v if isinstance(v, float) else np.nan
    return vals


def _encode_categorical(cells, j, n):
    index: dict[str, int] = {}
    tokens: list[str] = []
    codes = np.empty(n, dtype=np.intc)
    for i in range(n):
        t = token_of(cells[i][j])
        code = index.get(t)
        if code is None:
            code = len(tokens)
            index[t] = code
            tokens.append(t)
        codes[i] = code
    return codes, tokens


def encode_labeled(labeled) -> EncodedMatrix:
    """Build the cached columnar view of a labeled dataset."""
    d = labeled.dataset
    schema = labeled.schema
    n = d.n_rows
    j_label = schema.label().index
    cells = d.cells
    labels = np.empty(n, dtype=np.uint8)
    for i in range(n):
        labels[i] = 1 if cells[i][j_label] == SUCCESSFUL else 0

    columns = {}
    feature_cols = []
    for spec in schema.features():
        feature_cols.append(spec.index)
        if spec.kind == NUMERIC:
            columns[spec.index] = EncodedColumn(
                NUMERIC, values=_encode_numeric(cells, spec.index, n))
        else:
            codes, tokens = _encode_categorical(cells, spec.index, n)
            columns[spec.index] = EncodedColumn(
                spec.kind, codes=codes, tokens=tokens)
    return EncodedMatrix(labels, feature_cols, columns, n)


def encode_for_model(dataset: Dataset, model_schema: Schema):
    """Columnar view of an arbitrary dataset, keyed by the model's feature
    column indices and matched by column name.

    Raises SchemaError when the dataset lacks a column the model needs.
    """
    n = dataset.n_rows
    cells = dataset.cells
    columns = {}
    for spec in model_schema.columns:
        try:
            j = dataset.find_column(spec.name)
        except ColumnNotFoundError:
            raise SchemaError(
                f"model feature column {spec.name!r} missing from dataset") from None
        if spec.kind == NUMERIC:
            columns[spec.index] = EncodedColumn(
                NUMERIC, values=_encode_numeric_lenient(cells, j, n))
        else:
            codes, tokens = _encode_categorical(cells, j, n)
            columns[spec.index] = EncodedColumn(
                spec.kind, codes=codes, tokens=tokens)
    return columns, n
