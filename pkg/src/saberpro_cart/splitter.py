"""Questions, class counting, Gini impurity, information gain and the
exhaustive greedy best-split search.

Everything here is a pure function of its inputs.  ``best_split`` is the hot
path: it prepares per-column numpy views and hands the threshold sweep to the
active kernel backend (compiled or pure Python, see :mod:`.backend`), both of
which reproduce exactly the arithmetic of :func:`gini` / :func:`info_gain`.

Semantics fixed here and relied on everywhere else:

* numeric question ``value >= threshold``; a missing value answers False;
* categorical question ``value == token``; a missing value carries the
  token ``"?"`` and therefore matches only ``== "?"``;
* candidate thresholds are the distinct observed values at the node
  (ascending); candidate tokens are the distinct observed tokens at the
  node (first-appearance order);
* ties in gain break toward the lowest column index, then the earliest
  candidate; a split whose best gain is 0 (or that leaves a side empty,
  which is the same thing) is no split at all.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from . import backend
from .dataset import (
    CATEGORICAL,
    FEATURE,
    NUMERIC,
    LabeledDataset,
    Value,
    is_missing,
    token_of,
)

OP_GE = ">="
OP_EQ = "=="


@dataclass(frozen=True)
class Question:
    """A single-column yes/no test: ``value >= threshold`` or ``token == t``."""

    col: int
    col_name: str
    op: str  # OP_GE (numeric) or OP_EQ (categorical)
    value: Union[float, str]

    def matches_value(self, value: Value) -> bool:
        """Answer the question for one cell value."""
        if self.op == OP_GE:
            # anything that is not an actual number (missing included)
            # fails a threshold test
            if not isinstance(value, float):
                return False
            return value >= self.value
        return token_of(value) == self.value

    def __str__(self) -> str:
        value = repr(self.value) if self.op == OP_GE else self.value
        return f"{self.col_name} {self.op} {value}?"


@dataclass(frozen=True)
class ClassCounts:
    """How many successful / unsuccessful rows a set of rows contains."""

    successful: int = 0
    unsuccessful: int = 0

    @property
    def total(self) -> int:
        return self.successful + self.unsuccessful


@dataclass(frozen=True)
class SplitResult:
    gain: float
    question: Question
    true_rows: list
    false_rows: list


def class_counts(rows: Sequence[int], labeled: LabeledDataset) -> ClassCounts:
    """Count labels among *rows* (empty input gives zero counts)."""
    labels = labeled.encoded().labels
    idx = np.asarray(rows, dtype=np.int64)
    s = int(labels[idx].sum())
    return ClassCounts(successful=s, unsuccessful=idx.size - s)


def gini(counts: ClassCounts) -> float:
    """Gini impurity ``1 - p_s^2 - p_u^2``; an empty node counts as pure."""
    n = counts.total
    if n == 0:
        return 0.0
    ps = counts.successful / n
    pu = counts.unsuccessful / n
    return 1.0 - ps * ps - pu * pu


def info_gain(parent: ClassCounts, true_side: ClassCounts,
              false_side: ClassCounts) -> float:
    """Row-weighted Gini decrease of splitting *parent* into the two sides."""
    n = parent.total
    if true_side.total + false_side.total != n:
        raise ValueError(
            "info_gain: child totals "
            f"{true_side.total}+{false_side.total} != parent total {n}"
        )
    if n == 0:
        return 0.0
    return (
        gini(parent)
        - (true_side.total / n) * gini(true_side)
        - (false_side.total / n) * gini(false_side)
    )


def match(q: Question, row: int, labeled: LabeledDataset) -> bool:
    """Answer *q* for one training row, checking the column kind first."""
    _check_kind(q, labeled)
    return q.matches_value(labeled.dataset.get(row, q.col))


def partition(rows: Sequence[int], q: Question,
              labeled: LabeledDataset) -> tuple:
    """Split *rows* into (matching, non-matching), preserving order."""
    _check_kind(q, labeled)
    d = labeled.dataset
    true_rows = []
    false_rows = []
    for r in rows:
        if q.matches_value(d.get(r, q.col)):
            true_rows.append(r)
        else:
            false_rows.append(r)
    return true_rows, false_rows


def candidate_questions(rows: Sequence[int], col: int,
                        labeled: LabeledDataset) -> list:
    """Every question the search would consider for *col* at this node."""
    spec = labeled.schema.spec(col)
    if spec.role != FEATURE:
        raise ValueError(f"column {spec.name!r} is not a feature column")
    d = labeled.dataset
    if spec.kind == NUMERIC:
        distinct = set()
        for r in rows:
            v = d.get(r, col)
            if not is_missing(v):
                distinct.add(v)
        return [Question(col, spec.name, OP_GE, v) for v in sorted(distinct)]
    seen = set()
    tokens = []
    for r in rows:
        t = token_of(d.get(r, col))
        if t not in seen:
            seen.add(t)
            tokens.append(t)
    return [Question(col, spec.name, OP_EQ, t) for t in tokens]


def best_split(rows: Sequence[int],
               labeled: LabeledDataset) -> Optional[SplitResult]:
    """Exhaustive greedy search for the highest-gain question over *rows*.

    Returns None when no question has positive gain (pure node, inseparable
    duplicates, or a depth-0 style degenerate node).  Deterministic: ties
    resolve to the lowest column index, then the earliest candidate.
    """
    if len(rows) == 0:
        raise ValueError("best_split requires at least one row")
    enc = labeled.encoded()
    idx = np.asarray(rows, dtype=np.int64)
    labs = np.ascontiguousarray(enc.labels[idx])
    tot_s = int(labs.sum())
    tot_u = int(labs.size) - tot_s
    if tot_s == 0 or tot_u == 0:
        return None  # pure node: every candidate's gain is exactly 0

    kern = backend.kernels()
    best_gain = 0.0
    best_col = None
    best_value: Union[float, str, None] = None
    best_code = -1

    for spec in labeled.schema.features():
        col = enc.columns[spec.index]
        if col.kind == NUMERIC:
            vals = col.values[idx]
            order = np.argsort(vals, kind="stable")  # NaNs sort to the end
            svals = np.ascontiguousarray(vals[order])
            slabs = np.ascontiguousarray(labs[order])
            n_miss = int(np.count_nonzero(np.isnan(vals)))
            if n_miss:
                miss_s = int(slabs[svals.size - n_miss:].sum())
                miss_u = n_miss - miss_s
                svals = svals[: svals.size - n_miss]
                slabs = slabs[: slabs.size - n_miss]
            else:
                miss_s = miss_u = 0
            gain, thr = kern.numeric_best(svals, slabs, miss_s, miss_u,
                                          tot_s, tot_u)
            if gain > best_gain:
                best_gain = gain
                best_col = spec
                best_value = float(thr)
                best_code = -1
        else:
            codes = np.ascontiguousarray(col.codes[idx])
            gain, code = kern.categorical_best(codes, labs, col.scratch_s,
                                               col.scratch_u,
                                               col.scratch_order,
                                               tot_s, tot_u)
            if gain > best_gain:
                best_gain = gain
                best_col = spec
                best_code = int(code)
                best_value = col.tokens[best_code]

    if best_col is None:
        return None

    col = enc.columns[best_col.index]
    if best_code < 0:
        question = Question(best_col.index, best_col.name, OP_GE, best_value)
        with np.errstate(invalid="ignore"):
            mask = col.values[idx] >= best_value  # NaN compares False
    else:
        question = Question(best_col.index, best_col.name, OP_EQ, best_value)
        mask = col.codes[idx] == best_code
    true_rows = idx[mask].tolist()
    false_rows = idx[~mask].tolist()
    return SplitResult(gain=best_gain, question=question,
                       true_rows=true_rows, false_rows=false_rows)


def _check_kind(q: Question, labeled: LabeledDataset) -> None:
    spec = labeled.schema.spec(q.col)
    expected = NUMERIC if q.op == OP_GE else CATEGORICAL
    if spec.kind != expected:
        raise ValueError(
            f"question op {q.op!r} does not fit {spec.kind} column "
            f"{spec.name!r}"
        )
