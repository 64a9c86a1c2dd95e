"""Holdout evaluation, timing benchmarks and a synthetic data generator.

``train_test_split`` + ``evaluate`` implement the plain 70/30-style holdout
flow; ``bench`` times training and whole-set classification per depth and
reports the serialized model size (the "memory" figure).  ``synth_generate``
samples exam-shaped datasets labeled by a randomly planted tree so the large
benchmarks and property tests do not depend on any private data.
"""

from __future__ import annotations

import csv
import random
import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import backend
from .dataset import (
    MISSING,
    Dataset,
    LabeledDataset,
    derive_label,
)
from .tree import (
    DEFAULT_MAX_DEPTH,
    Model,
    classify_dataset,
    classify_rows,
    serialize,
    train,
)

DEFAULT_TEST_FRACTION = 0.3
DEFAULT_SEED = 42
DEFAULT_BENCH_DEPTHS = (3, 5, 7, 9, 11)


@dataclass(frozen=True)
class EvalReport:
    """Holdout result: accuracy, confusion and wall-clock times."""

    accuracy: float
    tp: int  # predicted successful, actually successful
    fp: int  # predicted successful, actually unsuccessful
    fn: int  # predicted unsuccessful, actually successful
    tn: int  # predicted unsuccessful, actually unsuccessful
    n_test: int
    train_seconds: float
    test_seconds: float


@dataclass(frozen=True)
class BenchPoint:
    depth: int
    train_seconds: float
    test_seconds: float
    model_bytes: int


@dataclass(frozen=True)
class BenchReport:
    backend: str
    points: tuple


def train_test_split(labeled: LabeledDataset, test_fraction: float,
                     seed: int) -> tuple:
    """Seeded random row partition; returns (train_rows, test_rows) sorted.

    Test size is round(n * test_fraction) clamped into [1, n-1], so both
    sides are always non-empty.  Same seed, same split.
    """
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(
            f"test_fraction must be strictly between 0 and 1, "
            f"got {test_fraction}"
        )
    n = labeled.n_rows
    if n < 2:
        raise ValueError("need at least 2 rows to split")
    indices = list(range(n))
    random.Random(seed).shuffle(indices)
    n_test = min(max(round(n * test_fraction), 1), n - 1)
    test_rows = sorted(indices[:n_test])
    train_rows = sorted(indices[n_test:])
    return train_rows, test_rows


def evaluate(model: Model, test_rows: Sequence[int],
             labeled: LabeledDataset,
             train_seconds: float = 0.0) -> EvalReport:
    """Classify *test_rows* and tally accuracy and the confusion counts."""
    if len(test_rows) == 0:
        raise ValueError("evaluate requires a non-empty test set")
    t0 = time.perf_counter()
    p = classify_rows(model, test_rows, labeled)
    test_seconds = time.perf_counter() - t0

    actual = labeled.encoded().labels[np.asarray(test_rows, dtype=np.int64)]
    actual_s = actual == 1
    predicted_s = p > 0.5
    tp = int(np.count_nonzero(predicted_s & actual_s))
    fp = int(np.count_nonzero(predicted_s & ~actual_s))
    fn = int(np.count_nonzero(~predicted_s & actual_s))
    tn = int(np.count_nonzero(~predicted_s & ~actual_s))
    n_test = len(test_rows)
    return EvalReport(
        accuracy=(tp + tn) / n_test,
        tp=tp, fp=fp, fn=fn, tn=tn,
        n_test=n_test,
        train_seconds=train_seconds,
        test_seconds=test_seconds,
    )


def holdout_evaluate(labeled: LabeledDataset,
                     test_fraction: float = DEFAULT_TEST_FRACTION,
                     seed: int = DEFAULT_SEED,
                     max_depth: int = DEFAULT_MAX_DEPTH) -> tuple:
    """Split, fit on the train side, score the test side.

    Returns (model, EvalReport); the report carries the training time.
    """
    train_rows, test_rows = train_test_split(labeled, test_fraction, seed)
    t0 = time.perf_counter()
    model = train(labeled, max_depth=max_depth, rows=train_rows)
    train_seconds = time.perf_counter() - t0
    report = evaluate(model, test_rows, labeled, train_seconds=train_seconds)
    return model, report


# ---------------------------------------------------------------------------
# benchmarking


def bench(labeled: LabeledDataset,
          depths: Sequence[int] = DEFAULT_BENCH_DEPTHS) -> BenchReport:
    """Time full-set training and full-set classification per depth."""
    depth_list = list(depths)
    if not depth_list:
        raise ValueError("bench requires at least one depth")
    for d in depth_list:
        if d < 0:
            raise ValueError(f"depths must be non-negative, got {d}")
    points = []
    for d in depth_list:
        t0 = time.perf_counter()
        model = train(labeled, max_depth=d)
        t1 = time.perf_counter()
        classify_dataset(model, labeled)
        t2 = time.perf_counter()
        points.append(BenchPoint(
            depth=d,
            train_seconds=t1 - t0,
            test_seconds=t2 - t1,
            model_bytes=len(serialize(model).encode("utf-8")),
        ))
    return BenchReport(backend=backend.active_backend(),
                       points=tuple(points))


def compare_backends(labeled: LabeledDataset,
                     depths: Sequence[int] = DEFAULT_BENCH_DEPTHS) -> list:
    """Run :func:`bench` once per available kernel backend."""
    reports = []
    for name in backend.available_backends():
        with backend.use_backend(name):
            reports.append(bench(labeled, depths))
    return reports


_BENCH_COLUMNS = ("depth", "train_seconds", "test_seconds", "model_bytes")


def bench_table(report: BenchReport) -> str:
    """Aligned plain-text table of one bench run."""
    rows = [_BENCH_COLUMNS]
    for p in report.points:
        rows.append((str(p.depth), f"{p.train_seconds:.3f}",
                     f"{p.test_seconds:.3f}", str(p.model_bytes)))
    widths = [max(len(r[j]) for r in rows) for j in range(len(_BENCH_COLUMNS))]
    lines = ["  ".join(cell.rjust(widths[j]) for j, cell in enumerate(row))
             for row in rows]
    return "\n".join(lines)


def write_bench_csv(report: BenchReport, path) -> None:
    """Machine-readable form of the same numbers."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(_BENCH_COLUMNS)
        for p in report.points:
            writer.writerow([p.depth, f"{p.train_seconds:.6f}",
                             f"{p.test_seconds:.6f}", p.model_bytes])


# ---------------------------------------------------------------------------
# synthetic data


SYNTH_SCORE_COLUMN = "punt_global"

_SYNTH_NUMERIC = (
    "punt_matematicas",
    "punt_lectura_critica",
    "punt_ciencias_naturales",
    "punt_sociales_ciudadanas",
    "punt_ingles",
    "punt_razonamiento",
)
_SYNTH_CATEGORICAL = (
    ("estu_genero", ("F", "M")),
    ("fami_estrato", ("estrato_1", "estrato_2", "estrato_3",
                      "estrato_4", "estrato_5", "estrato_6")),
    ("cole_naturaleza", ("oficial", "no_oficial")),
)
# small missing-value rates on one numeric and one categorical column
_MISS_NUMERIC_COL = "punt_ingles"
_MISS_NUMERIC_RATE = 0.03
_MISS_CATEGORICAL_COL = "estu_genero"
_MISS_CATEGORICAL_RATE = 0.02


class _PlantLeaf:
    __slots__ = ("label",)

    def __init__(self, label):
        self.label = label


class _PlantSplit:
    __slots__ = ("name", "threshold", "true_branch", "false_branch")

    def __init__(self, name, threshold, true_branch, false_branch):
        self.name = name
        self.threshold = threshold
        self.true_branch = true_branch
        self.false_branch = false_branch


def synth_generate(n_rows: int, planted_depth: int, noise: float,
                   seed: int) -> LabeledDataset:
    """Deterministic synthetic student records labeled by a planted tree.

    Feature columns mimic exam data: six numeric scores in [0, 100] (one
    with a few missing values) and three categorical socioeconomic columns.
    A random depth-`planted_depth` tree assigns each row a class, each label
    flips with probability *noise*, and the class is then written into a
    0/100 ``punt_global`` score so the ordinary score-above-mean labeling
    reproduces it exactly.  At ``noise=0`` the labels are therefore exactly
    realizable by a tree of the planted depth.
    """
    _, labeled = _synth_with_raw(n_rows, planted_depth, noise, seed)
    return labeled


def synth_to_csv(path, n_rows: int, planted_depth: int, noise: float,
                 seed: int, delimiter: str = ",") -> LabeledDataset:
    """Write the raw synthetic table (score column, no label column)."""
    from .dataset import save_csv

    raw, labeled = _synth_with_raw(n_rows, planted_depth, noise, seed)
    save_csv(raw, path, delimiter=delimiter)
    return labeled


def _synth_with_raw(n_rows, planted_depth, noise, seed):
    if n_rows < 2:
        raise ValueError("n_rows must be at least 2")
    if planted_depth < 0:
        raise ValueError("planted_depth must be non-negative")
    if not 0.0 <= noise < 0.5:
        raise ValueError(f"noise must be in [0, 0.5), got {noise}")
    for attempt in range(64):
        attempt_seed = seed if attempt == 0 else seed * 1000003 + attempt
        raw = _sample_raw(n_rows, planted_depth, noise, attempt_seed)
        labeled = derive_label(raw, SYNTH_SCORE_COLUMN)
        # retry (rare, tiny datasets only) until both classes are present
        if 0.0 < labeled.label_mean < 100.0:
            return raw, labeled
    raise ValueError(
        "could not generate a two-class dataset; increase n_rows, "
        "planted_depth or noise"
    )


def _sample_raw(n_rows, planted_depth, noise, seed) -> Dataset:
    gen = np.random.default_rng(seed)
    struct = random.Random(seed)

    numeric = {
        name: np.round(gen.uniform(0.0, 100.0, n_rows), 1)
        for name in _SYNTH_NUMERIC
    }
    categorical = {
        name: gen.integers(0, len(tokens), n_rows)
        for name, tokens in _SYNTH_CATEGORICAL
    }
    miss_numeric = gen.random(n_rows) < _MISS_NUMERIC_RATE
    miss_categorical = gen.random(n_rows) < _MISS_CATEGORICAL_RATE
    flips = gen.random(n_rows) < noise

    planted = _plant_tree(struct, planted_depth)
    labels = _route_planted(planted, numeric, miss_numeric, n_rows)
    labels = labels ^ flips
    scores = np.where(labels, 100.0, 0.0)

    header = (list(_SYNTH_NUMERIC)
              + [name for name, _ in _SYNTH_CATEGORICAL]
              + [SYNTH_SCORE_COLUMN])
    d = Dataset(n_rows, len(header), header=header)
    token_tables = dict(_SYNTH_CATEGORICAL)
    numeric_lists = {name: numeric[name].tolist() for name in _SYNTH_NUMERIC}
    cat_lists = {name: categorical[name].tolist()
                 for name in categorical}
    score_list = scores.tolist()
    for i in range(n_rows):
        row = []
        for name in _SYNTH_NUMERIC:
            if name == _MISS_NUMERIC_COL and miss_numeric[i]:
                row.append(MISSING)
            else:
                row.append(numeric_lists[name][i])
        for name, tokens in _SYNTH_CATEGORICAL:
            if name == _MISS_CATEGORICAL_COL and miss_categorical[i]:
                row.append(MISSING)
            else:
                row.append(token_tables[name][cat_lists[name][i]])
        row.append(score_list[i])
        d.set_row(i, row)
    return d


def _plant_tree(struct: random.Random, depth: int):
    """Random chain-shaped truth tree thresholding one numeric column.

    The chain descends on the false side with strictly decreasing
    thresholds, so the labels form alternating value intervals on a single
    (seed-chosen) column.  The shape is deliberate: for interval labels the
    best Gini cut provably falls on an interval boundary and removes it,
    so a greedy fit of depth planted_depth reaches purity on noise-free
    data.  An arbitrary random tree does not grant that (parity-style
    sibling labels can leave the true root split with ~zero gain), and the
    noise-free training-consistency guarantee would silently become
    probabilistic.  The other eight columns still participate in the fit
    as distractors; they just carry no label signal.

    Thresholds sit near the equal-mass grid (each of the depth+1 bands
    keeps roughly an equal share of the uniform column), not at random
    fractions of the remaining range: a band with only a handful of rows
    gives every boundary cut through it a tiny gain, and at small n an
    unrelated column that happens to isolate those few rows can then beat
    the real boundary and spend the depth budget elsewhere.
    """
    name = struct.choice(_SYNTH_NUMERIC)
    spacing = 100.0 / (depth + 1)
    cuts = [spacing * (depth - k) + spacing * struct.uniform(-0.25, 0.25)
            for k in range(depth)]

    def plant(level):
        if level == depth:
            return _PlantLeaf(depth % 2)
        return _PlantSplit(name, cuts[level], _PlantLeaf(level % 2),
                           plant(level + 1))

    return plant(0)


def _route_planted(node, numeric, miss_numeric, n_rows) -> np.ndarray:
    """Vectorized planted-tree routing; mirrors the real question
    semantics, i.e. a missing value fails its threshold test."""
    labels = np.zeros(n_rows, dtype=bool)
    stack = [(node, np.arange(n_rows, dtype=np.int64))]
    while stack:
        nd, sel = stack.pop()
        if sel.size == 0:
            continue
        if isinstance(nd, _PlantLeaf):
            labels[sel] = bool(nd.label)
            continue
        mask = numeric[nd.name][sel] >= nd.threshold
        if nd.name == _MISS_NUMERIC_COL:
            mask &= ~miss_numeric[sel]
        stack.append((nd.true_branch, sel[mask]))
        stack.append((nd.false_branch, sel[~mask]))
    return labels
