"""Batch command-line interface.

Subcommands: train, predict, evaluate, print, bench, importance, synth.
Exit status: 0 on success, 1 on a usage/argument error, 2 on a data or
model error (unreadable files, malformed CSV/model text, schema mismatch).
"""

from __future__ import annotations

import argparse
import csv
import sys

from . import backend
from .dataset import derive_label, load_csv
from .errors import CartError
from .evaluation import (
    DEFAULT_SEED,
    DEFAULT_TEST_FRACTION,
    bench,
    bench_table,
    compare_backends,
    holdout_evaluate,
    synth_to_csv,
    write_bench_csv,
)
from .tree import (
    DEFAULT_MAX_DEPTH,
    Internal,
    classify_dataset,
    feature_importance,
    load_model,
    predict,
    print_tree,
    save_model,
    train,
)


class UsageError(Exception):
    """Bad flags or flag values; maps to exit status 1."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage problems; the CLI contract
    # reserves 2 for data/model errors, so route through UsageError instead
    def error(self, message):
        raise UsageError(message)


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except CartError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="saberpro-cart",
        description="Decision-tree success prediction for exam-score tables",
    )
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    p = sub.add_parser("train", help="fit a tree and write the model file")
    _add_data_flags(p, with_label=True)
    p.add_argument("--max-depth", type=int, default=DEFAULT_MAX_DEPTH,
                   help="depth limit (default %(default)s)")
    p.add_argument("--out", required=True, help="model file to write")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("predict", help="classify every row of a CSV")
    p.add_argument("--model", required=True, help="model file from train")
    p.add_argument("--data", required=True, help="CSV of rows to classify")
    p.add_argument("--delimiter", default=",", help="CSV field delimiter")
    p.add_argument("--out", required=True, help="predictions CSV to write")
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("evaluate", help="holdout split, fit, and score")
    _add_data_flags(p, with_label=True)
    p.add_argument("--test-fraction", type=float,
                   default=DEFAULT_TEST_FRACTION,
                   help="held-out share (default %(default)s)")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED,
                   help="split seed (default %(default)s)")
    p.add_argument("--max-depth", type=int, default=DEFAULT_MAX_DEPTH,
                   help="depth limit (default %(default)s)")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("print", help="render a model as an indented tree")
    p.add_argument("--model", required=True)
    p.add_argument("--color", action=argparse.BooleanOptionalAction,
                   default=False, help="colorize leaves by predicted class")
    p.set_defaults(func=_cmd_print)

    p = sub.add_parser("bench",
                       help="time training/classification per depth")
    _add_data_flags(p, with_label=True)
    p.add_argument("--depths", default="3,5,7,9,11",
                   help="comma-separated depth list (default %(default)s)")
    p.add_argument("--out", default="bench.csv",
                   help="timings CSV to write (default %(default)s)")
    p.add_argument("--compare-backends", action="store_true",
                   help="run once per available split-kernel backend")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("importance",
                       help="print per-column split importance")
    p.add_argument("--model", required=True)
    p.set_defaults(func=_cmd_importance)

    p = sub.add_parser("synth", help="write a synthetic scores CSV")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--planted-depth", type=int, default=3,
                   help="depth of the hidden labeling tree "
                        "(default %(default)s)")
    p.add_argument("--noise", type=float, default=0.05,
                   help="label flip probability (default %(default)s)")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--delimiter", default=",")
    p.add_argument("--out", required=True, help="CSV file to write")
    p.set_defaults(func=_cmd_synth)

    return parser


def _add_data_flags(p, with_label: bool) -> None:
    p.add_argument("--data", required=True, help="input CSV file")
    if with_label:
        p.add_argument("--label-column", required=True,
                       help="numeric score column; rows strictly above its "
                            "mean count as successful")
    p.add_argument("--delimiter", default=",", help="CSV field delimiter")
    p.add_argument("--ignore", default="",
                   help="comma-separated column names to exclude "
                        "from the features")


def _load_labeled(args):
    ignored = tuple(
        name.strip() for name in args.ignore.split(",") if name.strip()
    )
    d = load_csv(args.data, delimiter=args.delimiter, ignored=ignored)
    return derive_label(d, args.label_column)


def _check_max_depth(value: int) -> int:
    if value < 0:
        raise UsageError("--max-depth must be non-negative")
    return value


def _cmd_train(args) -> int:
    labeled = _load_labeled(args)
    model = train(labeled, max_depth=_check_max_depth(args.max_depth))
    save_model(model, args.out)
    print(f"trained on {model.trained_rows} rows "
          f"(max_depth={model.max_depth}, leaves={_leaf_count(model.root)}); "
          f"model written to {args.out}")
    return 0


def _leaf_count(node) -> int:
    if isinstance(node, Internal):
        return _leaf_count(node.true_branch) + _leaf_count(node.false_branch)
    return 1


def _cmd_predict(args) -> int:
    model = load_model(args.model)
    d = load_csv(args.data, delimiter=args.delimiter)
    p = classify_dataset(model, d)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["row_index", "p_success", "predicted_label"])
        for i in range(d.n_rows):
            pi = float(p[i])
            writer.writerow([i, f"{pi:.6f}", predict(pi)])
    print(f"classified {d.n_rows} rows; predictions written to {args.out}")
    return 0


def _cmd_evaluate(args) -> int:
    if not 0.0 < args.test_fraction < 1.0:
        raise UsageError("--test-fraction must be strictly between 0 and 1")
    _check_max_depth(args.max_depth)
    labeled = _load_labeled(args)
    if labeled.n_rows < 2:
        raise UsageError("need at least 2 labeled rows to split")
    model, report = holdout_evaluate(
        labeled, test_fraction=args.test_fraction, seed=args.seed,
        max_depth=args.max_depth,
    )
    n_train = labeled.n_rows - report.n_test
    print(f"rows: {labeled.n_rows}  train: {n_train}  test: {report.n_test}")
    print(f"accuracy: {report.accuracy:.4f}")
    print(f"confusion: tp={report.tp} fp={report.fp} "
          f"fn={report.fn} tn={report.tn}")
    print(f"train_seconds: {report.train_seconds:.3f}  "
          f"test_seconds: {report.test_seconds:.3f}")
    return 0


def _cmd_print(args) -> int:
    model = load_model(args.model)
    print(print_tree(model, color=args.color))
    return 0


def _cmd_bench(args) -> int:
    depths = _parse_depths(args.depths)
    labeled = _load_labeled(args)
    if args.compare_backends:
        reports = compare_backends(labeled, depths)
        for report in reports:
            print(f"backend: {report.backend}")
            print(bench_table(report))
            print()
        if len(reports) > 1:
            base = {p.depth: p.train_seconds for p in reports[-1].points}
            fast = reports[0]
            ratios = ", ".join(
                f"depth {p.depth}: {base[p.depth] / p.train_seconds:.1f}x"
                for p in fast.points if p.train_seconds > 0
            )
            print(f"train speedup of {fast.backend} over "
                  f"{reports[-1].backend}: {ratios}")
        active = next(r for r in reports
                      if r.backend == backend.active_backend())
        write_bench_csv(active, args.out)
    else:
        report = bench(labeled, depths)
        print(f"backend: {report.backend}")
        print(bench_table(report))
        write_bench_csv(report, args.out)
    print(f"timings written to {args.out}")
    return 0


def _parse_depths(text: str):
    parts = [part.strip() for part in text.split(",") if part.strip()]
    if not parts:
        raise UsageError("--depths must list at least one depth")
    depths = []
    for part in parts:
        try:
            value = int(part)
        except ValueError:
            raise UsageError(f"--depths: {part!r} is not an integer") \
                from None
        if value < 0:
            raise UsageError("--depths values must be non-negative")
        depths.append(value)
    return depths


def _cmd_importance(args) -> int:
    model = load_model(args.model)
    weights = feature_importance(model)
    for name, weight in sorted(weights.items(),
                               key=lambda kv: (-kv[1], kv[0])):
        print(f"{name} {weight:.6f}")
    return 0


def _cmd_synth(args) -> int:
    if args.rows < 2:
        raise UsageError("--rows must be at least 2")
    if args.planted_depth < 0:
        raise UsageError("--planted-depth must be non-negative")
    if not 0.0 <= args.noise < 0.5:
        raise UsageError("--noise must be in [0, 0.5)")
    try:
        labeled = synth_to_csv(args.out, args.rows, args.planted_depth,
                               args.noise, args.seed,
                               delimiter=args.delimiter)
    except ValueError as exc:  # e.g. parameters that cannot yield 2 classes
        raise UsageError(str(exc)) from None
    share = labeled.label_mean / 100.0
    print(f"wrote {args.rows} rows to {args.out} "
          f"(successful share {share:.3f})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
