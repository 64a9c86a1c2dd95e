"""CART-style decision trees for predicting exam success from score tables.

The pipeline: load a CSV (:func:`load_csv`), binarize a numeric score column
into a success label (:func:`derive_label`), fit a depth-limited tree
(:func:`train`), then classify, evaluate, print or serialize the model.
The ``saberpro-cart`` console script drives the same steps in batch form.
"""

from .backend import (
    active_backend,
    available_backends,
    set_backend,
    use_backend,
)
from .dataset import (
    CATEGORICAL,
    FEATURE,
    IGNORED,
    LABEL,
    MISSING,
    NUMERIC,
    SUCCESSFUL,
    UNSUCCESSFUL,
    ColumnSpec,
    Dataset,
    LabeledDataset,
    Schema,
    Value,
    derive_label,
    infer_schema,
    is_missing,
    load_csv,
    save_csv,
    token_of,
)
from .errors import (
    BoundsError,
    CartError,
    ColumnNotFoundError,
    CsvFormatError,
    LabelError,
    ModelFormatError,
    ModelVersionError,
    SchemaError,
    ShapeError,
)
from .evaluation import (
    BenchPoint,
    BenchReport,
    EvalReport,
    bench,
    bench_table,
    compare_backends,
    evaluate,
    holdout_evaluate,
    synth_generate,
    synth_to_csv,
    train_test_split,
    write_bench_csv,
)
from .splitter import (
    OP_EQ,
    OP_GE,
    ClassCounts,
    Question,
    SplitResult,
    best_split,
    candidate_questions,
    class_counts,
    gini,
    info_gain,
    match,
    partition,
)
from .tree import (
    DEFAULT_MAX_DEPTH,
    Internal,
    Leaf,
    Model,
    build_tree,
    classify,
    classify_dataset,
    classify_rows,
    deserialize,
    feature_importance,
    load_model,
    predict,
    print_tree,
    save_model,
    serialize,
    train,
)

__version__ = "1.0.0"

__all__ = [
    "BenchPoint",
    "BenchReport",
    "BoundsError",
    "CATEGORICAL",
    "CartError",
    "ClassCounts",
    "ColumnNotFoundError",
    "ColumnSpec",
    "CsvFormatError",
    "DEFAULT_MAX_DEPTH",
    "Dataset",
    "EvalReport",
    "FEATURE",
    "IGNORED",
    "Internal",
    "LABEL",
    "LabelError",
    "LabeledDataset",
    "Leaf",
    "MISSING",
    "Model",
    "ModelFormatError",
    "ModelVersionError",
    "NUMERIC",
    "OP_EQ",
    "OP_GE",
    "Question",
    "Schema",
    "SchemaError",
    "ShapeError",
    "SplitResult",
    "SUCCESSFUL",
    "UNSUCCESSFUL",
    "Value",
    "active_backend",
    "available_backends",
    "bench",
    "bench_table",
    "best_split",
    "build_tree",
    "candidate_questions",
    "class_counts",
    "classify",
    "classify_dataset",
    "classify_rows",
    "compare_backends",
    "derive_label",
    "deserialize",
    "evaluate",
    "feature_importance",
    "gini",
    "holdout_evaluate",
    "infer_schema",
    "info_gain",
    "is_missing",
    "load_csv",
    "load_model",
    "match",
    "partition",
    "predict",
    "print_tree",
    "save_csv",
    "save_model",
    "serialize",
    "set_backend",
    "synth_generate",
    "synth_to_csv",
    "token_of",
    "train",
    "train_test_split",
    "use_backend",
    "write_bench_csv",
]
