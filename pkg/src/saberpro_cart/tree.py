"""Decision-tree construction, classification and the model text format.

A model is an immutable binary tree of :class:`Internal` question nodes and
:class:`Leaf` nodes carrying class counts.  Construction recurses on the
greedy best split until the depth budget runs out or no question has positive
gain.  A leaf predicts the share of successful training rows that reached it;
the label rule is strictly ``p > 0.5 -> "successful"``.

Serialization is a small line-oriented text format::

    saberpro-cart v1
    meta max_depth=9 label_mean=0.52 trained_rows=4
    col 0 numeric "punt_sociales"
    (split 0 >= 55.0 (leaf 2 0) (leaf 0 2))

Header and ``col`` lines are fixed-position; the tree is one s-expression
with whitespace-separated tokens.  Reals print via ``repr`` (shortest
round-trip form), so serialize -> deserialize -> serialize is byte-identical.
Leaf gini and p_success are recomputed from the counts on load, never stored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .dataset import (
    CATEGORICAL,
    FEATURE,
    NUMERIC,
    SUCCESSFUL,
    UNSUCCESSFUL,
    ColumnSpec,
    Dataset,
    LabeledDataset,
    Schema,
)
from .encode import encode_for_model
from .errors import ModelFormatError, ModelVersionError, SchemaError
from .splitter import (
    OP_EQ,
    OP_GE,
    ClassCounts,
    Question,
    best_split,
    class_counts,
    gini,
    info_gain,
)

DEFAULT_MAX_DEPTH = 9

_FORMAT_NAME = "saberpro-cart"
_FORMAT_VERSION = "v1"

GREEN = "\x1b[32m"
RED = "\x1b[31m"
RESET = "\x1b[0m"


@dataclass(frozen=True)
class Leaf:
    counts: ClassCounts
    gini: float
    p_success: float


@dataclass(frozen=True)
class Internal:
    question: Question
    true_branch: "TreeNode"
    false_branch: "TreeNode"


TreeNode = Union[Leaf, Internal]


@dataclass(frozen=True)
class Model:
    """A trained tree plus the feature schema needed to apply it."""

    root: TreeNode
    schema: Schema  # feature columns only, with their training indices
    max_depth: int
    label_mean: float
    trained_rows: int


def make_leaf(counts: ClassCounts) -> Leaf:
    """Build a leaf, deriving gini and p_success from the counts."""
    if counts.total <= 0:
        raise ValueError("a leaf needs at least one row")
    return Leaf(counts=counts, gini=gini(counts),
                p_success=counts.successful / counts.total)


def build_tree(rows: Sequence[int], labeled: LabeledDataset, depth: int,
               max_depth: int) -> TreeNode:
    """Recursively grow the subtree for *rows* at the given depth."""
    if len(rows) == 0:
        raise ValueError("build_tree requires at least one row")
    if depth > max_depth:
        raise ValueError(f"depth {depth} exceeds max_depth {max_depth}")
    if depth == max_depth:
        return make_leaf(class_counts(rows, labeled))
    split = best_split(rows, labeled)
    if split is None:
        return make_leaf(class_counts(rows, labeled))
    return Internal(
        question=split.question,
        true_branch=build_tree(split.true_rows, labeled, depth + 1, max_depth),
        false_branch=build_tree(split.false_rows, labeled, depth + 1,
                                max_depth),
    )


def train(labeled: LabeledDataset, max_depth: int = DEFAULT_MAX_DEPTH,
          rows: Optional[Sequence[int]] = None) -> Model:
    """Fit a tree on *labeled* (all rows, or just *rows* when given)."""
    if max_depth < 0:
        raise ValueError("max_depth must be non-negative")
    row_list = list(range(labeled.n_rows)) if rows is None else list(rows)
    if not row_list:
        raise ValueError("cannot train on an empty dataset")
    root = build_tree(row_list, labeled, 0, max_depth)
    feature_schema = Schema(columns=tuple(labeled.schema.features()))
    return Model(root=root, schema=feature_schema, max_depth=max_depth,
                 label_mean=labeled.label_mean,
                 trained_rows=len(row_list))


# ---------------------------------------------------------------------------
# classification


def classify(row, model: Model, data=None) -> tuple:
    """Route one row or record to its leaf; returns (leaf, p_success).

    *row* is either a mapping of column name -> value, or a row index into
    *data* (a Dataset or LabeledDataset).  Every feature column of the model
    must be present (a missing value is fine; a missing column is not).
    """
    if isinstance(row, Mapping):
        getter = _record_getter(row, model)
    else:
        if data is None:
            raise ValueError("classifying by row index requires a dataset")
        dataset = data.dataset if isinstance(data, LabeledDataset) else data
        record = {}
        for spec in model.schema.columns:
            j = dataset.find_column(spec.name)
            record[spec.name] = dataset.get(row, j)
        getter = _record_getter(record, model)

    node = model.root
    while isinstance(node, Internal):
        q = node.question
        node = node.true_branch if q.matches_value(getter(q.col_name)) \
            else node.false_branch
    return node, node.p_success


def _record_getter(record: Mapping, model: Model):
    for spec in model.schema.columns:
        if spec.name not in record:
            raise SchemaError(
                f"record is missing model feature column {spec.name!r}"
            )

    def get(name):
        v = record[name]
        # plain ints are a natural way to hand in scores
        if isinstance(v, int) and not isinstance(v, bool):
            return float(v)
        return v

    return get


def classify_rows(model: Model, rows: Sequence[int],
                  data) -> np.ndarray:
    """p_success for each of *rows* (vectorized; order follows *rows*)."""
    dataset = data.dataset if isinstance(data, LabeledDataset) else data
    columns, _ = encode_for_model(dataset, model.schema)
    idx = np.asarray(rows, dtype=np.int64)
    out = np.empty(idx.size, dtype=np.float64)
    stack = [(model.root, np.arange(idx.size, dtype=np.int64))]
    while stack:
        node, sel = stack.pop()
        if sel.size == 0:
            continue
        if isinstance(node, Leaf):
            out[sel] = node.p_success
            continue
        q = node.question
        col = columns[q.col]
        row_idx = idx[sel]
        if q.op == OP_GE:
            with np.errstate(invalid="ignore"):
                mask = col.values[row_idx] >= q.value  # NaN compares False
        else:
            code = -1 if col.token_index is None \
                else col.token_index.get(q.value, -1)
            mask = col.codes[row_idx] == code
        stack.append((node.true_branch, sel[mask]))
        stack.append((node.false_branch, sel[~mask]))
    return out


def classify_dataset(model: Model, data) -> np.ndarray:
    """p_success for every row of a dataset."""
    dataset = data.dataset if isinstance(data, LabeledDataset) else data
    return classify_rows(model, range(dataset.n_rows), dataset)


def predict(p_success: float) -> str:
    """Strictly-greater-than-half rule; exactly 0.5 is unsuccessful."""
    return SUCCESSFUL if p_success > 0.5 else UNSUCCESSFUL


# ---------------------------------------------------------------------------
# inspection


def print_tree(model: Model, color: bool = False) -> str:
    """Indented rendering of the tree, one node per line.

    With *color* on, leaves predicting success are green and the rest red;
    with it off the output contains no escape sequences.
    """
    lines = []

    def emit(node: TreeNode, prefix: str, indent: str) -> None:
        if isinstance(node, Leaf):
            body = (
                f"Leaf p={node.p_success * 100:.1f}% gini={node.gini:.4f} "
                f"counts={{successful: {node.counts.successful}, "
                f"unsuccessful: {node.counts.unsuccessful}}}"
            )
            if color:
                paint = GREEN if node.p_success > 0.5 else RED
                body = f"{paint}{body}{RESET}"
            lines.append(f"{indent}{prefix}{body}")
            return
        lines.append(f"{indent}{prefix}{node.question}")
        emit(node.true_branch, "True: ", indent + "  ")
        emit(node.false_branch, "False: ", indent + "  ")

    emit(model.root, "", "")
    return "\n".join(lines)


def feature_importance(model: Model) -> dict:
    """Row-weighted gain contributed by each split column, normalized to 1.

    Gains are recomputed from the leaf counts, so the result is available
    for deserialized models too.  A leaf-only model gives an empty mapping.
    """
    raw: dict = {}

    def walk(node: TreeNode) -> ClassCounts:
        if isinstance(node, Leaf):
            return node.counts
        ct = walk(node.true_branch)
        cf = walk(node.false_branch)
        parent = ClassCounts(successful=ct.successful + cf.successful,
                             unsuccessful=ct.unsuccessful + cf.unsuccessful)
        gain = info_gain(parent, ct, cf)
        if gain > 0.0:
            weight = parent.total / model.trained_rows
            name = node.question.col_name
            raw[name] = raw.get(name, 0.0) + weight * gain
        return parent

    walk(model.root)
    total = math.fsum(raw.values())
    if total <= 0.0:
        return {}
    return {spec.name: raw[spec.name] / total
            for spec in model.schema.columns if spec.name in raw}


# ---------------------------------------------------------------------------
# serialization


def serialize(model: Model) -> str:
    """Render *model* in the text format described in the module docstring."""
    lines = [f"{_FORMAT_NAME} {_FORMAT_VERSION}"]
    lines.append(
        f"meta max_depth={model.max_depth} "
        f"label_mean={_format_real(model.label_mean)} "
        f"trained_rows={model.trained_rows}"
    )
    for spec in model.schema.columns:
        lines.append(f"col {spec.index} {spec.kind} {_quote(spec.name)}")
    lines.append(_node_text(model.root))
    return "\n".join(lines) + "\n"


def _node_text(node: TreeNode) -> str:
    if isinstance(node, Leaf):
        return f"(leaf {node.counts.successful} {node.counts.unsuccessful})"
    q = node.question
    value = _format_real(q.value) if q.op == OP_GE else _maybe_quote(q.value)
    return (f"(split {q.col} {q.op} {value} "
            f"{_node_text(node.true_branch)} "
            f"{_node_text(node.false_branch)})")


def _format_real(x: float) -> str:
    return repr(float(x))


_QUOTE_TRIGGERS = set(' \t\r\n()"\\')


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _maybe_quote(s: str) -> str:
    if s == "" or any(ch in _QUOTE_TRIGGERS for ch in s):
        return _quote(s)
    return s


def deserialize(text: str) -> Model:
    """Parse the text format back into a Model.

    Malformed input raises ModelFormatError with a line (and, inside the
    tree expression, column) position; a recognized header with the wrong
    version raises ModelVersionError.
    """
    lines = text.split("\n")
    if not lines or lines[0].split() != [_FORMAT_NAME, _FORMAT_VERSION]:
        head = lines[0] if lines else ""
        if head.split()[:1] == [_FORMAT_NAME]:
            raise ModelVersionError(
                f"unsupported model version {head!r}; "
                f"expected {_FORMAT_NAME} {_FORMAT_VERSION}", line=1
            )
        raise ModelFormatError(
            f"not a {_FORMAT_NAME} model file (bad header {head!r})", line=1
        )
    if len(lines) < 2:
        raise ModelFormatError("missing meta line", line=2)
    max_depth, label_mean, trained_rows = _parse_meta(lines[1])

    specs = []
    seen_indices = set()
    lineno = 2
    while lineno < len(lines) and lines[lineno].startswith("col "):
        spec = _parse_col_line(lines[lineno], lineno + 1)
        if spec.index in seen_indices:
            raise ModelFormatError(
                f"duplicate column index {spec.index}", line=lineno + 1
            )
        seen_indices.add(spec.index)
        specs.append(spec)
        lineno += 1
    schema = Schema(columns=tuple(specs))
    by_index = {spec.index: spec for spec in specs}

    tree_text = "\n".join(lines[lineno:])
    tokens = _Tokenizer(tree_text, first_line=lineno + 1)
    root, depth, leaf_total = _parse_node(tokens, by_index)
    extra = tokens.next()
    if extra is not None:
        raise ModelFormatError("trailing content after tree expression",
                               line=extra[2], column=extra[3])
    if depth > max_depth:
        raise ModelFormatError(
            f"tree depth {depth} exceeds declared max_depth {max_depth}"
        )
    if leaf_total != trained_rows:
        raise ModelFormatError(
            f"leaf counts sum to {leaf_total} but meta declares "
            f"trained_rows={trained_rows}"
        )
    return Model(root=root, schema=schema, max_depth=max_depth,
                 label_mean=label_mean, trained_rows=trained_rows)


def save_model(model: Model, path) -> None:
    """Write the serialized model to *path* as UTF-8."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize(model))


def load_model(path) -> Model:
    """Read a model file written by :func:`save_model`."""
    with open(path, "r", encoding="utf-8") as fh:
        return deserialize(fh.read())


def _parse_int(token: str, what: str, line: Optional[int] = None,
               column: Optional[int] = None) -> int:
    if not (token.isascii() and token.isdigit()):
        raise ModelFormatError(f"{what}: expected a non-negative integer, "
                               f"got {token!r}", line=line, column=column)
    return int(token)


def _parse_meta(line: str) -> tuple:
    parts = line.split()
    if (
        len(parts) != 4
        or parts[0] != "meta"
        or not parts[1].startswith("max_depth=")
        or not parts[2].startswith("label_mean=")
        or not parts[3].startswith("trained_rows=")
    ):
        raise ModelFormatError(
            "meta line must be 'meta max_depth=<int> label_mean=<real> "
            f"trained_rows=<int>', got {line!r}", line=2
        )
    max_depth = _parse_int(parts[1][len("max_depth="):], "max_depth", line=2)
    raw_mean = parts[2][len("label_mean="):]
    try:
        label_mean = float(raw_mean)
    except ValueError:
        raise ModelFormatError(f"label_mean: bad real {raw_mean!r}",
                               line=2) from None
    if not math.isfinite(label_mean):
        raise ModelFormatError(f"label_mean must be finite, got {raw_mean}",
                               line=2)
    trained_rows = _parse_int(parts[3][len("trained_rows="):],
                              "trained_rows", line=2)
    return max_depth, label_mean, trained_rows


def _parse_col_line(line: str, lineno: int) -> ColumnSpec:
    tokens = _Tokenizer(line, first_line=lineno)
    parts = []
    while True:
        tok = tokens.next()
        if tok is None:
            break
        parts.append(tok)
    # "col" <index> <kind> <name>
    if len(parts) != 4:
        raise ModelFormatError(
            f"column line must be 'col <index> <kind> <name>', got {line!r}",
            line=lineno
        )
    index = _parse_int(parts[1][0], "column index", line=lineno,
                       column=parts[1][3])
    kind = parts[2][0]
    if kind not in (NUMERIC, CATEGORICAL):
        raise ModelFormatError(f"unknown column kind {kind!r}", line=lineno,
                               column=parts[2][3])
    name = parts[3][0]
    return ColumnSpec(index=index, name=name, kind=kind, role=FEATURE)


def _parse_node(tokens: "_Tokenizer", by_index: dict) -> tuple:
    """Parse one node; returns (node, depth, total leaf rows)."""
    tok = _expect(tokens, "(")
    head = tokens.next()
    if head is None:
        raise ModelFormatError("unexpected end of tree expression",
                               line=tok[2], column=tok[3])
    word = head[0]
    if head[1] or word not in ("leaf", "split"):
        raise ModelFormatError(f"expected 'leaf' or 'split', got {word!r}",
                               line=head[2], column=head[3])
    if word == "leaf":
        s_tok = _next_atom(tokens, "leaf successful count")
        u_tok = _next_atom(tokens, "leaf unsuccessful count")
        successful = _parse_int(s_tok[0], "leaf successful count",
                                line=s_tok[2], column=s_tok[3])
        unsuccessful = _parse_int(u_tok[0], "leaf unsuccessful count",
                                  line=u_tok[2], column=u_tok[3])
        if successful + unsuccessful < 1:
            raise ModelFormatError("leaf must cover at least one row",
                                   line=s_tok[2], column=s_tok[3])
        _expect(tokens, ")")
        counts = ClassCounts(successful=successful, unsuccessful=unsuccessful)
        return make_leaf(counts), 0, counts.total

    col_tok = _next_atom(tokens, "split column index")
    col = _parse_int(col_tok[0], "split column index", line=col_tok[2],
                     column=col_tok[3])
    spec = by_index.get(col)
    if spec is None:
        raise ModelFormatError(f"split references undeclared column {col}",
                               line=col_tok[2], column=col_tok[3])
    op_tok = _next_atom(tokens, "split operator")
    op = op_tok[0]
    if op not in (OP_GE, OP_EQ):
        raise ModelFormatError(f"unknown split operator {op!r}",
                               line=op_tok[2], column=op_tok[3])
    expected_kind = NUMERIC if op == OP_GE else CATEGORICAL
    if spec.kind != expected_kind:
        raise ModelFormatError(
            f"operator {op!r} does not fit {spec.kind} column {spec.name!r}",
            line=op_tok[2], column=op_tok[3]
        )
    val_tok = tokens.next()
    if val_tok is None or val_tok[0] in ("(", ")") and not val_tok[1]:
        where = val_tok or op_tok
        raise ModelFormatError("split is missing its value token",
                               line=where[2], column=where[3])
    if op == OP_GE:
        try:
            value = float(val_tok[0])
        except ValueError:
            raise ModelFormatError(
                f"bad numeric threshold {val_tok[0]!r}",
                line=val_tok[2], column=val_tok[3]
            ) from None
        if not math.isfinite(value):
            raise ModelFormatError(
                f"threshold must be finite, got {val_tok[0]}",
                line=val_tok[2], column=val_tok[3]
            )
    else:
        value = val_tok[0]
    question = Question(col=col, col_name=spec.name, op=op, value=value)
    true_branch, d_true, n_true = _parse_node(tokens, by_index)
    false_branch, d_false, n_false = _parse_node(tokens, by_index)
    _expect(tokens, ")")
    node = Internal(question=question, true_branch=true_branch,
                    false_branch=false_branch)
    return node, 1 + max(d_true, d_false), n_true + n_false


def _expect(tokens: "_Tokenizer", punct: str) -> tuple:
    tok = tokens.next()
    if tok is None:
        raise ModelFormatError(
            f"unexpected end of tree expression (wanted {punct!r})",
            line=tokens.line, column=tokens.col
        )
    if tok[1] or tok[0] != punct:
        raise ModelFormatError(f"expected {punct!r}, got {tok[0]!r}",
                               line=tok[2], column=tok[3])
    return tok


def _next_atom(tokens: "_Tokenizer", what: str) -> tuple:
    tok = tokens.next()
    if tok is None:
        raise ModelFormatError(f"unexpected end of tree expression "
                               f"(wanted {what})",
                               line=tokens.line, column=tokens.col)
    if not tok[1] and tok[0] in ("(", ")"):
        raise ModelFormatError(f"expected {what}, got {tok[0]!r}",
                               line=tok[2], column=tok[3])
    return tok


class _Tokenizer:
    """Whitespace/paren tokenizer tracking 1-based line and column."""

    __slots__ = ("text", "pos", "line", "col")

    def __init__(self, text: str, first_line: int = 1):
        self.text = text
        self.pos = 0
        self.line = first_line
        self.col = 1

    def _advance(self, ch: str) -> None:
        self.pos += 1
        if ch == "\n":
            self.line += 1
            self.col = 1
        else:
            self.col += 1

    def next(self) -> Optional[tuple]:
        """Next (token, was_quoted, line, column), or None at the end."""
        text = self.text
        n = len(text)
        while self.pos < n and text[self.pos] in " \t\r\n":
            self._advance(text[self.pos])
        if self.pos >= n:
            return None
        line, col = self.line, self.col
        ch = text[self.pos]
        if ch in "()":
            self._advance(ch)
            return ch, False, line, col
        if ch == '"':
            self._advance(ch)
            out = []
            while True:
                if self.pos >= n:
                    raise ModelFormatError("unterminated quoted token",
                                           line=line, column=col)
                ch = text[self.pos]
                if ch == '"':
                    self._advance(ch)
                    return "".join(out), True, line, col
                if ch == "\\":
                    self._advance(ch)
                    if self.pos >= n or text[self.pos] not in ('"', "\\"):
                        raise ModelFormatError(
                            "bad escape in quoted token; only \\\" and "
                            "\\\\ are recognized", line=self.line,
                            column=self.col
                        )
                    ch = text[self.pos]
                out.append(ch)
                self._advance(ch)
        out = []
        while self.pos < n and text[self.pos] not in ' \t\r\n()"':
            out.append(text[self.pos])
            self._advance(text[self.pos])
        return "".join(out), False, line, col
