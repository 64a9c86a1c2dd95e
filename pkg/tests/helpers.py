"""Shared builders for the test suite.

Labeled fixtures are built through the same public path the CLI uses:
a score column of 0/100 values runs through derive_label, so a row meant
to be "successful" gets score 100 (> mean) and an "unsuccessful" row
gets 0, provided both classes appear at least once.
"""

import math
import random

from saberpro_cart import (
    MISSING,
    Dataset,
    Question,
    candidate_questions,
    class_counts,
    derive_label,
    info_gain,
    partition,
)

SCORE = "score"


def labeled_from(col_names, rows, labels):
    """Build a LabeledDataset from explicit feature cells and s/u labels.

    col_names: feature column names; rows: list of per-row feature value
    lists (floats, str tokens, or MISSING); labels: string of 's'/'u',
    one per row.  Needs at least one of each class.
    """
    assert len(rows) == len(labels)
    assert "s" in labels and "u" in labels, "need both classes for derive_label"
    d = Dataset(len(rows), len(col_names) + 1, header=list(col_names) + [SCORE])
    for i, (r, lab) in enumerate(zip(rows, labels)):
        d.set_row(i, list(r) + [100.0 if lab == "s" else 0.0])
    return derive_label(d, SCORE)


_TOKENS = ("alpha", "beta", "gamma", "delta")


def random_small_labeled(rng: random.Random, max_rows=12, max_cols=4):
    """Random labeled dataset within the brute-force oracle's size box.

    Mixed numeric/categorical feature columns, occasional missing cells,
    small value alphabets so duplicate values and thin partitions come up
    often.  Label assignment is random, re-drawn until both classes
    appear.
    """
    n_rows = rng.randint(2, max_rows)
    n_cols = rng.randint(1, max_cols)
    kinds = [rng.choice(("num", "cat")) for _ in range(n_cols)]
    names = [f"c{j}" for j in range(n_cols)]
    rows = []
    for _ in range(n_rows):
        row = []
        for k in kinds:
            if rng.random() < 0.12:
                row.append(MISSING)
            elif k == "num":
                row.append(float(rng.randint(0, 5)))
            else:
                row.append(rng.choice(_TOKENS[: rng.randint(2, 4)]))
        rows.append(row)
    while True:
        labels = "".join(rng.choice("su") for _ in range(n_rows))
        if "s" in labels and "u" in labels:
            break
    # a column drawn all-numeric except missings can still be inferred
    # categorical if only one distinct value survived; that is fine, the
    # oracle reads kinds from the inferred schema, not from `kinds`.
    return labeled_from(names, rows, labels)


def brute_force_best_split(rows, labeled):
    """Independent exhaustive enumerator for the split search.

    Composed only of the small public pieces (candidate_questions,
    partition, class_counts, info_gain) plus an explicit loop, so it
    shares no code with the swept search it checks.  Tie-break: first
    strictly-greater gain wins while scanning columns in ascending index
    and candidates in their generated order; empty sides are skipped.
    """
    parent = class_counts(rows, labeled)
    best_gain = 0.0
    best = None
    for col in labeled.schema.features():
        for q in candidate_questions(rows, col.index, labeled):
            t, f = partition(rows, q, labeled)
            if not t or not f:
                continue
            g = info_gain(parent, class_counts(t, labeled), class_counts(f, labeled))
            if g > best_gain:
                best_gain = g
                best = (g, q, t, f)
    return best


def walk_leaves(node):
    """Yield every Leaf under node."""
    stack = [node]
    while stack:
        nd = stack.pop()
        if hasattr(nd, "counts"):
            yield nd
        else:
            stack.append(nd.true_branch)
            stack.append(nd.false_branch)


def subtree_total(node):
    return sum(leaf.counts.total for leaf in walk_leaves(node))


def max_path_depth(node):
    if hasattr(node, "counts"):
        return 0
    return 1 + max(max_path_depth(node.true_branch), max_path_depth(node.false_branch))


def close(a, b, tol=1e-12):
    return math.isfinite(a) and math.isfinite(b) and abs(a - b) <= tol


# awkward column names that must survive quoting in the model text
_NASTY_NAMES = (
    "plain",
    "with space",
    "paren(open",
    "close)paren",
    'inner"quote',
    "back\\slash",
    "tab\there",
    "semi;colon",
)


def random_model(rng: random.Random):
    """Assemble a random valid Model directly (no training pass).

    Random feature schema with quoting-hostile names, random tree whose
    questions only reference declared columns with kind-matching
    predicates; trained_rows is set to the leaf-count total so the model
    satisfies its own conservation invariant.
    """
    from saberpro_cart import (
        CATEGORICAL,
        FEATURE,
        NUMERIC,
        OP_EQ,
        OP_GE,
        ClassCounts as CC,
        ColumnSpec,
        Internal,
        Leaf,
        Model,
        Schema,
        gini,
    )

    n_cols = rng.randint(1, 5)
    names = rng.sample(_NASTY_NAMES, n_cols)
    # non-contiguous original column indices, as produced by ignored cols
    indices = sorted(rng.sample(range(n_cols * 2), n_cols))
    kinds = [rng.choice((NUMERIC, CATEGORICAL)) for _ in range(n_cols)]
    cols = tuple(
        ColumnSpec(index=ix, name=nm, kind=k, role=FEATURE)
        for ix, nm, k in zip(indices, names, kinds)
    )
    max_depth = rng.randint(0, 5)

    def leaf():
        a = rng.randint(0, 30)
        b = rng.randint(0, 30)
        if a + b == 0:
            a = 1
        c = CC(a, b)
        return Leaf(c, gini(c), a / c.total)

    def node(depth):
        if depth >= max_depth or rng.random() < 0.35:
            return leaf()
        j = rng.randrange(n_cols)
        if kinds[j] == NUMERIC:
            q_val = round(rng.uniform(-50.0, 150.0), rng.randint(0, 6))
            op = OP_GE
        else:
            q_val = rng.choice(("F", "M", "?", "estrato 1", 'x"y', "a\\b"))
            op = OP_EQ
        from saberpro_cart import Question

        q = Question(cols[j].index, names[j], op, q_val)
        return Internal(q, node(depth + 1), node(depth + 1))

    root = node(0)
    return Model(
        root=root,
        schema=Schema(columns=cols),
        max_depth=max_depth,
        label_mean=rng.uniform(0.0, 100.0),
        trained_rows=subtree_total(root),
    )
