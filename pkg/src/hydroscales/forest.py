"""Random forest classifier in unsupervised (contrast) mode.

Real feature rows are labelled 1 and contrasted against an equal number of
synthetic rows built by independently bootstrapping each column, so the
forest learns the joint dependence structure of the real rows. Leaf
co-occurrence of real rows across trees yields a proximity matrix; total
Gini impurity decrease per feature, averaged over trees, yields variable
importances.

Randomness is fully reproducible: every tree draws from its own generator
seeded by (master seed, tree index), so results cannot depend on the order
in which trees are grown.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ColumnMismatch, InvalidConfig, TooFewRows


@dataclass(frozen=True)
class ContrastDataset:
    """Real rows (class 1) plus column-wise bootstrap synthetic rows (class 0)."""

    real_rows: np.ndarray
    synthetic_rows: np.ndarray
    seed: int

    @property
    def data(self) -> np.ndarray:
        return np.vstack([self.real_rows, self.synthetic_rows])

    @property
    def labels(self) -> np.ndarray:
        n = self.real_rows.shape[0]
        return np.concatenate([np.ones(n, dtype=np.int64), np.zeros(n, dtype=np.int64)])


def make_contrast(real: np.ndarray, seed: int) -> ContrastDataset:
    """Build the synthetic contrast class by resampling each column of the
    real rows independently, with replacement. Deterministic given seed."""
    real = np.asarray(real, dtype=float)
    if real.ndim != 2 or real.shape[0] < 2:
        raise TooFewRows(f"contrast dataset needs a 2-d array with >= 2 rows, got {real.shape}")
    rng = np.random.default_rng([seed, 0])
    n, d = real.shape
    synthetic = np.empty_like(real)
    for j in range(d):
        synthetic[:, j] = real[rng.integers(0, n, n), j]
    return ContrastDataset(real_rows=real, synthetic_rows=synthetic, seed=seed)


@dataclass
class Tree:
    """One CART tree as flat arrays; ``feature[i] < 0`` marks a leaf."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    counts: np.ndarray  # (n_nodes, 2) training class counts reaching each node
    impurity: np.ndarray
    n_root: int
    in_bag_real: np.ndarray  # bool per real row: sampled into this bootstrap

    @property
    def n_nodes(self) -> int:
        return self.feature.size

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Terminal node index for each row of x."""
        node = np.zeros(x.shape[0], dtype=np.int64)
        while True:
            rows = np.nonzero(self.feature[node] >= 0)[0]
            if rows.size == 0:
                return node
            at = node[rows]
            go_left = x[rows, self.feature[at]] <= self.threshold[at]
            node[rows] = np.where(go_left, self.left[at], self.right[at])

    def node_decreases(self) -> np.ndarray:
        """Gini impurity decrease of each internal node, weighted by the
        fraction of the bootstrap sample reaching it (0 at leaves)."""
        sizes = self.counts.sum(axis=1).astype(float)
        dec = np.zeros(self.n_nodes)
        internal = self.feature >= 0
        li, ri = self.left[internal], self.right[internal]
        dec[internal] = (
            sizes[internal] * self.impurity[internal]
            - sizes[li] * self.impurity[li]
            - sizes[ri] * self.impurity[ri]
        ) / self.n_root
        return dec


@dataclass
class Forest:
    """An ensemble of contrast-classification trees."""

    trees: list[Tree] = field(repr=False)
    n_trees: int
    mtry: int
    seed: int
    n_features: int


def _gini(c0: int, c1: int) -> float:
    n = c0 + c1
    p0 = c0 / n
    p1 = c1 / n
    return 1.0 - p0 * p0 - p1 * p1


def _grow_tree(x: np.ndarray, y: np.ndarray, n_real: int, mtry: int, rng) -> Tree:
    n, d = x.shape
    boot = rng.integers(0, n, n)
    xb, yb = x[boot], y[boot]

    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    counts: list[tuple[int, int]] = []
    impurity: list[float] = []

    def new_node(idx: np.ndarray) -> int:
        i = len(feature)
        c1 = int(yb[idx].sum())
        c0 = idx.size - c1
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        counts.append((c0, c1))
        impurity.append(_gini(c0, c1))
        return i

    root = new_node(np.arange(n))
    stack: list[tuple[int, np.ndarray]] = [(root, np.arange(n))]
    while stack:
        node_id, idx = stack.pop()
        m = idx.size
        if m <= 1 or impurity[node_id] == 0.0:
            continue
        candidates = rng.choice(d, size=mtry, replace=False)
        parent_imp = impurity[node_id]
        best_dec = 0.0
        best_feature = -1
        best_threshold = 0.0
        for f in candidates:
            col = xb[idx, f]
            order = np.argsort(col, kind="stable")
            xs = col[order]
            ys = yb[idx][order]
            cut = np.nonzero(xs[:-1] < xs[1:])[0]  # split between distinct values
            if cut.size == 0:
                continue
            cum1 = np.cumsum(ys)
            nl = cut + 1.0
            n1l = cum1[cut].astype(float)
            n0l = nl - n1l
            nr = m - nl
            n1r = cum1[-1] - n1l
            n0r = nr - n1r
            gl = 1.0 - (n0l / nl) ** 2 - (n1l / nl) ** 2
            gr = 1.0 - (n0r / nr) ** 2 - (n1r / nr) ** 2
            dec = parent_imp - (nl / m) * gl - (nr / m) * gr
            j = int(np.argmax(dec))
            if dec[j] > best_dec:
                best_dec = float(dec[j])
                best_feature = int(f)
                best_threshold = float((xs[cut[j]] + xs[cut[j] + 1]) / 2.0)
        if best_feature < 0:
            continue  # candidates all constant here or no improving split: leaf
        go_left = xb[idx, best_feature] <= best_threshold
        left_idx, right_idx = idx[go_left], idx[~go_left]
        feature[node_id] = best_feature
        threshold[node_id] = best_threshold
        left_id = new_node(left_idx)
        right_id = new_node(right_idx)
        left[node_id] = left_id
        right[node_id] = right_id
        stack.append((right_id, right_idx))
        stack.append((left_id, left_idx))

    in_bag = np.zeros(n, dtype=bool)
    in_bag[boot] = True
    return Tree(
        feature=np.array(feature, dtype=np.int64),
        threshold=np.array(threshold),
        left=np.array(left, dtype=np.int64),
        right=np.array(right, dtype=np.int64),
        counts=np.array(counts, dtype=np.int64),
        impurity=np.array(impurity),
        n_root=n,
        in_bag_real=in_bag[:n_real],
    )


def train_forest(data: ContrastDataset, n_trees: int, mtry: int, seed: int) -> Forest:
    """Grow ``n_trees`` CART trees on bootstrap samples of the contrast set.

    Each node examines ``mtry`` features sampled without replacement and
    takes the best midpoint split by Gini decrease; nodes grow until pure
    or singleton (or unsplittable, when sampled candidates are constant).
    """
    x = data.data
    y = data.labels
    d = x.shape[1]
    if n_trees < 1:
        raise InvalidConfig(f"n_trees must be >= 1, got {n_trees}")
    if not 1 <= mtry <= d:
        raise InvalidConfig(f"mtry must be in [1, {d}], got {mtry}")
    if seed < 0:
        raise InvalidConfig(f"seed must be >= 0, got {seed}")
    n_real = data.real_rows.shape[0]
    trees = [
        _grow_tree(x, y, n_real, mtry, np.random.default_rng([seed, t]))
        for t in range(n_trees)
    ]
    return Forest(trees=trees, n_trees=n_trees, mtry=mtry, seed=seed, n_features=d)


def proximity(forest: Forest, rows: np.ndarray, oob_only: bool = False) -> np.ndarray:
    """Fraction of trees in which each pair of rows shares a terminal node.

    Counted over all trees by default. With ``oob_only`` (meaningful only
    when ``rows`` are the training real rows in their original order) a
    tree counts for a pair only when both rows were out of its bootstrap;
    pairs that share no such tree get proximity 0.
    """
    x = np.asarray(rows, dtype=float)
    if x.ndim != 2 or x.shape[1] != forest.n_features:
        raise ColumnMismatch(
            f"rows must be 2-d with {forest.n_features} columns, got {x.shape}"
        )
    n = x.shape[0]
    same_counts = np.zeros((n, n), dtype=np.int64)
    denom = np.zeros((n, n), dtype=np.int64)
    for tree in forest.trees:
        leaves = tree.apply(x)
        same = leaves[:, None] == leaves[None, :]
        if oob_only:
            if tree.in_bag_real.size != n:
                raise ColumnMismatch("oob proximity requires the training real rows")
            out = ~tree.in_bag_real
            usable = np.outer(out, out)
            same_counts += same & usable
            denom += usable
        else:
            same_counts += same
            denom += 1
    with np.errstate(invalid="ignore"):
        prox = np.where(denom > 0, same_counts / np.maximum(denom, 1), 0.0)
    np.fill_diagonal(prox, 1.0)
    return prox


def gini_importance(forest: Forest) -> tuple[np.ndarray, np.ndarray]:
    """Total Gini decrease attributable to each feature, averaged over trees.

    Returns
    -------
    (importances, ranks): ranks run 1 (largest importance) .. n_features,
    ties broken by the canonical (lower) feature index.
    """
    imp = np.zeros(forest.n_features)
    for tree in forest.trees:
        dec = tree.node_decreases()
        internal = tree.feature >= 0
        np.add.at(imp, tree.feature[internal], dec[internal])
    imp /= forest.n_trees
    order = np.lexsort((np.arange(forest.n_features), -imp))
    ranks = np.empty(forest.n_features, dtype=np.int64)
    ranks[order] = np.arange(1, forest.n_features + 1)
    return imp, ranks


def predict(forest: Forest, rows: np.ndarray) -> np.ndarray:
    """Majority-vote class labels (1 = real-like, 0 = synthetic-like)."""
    x = np.asarray(rows, dtype=float)
    if x.ndim != 2 or x.shape[1] != forest.n_features:
        raise ColumnMismatch(
            f"rows must be 2-d with {forest.n_features} columns, got {x.shape}"
        )
    votes = np.zeros(x.shape[0], dtype=np.int64)
    for tree in forest.trees:
        leaves = tree.apply(x)
        votes += tree.counts[leaves, 1] > tree.counts[leaves, 0]
    return (votes * 2 > forest.n_trees).astype(np.int64)
