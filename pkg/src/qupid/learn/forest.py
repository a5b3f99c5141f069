"""Random forest of CART trees (Gini impurity), bootstrap-aggregated.

Splits send ``x[feature] <= threshold`` to the left child. Thresholds are
midpoints between consecutive distinct values. At every node a random
subset of non-constant features is searched; if fewer than ``max_features``
non-constant features exist, all of them are searched. Trees vote with one
label each, ties going to the smallest label.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

LEAF = -1


@dataclass(frozen=True)
class ForestParams:
    n_trees: int = 100
    max_features: str = "sqrt"
    min_leaf: int = 1
    max_depth: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1:
            raise ValueError("n_trees must be at least 1")
        if self.max_features not in ("sqrt", "all"):
            raise ValueError("max_features must be 'sqrt' or 'all'")
        if self.min_leaf < 1:
            raise ValueError("min_leaf must be at least 1")
        if self.max_depth is not None and self.max_depth < 0:
            raise ValueError("max_depth must be non-negative")


@dataclass(frozen=True, eq=False)
class FeatureTable:
    rows: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        X = np.asarray(self.rows, dtype=float)
        y = np.asarray(self.labels)
        if X.ndim != 2:
            raise ValueError("rows must be a 2-D matrix")
        if X.shape[0] < 1:
            raise ValueError("feature table needs at least one row")
        if y.shape != (X.shape[0],):
            raise ValueError("one label per row is required")
        if not np.all(np.isfinite(X)):
            raise ValueError("feature table has non-finite entries")
        if y.size and (not np.issubdtype(y.dtype, np.integer) or y.min() < 0):
            raise ValueError("labels must be non-negative integers")
        object.__setattr__(self, "rows", X)
        object.__setattr__(self, "labels", y.astype(np.int64))


def gini(counts: np.ndarray) -> float:
    n = counts.sum()
    if n == 0:
        return 0.0
    p = counts / n
    return float(1.0 - np.dot(p, p))


class Tree:
    def __init__(self, feature, threshold, left, right, counts, decrease):
        self.feature = np.asarray(feature, dtype=np.int64)
        self.threshold = np.asarray(threshold, dtype=float)
        self.left = np.asarray(left, dtype=np.int64)
        self.right = np.asarray(right, dtype=np.int64)
        self.counts = np.asarray(counts, dtype=float)
        self.decrease = np.asarray(decrease, dtype=float)

    @property
    def n_nodes(self) -> int:
        return self.feature.size

    @property
    def n_splits(self) -> int:
        return int(np.count_nonzero(self.feature != LEAF))

    def apply(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(X.shape[0], dtype=np.int64)
        rows = np.arange(X.shape[0])
        active = self.feature[node] != LEAF
        while active.any():
            r, nd = rows[active], node[active]
            go_left = X[r, self.feature[nd]] <= self.threshold[nd]
            node[r] = np.where(go_left, self.left[nd], self.right[nd])
            active = self.feature[node] != LEAF
        return node

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.argmax(self.counts[self.apply(X)], axis=1)

    def importances(self, n_features: int) -> np.ndarray:
        imp = np.zeros(n_features)
        split = self.feature != LEAF
        np.add.at(imp, self.feature[split], self.decrease[split])
        return imp

    def to_dict(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "counts": self.counts.tolist(),
            "decrease": self.decrease.tolist(),
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "Tree":
        return cls(obj["feature"], obj["threshold"], obj["left"], obj["right"], obj["counts"], obj["decrease"])


def _n_candidates(max_features: str, d: int) -> int:
    if max_features == "all":
        return d
    return max(1, int(math.sqrt(d)))


def _best_split(Xn: np.ndarray, Yn: np.ndarray, cand: np.ndarray, min_leaf: int):
    """Best ``(feature, threshold, left_mask, child impurities)`` over ``cand`` or None."""
    n = Xn.shape[0]
    vals = Xn[:, cand]
    order = np.argsort(vals, axis=0, kind="stable")
    sv = np.take_along_axis(vals, order, axis=0)
    left = np.cumsum(Yn[order], axis=0)[:-1]  # (n-1, m, C)
    total = Yn.sum(axis=0)
    right = total - left
    nl = np.arange(1, n, dtype=float)[:, None]
    nr = n - nl
    gl = 1.0 - np.sum(left * left, axis=2) / (nl * nl)
    gr = 1.0 - np.sum(right * right, axis=2) / (nr * nr)
    cost = (nl * gl + nr * gr) / n
    ok = sv[:-1] < sv[1:]
    k = np.arange(1, n)[:, None]
    ok &= (k >= min_leaf) & (n - k >= min_leaf)
    if not ok.any():
        return None
    cost = np.where(ok, cost, np.inf).T  # (m, n-1): first candidate wins ties
    flat = int(np.argmin(cost))
    fi, pos = divmod(flat, n - 1)
    lo, hi = sv[pos, fi], sv[pos + 1, fi]
    thr = 0.5 * (lo + hi)
    if thr >= hi:
        thr = lo
    feat = int(cand[fi])
    return feat, float(thr), Xn[:, feat] <= thr, float(gl[pos, fi]), float(gr[pos, fi])


def build_tree(X: np.ndarray, y: np.ndarray, n_classes: int, params: ForestParams, rng: np.random.Generator) -> Tree:
    d = X.shape[1]
    m = _n_candidates(params.max_features, d)
    Y = np.eye(n_classes)[y]
    feature, threshold, left, right, counts, decrease = [], [], [], [], [], []

    def new_node(idx):
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        counts.append(Y[idx].sum(axis=0))
        decrease.append(0.0)
        return len(feature) - 1

    root = new_node(np.arange(X.shape[0]))
    stack = [(root, np.arange(X.shape[0]), 0)]
    while stack:
        node, idx, depth = stack.pop()
        c = counts[node]
        n = idx.size
        if np.count_nonzero(c) <= 1 or n < 2 * params.min_leaf:
            continue
        if params.max_depth is not None and depth >= params.max_depth:
            continue
        Xn = X[idx]
        nonconst = Xn.max(axis=0) > Xn.min(axis=0)
        if not nonconst.any():
            continue
        perm = rng.permutation(d)
        cand = perm[nonconst[perm]][:m]
        found = _best_split(Xn, Y[idx], cand, params.min_leaf)
        if found is None:
            continue
        feat, thr, go_left, gl, gr = found
        li, ri = idx[go_left], idx[~go_left]
        feature[node] = feat
        threshold[node] = thr
        decrease[node] = n * gini(c) - li.size * gl - ri.size * gr
        lnode, rnode = new_node(li), new_node(ri)
        left[node], right[node] = lnode, rnode
        # right first so the left subtree is expanded (and numbered) first
        stack.append((rnode, ri, depth + 1))
        stack.append((lnode, li, depth + 1))
    return Tree(feature, threshold, left, right, np.array(counts), decrease)


class ForestModel:
    def __init__(self, trees: list[Tree], n_features: int, n_classes: int, params: ForestParams,
                 bootstrap_sizes: list[int] | None = None):
        self.trees = trees
        self.n_features = n_features
        self.n_classes = n_classes
        self.params = params
        self.bootstrap_sizes = bootstrap_sizes or []

    def votes(self, rows) -> np.ndarray:
        X = np.asarray(rows, dtype=float)
        if X.ndim == 1 and X.size == 0:
            X = X.reshape(0, self.n_features)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise ValueError(f"expected rows with {self.n_features} features, got shape {X.shape}")
        tally = np.zeros((X.shape[0], self.n_classes), dtype=np.int64)
        for t in self.trees:
            np.add.at(tally, (np.arange(X.shape[0]), t.predict(X)), 1)
        return tally

    def to_dict(self) -> dict:
        return {
            "params": asdict(self.params),
            "n_features": self.n_features,
            "n_classes": self.n_classes,
            "trees": [t.to_dict() for t in self.trees],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, obj: dict) -> "ForestModel":
        return cls([Tree.from_dict(t) for t in obj["trees"]], obj["n_features"], obj["n_classes"],
                   ForestParams(**obj["params"]))


def train_forest(table: FeatureTable, params: ForestParams = ForestParams()) -> ForestModel:
    X, y = table.rows, table.labels
    if np.unique(y).size < 2:
        raise ValueError("training needs at least two classes")
    n, d = X.shape
    n_classes = int(y.max()) + 1
    trees, sizes = [], []
    for t in range(params.n_trees):
        rng = np.random.default_rng([params.seed, t])
        boot = rng.integers(0, n, size=n)
        sizes.append(boot.size)
        trees.append(build_tree(X[boot], y[boot], n_classes, params, rng))
    return ForestModel(trees, d, n_classes, params, sizes)


def predict(model: ForestModel, rows) -> np.ndarray:
    """Majority vote of the trees; ties go to the smallest label."""
    return np.argmax(model.votes(rows), axis=1)


def feature_importance(model: ForestModel) -> np.ndarray:
    """Mean decrease in Gini impurity (sample-weighted), normalized to sum to one.

    Each tree's importances are normalized before averaging, then the
    average is renormalized. All zeros when no tree has a split.
    """
    total = np.zeros(model.n_features)
    for t in model.trees:
        imp = t.importances(model.n_features)
        s = imp.sum()
        if s > 0:
            total += imp / s
    total /= len(model.trees)
    s = total.sum()
    return total / s if s > 0 else total


def accuracy(y_true, y_pred) -> float:
    y_true = np.asarray(y_true)
    if y_true.size == 0:
        return float("nan")
    return float(np.mean(y_true == np.asarray(y_pred)))
