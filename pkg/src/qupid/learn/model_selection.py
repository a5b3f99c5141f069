"""Stratified splits, k-fold partitions and cross-validated alpha search."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from ..pipeline import Sample, Vectorizer, VectorizerConfig
from ..quantize import DEFAULT_ALPHA_CANDIDATES
from ..rng import derive_seed
from .forest import FeatureTable, ForestParams, accuracy, predict, train_forest


def _by_class(labels: np.ndarray) -> dict[int, np.ndarray]:
    return {int(c): np.flatnonzero(labels == c) for c in np.unique(labels)}


def split_train_test(n: int, ratio: float, stratify_labels=None, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Randomized train/test split, stratified per class when labels are given.

    The train size is ``round(ratio * n)``; per-class quotas are the floors of
    ``ratio * n_c`` topped up by largest remainder (ties to the smaller label).
    """
    if not 0.0 <= ratio <= 1.0:
        raise ValueError("ratio must be in [0, 1]")
    rng = np.random.default_rng([seed, 0x5317])
    if stratify_labels is None:
        perm = rng.permutation(n)
        k = int(math.floor(ratio * n + 0.5))
        return np.sort(perm[:k]), np.sort(perm[k:])
    labels = np.asarray(stratify_labels)
    if labels.shape != (n,):
        raise ValueError("one label per item is required")
    groups = _by_class(labels)
    small = [c for c, idx in groups.items() if idx.size < 2]
    if small:
        raise ValueError(f"class(es) {small} have fewer than 2 members; cannot stratify")
    target = int(math.floor(ratio * n + 0.5))
    quota = {c: int(math.floor(ratio * idx.size)) for c, idx in groups.items()}
    remainder = sorted(groups, key=lambda c: (-(ratio * groups[c].size - quota[c]), c))
    missing = target - sum(quota.values())
    for c in remainder[:max(0, missing)]:
        quota[c] += 1
    train, test = [], []
    for c in sorted(groups):
        perm = rng.permutation(groups[c])
        train.append(perm[:quota[c]])
        test.append(perm[quota[c]:])
    return np.sort(np.concatenate(train)), np.sort(np.concatenate(test))


def k_fold(n: int, k: int, stratify_labels=None, seed: int = 0) -> list[np.ndarray]:
    """``k`` disjoint folds covering ``range(n)``, sizes within one of each other.

    Items are shuffled within each class and dealt round-robin, continuing
    the deal across classes, so every fold gets a near-equal share of each
    class.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if k > n:
        raise ValueError(f"cannot make {k} folds from {n} items")
    rng = np.random.default_rng([seed, 0xF01D])
    if stratify_labels is None:
        order = rng.permutation(n)
    else:
        labels = np.asarray(stratify_labels)
        if labels.shape != (n,):
            raise ValueError("one label per item is required")
        order = np.concatenate([rng.permutation(idx) for _, idx in sorted(_by_class(labels).items())])
    folds = [order[i::k] for i in range(k)]
    return [np.sort(f) for f in folds]


@dataclass(frozen=True)
class PipelineConfig:
    """Everything needed to turn labelled diagram samples into a scored model."""

    vectorizer: VectorizerConfig = VectorizerConfig()
    forest: ForestParams = ForestParams()
    alpha_candidates: tuple[tuple[float, float], ...] = tuple(
        (a, b) for a in DEFAULT_ALPHA_CANDIDATES for b in DEFAULT_ALPHA_CANDIDATES
    )
    cv_k: int = 3

    def to_dict(self) -> dict:
        return {
            "vectorizer": self.vectorizer.to_dict(),
            "forest": {
                "n_trees": self.forest.n_trees,
                "max_features": self.forest.max_features,
                "min_leaf": self.forest.min_leaf,
                "max_depth": self.forest.max_depth,
                "seed": self.forest.seed,
            },
            "alpha_candidates": [list(a) for a in self.alpha_candidates],
            "cv_k": self.cv_k,
        }


def fit_and_score(config: VectorizerConfig, forest: ForestParams, train: Sequence[Sample], y_train,
                  test: Sequence[Sample], y_test) -> float:
    vec = Vectorizer(config).fit(train)
    model = train_forest(FeatureTable(vec.transform(train), np.asarray(y_train)), forest)
    return accuracy(y_test, predict(model, vec.transform(test)))


def grid_search_alpha(config: PipelineConfig, samples: Sequence[Sample], labels, candidates=None,
                      cv_k: int | None = None, seed: int = 0):
    """Cross-validated choice of the log-grid parameter alpha.

    Only ``samples`` (the caller's training split) are touched. Grids are
    refit on every CV-train fold. Returns ``(best_alpha, table)`` where the
    table lists per-fold and mean accuracies; ties go to the lexicographically
    smallest alpha.
    """
    cands = sorted({(float(a), float(b)) for a, b in (config.alpha_candidates if candidates is None else candidates)})
    if not cands:
        raise ValueError("no alpha candidates")
    labels = np.asarray(labels)
    if len(cands) == 1:
        return cands[0], [{"alpha": list(cands[0]), "fold_accuracy": [], "mean_accuracy": None}]
    k = config.cv_k if cv_k is None else cv_k
    folds = k_fold(len(samples), k, labels, seed)
    table = []
    best, best_score = None, -np.inf
    for alpha in cands:
        vcfg = config.vectorizer.with_alpha(alpha)
        scores = []
        for f, val in enumerate(folds):
            tr = np.setdiff1d(np.arange(len(samples)), val)
            if np.unique(labels[tr]).size < 2:
                raise ValueError("a CV-train fold has a single class; lower cv_k")
            forest = replace(config.forest, seed=derive_seed(seed, f))
            scores.append(fit_and_score(vcfg, forest, [samples[i] for i in tr], labels[tr],
                                        [samples[i] for i in val], labels[val]))
        mean = float(np.mean(scores))
        table.append({"alpha": list(alpha), "fold_accuracy": scores, "mean_accuracy": mean})
        if mean > best_score:
            best, best_score = alpha, mean
    return best, table
