from .forest import (
    FeatureTable,
    ForestModel,
    ForestParams,
    accuracy,
    feature_importance,
    predict,
    train_forest,
)
from .model_selection import PipelineConfig, fit_and_score, grid_search_alpha, k_fold, split_train_test

__all__ = [
    "FeatureTable",
    "ForestModel",
    "ForestParams",
    "PipelineConfig",
    "accuracy",
    "feature_importance",
    "fit_and_score",
    "grid_search_alpha",
    "k_fold",
    "predict",
    "split_train_test",
    "train_forest",
]
