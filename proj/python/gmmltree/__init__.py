"""Decision trees and random forests with closed-form metric-learning splits."""

from ._gmmltree import (
    WEIGHT_MAX,
    ConfigError,
    ContractError,
    DataError,
    Dataset,
    DimensionError,
    Error,
    Forest,
    NoValidSplitError,
    Tree,
    __version__,
    cli,
    cross_validate,
    gmml_weights,
    load_csv,
    load_model,
    parse_csv,
    split_point,
    train_forest,
    train_tree,
    weight_vs_impurity,
)

__all__ = [
    "WEIGHT_MAX",
    "ConfigError",
    "ContractError",
    "DataError",
    "Dataset",
    "DimensionError",
    "Error",
    "Forest",
    "NoValidSplitError",
    "Tree",
    "__version__",
    "cli",
    "cross_validate",
    "gmml_weights",
    "load_csv",
    "load_model",
    "parse_csv",
    "split_point",
    "train_forest",
    "train_tree",
    "weight_vs_impurity",
]
