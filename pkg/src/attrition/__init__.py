"""Employee attrition benchmark: from-scratch AdaBoost, random forest and SVM."""

from attrition.errors import (
    AttritionError,
    ConfigError,
    DatasetError,
    EnsembleError,
    EvalError,
    StatsError,
    SvmError,
    TreeError,
)

__version__ = "0.1.0"

__all__ = [
    "AttritionError",
    "ConfigError",
    "DatasetError",
    "EnsembleError",
    "EvalError",
    "StatsError",
    "SvmError",
    "TreeError",
]
