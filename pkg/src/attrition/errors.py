class AttritionError(Exception):
    """Base class; `module` names the pipeline stage that failed."""

    module = "attrition"


class DatasetError(AttritionError, ValueError):
    module = "dataset"


class StatsError(AttritionError, ValueError):
    module = "stats"


class TreeError(AttritionError, ValueError):
    module = "trees"


class EnsembleError(AttritionError, ValueError):
    module = "ensemble"


class SvmError(AttritionError, ValueError):
    module = "svm"


class EvalError(AttritionError, ValueError):
    module = "eval"


class ConfigError(AttritionError, ValueError):
    module = "cli"
