"""Accuracy, ROC/AUC and the repeated random-split benchmark."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Any, Sequence

import numpy as np

from attrition.dataset import Dataset, SplitSpec, split_indices
from attrition.ensemble import AdaBoostModel, AdaBoostParams, ForestModel, ForestParams, train_adaboost, train_forest
from attrition.errors import AttritionError, EvalError
from attrition.rng import mix
from attrition.svm import SvmModel, SvmParams, train_svm

log = logging.getLogger(__name__)

MODEL_KINDS = ("adaboost", "svm", "forest")
# Decision-score cutoff above which each model predicts class 1.
SCORE_THRESHOLDS = {"adaboost": 0.0, "svm": 0.0, "forest": 0.5}


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def as_dict(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn}


def accuracy(predictions, truth) -> tuple[float, ConfusionMatrix]:
    predictions = np.asarray(predictions).astype(np.int64)
    truth = np.asarray(truth).astype(np.int64)
    if predictions.shape != truth.shape:
        raise EvalError(f"length mismatch: {predictions.shape} vs {truth.shape}")
    if predictions.size == 0:
        raise EvalError("cannot score an empty prediction list")
    tp = int(np.sum((predictions == 1) & (truth == 1)))
    tn = int(np.sum((predictions == 0) & (truth == 0)))
    fp = int(np.sum((predictions == 1) & (truth == 0)))
    fn = int(np.sum((predictions == 0) & (truth == 1)))
    cm = ConfusionMatrix(tp, fp, tn, fn)
    return (tp + tn) / cm.total, cm


@dataclass(frozen=True)
class RocCurve:
    fpr: np.ndarray
    tpr: np.ndarray
    thresholds: np.ndarray

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.fpr.tolist(), self.tpr.tolist()))


def roc_curve(scores, truth) -> RocCurve:
    """Sweep the cutoff over distinct scores from high to low.

    The point for cutoff c counts rows with score >= c as positive; the
    first threshold is +inf and gives (0, 0). Tied scores move the curve
    in a single step.
    """
    scores = np.asarray(scores, dtype=np.float64)
    truth = np.asarray(truth).astype(np.int64)
    if scores.shape != truth.shape:
        raise EvalError("scores and truth differ in length")
    P = int(truth.sum())
    N = truth.size - P
    if P == 0 or N == 0:
        raise EvalError("ROC needs both classes in the ground truth")
    order = np.argsort(-scores, kind="stable")
    s, t = scores[order], truth[order]
    last_of_run = np.r_[s[1:] != s[:-1], True]
    tps = np.cumsum(t)[last_of_run]
    fps = np.cumsum(1 - t)[last_of_run]
    fpr = np.r_[0.0, fps / N]
    tpr = np.r_[0.0, tps / P]
    thresholds = np.r_[np.inf, s[last_of_run]]
    return RocCurve(fpr, tpr, thresholds)


def auc(curve: RocCurve) -> float:
    """Trapezoidal area under the curve."""
    dx = np.diff(curve.fpr)
    return float(np.sum(dx * (curve.tpr[1:] + curve.tpr[:-1]) / 2.0))


@dataclass
class EvalReport:
    model: str
    accuracy: float
    confusion: ConfusionMatrix
    roc: RocCurve
    auc: float
    split_seed: int
    test_fraction: float
    stratified: bool = False
    majority_baseline: float = 0.0

    def as_dict(self, with_curve: bool = True) -> dict:
        out: dict[str, Any] = {
            "model": self.model,
            "accuracy": self.accuracy,
            "accuracy_4dp": round(self.accuracy, 4),
            "auc": self.auc,
            "confusion": self.confusion.as_dict(),
            "test_majority_baseline": self.majority_baseline,
            "split": {"seed": self.split_seed, "test_fraction": self.test_fraction, "stratified": self.stratified},
        }
        if with_curve:
            out["roc"] = {
                "fpr": self.roc.fpr.tolist(),
                "tpr": self.roc.tpr.tolist(),
                "thresholds": [None if math.isinf(v) else v for v in self.roc.thresholds.tolist()],
            }
        return out


@dataclass(frozen=True)
class ModelSpec:
    """One benchmark column: a name and a model kind with its parameters."""

    name: str
    kind: str
    params: Any = None

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise EvalError(f"unknown model kind {self.kind!r}; choose from {MODEL_KINDS}")
        if self.params is None:
            defaults = {"adaboost": AdaBoostParams(), "svm": SvmParams(), "forest": ForestParams()}
            object.__setattr__(self, "params", defaults[self.kind])


DEFAULT_MODELS = (
    ModelSpec("adaboost", "adaboost", AdaBoostParams(n_estimators=1000, learning_rate=0.1)),
    ModelSpec("svm", "svm", SvmParams(C=1.0, kernel="linear")),
    ModelSpec("forest", "forest", ForestParams(n_trees=100)),
)


def train_model(spec: ModelSpec, train: Dataset):
    if spec.kind == "adaboost":
        return train_adaboost(train, spec.params)
    if spec.kind == "svm":
        return train_svm(train, spec.params)
    return train_forest(train, spec.params)


def model_kind(model) -> str:
    if isinstance(model, AdaBoostModel):
        return "adaboost"
    if isinstance(model, SvmModel):
        return "svm"
    if isinstance(model, ForestModel):
        return "forest"
    raise EvalError(f"not a trained model: {type(model).__name__}")


def evaluate(model, test: Dataset, name: str | None = None, split: SplitSpec | None = None) -> EvalReport:
    scores = model.score(test.features)
    predicted = model.predict(test.features)
    acc, cm = accuracy(predicted, test.labels)
    curve = roc_curve(scores, test.labels)
    split = split or SplitSpec()
    return EvalReport(
        name or model_kind(model), acc, cm, curve, auc(curve),
        split.seed, split.test_fraction, split.stratified, test.majority_baseline(),
    )


def iteration_seed(master_seed: int, iteration: int) -> int:
    """Split seed of 0-based benchmark iteration `iteration`."""
    return mix(master_seed, iteration)


def with_seed(spec: ModelSpec, seed: int) -> ModelSpec:
    return ModelSpec(spec.name, spec.kind, replace(spec.params, seed=seed))


@dataclass
class Iteration:
    index: int
    split_seed: int
    n_train: int
    n_test: int
    reports: dict = field(default_factory=dict)
    errors: dict = field(default_factory=dict)


@dataclass
class BenchmarkTable:
    models: tuple[str, ...]
    iterations: list[Iteration]
    master_seed: int
    test_fraction: float
    stratified: bool
    dataset_rows: int
    dataset_majority_baseline: float

    def accuracy_grid(self) -> list[list[float | None]]:
        return [
            [it.reports[m].accuracy if m in it.reports else None for m in self.models]
            for it in self.iterations
        ]

    def means(self) -> dict[str, float | None]:
        out = {}
        for m in self.models:
            values = [it.reports[m].accuracy for it in self.iterations if m in it.reports]
            out[m] = math.fsum(values) / len(values) if values else None
        return out

    def as_dict(self) -> dict:
        return {
            "master_seed": self.master_seed,
            "test_fraction": self.test_fraction,
            "stratified": self.stratified,
            "dataset_rows": self.dataset_rows,
            "dataset_majority_baseline": self.dataset_majority_baseline,
            "models": list(self.models),
            "iterations": [
                {
                    "iteration": it.index + 1,
                    "split_seed": it.split_seed,
                    "n_train": it.n_train,
                    "n_test": it.n_test,
                    "reports": {m: r.as_dict(with_curve=False) for m, r in it.reports.items()},
                    "errors": it.errors,
                }
                for it in self.iterations
            ],
            "mean_accuracy": self.means(),
        }

    def to_csv(self) -> str:
        """Iterations as rows, models as columns, 4 decimals."""

        def cell(v):
            return "" if v is None else f"{v:.4f}"

        header = ["iteration", "split_seed", *self.models, "test_majority_baseline", "dataset_majority_baseline"]
        lines = [",".join(header)]
        for it, row in zip(self.iterations, self.accuracy_grid()):
            baseline = next(iter(it.reports.values())).majority_baseline if it.reports else None
            lines.append(",".join([
                f"ITERATION {it.index + 1}", str(it.split_seed), *map(cell, row),
                cell(baseline), cell(self.dataset_majority_baseline),
            ]))
        means = self.means()
        lines.append(",".join(["MEAN", "", *(cell(means[m]) for m in self.models), "", cell(self.dataset_majority_baseline)]))
        return "\n".join(lines) + "\n"


def run_benchmark(
    data: Dataset,
    specs: Sequence[ModelSpec] = DEFAULT_MODELS,
    n_iterations: int = 3,
    master_seed: int = 0,
    test_fraction: float = 0.30,
    stratified: bool = False,
) -> BenchmarkTable:
    """Train and score every model on the same split, once per iteration.

    Iteration k splits with seed mix(master_seed, k); model number m of that
    iteration is trained with seed mix(split_seed, m + 1). A model that fails
    to train leaves its error message in the iteration instead of a report.
    """
    if n_iterations < 1:
        raise EvalError("n_iterations must be at least 1")
    names = [s.name for s in specs]
    if len(set(names)) != len(names):
        raise EvalError("model names must be unique")
    iterations = []
    for k in range(n_iterations):
        seed = iteration_seed(master_seed, k)
        split = SplitSpec(test_fraction, seed, stratified)
        train_idx, test_idx = split_indices(data.labels, split)
        train, test = data.subset(train_idx), data.subset(test_idx)
        it = Iteration(k, seed, len(train_idx), len(test_idx))
        for m, spec in enumerate(specs):
            try:
                model = train_model(with_seed(spec, mix(seed, m + 1)), train)
                it.reports[spec.name] = evaluate(model, test, spec.name, split)
            except AttritionError as exc:
                log.error("iteration %d, %s: %s", k + 1, spec.name, exc)
                it.errors[spec.name] = f"{exc.module}: {exc}"
        iterations.append(it)
    return BenchmarkTable(
        tuple(names), iterations, master_seed, test_fraction, stratified, data.n, data.majority_baseline()
    )
