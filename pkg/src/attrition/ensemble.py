"""Discrete AdaBoost over stumps and bootstrap-aggregated CART forests."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from attrition.dataset import Dataset
from attrition.errors import EnsembleError
from attrition.rng import make_rng, mix
from attrition.trees import CartParams, Stump, StumpSearch, Tree, train_cart

EPS_FLOOR = 1e-10


@dataclass(frozen=True)
class AdaBoostParams:
    n_estimators: int = 1000
    learning_rate: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.n_estimators < 1:
            raise EnsembleError("n_estimators must be at least 1")
        if not self.learning_rate > 0:
            raise EnsembleError("learning_rate must be positive")


@dataclass(frozen=True)
class AdaBoostModel:
    stumps: tuple[Stump, ...]
    alphas: tuple[float, ...]
    params: AdaBoostParams
    n_features: int
    errors: tuple[float, ...] = ()
    stop_reason: str = "n_estimators"

    def score(self, X) -> np.ndarray:
        """Normalized weighted vote in [-1, 1]; class 1 iff score > 0."""
        X = _rows(X, self.n_features)
        if not self.stumps:
            raise EnsembleError("empty AdaBoost model")
        total = np.zeros(X.shape[0])
        for stump, alpha in zip(self.stumps, self.alphas):
            total += alpha * (2.0 * stump.predict(X) - 1.0)
        return total / math.fsum(self.alphas)

    def predict(self, X) -> np.ndarray:
        return (self.score(X) > 0).astype(np.int64)


def _rows(X, d: int) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != d:
        raise EnsembleError(f"expected rows with {d} features, got shape {X.shape}")
    return X


def _xy(train) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(train, Dataset):
        return train.features, train.labels
    X, y = train
    return np.asarray(X, dtype=np.float64), np.asarray(y, dtype=np.int64)


def _check_classes(y) -> None:
    present = set(np.unique(y).tolist())
    if present != {0, 1}:
        raise EnsembleError(f"training labels must contain both classes, found {sorted(present)}")


def train_adaboost(
    train: Dataset | tuple,
    params: AdaBoostParams = AdaBoostParams(),
    on_round: Callable[[int, np.ndarray, Stump, float], None] | None = None,
) -> AdaBoostModel:
    """Stagewise boosting of weighted stumps with shrinkage.

    Round t fits the best stump under the current weights, takes
    alpha_t = learning_rate * 0.5 * ln((1 - eps_t) / eps_t) and multiplies
    each weight by exp(-alpha_t * y_i * h_t(x_i)) (labels and votes in
    {-1, +1}) before renormalizing, so the weights stay proportional to
    exp(-margin). eps_t == 0 is floored at 1e-10 and ends training after that
    round; eps_t >= 0.5 ends it before the round is added.

    ``on_round(t, weights, stump, alpha)`` sees the renormalized weights.
    """
    X, y = _xy(train)
    _check_classes(y)
    n, d = X.shape
    search = StumpSearch(X, y)
    signs = 2.0 * y - 1.0
    w = np.full(n, 1.0 / n)
    stumps, alphas, errors = [], [], []
    reason = "n_estimators"
    for t in range(params.n_estimators):
        stump, eps = search.fit(w)
        if eps >= 0.5:
            reason = "no stump better than chance"
            break
        perfect = eps <= 0.0
        eps = max(eps, EPS_FLOOR)
        alpha = params.learning_rate * 0.5 * math.log((1.0 - eps) / eps)
        votes = 2.0 * stump.predict(X) - 1.0
        w = w * np.exp(-alpha * signs * votes)
        w /= w.sum()
        stumps.append(stump)
        alphas.append(alpha)
        errors.append(eps)
        if on_round is not None:
            on_round(t, w, stump, alpha)
        if perfect:
            reason = "zero training error"
            break
    if not stumps:
        raise EnsembleError("AdaBoost found no stump better than chance")
    return AdaBoostModel(tuple(stumps), tuple(alphas), params, d, tuple(errors), reason)


def adaboost_score(model: AdaBoostModel, x) -> float:
    return float(model.score(np.asarray(x, dtype=np.float64)[None, :])[0])


def exponential_loss(model: AdaBoostModel, X, y, rounds: int | None = None) -> float:
    """Mean exp(-y F(x)) of the first `rounds` stages (unnormalized F)."""
    X = _rows(X, model.n_features)
    signs = 2.0 * np.asarray(y) - 1.0
    F = np.zeros(X.shape[0])
    for stump, alpha in list(zip(model.stumps, model.alphas))[:rounds]:
        F += alpha * (2.0 * stump.predict(X) - 1.0)
    return float(np.mean(np.exp(-signs * F)))


@dataclass(frozen=True)
class ForestParams:
    n_trees: int = 100
    cart: CartParams = field(default_factory=lambda: CartParams(features_per_split="sqrt"))
    seed: int = 0
    bootstrap: bool = True

    def __post_init__(self):
        if self.n_trees < 1:
            raise EnsembleError("n_trees must be at least 1")


@dataclass(frozen=True)
class ForestModel:
    trees: tuple[Tree, ...]
    tree_seeds: tuple[int, ...]
    params: ForestParams
    n_features: int

    def votes(self, X) -> np.ndarray:
        X = _rows(X, self.n_features)
        if not self.trees:
            raise EnsembleError("empty forest")
        return np.stack([tree.predict(X) for tree in self.trees])

    def score(self, X) -> np.ndarray:
        """Fraction of trees voting class 1."""
        votes = self.votes(X)
        return votes.sum(axis=0) / votes.shape[0]

    def predict(self, X) -> np.ndarray:
        votes = self.votes(X)
        ones = votes.sum(axis=0)
        # strict majority; an even split goes to class 0
        return (2 * ones > votes.shape[0]).astype(np.int64)


def tree_seed(master: int, t: int) -> int:
    return mix(master, t)


def train_forest(train: Dataset | tuple, params: ForestParams = ForestParams()) -> ForestModel:
    """Each tree t gets seed mix(master, t); its bootstrap rows come from the
    stream mix(seed_t, 0) and its feature subsets from mix(seed_t, 1), so a
    tree does not depend on how many trees were trained before it."""
    X, y = _xy(train)
    _check_classes(y)
    n, d = X.shape
    trees, seeds = [], []
    for t in range(params.n_trees):
        seed_t = tree_seed(params.seed, t)
        if params.bootstrap:
            rows = make_rng(mix(seed_t, 0)).integers(0, n, size=n)
        else:
            rows = np.arange(n)
        cart = replace(params.cart, seed=mix(seed_t, 1))
        trees.append(train_cart(X[rows], y[rows], None, cart))
        seeds.append(seed_t)
    return ForestModel(tuple(trees), tuple(seeds), params, d)


def forest_predict(model: ForestModel, x) -> tuple[int, float]:
    row = np.asarray(x, dtype=np.float64)[None, :]
    return int(model.predict(row)[0]), float(model.score(row)[0])
