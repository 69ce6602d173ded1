"""Weighted decision stumps and CART trees (Gini impurity).

Routing convention everywhere: a row goes left iff ``x[feature] <= threshold``.
Candidate thresholds are midpoints between consecutive distinct values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from attrition.errors import TreeError
from attrition.rng import make_rng

# Errors/gains closer than this are treated as equal when breaking ties.
TIE_TOL = 1e-12


@dataclass(frozen=True)
class Stump:
    """Depth-1 tree.

    polarity +1 predicts class 1 right of the threshold, -1 predicts class 1
    on the left. A degenerate stump (no usable split) always predicts
    ``constant``.
    """

    feature_index: int
    threshold: float
    polarity: int
    n_features: int
    degenerate: bool = False
    constant: int = 0

    @property
    def vote_left(self) -> int:
        if self.degenerate:
            return self.constant
        return 0 if self.polarity > 0 else 1

    @property
    def vote_right(self) -> int:
        if self.degenerate:
            return self.constant
        return 1 if self.polarity > 0 else 0

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if self.degenerate:
            return np.full(X.shape[0], self.constant, dtype=np.int64)
        right = X[:, self.feature_index] > self.threshold
        return np.where(right, self.vote_right, self.vote_left).astype(np.int64)


class StumpSearch:
    """Exhaustive stump search over a fixed training matrix.

    Column orderings are computed once, so repeated calls with new weights
    (boosting rounds) only pay for the cumulative sums.
    """

    def __init__(self, X: np.ndarray, y: np.ndarray):
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y)
        if X.ndim != 2 or X.shape[0] != y.shape[0] or X.shape[0] == 0:
            raise TreeError("X must be an n x d matrix with one label per row")
        self.X, self.y = X, y
        self.order = np.argsort(X, axis=0, kind="stable")
        xs = np.take_along_axis(X, self.order, axis=0)
        self.valid = xs[1:] > xs[:-1]  # (n-1, d): a boundary between distinct values
        self.midpoints = (xs[1:] + xs[:-1]) / 2.0
        self.positive = (y == 1).astype(np.float64)

    def fit(self, w: np.ndarray) -> tuple[Stump, float]:
        n, d = self.X.shape
        w = np.asarray(w, dtype=np.float64)
        if w.shape != (n,):
            raise TreeError("weight vector length does not match the number of rows")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
            raise TreeError("weights must be non-negative and sum to 1")
        w1 = w * self.positive
        w0 = w - w1
        total1, total0 = w1.sum(), w0.sum()
        if not self.valid.any():
            constant = 1 if total1 > total0 else 0
            stump = Stump(0, 0.0, 1, d, degenerate=True, constant=constant)
            return stump, float(min(total0, total1))
        c1 = np.cumsum(w1[self.order], axis=0)[:-1]
        c0 = np.cumsum(w0[self.order], axis=0)[:-1]
        # polarity +1: left -> 0, right -> 1
        err_plus = c1 + (total0 - c0)
        err_minus = c0 + (total1 - c1)
        errors = np.stack([err_plus, err_minus], axis=-1)  # (n-1, d, 2)
        errors[~self.valid] = np.inf
        best = errors.min()
        # first candidate in (feature, threshold, polarity +1 before -1) order
        ranked = np.transpose(errors <= best + TIE_TOL, (1, 0, 2)).ravel()
        flat = int(np.argmax(ranked))
        feature, rest = divmod(flat, 2 * (n - 1))
        position, side = divmod(rest, 2)
        stump = Stump(feature, float(self.midpoints[position, feature]), 1 if side == 0 else -1, d)
        error = float(errors[position, feature, side])
        return stump, min(max(error, 0.0), 0.5)


def train_stump(X, y, w) -> tuple[Stump, float]:
    """Minimum weighted 0-1 error stump; returns ``(stump, weighted_error)``.

    Ties go to the lowest feature index, then the lowest threshold, then
    polarity +1. If no feature has two distinct values the stump is
    degenerate and predicts the heavier class (class 0 on a tie).
    """
    return StumpSearch(X, y).fit(w)


@dataclass(frozen=True)
class Leaf:
    label: int
    counts: tuple[float, float]


@dataclass(frozen=True)
class Split:
    feature_index: int
    threshold: float
    left: "TreeNode"
    right: "TreeNode"


TreeNode = Union[Leaf, Split]


@dataclass(frozen=True)
class CartParams:
    max_depth: int | None = None
    min_samples_leaf: int = 1
    features_per_split: int | str | None = None
    seed: int = 0

    def __post_init__(self):
        if self.max_depth is not None and self.max_depth < 1:
            raise TreeError("max_depth must be positive or None")
        if self.min_samples_leaf < 1:
            raise TreeError("min_samples_leaf must be at least 1")
        f = self.features_per_split
        if isinstance(f, str) and f != "sqrt":
            raise TreeError(f"features_per_split must be an integer, 'sqrt' or None, got {f!r}")
        if isinstance(f, int) and f < 1:
            raise TreeError("features_per_split must be at least 1")

    def resolve_features(self, d: int) -> int:
        f = self.features_per_split
        if f is None:
            return d
        if f == "sqrt":
            return max(1, int(math.isqrt(d)))
        if f > d:
            raise TreeError(f"features_per_split={f} exceeds the {d} available features")
        return int(f)


@dataclass(frozen=True)
class Tree:
    root: TreeNode
    n_features: int

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise TreeError(f"expected rows with {self.n_features} features")
        out = np.empty(X.shape[0], dtype=np.int64)
        stack = [(self.root, np.arange(X.shape[0]))]
        while stack:
            node, rows = stack.pop()
            if isinstance(node, Leaf):
                out[rows] = node.label
                continue
            go_left = X[rows, node.feature_index] <= node.threshold
            stack.append((node.left, rows[go_left]))
            stack.append((node.right, rows[~go_left]))
        return out

    def depth(self) -> int:
        def walk(node):
            return 0 if isinstance(node, Leaf) else 1 + max(walk(node.left), walk(node.right))

        return walk(self.root)

    def n_leaves(self) -> int:
        def walk(node):
            return 1 if isinstance(node, Leaf) else walk(node.left) + walk(node.right)

        return walk(self.root)


def gini(counts) -> float:
    """Gini impurity 1 - sum p_c^2 of (possibly weighted) class counts."""
    counts = np.asarray(counts, dtype=np.float64)
    total = counts.sum()
    if total <= 0:
        return 0.0
    p = counts / total
    return float(1.0 - np.dot(p, p))


def _leaf(w0: float, w1: float) -> Leaf:
    return Leaf(1 if w1 > w0 else 0, (float(w0), float(w1)))


def _best_split(X, y, w, features, min_leaf):
    """Best (gain, feature, threshold) among `features`, or None."""
    n = X.shape[0]
    w1_all = w * (y == 1)
    total = w.sum()
    total1 = w1_all.sum()
    parent = 1.0 - (total1 / total) ** 2 - ((total - total1) / total) ** 2
    best = None
    sizes = np.arange(1, n)
    size_ok = (sizes >= min_leaf) & (n - sizes >= min_leaf)
    for f in sorted(features):
        order = np.argsort(X[:, f], kind="stable")
        xs = X[order, f]
        ok = (xs[1:] > xs[:-1]) & size_ok
        if not ok.any():
            continue
        wl = np.cumsum(w[order])[:-1]
        wl1 = np.cumsum(w1_all[order])[:-1]
        wr = total - wl
        wr1 = total1 - wl1
        with np.errstate(divide="ignore", invalid="ignore"):
            gl = 1.0 - (wl1 / wl) ** 2 - ((wl - wl1) / wl) ** 2
            gr = 1.0 - (wr1 / wr) ** 2 - ((wr - wr1) / wr) ** 2
            child = (wl * gl + wr * gr) / total
        gain = np.where(ok & (wl > 0) & (wr > 0), parent - child, -np.inf)
        k = int(np.argmax(gain))
        if gain[k] > TIE_TOL and (best is None or gain[k] > best[0] + TIE_TOL):
            best = (float(gain[k]), int(f), float((xs[k] + xs[k + 1]) / 2.0))
    return best


def train_cart(X, y, w=None, params: CartParams = CartParams()) -> Tree:
    """Grow a binary classification tree by greedy weighted-Gini splits.

    With ``features_per_split`` below d each split first looks at a random
    feature subset; if none of those features can reduce impurity the
    remaining features are tried in the same random order before the node
    becomes a leaf.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2 or X.shape[0] < 1 or X.shape[0] != y.shape[0]:
        raise TreeError("X must be an n x d matrix (n >= 1) with one label per row")
    n, d = X.shape
    w = np.ones(n) if w is None else np.asarray(w, dtype=np.float64)
    if w.shape != (n,) or np.any(w < 0):
        raise TreeError("weights must be non-negative, one per row")
    k = params.resolve_features(d)
    rng = make_rng(params.seed)

    def grow(rows, depth):
        wr, yr = w[rows], y[rows]
        w1 = float(wr[yr == 1].sum())
        w0 = float(wr.sum()) - w1
        if (
            w0 <= 0
            or w1 <= 0
            or (params.max_depth is not None and depth >= params.max_depth)
            or len(rows) < 2 * params.min_samples_leaf
        ):
            return _leaf(w0, w1)
        candidates = rng.permutation(d) if k < d else np.arange(d)
        Xr = X[rows]
        found = _best_split(Xr, yr, wr, candidates[:k], params.min_samples_leaf)
        start = k
        while found is None and start < d:
            found = _best_split(Xr, yr, wr, candidates[start : start + 1], params.min_samples_leaf)
            start += 1
        if found is None:
            return _leaf(w0, w1)
        _, f, threshold = found
        left = Xr[:, f] <= threshold
        return Split(f, threshold, grow(rows[left], depth + 1), grow(rows[~left], depth + 1))

    return Tree(grow(np.arange(n), 0), d)


def tree_predict(model: Stump | Tree, x) -> int:
    """Class of a single row."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != model.n_features:
        raise TreeError(f"row has {x.shape[-1] if x.ndim else 0} features, model expects {model.n_features}")
    return int(model.predict(x[None, :])[0])
