"""Pearson correlation matrix and the data behind the 2-D heatmaps and 3-D scatters."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from attrition.dataset import Dataset
from attrition.errors import DatasetError, StatsError

# Feature pairs and triples exported as heatmap and scatter data.
HEATMAP_PAIRS = (
    ("Age", "JobLevel"),
    ("JobLevel", "MonthlyIncome"),
    ("JobSatisfaction", "Attrition"),
    ("MaritalStatus", "StockOptionLevel"),
    ("MonthlyIncome", "Attrition"),
    ("PerformanceRating", "PercentSalaryHike"),
)
SCATTER_TRIPLES = (
    ("MonthlyIncome", "TotalWorkingYears", "Attrition"),
    ("TotalWorkingYears", "JobLevel", "Attrition"),
)

DEFAULT_BINS = 10
MAX_DISCRETE_LEVELS = 10


@dataclass(frozen=True)
class CorrelationMatrix:
    values: np.ndarray
    feature_names: tuple[str, ...]
    degenerate: np.ndarray

    def __getitem__(self, key):
        i, j = (self.feature_names.index(k) if isinstance(k, str) else k for k in key)
        return float(self.values[i, j])


def pearson_matrix(data: Dataset | np.ndarray, names: Sequence[str] | None = None) -> CorrelationMatrix:
    """Sample Pearson coefficients between all feature columns.

    Columns are mean-centered before the cross products (two-pass). Pairs
    involving a constant column are flagged in ``degenerate`` and stored as 0.
    """
    if isinstance(data, Dataset):
        X, names = data.features, data.feature_names
    else:
        X = np.asarray(data, dtype=np.float64)
        names = tuple(names) if names is not None else tuple(f"x{i}" for i in range(X.shape[1]))
    if X.shape[0] < 2:
        raise StatsError("correlation needs at least two rows")
    centered = X - X.mean(axis=0)
    ss = np.einsum("ij,ij->j", centered, centered)
    # ss can underflow to 0 for non-constant columns of subnormal spread
    constant = (np.ptp(X, axis=0) == 0.0) | ~(ss > 0)
    norms = np.sqrt(np.where(constant, 1.0, ss))
    values = (centered.T @ centered) / np.outer(norms, norms)
    values = np.clip((values + values.T) / 2.0, -1.0, 1.0)
    mask = constant[:, None] | constant[None, :]
    values[mask] = 0.0
    np.fill_diagonal(values, np.where(constant, 0.0, 1.0))
    values.flags.writeable = False
    mask.flags.writeable = False
    return CorrelationMatrix(values, tuple(names), mask)


def strongest_pairs(corr: CorrelationMatrix, k: int = 10) -> list[tuple[str, str, float]]:
    """Off-diagonal pairs sorted by |r|, largest first."""
    d = len(corr.feature_names)
    pairs = [
        (corr.feature_names[i], corr.feature_names[j], float(corr.values[i, j]))
        for i in range(d)
        for j in range(i + 1, d)
        if not corr.degenerate[i, j]
    ]
    pairs.sort(key=lambda p: (-abs(p[2]), p[0], p[1]))
    return pairs[:k]


BinSpec = Union[None, int, Sequence[float], str]


@dataclass(frozen=True)
class Axis:
    """Either numeric bin edges or one bin per discrete value."""

    name: str
    edges: tuple[float, ...] | None = None
    values: tuple[float, ...] | None = None
    labels: tuple[str, ...] = ()

    def __len__(self):
        return len(self.values) if self.values is not None else len(self.edges) - 1

    def assign(self, column: np.ndarray) -> np.ndarray:
        if self.values is not None:
            lookup = {v: i for i, v in enumerate(self.values)}
            try:
                return np.array([lookup[v] for v in column.tolist()], dtype=np.int64)
            except KeyError as exc:
                raise StatsError(f"{self.name}: value {exc.args[0]} has no bin") from None
        edges = np.asarray(self.edges)
        # right-closed last bin; everything outside clamps to the edge bins
        idx = np.searchsorted(edges, column, side="right") - 1
        return np.clip(idx, 0, len(edges) - 2)


def _fmt(v: float) -> str:
    return format(float(v), ".6g")


def make_axis(data: Dataset, name: str, bins: BinSpec = None) -> Axis:
    """Resolve a bin spec.

    ``None`` picks one bin per category for encoded categorical features and
    for numeric features with at most 10 distinct values, otherwise 10
    equal-width bins. An int asks for that many equal-width bins, a sequence
    gives explicit edges, and ``"values"`` forces one bin per distinct value.
    """
    column = data.column(name)
    if bins is None:
        if name == data.label_name:
            bins = "values"
        else:
            kind = data.kinds[data.feature_names.index(name)]
            discrete = kind != "numeric" or (
                len(np.unique(column)) <= MAX_DISCRETE_LEVELS and np.all(column == np.round(column))
            )
            bins = "values" if discrete else DEFAULT_BINS
    if isinstance(bins, str):
        if bins != "values":
            raise StatsError(f"unknown bin spec {bins!r}")
        values = tuple(float(v) for v in np.unique(column))
        levels = data.categories.get(name)
        if name == data.label_name:
            labels = tuple("Yes" if v else "No" for v in values)
        elif levels is not None:
            labels = tuple(levels[int(v)] for v in values)
        else:
            labels = tuple(_fmt(v) for v in values)
        return Axis(name, values=values, labels=labels)
    if isinstance(bins, (int, np.integer)):
        if bins < 1:
            raise StatsError("bin count must be positive")
        lo, hi = float(column.min()), float(column.max())
        if lo == hi:
            lo, hi = lo - 0.5, hi + 0.5
        edges = tuple(np.linspace(lo, hi, int(bins) + 1).tolist())
    else:
        edges = tuple(float(e) for e in bins)
        if len(edges) < 2 or any(b <= a for a, b in zip(edges, edges[1:])):
            raise StatsError("bin edges must be strictly increasing with at least two entries")
    labels = tuple(f"[{_fmt(a)}, {_fmt(b)})" for a, b in zip(edges, edges[1:]))
    labels = labels[:-1] + (labels[-1][:-1] + "]",)
    return Axis(name, edges=edges, labels=labels)


@dataclass(frozen=True)
class Histogram2D:
    x_axis: Axis
    y_axis: Axis
    counts: np.ndarray

    def argmax(self) -> tuple[int, int]:
        i, j = np.unravel_index(int(np.argmax(self.counts)), self.counts.shape)
        return int(i), int(j)


def histogram2d(data: Dataset, x: str, y: str, x_bins: BinSpec = None, y_bins: BinSpec = None) -> Histogram2D:
    try:
        xa, ya = make_axis(data, x, x_bins), make_axis(data, y, y_bins)
        xi, yi = xa.assign(data.column(x)), ya.assign(data.column(y))
    except DatasetError as exc:
        raise StatsError(str(exc)) from None
    counts = np.zeros((len(xa), len(ya)), dtype=np.int64)
    np.add.at(counts, (xi, yi), 1)
    return Histogram2D(xa, ya, counts)


@dataclass(frozen=True)
class Scatter3D:
    names: tuple[str, str, str]
    points: np.ndarray
    point_class: np.ndarray


def scatter3d(data: Dataset, x: str, y: str, z: str) -> Scatter3D:
    try:
        points = np.column_stack([data.column(x), data.column(y), data.column(z)])
    except DatasetError as exc:
        raise StatsError(str(exc)) from None
    return Scatter3D((x, y, z), points, data.labels.copy())


def conditional_window(data: Dataset, value: str, given: str, level: float, mass: float = 0.70) -> tuple[float, float]:
    """Shortest run of consecutive observed values of `value` among rows with
    ``given == level`` that holds at least `mass` of those rows.

    Ties in width resolve to the lowest window.
    """
    rows = data.column(given) == level
    if not rows.any():
        raise StatsError(f"no rows with {given} == {level}")
    values, counts = np.unique(data.column(value)[rows], return_counts=True)
    need = mass * counts.sum()
    cum = np.concatenate([[0], np.cumsum(counts)])
    best = None
    for i in range(len(values)):
        for j in range(i, len(values)):
            if cum[j + 1] - cum[i] >= need - 1e-12:
                width = values[j] - values[i]
                if best is None or width < best[0]:
                    best = (width, values[i], values[j])
                break
    return float(best[1]), float(best[2])
