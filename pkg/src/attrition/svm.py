"""Soft-margin kernel SVM trained on its dual with pairwise (SMO-type) updates.

Dual problem, labels y in {-1, +1}:

    maximize   sum(a) - 1/2 a^T Q a,   Q_ij = y_i y_j K(x_i, x_j)
    subject to 0 <= a_i <= C,  sum(a_i y_i) = 0

Each step picks the maximal-violating index i and the partner j with the
largest second-order gain (the libsvm working-set rule), solves the
two-variable subproblem exactly and clips it to the box.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from attrition.dataset import Dataset
from attrition.errors import SvmError

log = logging.getLogger(__name__)

KERNELS = ("linear", "rbf")
GAMMA_POLICIES = ("one_over_n_instances", "one_over_n_features", "explicit")
TAU = 1e-12


def rbf_kernel(x, z, gamma: float) -> float:
    x = np.asarray(x, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    if x.shape != z.shape:
        raise SvmError(f"dimension mismatch: {x.shape} vs {z.shape}")
    if not gamma > 0:
        raise SvmError("gamma must be positive")
    diff = x - z
    return float(np.exp(-gamma * np.dot(diff, diff)))


def rbf_gram(A: np.ndarray, B: np.ndarray, gamma: float) -> np.ndarray:
    sq = (A * A).sum(axis=1)[:, None] + (B * B).sum(axis=1)[None, :] - 2.0 * A @ B.T
    return np.exp(-gamma * np.maximum(sq, 0.0))


@dataclass(frozen=True)
class Scaler:
    means: np.ndarray
    stds: np.ndarray

    @classmethod
    def fit(cls, X) -> "Scaler":
        X = np.asarray(X, dtype=np.float64)
        means = X.mean(axis=0)
        stds = X.std(axis=0)
        stds = np.where(stds > 0, stds, 1.0)
        return cls(means, stds)

    @classmethod
    def identity(cls, d: int) -> "Scaler":
        return cls(np.zeros(d), np.ones(d))

    def transform(self, X) -> np.ndarray:
        return (np.asarray(X, dtype=np.float64) - self.means) / self.stds


@dataclass(frozen=True)
class SvmParams:
    C: float = 1.0
    kernel: str = "linear"
    gamma_policy: str = "one_over_n_instances"
    gamma: float | None = None
    tolerance: float = 1e-3
    max_passes: int = 200
    seed: int = 0

    def __post_init__(self):
        if not self.C > 0:
            raise SvmError("C must be positive")
        if self.kernel not in KERNELS:
            raise SvmError(f"unknown kernel {self.kernel!r}; choose from {KERNELS}")
        if self.gamma_policy not in GAMMA_POLICIES:
            raise SvmError(f"unknown gamma policy {self.gamma_policy!r}")
        if self.gamma_policy == "explicit" and not (self.gamma is not None and self.gamma > 0):
            raise SvmError("explicit gamma must be a positive number")
        if not self.tolerance > 0 or self.max_passes < 1:
            raise SvmError("tolerance must be positive and max_passes at least 1")

    def resolve_gamma(self, n: int, d: int) -> float:
        if self.gamma_policy == "one_over_n_instances":
            return 1.0 / n
        if self.gamma_policy == "one_over_n_features":
            return 1.0 / d
        return float(self.gamma)


@dataclass
class DualSolution:
    alpha: np.ndarray
    bias: float
    objective: float
    converged: bool
    iterations: int
    gap: float
    trace: list = field(default_factory=list)


def dual_objective(alpha, K, y) -> float:
    ay = alpha * y
    return float(alpha.sum() - 0.5 * ay @ K @ ay)


def solve_dual(K, y, C: float, tolerance: float = 1e-3, max_iter: int = 100_000, trace: bool = False) -> DualSolution:
    """Solve the SVM dual for a precomputed Gram matrix `K` and labels in {-1, +1}.

    Stops when the maximal KKT violation m - M drops below `tolerance`.
    With ``trace=True`` the dual objective is recorded after every update.
    Ties in the working-set selection go to the lowest index.
    """
    K = np.asarray(K, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = y.shape[0]
    if K.shape != (n, n):
        raise SvmError("Gram matrix must be n x n")
    if not np.all(np.abs(y) == 1):
        raise SvmError("dual labels must be -1 or +1")
    diag = np.diag(K).copy()
    alpha = np.zeros(n)
    G = -np.ones(n)  # gradient of 1/2 a^T Q a - sum(a)
    pos = y > 0
    history = []
    converged = False
    gap = np.inf
    it = 0
    while it < max_iter:
        up = np.where(pos, alpha < C, alpha > 0)
        low = np.where(pos, alpha > 0, alpha < C)
        score = -y * G
        if not up.any() or not low.any():
            converged, gap = True, 0.0
            break
        i = int(np.argmax(np.where(up, score, -np.inf)))
        m = score[i]
        M = np.min(np.where(low, score, np.inf))
        gap = m - M
        if gap < tolerance:
            converged = True
            break
        b = m - score
        a = diag[i] + diag - 2.0 * K[i]
        a = np.where(a > 0, a, TAU)
        cand = low & (b > 0)
        j = int(np.argmin(np.where(cand, -(b * b) / a, np.inf)))
        step = b[j] / a[j]
        step = min(
            step,
            C - alpha[i] if pos[i] else alpha[i],
            alpha[j] if pos[j] else C - alpha[j],
        )
        alpha[i] += y[i] * step
        alpha[j] -= y[j] * step
        for t in (i, j):
            if alpha[t] < 1e-14 * C:
                alpha[t] = 0.0
            elif alpha[t] > C * (1 - 1e-14):
                alpha[t] = C
        G += step * y * (K[:, i] - K[:, j])
        it += 1
        if trace:
            history.append(0.5 * alpha.sum() - 0.5 * alpha @ G)
    bias = -_rho(alpha, G, y, C)
    objective = 0.5 * alpha.sum() - 0.5 * alpha @ G
    return DualSolution(alpha, bias, float(objective), converged, it, float(gap), history)


def _rho(alpha, G, y, C) -> float:
    yG = y * G
    free = (alpha > 0) & (alpha < C)
    if free.any():
        return float(yG[free].mean())
    pos = y > 0
    at_upper = alpha >= C
    at_lower = alpha <= 0
    # bounds on rho implied by the KKT conditions of the bounded variables
    lb_mask = (pos & at_upper) | (~pos & at_lower)
    ub_mask = (pos & at_lower) | (~pos & at_upper)
    lb = yG[lb_mask].max() if lb_mask.any() else -np.inf
    ub = yG[ub_mask].min() if ub_mask.any() else np.inf
    if np.isinf(lb) or np.isinf(ub):
        return float(ub if np.isinf(lb) else lb)
    return float((lb + ub) / 2.0)


@dataclass(frozen=True)
class SvmModel:
    kernel: str
    bias: float
    scaler: Scaler
    n_features: int
    weights: np.ndarray | None = None
    support_vectors: np.ndarray | None = None
    dual_coef: np.ndarray | None = None
    gamma: float | None = None
    C: float = 1.0
    converged: bool = True
    iterations: int = 0

    def score(self, X) -> np.ndarray:
        """Signed decision value; class 1 iff score > 0."""
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[None, :]
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise SvmError(f"expected rows with {self.n_features} features, got shape {X.shape}")
        Z = self.scaler.transform(X)
        if self.kernel == "linear":
            return Z @ self.weights + self.bias
        return rbf_gram(Z, self.support_vectors, self.gamma) @ self.dual_coef + self.bias

    def predict(self, X) -> np.ndarray:
        return (self.score(X) > 0).astype(np.int64)


def train_svm(train: Dataset | tuple, params: SvmParams = SvmParams(), scale: bool = True) -> SvmModel:
    if isinstance(train, Dataset):
        X, labels = train.features, train.labels
    else:
        X, labels = (np.asarray(a) for a in train)
    X = np.asarray(X, dtype=np.float64)
    labels = np.asarray(labels)
    if set(np.unique(labels).tolist()) != {0, 1}:
        raise SvmError("training labels must contain both classes")
    n, d = X.shape
    scaler = Scaler.fit(X) if scale else Scaler.identity(d)
    Z = scaler.transform(X)
    y = np.where(labels == 1, 1.0, -1.0)
    gamma = None
    if params.kernel == "linear":
        K = Z @ Z.T
    else:
        gamma = params.resolve_gamma(n, d)
        K = rbf_gram(Z, Z, gamma)
    sol = solve_dual(K, y, params.C, params.tolerance, params.max_passes * n)
    if not sol.converged:
        log.warning("SVM dual did not converge in %d updates (KKT gap %.3g)", sol.iterations, sol.gap)
    coef = sol.alpha * y
    if params.kernel == "linear":
        return SvmModel(
            "linear", sol.bias, scaler, d, weights=coef @ Z, C=params.C,
            converged=sol.converged, iterations=sol.iterations,
        )
    sv = sol.alpha > 0
    return SvmModel(
        "rbf", sol.bias, scaler, d, support_vectors=Z[sv], dual_coef=coef[sv], gamma=gamma,
        C=params.C, converged=sol.converged, iterations=sol.iterations,
    )


def svm_score(model: SvmModel, x) -> float:
    return float(model.score(np.asarray(x, dtype=np.float64)[None, :])[0])
