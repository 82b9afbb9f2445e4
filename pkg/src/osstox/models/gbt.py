"""Gradient-boosted regression trees on the logistic loss.

Construction (y in {0, 1}):

* the ensemble starts at the prior log-odds F0 = log(p / (1 - p));
* each round fits a regression tree to the residuals r_i = y_i - p_i by
  maximizing variance reduction, considering a seeded random subsample of
  ceil(sqrt(n_features)) features at every split;
* each leaf takes a single Newton step on the leaf's logistic loss,
  sum(r) / sum(p (1 - p)), then halves the step until the leaf loss does
  not increase (the raw Newton step can overshoot on saturated leaves),
  so the training loss is non-increasing in ensemble size by
  construction;
* split ties break to the lowest feature index, then lowest threshold.

Everything is a deterministic function of (X, y, config): feature
subsets come from a SplitMix64 stream consumed in depth-first node
order, and there is no other randomness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..rng import SplitMix64

_NEWTON_CAP = 20.0  # |leaf value| bound before the halving safeguard
_MIN_HESSIAN = 1e-12
_LOSS_FLOOR = 1e-12  # stop boosting once mean training loss is this small


@dataclass
class TreeNode:
    feature: int | None = None
    threshold: float | None = None
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    value: float = 0.0

    @property
    def is_leaf(self) -> bool:
        return self.feature is None


def _log_loss_terms(F: np.ndarray, y01: np.ndarray) -> np.ndarray:
    """Elementwise log(1 + exp(-m)) with m = F for y=1 and m = -F for y=0."""
    m = np.where(y01 == 1, F, -F)
    out = np.empty_like(m)
    pos = m >= 0
    out[pos] = np.log1p(np.exp(-m[pos]))
    out[~pos] = -m[~pos] + np.log1p(np.exp(m[~pos]))
    return out


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    e = np.exp(z[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def _best_split(
    X: np.ndarray,
    residual: np.ndarray,
    rows: np.ndarray,
    features: list[int],
    min_samples_leaf: int,
):
    """Best (feature, threshold, improvement, left_rows, right_rows) over
    the given feature subset, or None. Features arrive sorted ascending;
    strict improvement comparisons give the documented tie-breaking."""
    r = residual[rows]
    n = rows.size
    total = r.sum()
    parent_sse = float((r * r).sum() - (total * total) / n)
    if parent_sse <= 0.0:
        return None

    best = None  # (improvement, feature, threshold, order, split_pos)
    for feature in features:
        values = X[rows, feature]
        order = np.argsort(values, kind="stable")
        sorted_vals = values[order]
        sorted_r = r[order]
        cum = np.cumsum(sorted_r)
        cumsq = np.cumsum(sorted_r * sorted_r)

        # candidate split after position k-1 (left size k)
        ks = np.arange(min_samples_leaf, n - min_samples_leaf + 1)
        if ks.size == 0:
            continue
        distinct = sorted_vals[ks - 1] < sorted_vals[ks]
        ks = ks[distinct]
        if ks.size == 0:
            continue
        left_sum = cum[ks - 1]
        left_sq = cumsq[ks - 1]
        right_sum = total - left_sum
        right_sq = cumsq[-1] - left_sq
        left_sse = left_sq - (left_sum * left_sum) / ks
        right_sse = right_sq - (right_sum * right_sum) / (n - ks)
        improvements = parent_sse - (left_sse + right_sse)

        idx = int(np.argmax(improvements))  # first maximum, so lowest threshold
        improvement = float(improvements[idx])
        if improvement <= 0.0:
            continue
        k = int(ks[idx])
        threshold = 0.5 * (float(sorted_vals[k - 1]) + float(sorted_vals[k]))
        if best is None or improvement > best[0]:  # ties keep the lowest feature
            best = (improvement, feature, threshold, rows[order[:k]], rows[order[k:]])

    return best


def _build_tree(
    X: np.ndarray,
    residual: np.ndarray,
    rows: np.ndarray,
    depth: int,
    max_depth: int,
    min_samples_leaf: int,
    n_subsample: int,
    rng: SplitMix64,
    leaves: list[tuple[TreeNode, np.ndarray]],
) -> TreeNode:
    node = TreeNode()
    if depth < max_depth and rows.size >= 2 * min_samples_leaf:
        features = sorted(rng.sample(range(X.shape[1]), n_subsample))
        split = _best_split(X, residual, rows, features, min_samples_leaf)
        if split is not None:
            _, feature, threshold, left_rows, right_rows = split
            node.feature = feature
            node.threshold = threshold
            node.left = _build_tree(
                X, residual, left_rows, depth + 1, max_depth,
                min_samples_leaf, n_subsample, rng, leaves,
            )
            node.right = _build_tree(
                X, residual, right_rows, depth + 1, max_depth,
                min_samples_leaf, n_subsample, rng, leaves,
            )
            return node
    leaves.append((node, rows))
    return node


def _leaf_newton_value(
    F: np.ndarray, y01: np.ndarray, rows: np.ndarray, learning_rate: float
) -> float:
    """Newton step for the leaf, halved until the leaf loss (after the
    learning-rate multiplication) does not increase."""
    p = _sigmoid(F[rows])
    num = float((y01[rows] - p).sum())
    if num == 0.0:
        return 0.0
    den = float((p * (1.0 - p)).sum())
    if den < _MIN_HESSIAN:
        value = math.copysign(_NEWTON_CAP, num)
    else:
        value = num / den
        value = math.copysign(min(abs(value), _NEWTON_CAP), value)

    base_loss = float(_log_loss_terms(F[rows], y01[rows]).sum())
    for _ in range(60):
        stepped = float(_log_loss_terms(F[rows] + learning_rate * value, y01[rows]).sum())
        if stepped <= base_loss:
            return value
        value *= 0.5
    return 0.0


def tree_predict(node: TreeNode, X: np.ndarray) -> np.ndarray:
    out = np.empty(X.shape[0])
    stack = [(node, np.arange(X.shape[0]))]
    while stack:
        current, rows = stack.pop()
        if rows.size == 0:
            continue
        if current.is_leaf:
            out[rows] = current.value
            continue
        mask = X[rows, current.feature] <= current.threshold
        stack.append((current.left, rows[mask]))
        stack.append((current.right, rows[~mask]))
    return out


def train_gbt(
    X: np.ndarray,
    y01: np.ndarray,
    learning_rate: float,
    n_estimators: int,
    max_depth: int,
    max_features,
    min_samples_leaf: int,
    seed: int,
) -> tuple[float, list[TreeNode], dict]:
    """Returns (init_score, trees, metadata)."""
    n, p = X.shape
    if max_features == "sqrt":
        n_subsample = min(p, math.ceil(math.sqrt(p)))
    elif max_features is None:
        n_subsample = p
    else:
        n_subsample = max(1, min(p, int(max_features)))

    y = y01.astype(np.float64)
    prior = float(y.mean())
    prior = min(max(prior, 1e-12), 1.0 - 1e-12)
    init_score = math.log(prior / (1.0 - prior))

    F = np.full(n, init_score)
    rng = SplitMix64(seed)
    trees: list[TreeNode] = []
    loss_trace = [float(_log_loss_terms(F, y).mean())]

    for _ in range(n_estimators):
        if loss_trace[-1] <= _LOSS_FLOOR:
            break
        residual = y - _sigmoid(F)
        leaves: list[tuple[TreeNode, np.ndarray]] = []
        root = _build_tree(
            X, residual, np.arange(n), 0, max_depth,
            min_samples_leaf, n_subsample, rng, leaves,
        )
        for leaf, rows in leaves:
            leaf.value = _leaf_newton_value(F, y, rows, learning_rate)
            F[rows] += learning_rate * leaf.value
        trees.append(root)
        loss_trace.append(float(_log_loss_terms(F, y).mean()))

    metadata = {
        "n_trees": len(trees),
        "training_loss": loss_trace,
        "init_score": init_score,
    }
    return init_score, trees, metadata


def ensemble_raw(init_score: float, learning_rate: float, trees, X: np.ndarray) -> np.ndarray:
    raw = np.full(X.shape[0], init_score)
    for tree in trees:
        raw += learning_rate * tree_predict(tree, X)
    return raw
