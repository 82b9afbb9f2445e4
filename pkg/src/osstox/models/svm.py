"""Linear SVM trained by dual coordinate descent.

Primal problem (y in {-1, +1}, bias handled by augmenting each sample
with a constant 1 feature, so the intercept is regularized like the
weights):

    min_w  0.5 ||w||^2 + C * sum_i max(0, 1 - y_i w.x_i)

Dual box-constrained form, solved one alpha at a time with exact
coordinate minimization:

    min_a  0.5 a' Q a - sum(a),  0 <= a_i <= C,  Q_ij = y_i y_j x_i.x_j

The sample order each epoch is a seeded permutation, so training is a
deterministic function of (X, y, config). Training stops when the
primal-dual gap drops to `tol` or after `max_iter` epochs. The dual
objective per epoch is recorded; exact coordinate steps make it
non-increasing.
"""

from __future__ import annotations

import numpy as np

from ..rng import SplitMix64


def train_svm(
    X: np.ndarray,
    y_pm: np.ndarray,
    C: float,
    max_iter: int,
    tol: float,
    seed: int,
) -> tuple[np.ndarray, float, dict]:
    """Returns (weights, bias, metadata)."""
    n, p = X.shape
    Xa = np.hstack([X, np.ones((n, 1))])  # augmented bias column
    y = y_pm.astype(np.float64)

    alpha = np.zeros(n)
    w = np.zeros(p + 1)
    q_diag = np.einsum("ij,ij->i", Xa, Xa)  # always >= 1 thanks to the bias column

    dual_objective: list[float] = []
    gap = np.inf
    epochs = 0
    rng = SplitMix64(seed)
    order = list(range(n))

    for epoch in range(max_iter):
        rng.shuffle(order)
        for i in order:
            xi = Xa[i]
            g = y[i] * float(xi @ w) - 1.0
            a_old = alpha[i]
            a_new = min(max(a_old - g / q_diag[i], 0.0), C)
            if a_new != a_old:
                alpha[i] = a_new
                w += (a_new - a_old) * y[i] * xi

        epochs = epoch + 1
        margins = y * (Xa @ w)
        hinge = np.maximum(0.0, 1.0 - margins).sum()
        w_norm_sq = float(w @ w)
        primal = 0.5 * w_norm_sq + C * hinge
        dual = float(alpha.sum()) - 0.5 * w_norm_sq
        dual_objective.append(0.5 * w_norm_sq - float(alpha.sum()))  # minimized form
        gap = primal - dual
        if gap <= tol:
            break

    metadata = {
        "epochs": epochs,
        "final_gap": float(gap),
        "dual_objective": dual_objective,
    }
    return w[:p].copy(), float(w[p]), metadata
