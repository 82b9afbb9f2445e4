"""Binary logistic regression by full-batch gradient descent.

Objective (y in {-1, +1}; the intercept is not regularized):

    f(w, b) = 0.5 ||w||^2 + C * sum_i log(1 + exp(-y_i (w.x_i + b)))

Steepest descent with Armijo backtracking line search; the step size
carries over between iterations (doubled, capped) so the search stays
cheap. Stops when the gradient 2-norm reaches `tol` or after `max_iter`
iterations. All log/exp terms use overflow-safe forms.
"""

from __future__ import annotations

import numpy as np

_ARMIJO_C = 1e-4
_BACKTRACK = 0.5
_MAX_HALVINGS = 60


def _log1p_exp_neg(m: np.ndarray) -> np.ndarray:
    """log(1 + exp(-m)), elementwise, stable for any magnitude."""
    out = np.empty_like(m)
    pos = m >= 0
    out[pos] = np.log1p(np.exp(-m[pos]))
    out[~pos] = -m[~pos] + np.log1p(np.exp(m[~pos]))
    return out


def _sigmoid_neg(m: np.ndarray) -> np.ndarray:
    """sigmoid(-m), elementwise, stable."""
    out = np.empty_like(m)
    pos = m >= 0
    e = np.exp(-m[pos])
    out[pos] = e / (1.0 + e)
    e = np.exp(m[~pos])
    out[~pos] = 1.0 / (1.0 + e)
    return out


def logistic_objective(
    wb: np.ndarray, X: np.ndarray, y_pm: np.ndarray, C: float
) -> tuple[float, np.ndarray]:
    """Objective value and gradient at wb = [weights..., bias]."""
    w = wb[:-1]
    b = wb[-1]
    margins = y_pm * (X @ w + b)
    value = 0.5 * float(w @ w) + C * float(_log1p_exp_neg(margins).sum())
    coeff = -y_pm * _sigmoid_neg(margins)  # d/dz of the loss at z_i
    grad_w = w + C * (X.T @ coeff)
    grad_b = C * float(coeff.sum())
    return value, np.append(grad_w, grad_b)


def train_logreg(
    X: np.ndarray, y_pm: np.ndarray, C: float, max_iter: int, tol: float
) -> tuple[np.ndarray, float, dict]:
    """Returns (weights, bias, metadata)."""
    n, p = X.shape
    y = y_pm.astype(np.float64)
    wb = np.zeros(p + 1)
    value, grad = logistic_objective(wb, X, y, C)
    objective_trace = [value]
    step = 1.0
    iterations = 0

    for _ in range(max_iter):
        grad_norm = float(np.linalg.norm(grad))
        if grad_norm <= tol:
            break
        iterations += 1
        direction = -grad
        slope = -(grad_norm**2)
        step = min(step * 2.0, 1e4)
        for _ in range(_MAX_HALVINGS):
            candidate = wb + step * direction
            cand_value, cand_grad = logistic_objective(candidate, X, y, C)
            if cand_value <= value + _ARMIJO_C * step * slope:
                break
            step *= _BACKTRACK
        wb = candidate
        value, grad = cand_value, cand_grad
        objective_trace.append(value)

    metadata = {
        "iterations": iterations,
        "final_grad_norm": float(np.linalg.norm(grad)),
        "objective": objective_trace,
    }
    return wb[:p].copy(), float(wb[p]), metadata
