"""Per-feature z-score standardization for the margin/gradient models."""

from __future__ import annotations

import numpy as np


def fit_standardizer(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Column means and scales from training data only. Zero-variance
    columns get scale 1.0 so transforming them is a pure centering."""
    mean = X.mean(axis=0)
    std = X.std(axis=0, ddof=0)
    scale = np.where(std > 0.0, std, 1.0)
    return mean, scale


def apply_standardizer(X: np.ndarray, mean: np.ndarray, scale: np.ndarray) -> np.ndarray:
    return (X - mean) / scale
