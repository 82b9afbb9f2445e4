"""Three from-scratch classifiers behind one train/score/predict surface.

Defaults are the experiment configuration: linear SVM (C=10,
max_iter=10000), logistic regression (C=1, max_iter=4000), gradient
boosting (learning_rate=1.0, n_estimators=1000, max_depth=10,
max_features='sqrt', min_samples_leaf=2, seed 0). SVM and logistic
regression standardize features (z-score fitted on training data only);
trees are scale-invariant and train on raw features.

Decision scores: signed margin for the SVM, toxic-class probability for
logistic regression, sigmoid of the ensemble sum for boosting. Higher
always means more toxic. predict() thresholds at 0 for margins and 0.5
for probabilities, breaking ties toward non_toxic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from ..corpus import NON_TOXIC, TOXIC
from ..errors import ConfigurationError
from .gbt import TreeNode, ensemble_raw, train_gbt
from .logreg import logistic_objective, train_logreg
from .scaling import apply_standardizer, fit_standardizer
from .svm import train_svm

__all__ = [
    "MODEL_KINDS",
    "DEFAULT_HYPERPARAMETERS",
    "ModelConfig",
    "TrainedModel",
    "train",
    "decision_scores",
    "predict",
    "save_model",
    "load_model",
    "model_to_json_dict",
    "model_from_json_dict",
    "logistic_objective",
]

MODEL_KINDS = ("linear_svm", "logistic_regression", "gradient_boosting")

DEFAULT_HYPERPARAMETERS: dict[str, dict] = {
    "linear_svm": {"C": 10.0, "max_iter": 10000, "tol": 1e-4},
    "logistic_regression": {"C": 1.0, "max_iter": 4000, "tol": 1e-6},
    "gradient_boosting": {
        "learning_rate": 1.0,
        "n_estimators": 1000,
        "max_depth": 10,
        "max_features": "sqrt",
        "min_samples_leaf": 2,
    },
}

_STANDARDIZED_KINDS = ("linear_svm", "logistic_regression")


@dataclass(frozen=True)
class ModelConfig:
    kind: str
    hyperparameters: Mapping = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ConfigurationError(f"unknown model kind {self.kind!r}")
        unknown = set(self.hyperparameters) - set(DEFAULT_HYPERPARAMETERS[self.kind])
        if unknown:
            raise ConfigurationError(
                f"unknown hyperparameters for {self.kind}: {sorted(unknown)}"
            )

    def resolved(self) -> dict:
        return {**DEFAULT_HYPERPARAMETERS[self.kind], **dict(self.hyperparameters)}


@dataclass(frozen=True)
class TrainedModel:
    kind: str
    config: ModelConfig
    params: dict
    standardization: tuple[np.ndarray, np.ndarray] | None
    metadata: dict


def _validate_training_inputs(X: np.ndarray, y01: np.ndarray) -> None:
    if X.ndim != 2:
        raise ValueError("X must be a 2-d matrix")
    if X.shape[0] != y01.shape[0]:
        raise ValueError("X and y row counts differ")
    finite = np.isfinite(X)
    if not finite.all():
        bad = int(np.argmin(finite.all(axis=0)))
        raise ValueError(f"non-finite values in feature column {bad}")
    classes = np.unique(y01)
    if classes.size < 2:
        raise ValueError("training labels contain a single class")


def encode_labels(y) -> np.ndarray:
    """Accept 'toxic'/'non_toxic' strings or 0/1 integers; toxic = 1."""
    arr = np.asarray(y)
    if arr.dtype.kind in ("U", "S", "O"):
        known = {TOXIC, NON_TOXIC}
        values = set(str(v) for v in arr)
        if not values <= known:
            raise ValueError(f"unknown labels: {sorted(values - known)}")
        return np.asarray([1 if str(v) == TOXIC else 0 for v in arr], dtype=np.int64)
    return arr.astype(np.int64)


def train(X: np.ndarray, y, cfg: ModelConfig) -> TrainedModel:
    X = np.asarray(X, dtype=np.float64)
    y01 = encode_labels(y)
    _validate_training_inputs(X, y01)
    hp = cfg.resolved()

    standardization = None
    X_train = X
    if cfg.kind in _STANDARDIZED_KINDS:
        mean, scale = fit_standardizer(X)
        standardization = (mean, scale)
        X_train = apply_standardizer(X, mean, scale)

    y_pm = np.where(y01 == 1, 1.0, -1.0)

    if cfg.kind == "linear_svm":
        weights, bias, metadata = train_svm(
            X_train, y_pm, C=float(hp["C"]), max_iter=int(hp["max_iter"]),
            tol=float(hp["tol"]), seed=cfg.seed,
        )
        params = {"weights": weights, "bias": bias}
    elif cfg.kind == "logistic_regression":
        weights, bias, metadata = train_logreg(
            X_train, y_pm, C=float(hp["C"]), max_iter=int(hp["max_iter"]),
            tol=float(hp["tol"]),
        )
        params = {"weights": weights, "bias": bias}
    else:
        init_score, trees, metadata = train_gbt(
            X_train, y01,
            learning_rate=float(hp["learning_rate"]),
            n_estimators=int(hp["n_estimators"]),
            max_depth=int(hp["max_depth"]),
            max_features=hp["max_features"],
            min_samples_leaf=int(hp["min_samples_leaf"]),
            seed=cfg.seed,
        )
        params = {
            "init_score": init_score,
            "learning_rate": float(hp["learning_rate"]),
            "trees": trees,
            "n_features": X.shape[1],
        }

    return TrainedModel(
        kind=cfg.kind, config=cfg, params=params,
        standardization=standardization, metadata=metadata,
    )


def _prepare(model: TrainedModel, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("X must be a 2-d matrix")
    if model.kind in ("linear_svm", "logistic_regression"):
        expected = model.params["weights"].shape[0]
    else:
        expected = model.params["n_features"]
    if X.shape[1] != expected:
        raise ValueError(f"expected {expected} feature columns, got {X.shape[1]}")
    if model.standardization is not None:
        mean, scale = model.standardization
        X = apply_standardizer(X, mean, scale)
    return X


def _stable_sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    e = np.exp(z[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def decision_scores(model: TrainedModel, X: np.ndarray) -> np.ndarray:
    """Higher score = more toxic. SVM: signed margin; LR and GBT:
    toxic-class probability in [0, 1]."""
    Xp = _prepare(model, X)
    if model.kind == "linear_svm":
        return Xp @ model.params["weights"] + model.params["bias"]
    if model.kind == "logistic_regression":
        return _stable_sigmoid(Xp @ model.params["weights"] + model.params["bias"])
    raw = ensemble_raw(
        model.params["init_score"], model.params["learning_rate"],
        model.params["trees"], Xp,
    )
    return _stable_sigmoid(raw)


def score_threshold(model: TrainedModel) -> float:
    return 0.0 if model.kind == "linear_svm" else 0.5


def predict(model: TrainedModel, X: np.ndarray) -> list[str]:
    """Labels; score exactly at the threshold goes to non_toxic."""
    scores = decision_scores(model, X)
    threshold = score_threshold(model)
    return [TOXIC if s > threshold else NON_TOXIC for s in scores]


def _tree_to_dict(node: TreeNode) -> dict:
    if node.is_leaf:
        return {"value": node.value}
    return {
        "feature": node.feature,
        "threshold": node.threshold,
        "left": _tree_to_dict(node.left),
        "right": _tree_to_dict(node.right),
    }


def _tree_from_dict(payload: dict) -> TreeNode:
    if "feature" not in payload:
        return TreeNode(value=float(payload["value"]))
    return TreeNode(
        feature=int(payload["feature"]),
        threshold=float(payload["threshold"]),
        left=_tree_from_dict(payload["left"]),
        right=_tree_from_dict(payload["right"]),
    )


def model_to_json_dict(model: TrainedModel) -> dict:
    if model.kind in ("linear_svm", "logistic_regression"):
        params = {
            "weights": [float(v) for v in model.params["weights"]],
            "bias": float(model.params["bias"]),
        }
    else:
        params = {
            "init_score": float(model.params["init_score"]),
            "learning_rate": float(model.params["learning_rate"]),
            "trees": [_tree_to_dict(t) for t in model.params["trees"]],
            "n_features": int(model.params["n_features"]),
        }
    standardization = None
    if model.standardization is not None:
        mean, scale = model.standardization
        standardization = {
            "mean": [float(v) for v in mean],
            "scale": [float(v) for v in scale],
        }
    metadata = {
        k: v for k, v in model.metadata.items()
        if not isinstance(v, list)  # long traces stay in memory only
    }
    return {
        "format_version": 1,
        "kind": model.kind,
        "config": {
            "hyperparameters": {
                k: v for k, v in model.config.resolved().items()
            },
            "seed": model.config.seed,
        },
        "standardization": standardization,
        "params": params,
        "metadata": metadata,
    }


def model_from_json_dict(payload: dict) -> TrainedModel:
    version = payload.get("format_version")
    if version != 1:
        raise ConfigurationError(f"unsupported model format version {version!r}")
    kind = payload["kind"]
    cfg = ModelConfig(
        kind=kind,
        hyperparameters=payload["config"]["hyperparameters"],
        seed=int(payload["config"]["seed"]),
    )
    if kind in ("linear_svm", "logistic_regression"):
        params = {
            "weights": np.asarray(payload["params"]["weights"], dtype=np.float64),
            "bias": float(payload["params"]["bias"]),
        }
    else:
        params = {
            "init_score": float(payload["params"]["init_score"]),
            "learning_rate": float(payload["params"]["learning_rate"]),
            "trees": [_tree_from_dict(t) for t in payload["params"]["trees"]],
            "n_features": int(payload["params"]["n_features"]),
        }
    standardization = None
    if payload.get("standardization") is not None:
        standardization = (
            np.asarray(payload["standardization"]["mean"], dtype=np.float64),
            np.asarray(payload["standardization"]["scale"], dtype=np.float64),
        )
    return TrainedModel(
        kind=kind, config=cfg, params=params,
        standardization=standardization, metadata=dict(payload.get("metadata", {})),
    )


def save_model(model: TrainedModel, path) -> None:
    payload = model_to_json_dict(model)
    Path(path).write_text(
        json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


def load_model(path) -> TrainedModel:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    return model_from_json_dict(payload)
