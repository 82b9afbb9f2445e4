"""Stratified k-fold driver and metrics.

Metrics are computed per class (toxic = class 1 = positive). ROC-AUC is
the Mann-Whitney rank statistic with midranks for ties, which makes the
class-0 AUC on negated scores identical to the class-1 AUC. Cross
validation refits standardization and the model on the k-1 training
folds only, and reports per-fold metrics plus their unweighted mean
(pooled aggregation over concatenated fold predictions is available as a
flag).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import models
from .corpus import Corpus, stratified_assignment
from .errors import CorpusError
from .features import FeatureConfig, Resources, feature_matrix

METRIC_COLUMNS = ("p0", "r0", "f1_0", "roc0", "p1", "r1", "f1_1", "roc1", "mcc")


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise ValueError("confusion counts must be non-negative")

    @classmethod
    def from_predictions(cls, gold01: Sequence[int], pred01: Sequence[int]) -> "ConfusionMatrix":
        gold = np.asarray(gold01)
        pred = np.asarray(pred01)
        if gold.shape != pred.shape:
            raise ValueError("gold and predicted lengths differ")
        return cls(
            tp=int(np.sum((gold == 1) & (pred == 1))),
            fp=int(np.sum((gold == 0) & (pred == 1))),
            fn=int(np.sum((gold == 1) & (pred == 0))),
            tn=int(np.sum((gold == 0) & (pred == 0))),
        )

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(
            tp=self.tp + other.tp, fp=self.fp + other.fp,
            fn=self.fn + other.fn, tn=self.tn + other.tn,
        )


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    undefined: frozenset = field(default_factory=frozenset)


def _ratio(num: int, den: int, flag: str, undefined: set) -> float:
    if den == 0:
        undefined.add(flag)
        return 0.0
    return num / den


def prf(cm: ConfusionMatrix) -> dict[int, ClassMetrics]:
    """Per-class precision/recall/F1; 0/0 resolves to 0 and the metric name
    is flagged in `undefined`."""
    out = {}
    for cls, tp, fp, fn in ((1, cm.tp, cm.fp, cm.fn), (0, cm.tn, cm.fn, cm.fp)):
        undefined: set = set()
        precision = _ratio(tp, tp + fp, "precision", undefined)
        recall = _ratio(tp, tp + fn, "recall", undefined)
        if precision + recall == 0.0:
            undefined.add("f1")
            f1 = 0.0
        else:
            f1 = 2.0 * precision * recall / (precision + recall)
        out[cls] = ClassMetrics(
            precision=precision, recall=recall, f1=f1, undefined=frozenset(undefined)
        )
    return out


def mcc(cm: ConfusionMatrix) -> float:
    """Matthews correlation; 0.0 when any marginal is empty."""
    factors = (
        (cm.tp + cm.fp), (cm.tp + cm.fn), (cm.tn + cm.fp), (cm.tn + cm.fn),
    )
    if any(f == 0 for f in factors):
        return 0.0
    numerator = cm.tp * cm.tn - cm.fp * cm.fn
    denominator = math.sqrt(float(factors[0]) * factors[1] * factors[2] * factors[3])
    return numerator / denominator


def roc_auc(labels01: Sequence[int], scores: Sequence[float], positive_class: int = 1) -> float:
    """Mann-Whitney AUC with midranks for tied scores."""
    labels = np.asarray(labels01)
    scores = np.asarray(scores, dtype=np.float64)
    if labels.shape != scores.shape:
        raise ValueError("labels and scores lengths differ")
    positives = labels == positive_class
    n_pos = int(positives.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("ROC-AUC requires both classes present")

    order = np.argsort(scores, kind="stable")
    ranks = np.empty(labels.size, dtype=np.float64)
    sorted_scores = scores[order]
    i = 0
    while i < labels.size:
        j = i
        while j + 1 < labels.size and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        midrank = 0.5 * (i + j) + 1.0  # ranks are 1-based
        ranks[order[i : j + 1]] = midrank
        i = j + 1

    rank_sum = float(ranks[positives].sum())
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


@dataclass(frozen=True)
class FoldResult:
    fold: int
    n: int
    confusion: ConfusionMatrix
    metrics: dict[str, float]


@dataclass(frozen=True)
class EvalReport:
    k: int
    folds: tuple[FoldResult, ...]
    mean: dict[str, float]
    pooled_confusion: ConfusionMatrix
    aggregate: str

    def to_json_dict(self) -> dict:
        return {
            "k": self.k,
            "aggregate": self.aggregate,
            "mean": {name: self.mean[name] for name in METRIC_COLUMNS},
            "pooled_confusion": {
                "tp": self.pooled_confusion.tp,
                "fp": self.pooled_confusion.fp,
                "fn": self.pooled_confusion.fn,
                "tn": self.pooled_confusion.tn,
            },
            "folds": [
                {
                    "fold": f.fold,
                    "n": f.n,
                    "confusion": {
                        "tp": f.confusion.tp, "fp": f.confusion.fp,
                        "fn": f.confusion.fn, "tn": f.confusion.tn,
                    },
                    "metrics": {name: f.metrics[name] for name in METRIC_COLUMNS},
                }
                for f in self.folds
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=2) + "\n"


CSV_HEADER = "feature_set,model,P0,R0,F1_0,ROC_0,P1,R1,F1_1,ROC_1,MCC"


def report_csv_row(report: EvalReport, feature_set: str, model_name: str) -> str:
    """One row in the result-table shape, metrics as percentages with two
    decimals."""
    cells = [feature_set, model_name]
    for name in ("p0", "r0", "f1_0", "roc0", "p1", "r1", "f1_1", "roc1", "mcc"):
        cells.append(f"{100.0 * report.mean[name]:.2f}")
    return ",".join(cells)


def _fold_metrics(gold01: np.ndarray, pred01: np.ndarray, scores: np.ndarray) -> tuple[ConfusionMatrix, dict]:
    cm = ConfusionMatrix.from_predictions(gold01, pred01)
    per_class = prf(cm)
    auc1 = roc_auc(gold01, scores, positive_class=1)
    auc0 = roc_auc(gold01, -np.asarray(scores, dtype=np.float64), positive_class=0)
    metrics = {
        "p0": per_class[0].precision,
        "r0": per_class[0].recall,
        "f1_0": per_class[0].f1,
        "roc0": auc0,
        "p1": per_class[1].precision,
        "r1": per_class[1].recall,
        "f1_1": per_class[1].f1,
        "roc1": auc1,
        "mcc": mcc(cm),
    }
    return cm, metrics


def cross_validate_matrix(
    X: np.ndarray,
    y01: np.ndarray,
    model_cfg: models.ModelConfig,
    k: int,
    seed: int,
    aggregate: str = "mean",
) -> EvalReport:
    """Stratified k-fold cross validation over a prepared feature matrix."""
    if aggregate not in ("mean", "pooled"):
        raise ValueError(f"unknown aggregation {aggregate!r}")
    y01 = np.asarray(y01, dtype=np.int64)
    labels = ["toxic" if v == 1 else "non_toxic" for v in y01]
    assignment = np.asarray(stratified_assignment(labels, k, seed))

    fold_results = []
    pooled = ConfusionMatrix(0, 0, 0, 0)
    all_gold = []
    all_scores = []
    all_pred = []
    for fold in range(k):
        test_mask = assignment == fold
        train_mask = ~test_mask
        model = models.train(X[train_mask], y01[train_mask], model_cfg)
        scores = models.decision_scores(model, X[test_mask])
        threshold = models.score_threshold(model)
        pred01 = (scores > threshold).astype(np.int64)
        gold01 = y01[test_mask]
        cm, metrics = _fold_metrics(gold01, pred01, scores)
        pooled = pooled + cm
        fold_results.append(
            FoldResult(fold=fold, n=int(test_mask.sum()), confusion=cm, metrics=metrics)
        )
        all_gold.append(gold01)
        all_scores.append(scores)
        all_pred.append(pred01)

    if aggregate == "mean":
        mean = {
            name: float(np.mean([f.metrics[name] for f in fold_results]))
            for name in METRIC_COLUMNS
        }
    else:
        gold = np.concatenate(all_gold)
        scores = np.concatenate(all_scores)
        pred = np.concatenate(all_pred)
        _, mean = _fold_metrics(gold, pred, scores)

    return EvalReport(
        k=k, folds=tuple(fold_results), mean=mean,
        pooled_confusion=pooled, aggregate=aggregate,
    )


def cross_validate(
    corpus: Corpus,
    feature_cfg: FeatureConfig,
    resources: Resources,
    model_cfg: models.ModelConfig,
    k: int,
    seed: int,
    aggregate: str = "mean",
) -> EvalReport:
    """Featurize the corpus, then run stratified k-fold cross validation."""
    X, y01 = feature_matrix(corpus, feature_cfg, resources)
    if X.shape[0] != len(corpus):
        raise CorpusError("feature matrix row count does not match corpus")
    return cross_validate_matrix(X, y01, model_cfg, k, seed, aggregate=aggregate)


def out_of_fold_predictions(
    X: np.ndarray, y01: np.ndarray, model_cfg: models.ModelConfig, k: int, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """(scores, predictions01) for every row, produced by the model trained
    on the other k-1 folds."""
    y01 = np.asarray(y01, dtype=np.int64)
    labels = ["toxic" if v == 1 else "non_toxic" for v in y01]
    assignment = np.asarray(stratified_assignment(labels, k, seed))
    scores = np.zeros(y01.size, dtype=np.float64)
    preds = np.zeros(y01.size, dtype=np.int64)
    for fold in range(k):
        test_mask = assignment == fold
        model = models.train(X[~test_mask], y01[~test_mask], model_cfg)
        fold_scores = models.decision_scores(model, X[test_mask])
        scores[test_mask] = fold_scores
        preds[test_mask] = (fold_scores > models.score_threshold(model)).astype(np.int64)
    return scores, preds
