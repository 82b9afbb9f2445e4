"""Feature statistics per class and FP/FN error-bucket export.

Error buckets carry the full feature vector per misclassified document so
qualitative analysis can see which features failed; entries are ordered
most-confident-mistake first (highest scores for false positives, lowest
for false negatives).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus import NON_TOXIC, TOXIC, Corpus


@dataclass(frozen=True)
class FeatureStats:
    feature_names: tuple[str, ...]
    classes: tuple[str, ...]
    mean: dict[str, tuple[float, ...]]
    sd: dict[str, tuple[float, ...]]
    count: dict[str, int]


def group_means(X: np.ndarray, y01: Sequence[int], feature_names=None) -> FeatureStats:
    """Per-class mean and population standard deviation per feature column."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y01, dtype=np.int64)
    if X.shape[0] != y.size:
        raise ValueError("X and y row counts differ")
    if feature_names is None:
        feature_names = tuple(f"f{j}" for j in range(X.shape[1]))
    else:
        feature_names = tuple(feature_names)

    mean = {}
    sd = {}
    count = {}
    for cls_name, cls_value in ((NON_TOXIC, 0), (TOXIC, 1)):
        mask = y == cls_value
        if not mask.any():
            raise ValueError(f"class '{cls_name}' is empty")
        block = X[mask]
        mean[cls_name] = tuple(float(v) for v in block.mean(axis=0))
        sd[cls_name] = tuple(float(v) for v in block.std(axis=0, ddof=0))
        count[cls_name] = int(mask.sum())
    return FeatureStats(
        feature_names=feature_names,
        classes=(NON_TOXIC, TOXIC),
        mean=mean, sd=sd, count=count,
    )


def write_stats_csv(stats: FeatureStats, path) -> None:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write("feature,class,mean,sd,n\n")
        for j, name in enumerate(stats.feature_names):
            for cls in stats.classes:
                handle.write(
                    f"{name},{cls},{stats.mean[cls][j]:.17g},"
                    f"{stats.sd[cls][j]:.17g},{stats.count[cls]}\n"
                )


@dataclass(frozen=True)
class ErrorEntry:
    document_id: str
    text: str
    gold: str
    predicted: str
    score: float
    features: dict[str, float]


@dataclass(frozen=True)
class ErrorBucket:
    kind: str  # "FP" or "FN"
    entries: tuple[ErrorEntry, ...]


def collect_errors(
    corpus: Corpus,
    predictions: Sequence[str],
    scores: Sequence[float],
    X: np.ndarray,
    feature_names: Sequence[str],
) -> tuple[ErrorBucket, ErrorBucket]:
    """FP and FN buckets from aligned predictions over a corpus."""
    docs = corpus.documents
    if not (len(docs) == len(predictions) == len(scores) == X.shape[0]):
        raise ValueError(
            f"misaligned inputs: {len(docs)} documents, {len(predictions)} predictions, "
            f"{len(scores)} scores, {X.shape[0]} feature rows"
        )
    fp_entries = []
    fn_entries = []
    for doc, pred, score, row in zip(docs, predictions, scores, X):
        gold = doc.label
        if gold is None:
            raise ValueError(f"document '{doc.id}' has no gold label")
        if gold == pred:
            continue
        entry = ErrorEntry(
            document_id=doc.id,
            text=doc.text,
            gold=gold,
            predicted=pred,
            score=float(score),
            features=dict(zip(feature_names, (float(v) for v in row))),
        )
        if gold == NON_TOXIC and pred == TOXIC:
            fp_entries.append(entry)
        elif gold == TOXIC and pred == NON_TOXIC:
            fn_entries.append(entry)
    fp_entries.sort(key=lambda e: (-e.score, e.document_id))
    fn_entries.sort(key=lambda e: (e.score, e.document_id))
    return (
        ErrorBucket(kind="FP", entries=tuple(fp_entries)),
        ErrorBucket(kind="FN", entries=tuple(fn_entries)),
    )


def write_error_bucket(bucket: ErrorBucket, path) -> None:
    """Line-delimited JSON, one entry per line."""
    path = Path(path)
    with open(path, "w", encoding="utf-8") as handle:
        for entry in bucket.entries:
            record = {
                "id": entry.document_id,
                "text": entry.text,
                "gold": entry.gold,
                "predicted": entry.predicted,
                "score": entry.score,
                "features": entry.features,
            }
            handle.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")


def export_errors(
    corpus: Corpus,
    predictions: Sequence[str],
    scores: Sequence[float],
    X: np.ndarray,
    feature_names: Sequence[str],
    out_dir,
) -> tuple[ErrorBucket, ErrorBucket]:
    """Collect the buckets and write fp.jsonl / fn.jsonl under out_dir."""
    fp_bucket, fn_bucket = collect_errors(corpus, predictions, scores, X, feature_names)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_error_bucket(fp_bucket, out_dir / "fp.jsonl")
    write_error_bucket(fn_bucket, out_dir / "fn.jsonl")
    return fp_bucket, fn_bucket
