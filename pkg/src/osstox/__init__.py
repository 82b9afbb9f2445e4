"""Toxicity detection toolkit for open-source communications.

Pipeline: ingest labeled comment corpora, extract baseline (politeness,
external toxicity score), psycholinguistic (summary dimensions, swear,
sentiment) and moral-foundations (ten dictionary loadings) features,
train linear SVM / logistic regression / gradient boosting classifiers,
and evaluate with stratified cross-validation, per-class metrics and
error-bucket export.
"""

__version__ = "0.1.0"

from .corpus import (  # noqa: F401
    Corpus,
    Document,
    FoldPlan,
    build_issue_testset,
    load_corpus,
    sample_review_testset,
    save_corpus,
    stratified_folds,
    undersample,
)
from .features import FeatureConfig, FeatureVector, featurize, feature_matrix  # noqa: F401
from .models import ModelConfig, TrainedModel, decision_scores, predict, train  # noqa: F401
from .evaluation import EvalReport, cross_validate, mcc, prf, roc_auc  # noqa: F401
