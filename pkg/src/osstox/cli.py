"""Batch front-end wiring the modules into the experiment workflow.

Every subcommand writes its artifacts plus a manifest (full configuration
and input hashes, no timestamps), so two runs with identical manifests
produce byte-identical outputs.

Exit codes: 0 success, 1 usage error, 2 data error, 3 provider/network
error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

from . import models
from .baseline import ProviderConfig, fetch_toxicity, cached_toxicity
from .corpus import (
    build_issue_testset,
    load_corpus,
    save_corpus,
    stratified_folds,
    undersample,
)
from .errors import OsstoxError, ProtocolError, ProviderError
from .evaluation import (
    CSV_HEADER,
    cross_validate_matrix,
    out_of_fold_predictions,
    report_csv_row,
)
from .features import (
    FeatureConfig,
    cached_feature_matrix,
    feature_matrix,
    feature_names,
    load_resources,
    resource_hashes,
    save_matrix,
)
from .report import export_errors, group_means, write_stats_csv

FEATURE_FLAGS = {
    "baseline": "baseline",
    "baseline+psych": "baseline_psych",
    "baseline+psych+moral": "baseline_psych_moral",
}
MODEL_FLAGS = {
    "svm": "linear_svm",
    "lr": "logistic_regression",
    "gb": "gradient_boosting",
}

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_PROVIDER = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit 2; the contract is exit 1
        raise UsageError(message)


def _sha256_file(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for block in iter(lambda: handle.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


def _write_json(path, payload) -> None:
    Path(path).write_text(
        json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


def _write_manifest(out_dir: Path, command: str, config: dict, inputs: dict, outputs) -> None:
    manifest = {
        "command": command,
        "config": config,
        "inputs": inputs,
        "outputs": sorted(outputs),
    }
    _write_json(out_dir / "manifest.json", manifest)


def _add_common_feature_args(parser) -> None:
    parser.add_argument("--features", choices=sorted(FEATURE_FLAGS), default="baseline+psych+moral")
    parser.add_argument("--lexicon-dir", default=None)
    parser.add_argument("--embeddings", default=None)
    parser.add_argument("--cache-dir", default=None)
    parser.add_argument(
        "--provider", choices=("precomputed", "cache", "fetch", "heuristic"),
        default="precomputed",
    )
    parser.add_argument("--api-key-env", default="PERSPECTIVE_API_KEY")


def _add_model_args(parser) -> None:
    parser.add_argument("--model", choices=sorted(MODEL_FLAGS), default="gb")
    parser.add_argument("--n-estimators", type=int, default=None)
    parser.add_argument("--max-iter", type=int, default=None)
    parser.add_argument("--max-depth", type=int, default=None)


def build_parser() -> _Parser:
    parser = _Parser(prog="osstox", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("sample", help="undersample the majority class to a fixed ratio")
    p.add_argument("--corpus", required=True)
    p.add_argument("--ratio", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("folds", help="write a stratified fold plan")
    p.add_argument("--corpus", required=True)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("featurize", help="write the feature matrix CSV")
    p.add_argument("--corpus", required=True)
    _add_common_feature_args(p)
    p.add_argument("--out", required=True)

    p = sub.add_parser("train", help="train one model on the full corpus")
    p.add_argument("--corpus", required=True)
    _add_common_feature_args(p)
    _add_model_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("evaluate", help="stratified k-fold cross validation")
    p.add_argument("--corpus", required=True)
    _add_common_feature_args(p)
    _add_model_args(p)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--aggregate", choices=("mean", "pooled"), default="mean")
    p.add_argument("--out", required=True)

    p = sub.add_parser("stats", help="per-class feature means and deviations")
    p.add_argument("--corpus", required=True)
    _add_common_feature_args(p)
    p.add_argument("--out", required=True)

    p = sub.add_parser("errors", help="export FP/FN buckets")
    p.add_argument("--corpus", required=True)
    p.add_argument("--test", default=None, help="held-out test corpus; omit for out-of-fold predictions")
    p.add_argument("--max-chars", type=int, default=None, help="filter test documents longer than this")
    _add_common_feature_args(p)
    _add_model_args(p)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("fetch-scores", help="fill the toxicity-score cache for a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--cache-dir", required=True)
    p.add_argument("--endpoint", default=None)
    p.add_argument("--api-key-env", default="PERSPECTIVE_API_KEY")
    p.add_argument("--rate", type=float, default=1.0, help="requests per second")
    p.add_argument("--out", required=True)

    return parser


def _provider_config(args) -> ProviderConfig:
    kwargs = {
        "mode": args.provider,
        "cache_dir": args.cache_dir,
        "api_key_env": args.api_key_env,
    }
    return ProviderConfig(**kwargs)


def _feature_setup(args):
    feature_set = FEATURE_FLAGS[args.features]
    cfg = FeatureConfig(feature_set=feature_set, provider=_provider_config(args))
    resources = load_resources(
        feature_set, lexicon_dir=args.lexicon_dir, embeddings_path=args.embeddings
    )
    return cfg, resources


def _model_config(args, seed: int) -> models.ModelConfig:
    kind = MODEL_FLAGS[args.model]
    overrides = {}
    if args.n_estimators is not None and kind == "gradient_boosting":
        overrides["n_estimators"] = args.n_estimators
    if args.max_iter is not None and kind in ("linear_svm", "logistic_regression"):
        overrides["max_iter"] = args.max_iter
    if args.max_depth is not None and kind == "gradient_boosting":
        overrides["max_depth"] = args.max_depth
    return models.ModelConfig(kind=kind, hyperparameters=overrides, seed=seed)


def _input_hashes(args) -> dict:
    hashes = {"corpus": _sha256_file(args.corpus)}
    if getattr(args, "test", None):
        hashes["test"] = _sha256_file(args.test)
    if getattr(args, "embeddings", None):
        hashes["embeddings"] = _sha256_file(args.embeddings)
    return hashes


def _config_dict(args) -> dict:
    skip = {"subcommand"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _matrix_for(args, corpus, cfg, resources):
    if args.cache_dir is not None:
        return cached_feature_matrix(
            corpus, cfg, resources, Path(args.cache_dir) / "matrices"
        )
    return feature_matrix(corpus, cfg, resources)


def _cmd_sample(args) -> int:
    corpus = load_corpus(args.corpus)
    sampled = undersample(corpus, ratio=args.ratio, seed=args.seed)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_corpus(sampled, out_dir / "corpus.jsonl")
    _write_manifest(
        out_dir, "sample", _config_dict(args), _input_hashes(args), ["corpus.jsonl"]
    )
    n_toxic, n_non_toxic = sampled.counts
    print(f"sampled corpus: {n_toxic} toxic, {n_non_toxic} non-toxic")
    return EXIT_OK


def _cmd_folds(args) -> int:
    corpus = load_corpus(args.corpus)
    plan = stratified_folds(corpus, k=args.k, seed=args.seed)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_json(
        out_dir / "folds.json",
        {"k": plan.k, "seed": args.seed, "assignment": dict(sorted(plan.assignment.items()))},
    )
    _write_manifest(
        out_dir, "folds", _config_dict(args), _input_hashes(args), ["folds.json"]
    )
    print(f"fold plan written for {len(plan.assignment)} documents, k={plan.k}")
    return EXIT_OK


def _cmd_featurize(args) -> int:
    corpus = load_corpus(args.corpus)
    cfg, resources = _feature_setup(args)
    X, y = _matrix_for(args, corpus, cfg, resources)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_matrix(out_dir / "features.csv", X, y, feature_names(cfg.feature_set))
    config = _config_dict(args)
    config["resource_hashes"] = resource_hashes(cfg, resources)
    _write_manifest(out_dir, "featurize", config, _input_hashes(args), ["features.csv"])
    print(f"feature matrix: {X.shape[0]} rows x {X.shape[1]} columns")
    return EXIT_OK


def _cmd_train(args) -> int:
    corpus = load_corpus(args.corpus)
    cfg, resources = _feature_setup(args)
    X, y = _matrix_for(args, corpus, cfg, resources)
    model_cfg = _model_config(args, args.seed)
    model = models.train(X, y, model_cfg)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    models.save_model(model, out_dir / "model.json")
    config = _config_dict(args)
    config["resource_hashes"] = resource_hashes(cfg, resources)
    _write_manifest(out_dir, "train", config, _input_hashes(args), ["model.json"])
    print(f"trained {model.kind} on {X.shape[0]} documents")
    return EXIT_OK


def _cmd_evaluate(args) -> int:
    corpus = load_corpus(args.corpus)
    cfg, resources = _feature_setup(args)
    X, y = _matrix_for(args, corpus, cfg, resources)
    model_cfg = _model_config(args, args.seed)
    report = cross_validate_matrix(
        X, y, model_cfg, k=args.k, seed=args.seed, aggregate=args.aggregate
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.json").write_text(report.to_json(), encoding="utf-8")
    csv_text = CSV_HEADER + "\n" + report_csv_row(report, args.features, args.model) + "\n"
    (out_dir / "report.csv").write_text(csv_text, encoding="utf-8")
    config = _config_dict(args)
    config["resource_hashes"] = resource_hashes(cfg, resources)
    config["model_config"] = {
        "kind": model_cfg.kind, "hyperparameters": model_cfg.resolved(), "seed": model_cfg.seed,
    }
    _write_manifest(
        out_dir, "evaluate", config, _input_hashes(args), ["report.json", "report.csv"]
    )
    print(CSV_HEADER)
    print(report_csv_row(report, args.features, args.model))
    return EXIT_OK


def _cmd_stats(args) -> int:
    corpus = load_corpus(args.corpus)
    cfg, resources = _feature_setup(args)
    X, y = _matrix_for(args, corpus, cfg, resources)
    stats = group_means(X, y, feature_names(cfg.feature_set))
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_stats_csv(stats, out_dir / "stats.csv")
    config = _config_dict(args)
    config["resource_hashes"] = resource_hashes(cfg, resources)
    _write_manifest(out_dir, "stats", config, _input_hashes(args), ["stats.csv"])
    print(f"stats written for {len(stats.feature_names)} features")
    return EXIT_OK


def _cmd_errors(args) -> int:
    corpus = load_corpus(args.corpus)
    cfg, resources = _feature_setup(args)
    model_cfg = _model_config(args, args.seed)
    names = feature_names(cfg.feature_set)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    if args.test is not None:
        test_corpus = load_corpus(args.test)
        if args.max_chars is not None:
            test_corpus = build_issue_testset(test_corpus, args.max_chars)
        X_train, y_train = _matrix_for(args, corpus, cfg, resources)
        X_test, _ = feature_matrix(test_corpus, cfg, resources)
        model = models.train(X_train, y_train, model_cfg)
        scores = models.decision_scores(model, X_test)
        predictions = models.predict(model, X_test)
        target = test_corpus
    else:
        X, y = _matrix_for(args, corpus, cfg, resources)
        scores, pred01 = out_of_fold_predictions(X, y, model_cfg, k=args.k, seed=args.seed)
        predictions = ["toxic" if p == 1 else "non_toxic" for p in pred01]
        X_test = X
        target = corpus

    fp_bucket, fn_bucket = export_errors(
        target, predictions, scores, X_test, names, out_dir
    )
    config = _config_dict(args)
    config["resource_hashes"] = resource_hashes(cfg, resources)
    _write_manifest(
        out_dir, "errors", config, _input_hashes(args), ["fp.jsonl", "fn.jsonl"]
    )
    print(f"errors: {len(fp_bucket.entries)} FP, {len(fn_bucket.entries)} FN")
    return EXIT_OK


def _cmd_fetch_scores(args) -> int:
    corpus = load_corpus(args.corpus, require_labels=False)
    kwargs = {
        "mode": "fetch",
        "cache_dir": args.cache_dir,
        "api_key_env": args.api_key_env,
        "requests_per_second": args.rate,
    }
    if args.endpoint:
        kwargs["endpoint"] = args.endpoint
    provider = ProviderConfig(**kwargs)
    fetched = 0
    cached = 0
    skipped = 0
    for doc in corpus:
        if "perspective" in doc.precomputed:
            skipped += 1
            continue
        if cached_toxicity(provider, doc.text) is not None:
            cached += 1
            continue
        fetch_toxicity(doc.text, provider)
        fetched += 1
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    summary = {"fetched": fetched, "cached": cached, "precomputed": skipped}
    _write_json(out_dir / "fetch_summary.json", summary)
    _write_manifest(
        out_dir, "fetch-scores", _config_dict(args), _input_hashes(args),
        ["fetch_summary.json"],
    )
    print(f"fetch-scores: {fetched} fetched, {cached} already cached, {skipped} precomputed")
    return EXIT_OK


_COMMANDS = {
    "sample": _cmd_sample,
    "folds": _cmd_folds,
    "featurize": _cmd_featurize,
    "train": _cmd_train,
    "evaluate": _cmd_evaluate,
    "stats": _cmd_stats,
    "errors": _cmd_errors,
    "fetch-scores": _cmd_fetch_scores,
}


def run(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        return _COMMANDS[args.subcommand](args)
    except (ProviderError, ProtocolError) as exc:
        print(f"provider error: {exc}", file=sys.stderr)
        return EXIT_PROVIDER
    except (OsstoxError, ValueError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


def entrypoint() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    entrypoint()
