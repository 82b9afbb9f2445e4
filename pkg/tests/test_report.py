import json

import numpy as np
import pytest

from osstox.corpus import Corpus
from osstox.report import (
    collect_errors,
    export_errors,
    group_means,
    write_stats_csv,
)

from conftest import make_doc


class TestGroupMeans:
    def test_hand_computed_means(self):
        X = np.array([[1.0], [2.0], [3.0], [5.0]])
        y = [0, 0, 1, 1]
        stats = group_means(X, y)
        assert stats.mean["non_toxic"][0] == pytest.approx(1.5)
        assert stats.mean["toxic"][0] == pytest.approx(4.0)
        assert stats.count == {"non_toxic": 2, "toxic": 2}

    def test_constant_column_sd_zero(self):
        X = np.array([[7.0, 1.0], [7.0, 2.0], [7.0, 3.0], [7.0, 4.0]])
        stats = group_means(X, [0, 1, 0, 1])
        assert stats.sd["toxic"][0] == 0.0
        assert stats.sd["non_toxic"][0] == 0.0

    def test_counts_sum_to_corpus_size(self):
        X = np.ones((10, 3))
        stats = group_means(X, [1] * 4 + [0] * 6)
        assert stats.count["toxic"] + stats.count["non_toxic"] == 10

    def test_empty_class_rejected(self):
        with pytest.raises(ValueError, match="toxic"):
            group_means(np.ones((3, 1)), [0, 0, 0])

    def test_row_permutation_invariant(self):
        rng = np.random.default_rng(4)
        X = rng.standard_normal((20, 4))
        y = rng.integers(0, 2, 20)
        y[0], y[1] = 0, 1
        perm = rng.permutation(20)
        a = group_means(X, y)
        b = group_means(X[perm], y[perm])
        for cls in ("toxic", "non_toxic"):
            assert np.allclose(a.mean[cls], b.mean[cls])
            assert np.allclose(a.sd[cls], b.sd[cls])

    def test_csv_output(self, tmp_path):
        X = np.array([[1.0, 2.0], [3.0, 4.0]])
        stats = group_means(X, [0, 1], feature_names=("alpha", "beta"))
        path = tmp_path / "stats.csv"
        write_stats_csv(stats, path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "feature,class,mean,sd,n"
        assert len(lines) == 1 + 2 * 2  # 2 features x 2 classes


def _aligned_inputs():
    docs = [
        make_doc("a", text="alpha", label="non_toxic"),
        make_doc("b", text="bravo", label="toxic"),
        make_doc("c", text="charlie", label="non_toxic"),
        make_doc("d", text="delta", label="toxic"),
        make_doc("e", text="echo", label="non_toxic"),
    ]
    corpus = Corpus(docs)
    predictions = ["toxic", "toxic", "non_toxic", "non_toxic", "toxic"]
    scores = [0.9, 0.8, 0.3, 0.2, 0.7]
    X = np.arange(10, dtype=np.float64).reshape(5, 2)
    return corpus, predictions, scores, X


class TestErrorBuckets:
    def test_bucket_contents_and_invariants(self):
        corpus, predictions, scores, X = _aligned_inputs()
        fp, fn = collect_errors(corpus, predictions, scores, X, ("f0", "f1"))
        assert {e.document_id for e in fp.entries} == {"a", "e"}
        assert {e.document_id for e in fn.entries} == {"d"}
        assert all(e.gold == "non_toxic" and e.predicted == "toxic" for e in fp.entries)
        assert all(e.gold == "toxic" and e.predicted == "non_toxic" for e in fn.entries)

    def test_bucket_sizes_match_off_diagonal(self):
        corpus, predictions, scores, X = _aligned_inputs()
        fp, fn = collect_errors(corpus, predictions, scores, X, ("f0", "f1"))
        gold = [d.label for d in corpus]
        fp_count = sum(1 for g, p in zip(gold, predictions) if g == "non_toxic" and p == "toxic")
        fn_count = sum(1 for g, p in zip(gold, predictions) if g == "toxic" and p == "non_toxic")
        assert len(fp.entries) == fp_count
        assert len(fn.entries) == fn_count
        correct = sum(1 for g, p in zip(gold, predictions) if g == p)
        assert len(fp.entries) + len(fn.entries) + correct == len(corpus)

    def test_sorted_most_confident_first(self):
        corpus, predictions, scores, X = _aligned_inputs()
        fp, fn = collect_errors(corpus, predictions, scores, X, ("f0", "f1"))
        fp_scores = [e.score for e in fp.entries]
        assert fp_scores == sorted(fp_scores, reverse=True)
        fn_scores = [e.score for e in fn.entries]
        assert fn_scores == sorted(fn_scores)

    def test_entries_carry_full_feature_vector(self):
        corpus, predictions, scores, X = _aligned_inputs()
        fp, _ = collect_errors(corpus, predictions, scores, X, ("f0", "f1"))
        entry = next(e for e in fp.entries if e.document_id == "a")
        assert entry.features == {"f0": 0.0, "f1": 1.0}
        assert entry.text == "alpha"

    def test_perfect_predictions_empty_buckets(self):
        corpus, _, scores, X = _aligned_inputs()
        gold = [d.label for d in corpus]
        fp, fn = collect_errors(corpus, gold, scores, X, ("f0", "f1"))
        assert fp.entries == ()
        assert fn.entries == ()

    def test_misaligned_lengths_rejected(self):
        corpus, predictions, scores, X = _aligned_inputs()
        with pytest.raises(ValueError, match="misaligned"):
            collect_errors(corpus, predictions[:-1], scores, X, ("f0", "f1"))

    def test_export_writes_ldjson(self, tmp_path):
        corpus, predictions, scores, X = _aligned_inputs()
        fp, fn = export_errors(corpus, predictions, scores, X, ("f0", "f1"), tmp_path)
        fp_lines = (tmp_path / "fp.jsonl").read_text().strip().splitlines()
        assert len(fp_lines) == len(fp.entries)
        first = json.loads(fp_lines[0])
        assert first["gold"] == "non_toxic"
        assert first["predicted"] == "toxic"
        assert "features" in first
        fn_lines = (tmp_path / "fn.jsonl").read_text().strip().splitlines()
        assert len(fn_lines) == len(fn.entries)
