import json
import math

import pytest
from hypothesis import given, strategies as st

from osstox.baseline import (
    BaselineScores,
    ProviderConfig,
    baseline_scores,
    cache_path,
    cached_toxicity,
    fetch_toxicity,
    heuristic_politeness,
)
from osstox.errors import MissingBaselineError, ProtocolError, ProviderError
from osstox.textprep import tokenize

from conftest import make_doc


def sigmoid(x):
    return 1.0 / (1.0 + math.exp(-x))


class TestHeuristicPoliteness:
    def test_empty_text_is_neutral(self):
        assert heuristic_politeness(tokenize("")) == 0.5

    def test_thanks_and_mid_please(self):
        # gratitude (+1.5) + please mid-sentence (+1.0) = sigmoid(2.5)
        score = heuristic_politeness(tokenize("Handing this over, thanks, review please."))
        assert score == pytest.approx(sigmoid(2.5), abs=1e-12)
        assert score == pytest.approx(0.9241, abs=5e-5)

    def test_please_at_start_is_negative_marker(self):
        # please-at-start (-0.5) only
        assert heuristic_politeness(tokenize("Please the formatting here.")) == pytest.approx(
            sigmoid(-0.5), abs=1e-12
        )

    def test_imperative_start(self):
        assert heuristic_politeness(tokenize("Fix the tests.")) == pytest.approx(
            sigmoid(-1.0), abs=1e-12
        )

    def test_second_person_start(self):
        assert heuristic_politeness(tokenize("You broke it.")) == pytest.approx(
            sigmoid(-0.5), abs=1e-12
        )

    def test_question_start(self):
        assert heuristic_politeness(tokenize("Why is this here?")) == pytest.approx(
            sigmoid(-0.5), abs=1e-12
        )

    def test_output_in_open_unit_interval(self):
        for text in ("", "thanks", "fix it", "you you you", "so sorry, thanks, great"):
            assert 0.0 < heuristic_politeness(tokenize(text)) < 1.0

    @given(st.text(max_size=120))
    def test_adding_gratitude_never_decreases(self, text):
        before = heuristic_politeness(tokenize(text))
        after = heuristic_politeness(tokenize(text + " thanks"))
        assert after >= before


class TestBaselineScores:
    def test_precomputed_passthrough(self):
        doc = make_doc("a", scores={"politeness": 0.8, "perspective": 0.1})
        result = baseline_scores(doc, ProviderConfig(mode="precomputed"))
        assert result == BaselineScores(0.8, 0.1, "precomputed")

    def test_missing_without_providers(self):
        doc = make_doc("a")
        with pytest.raises(MissingBaselineError, match="'a'"):
            baseline_scores(doc, ProviderConfig(mode="precomputed"))

    def test_heuristic_mode_fills_politeness_only(self):
        doc = make_doc("a", text="thanks!", scores={"perspective": 0.2})
        result = baseline_scores(doc, ProviderConfig(mode="heuristic"))
        assert result.provenance == "heuristic"
        assert result.politeness == pytest.approx(sigmoid(1.5), abs=1e-12)
        assert result.perspective_toxicity == 0.2

    def test_heuristic_mode_cannot_invent_perspective(self):
        doc = make_doc("a", text="thanks!")
        with pytest.raises(MissingBaselineError):
            baseline_scores(doc, ProviderConfig(mode="heuristic"))

    def test_cache_mode_reads_cached_response(self, tmp_path):
        doc = make_doc("a", text="some comment")
        path = cache_path(tmp_path, doc.text)
        path.write_text(json.dumps(
            {"attributeScores": {"TOXICITY": {"summaryScore": {"value": 0.92}}}}
        ))
        result = baseline_scores(doc, ProviderConfig(mode="cache", cache_dir=str(tmp_path)))
        assert result.perspective_toxicity == 0.92
        assert result.provenance == "fetched"

    def test_cache_mode_miss_is_error(self, tmp_path):
        doc = make_doc("a", text="uncached text")
        with pytest.raises(MissingBaselineError, match="cache"):
            baseline_scores(doc, ProviderConfig(mode="cache", cache_dir=str(tmp_path)))

    def test_out_of_range_precomputed_rejected(self):
        doc = make_doc("a", scores={"politeness": 1.5, "perspective": 0.1})
        with pytest.raises(ValueError, match="politeness"):
            baseline_scores(doc, ProviderConfig(mode="precomputed"))

    def test_unknown_mode_rejected(self):
        with pytest.raises(ValueError):
            ProviderConfig(mode="telepathy")


def ok_payload(value=0.7):
    return {"attributeScores": {"TOXICITY": {"summaryScore": {"value": value}}}}


class TestFetchToxicity:
    def make_cfg(self, tmp_path, **kw):
        kw.setdefault("mode", "fetch")
        kw.setdefault("cache_dir", str(tmp_path))
        kw.setdefault("requests_per_second", 0.0)  # no throttling in tests
        return ProviderConfig(**kw)

    def test_fetch_parses_and_caches(self, tmp_path):
        calls = []

        def transport(cfg, text):
            calls.append(text)
            return 200, ok_payload(0.7)

        cfg = self.make_cfg(tmp_path)
        assert fetch_toxicity("hello", cfg, transport=transport) == 0.7
        assert calls == ["hello"]
        assert cache_path(tmp_path, "hello").exists()
        # second call is served from the cache: zero network calls
        assert fetch_toxicity("hello", cfg, transport=transport) == 0.7
        assert calls == ["hello"]

    def test_identical_text_identical_score(self, tmp_path):
        def transport(cfg, text):
            return 200, ok_payload(0.31)

        cfg = self.make_cfg(tmp_path)
        assert fetch_toxicity("same", cfg, transport=transport) == fetch_toxicity(
            "same", cfg, transport=transport
        )

    def test_malformed_response_is_protocol_error_and_not_cached(self, tmp_path):
        def transport(cfg, text):
            return 200, {"attributeScores": {}}

        cfg = self.make_cfg(tmp_path)
        with pytest.raises(ProtocolError):
            fetch_toxicity("bad", cfg, transport=transport)
        assert not cache_path(tmp_path, "bad").exists()

    def test_retries_then_gives_up(self, tmp_path, monkeypatch):
        monkeypatch.setattr("osstox.baseline.time.sleep", lambda s: None)
        attempts = []

        def transport(cfg, text):
            attempts.append(1)
            return 503, {}

        cfg = self.make_cfg(tmp_path, max_retries=3)
        with pytest.raises(ProviderError, match="3 attempts"):
            fetch_toxicity("flaky", cfg, transport=transport)
        assert len(attempts) == 3

    def test_auth_failure_fails_fast(self, tmp_path):
        def transport(cfg, text):
            return 403, {}

        with pytest.raises(ProviderError, match="403"):
            fetch_toxicity("denied", self.make_cfg(tmp_path), transport=transport)

    def test_requires_cache_dir(self):
        cfg = ProviderConfig(mode="fetch", cache_dir=None)
        with pytest.raises(ProviderError, match="cache"):
            fetch_toxicity("x", cfg, transport=lambda c, t: (200, ok_payload()))

    def test_cached_toxicity_rejects_out_of_range(self, tmp_path):
        path = cache_path(tmp_path, "weird")
        path.write_text(json.dumps(ok_payload(1.7)))
        cfg = self.make_cfg(tmp_path)
        with pytest.raises(ProtocolError):
            cached_toxicity(cfg, "weird")
