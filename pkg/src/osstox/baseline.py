"""Baseline features: politeness and an external toxicity probability.

Both arrive through a provider chain (precomputed -> cache -> fetch or
heuristic, depending on the configured mode). Precomputed values shipped
with a dataset always win. The politeness fallback is a marker-based
proxy with fixed documented weights; the toxicity fallback is an HTTP
scoring API with a content-addressed response cache so replay runs never
touch the network.

Provider modes:
  precomputed  only precomputed corpus values; anything else is an error
  cache        precomputed, else cached API responses (perspective) and
               the politeness heuristic; cache misses are errors
  fetch        like cache, but misses go to the network and are cached
  heuristic    precomputed, else the politeness heuristic; perspective
               has no offline fallback and must be precomputed
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import time
from dataclasses import dataclass
from pathlib import Path

import requests

from .corpus import Document
from .errors import MissingBaselineError, ProtocolError, ProviderError
from .textprep import TokenStream, tokenize

PROVIDER_MODES = ("precomputed", "cache", "fetch", "heuristic")
PROVENANCES = ("precomputed", "fetched", "heuristic")

DEFAULT_ENDPOINT = (
    "https://commentanalyzer.googleapis.com/v1alpha1/comments:analyze"
)

# Marker-based politeness strategies and their fixed weights. The score is
# sigmoid(sum of fired strategy weights); each strategy fires at most once.
PLEASE_WEIGHT = 1.0
PLEASE_START_WEIGHT = -0.5
GRATITUDE_WEIGHT = 1.5
APOLOGY_WEIGHT = 1.0
DEFERENCE_WEIGHT = 1.0
HEDGE_WEIGHT = 0.5
DIRECT_QUESTION_WEIGHT = -0.5
DIRECT_START_WEIGHT = -1.0
SECOND_PERSON_START_WEIGHT = -0.5

_GRATITUDE_STEMS = ("thank", "appreciat")
_GRATITUDE_WORDS = frozenset({"grateful"})
_APOLOGY_STEMS = ("apolog",)
_APOLOGY_WORDS = frozenset({"sorry", "oops", "whoops", "forgive"})
_DEFERENCE_WORDS = frozenset(
    {"great", "nice", "good", "excellent", "awesome", "wonderful", "neat", "impressive"}
)
_HEDGE_WORDS = frozenset(
    {
        "maybe", "perhaps", "possibly", "might", "could", "would", "should",
        "seems", "seem", "suggest", "suggests", "think", "wonder", "probably",
        "somewhat", "roughly",
    }
)
_QUESTION_STARTS = frozenset({"what", "why", "who", "whose", "which", "where", "when", "how"})
_DIRECT_STARTS = frozenset({"so", "then", "and", "but", "or", "now"})
_IMPERATIVE_STARTS = frozenset(
    {
        "do", "stop", "fix", "make", "add", "remove", "change", "give", "put",
        "get", "use", "go", "try", "tell", "send", "check", "follow", "run",
        "read", "write", "update", "delete", "close", "open", "merge", "revert",
    }
)
_SECOND_PERSON = frozenset({"you", "your", "yours", "yourself", "yourselves"})


@dataclass(frozen=True)
class BaselineScores:
    politeness: float
    perspective_toxicity: float
    provenance: str

    def __post_init__(self):
        for name in ("politeness", "perspective_toxicity"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} {value} outside [0, 1]")
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")


@dataclass(frozen=True)
class ProviderConfig:
    mode: str = "precomputed"
    cache_dir: str | None = None
    endpoint: str = DEFAULT_ENDPOINT
    api_key_env: str = "PERSPECTIVE_API_KEY"
    requests_per_second: float = 1.0
    max_retries: int = 3
    timeout: float = 10.0

    def __post_init__(self):
        if self.mode not in PROVIDER_MODES:
            raise ValueError(f"unknown provider mode {self.mode!r}")


def _sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def heuristic_politeness(ts: TokenStream) -> float:
    """Politeness proxy in (0, 1): sigmoid over fired strategy weights.
    Empty text scores sigmoid(0) = 0.5."""
    words = [t.lower for t in ts.tokens if t.is_word]
    total = 0.0

    if any(w == "please" for w in words[1:]):
        total += PLEASE_WEIGHT
    if words and words[0] == "please":
        total += PLEASE_START_WEIGHT

    def _any_stem(stems, extras=frozenset()):
        return any(w in extras or any(w.startswith(s) for s in stems) for w in words)

    if _any_stem(_GRATITUDE_STEMS, _GRATITUDE_WORDS):
        total += GRATITUDE_WEIGHT
    if _any_stem(_APOLOGY_STEMS, _APOLOGY_WORDS):
        total += APOLOGY_WEIGHT
    if any(w in _DEFERENCE_WORDS for w in words):
        total += DEFERENCE_WEIGHT
    if any(w in _HEDGE_WORDS for w in words):
        total += HEDGE_WEIGHT
    if words and words[0] in _QUESTION_STARTS:
        total += DIRECT_QUESTION_WEIGHT
    if words and (words[0] in _DIRECT_STARTS or words[0] in _IMPERATIVE_STARTS):
        total += DIRECT_START_WEIGHT
    if words and words[0] in _SECOND_PERSON:
        total += SECOND_PERSON_START_WEIGHT

    return _sigmoid(total)


def cache_path(cache_dir, text: str) -> Path:
    key = hashlib.sha256(text.encode("utf-8")).hexdigest()
    return Path(cache_dir) / f"{key}.json"


def _extract_score(payload: dict) -> float:
    try:
        value = payload["attributeScores"]["TOXICITY"]["summaryScore"]["value"]
    except (KeyError, TypeError) as exc:
        raise ProtocolError(
            "response lacks attributeScores.TOXICITY.summaryScore.value"
        ) from exc
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ProtocolError(f"summary score is not numeric: {value!r}")
    if not 0.0 <= float(value) <= 1.0:
        raise ProtocolError(f"summary score {value} outside [0, 1]")
    return float(value)


def cached_toxicity(cfg: ProviderConfig, text: str) -> float | None:
    """Score from the response cache, or None on a miss."""
    if cfg.cache_dir is None:
        return None
    path = cache_path(cfg.cache_dir, text)
    if not path.exists():
        return None
    payload = json.loads(path.read_text(encoding="utf-8"))
    return _extract_score(payload)


def _default_transport(cfg: ProviderConfig, text: str):
    api_key = os.environ.get(cfg.api_key_env)
    if not api_key:
        raise ProviderError(f"API key environment variable {cfg.api_key_env} is not set")
    body = {"comment": {"text": text}, "requestedAttributes": {"TOXICITY": {}}}
    response = requests.post(
        cfg.endpoint, params={"key": api_key}, json=body, timeout=cfg.timeout
    )
    return response.status_code, response.json()


# Process-wide throttle state, keyed by endpoint.
_LAST_CALL: dict[str, float] = {}


def _throttle(cfg: ProviderConfig) -> None:
    if cfg.requests_per_second <= 0:
        return
    interval = 1.0 / cfg.requests_per_second
    last = _LAST_CALL.get(cfg.endpoint)
    if last is not None:
        wait = interval - (time.monotonic() - last)
        if wait > 0:
            time.sleep(wait)
    _LAST_CALL[cfg.endpoint] = time.monotonic()


def fetch_toxicity(text: str, cfg: ProviderConfig, transport=None) -> float:
    """Toxicity summary score for `text`, served from the content-addressed
    cache when possible. Network responses are parsed first and cached
    atomically only when valid."""
    cached = cached_toxicity(cfg, text)
    if cached is not None:
        return cached
    if cfg.cache_dir is None:
        raise ProviderError("fetch requires a writable cache directory")

    send = transport or _default_transport
    attempts = max(1, cfg.max_retries)
    last_error = None
    for attempt in range(attempts):
        if transport is None:
            _throttle(cfg)
        try:
            status, payload = send(cfg, text)
        except (requests.RequestException, OSError) as exc:
            last_error = f"transport failure: {exc}"
            status, payload = None, None
        if status is not None:
            if status == 200:
                score = _extract_score(payload)
                path = cache_path(cfg.cache_dir, text)
                path.parent.mkdir(parents=True, exist_ok=True)
                tmp = path.with_name(path.name + f".tmp-{os.getpid()}")
                tmp.write_text(
                    json.dumps(payload, sort_keys=True, ensure_ascii=True), encoding="utf-8"
                )
                os.replace(tmp, path)
                return score
            if status in (400, 401, 403):
                raise ProviderError(f"request rejected with HTTP {status}")
            last_error = f"HTTP {status}"
        if attempt < attempts - 1:
            time.sleep(min(8.0, 0.5 * (2**attempt)))
    raise ProviderError(f"gave up after {attempts} attempts ({last_error})")


def baseline_scores(doc: Document, cfg: ProviderConfig, transport=None) -> BaselineScores:
    """Resolve the two baseline scores through the provider chain."""
    politeness = doc.precomputed.get("politeness")
    perspective = doc.precomputed.get("perspective")
    for name, value in (("politeness", politeness), ("perspective", perspective)):
        if value is not None and not 0.0 <= value <= 1.0:
            raise ValueError(
                f"precomputed {name} {value} outside [0, 1] for document '{doc.id}'"
            )

    used_heuristic = False
    used_fetch = False

    if politeness is None:
        if cfg.mode == "precomputed":
            raise MissingBaselineError(doc.id, "no precomputed politeness")
        politeness = heuristic_politeness(tokenize(doc.text))
        used_heuristic = True

    if perspective is None:
        if cfg.mode in ("precomputed", "heuristic"):
            raise MissingBaselineError(
                doc.id, f"no precomputed perspective score (mode={cfg.mode})"
            )
        cached = cached_toxicity(cfg, doc.text)
        if cached is not None:
            perspective = cached
            used_fetch = True
        elif cfg.mode == "fetch":
            perspective = fetch_toxicity(doc.text, cfg, transport=transport)
            used_fetch = True
        else:
            raise MissingBaselineError(doc.id, "perspective score not in cache (mode=cache)")

    if used_fetch:
        provenance = "fetched"
    elif used_heuristic:
        provenance = "heuristic"
    else:
        provenance = "precomputed"
    return BaselineScores(
        politeness=politeness, perspective_toxicity=perspective, provenance=provenance
    )
