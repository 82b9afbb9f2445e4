"""Category lexicon engine: percent-of-words scores and summary dimensions.

The five psycholinguistic features (analytic, clout, authentic, tone,
swear) are derived from word-category percentages. The four composite
dimensions use published proxy formulas over function-word and emotion
categories; the proprietary tooling the originals come from is not
reproduced, and the proxies are documented in README.md. Each raw
composite is squashed into [1, 99] by s -> 1 + 98 * sigmoid((s - 50) / 25);
swear is a plain percentage in [0, 100] and passes through unchanged.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

from .errors import ConfigurationError, ParseError
from .textprep import TokenStream

# Categories summary_scores() requires in its input profile.
ANALYTIC_PLUS = ("articles", "prepositions")
ANALYTIC_MINUS = (
    "personal_pronouns",
    "impersonal_pronouns",
    "aux_verbs",
    "conjunctions",
    "adverbs",
    "negations",
)
CLOUT_PLUS = ("we", "you")
CLOUT_MINUS = ("i", "negations")
AUTHENTIC_PLUS = ("i", "exclusives")
AUTHENTIC_MINUS = ("negative_emotion", "motion")
TONE_PLUS = ("positive_emotion",)
TONE_MINUS = ("negative_emotion",)

SUMMARY_CATEGORIES = tuple(
    sorted(
        set(ANALYTIC_PLUS + ANALYTIC_MINUS + CLOUT_PLUS + CLOUT_MINUS
            + AUTHENTIC_PLUS + AUTHENTIC_MINUS + TONE_PLUS + TONE_MINUS + ("swear",))
    )
)

_SQUASH_CENTER = 50.0
_SQUASH_SCALE = 25.0


class Lexicon:
    """Named word/stem categories. Entries are lowercase; a trailing '*'
    marks a prefix stem ("care*" matches "careless")."""

    def __init__(self, name: str, categories: Mapping[str, Iterable[str]]):
        self.name = name
        self._literals: dict[str, frozenset[str]] = {}
        self._stems: dict[str, tuple[str, ...]] = {}
        for category, entries in categories.items():
            literals = set()
            stems = set()
            for entry in entries:
                if not entry:
                    raise ConfigurationError(f"empty entry in category '{category}'")
                if entry != entry.casefold():
                    raise ConfigurationError(
                        f"entry '{entry}' in category '{category}' is not lowercase"
                    )
                if entry.endswith("*"):
                    stem = entry[:-1]
                    if not stem or "*" in stem:
                        raise ConfigurationError(
                            f"bad stem entry '{entry}' in category '{category}'"
                        )
                    stems.add(stem)
                elif "*" in entry:
                    raise ConfigurationError(
                        f"wildcard not at end of entry '{entry}' in category '{category}'"
                    )
                else:
                    literals.add(entry)
            self._literals[category] = frozenset(literals)
            self._stems[category] = tuple(sorted(stems))

    @property
    def categories(self) -> tuple[str, ...]:
        return tuple(self._literals)

    def entries(self, category: str) -> tuple[str, ...]:
        """Entries of one category, stems carrying their trailing '*'."""
        return tuple(sorted(self._literals[category]) + [s + "*" for s in self._stems[category]])

    def matches(self, category: str, lower_word: str) -> bool:
        if lower_word in self._literals[category]:
            return True
        return any(lower_word.startswith(stem) for stem in self._stems[category])

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "categories": {c: list(self.entries(c)) for c in sorted(self.categories)},
        }

    @classmethod
    def from_json_file(cls, path) -> "Lexicon":
        path = Path(path)
        try:
            payload = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: invalid JSON: {exc}") from exc
        if not isinstance(payload, dict) or "categories" not in payload:
            raise ParseError(f"{path}: expected an object with a 'categories' field")
        return cls(payload.get("name", path.stem), payload["categories"])


def category_percentages(ts: TokenStream, lex: Lexicon) -> dict[str, float]:
    """Percent of word tokens matching each category; all zeros when the
    document has no words."""
    profile = {category: 0.0 for category in lex.categories}
    if ts.word_count == 0:
        return profile
    for category in lex.categories:
        hits = sum(1 for t in ts.tokens if t.is_word and lex.matches(category, t.lower))
        profile[category] = 100.0 * hits / ts.word_count
    return profile


@dataclass(frozen=True)
class SummaryScores:
    analytic: float
    clout: float
    authentic: float
    tone: float
    swear: float


def _sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def squash(raw: float) -> float:
    """Monotone map of a raw composite onto [1, 99], centered at 50."""
    return 1.0 + 98.0 * _sigmoid((raw - _SQUASH_CENTER) / _SQUASH_SCALE)


def summary_scores(profile: Mapping[str, float]) -> SummaryScores:
    missing = [c for c in SUMMARY_CATEGORIES if c not in profile]
    if missing:
        raise ConfigurationError(
            f"profile missing required categories: {', '.join(missing)}"
        )

    analytic_raw = 30.0 + sum(profile[c] for c in ANALYTIC_PLUS) - sum(
        profile[c] for c in ANALYTIC_MINUS
    )
    clout_raw = 50.0 + sum(profile[c] for c in CLOUT_PLUS) - sum(
        profile[c] for c in CLOUT_MINUS
    )
    authentic_raw = 50.0 + sum(profile[c] for c in AUTHENTIC_PLUS) - sum(
        profile[c] for c in AUTHENTIC_MINUS
    )
    tone_raw = 50.0 + sum(profile[c] for c in TONE_PLUS) - sum(
        profile[c] for c in TONE_MINUS
    )

    return SummaryScores(
        analytic=squash(analytic_raw),
        clout=squash(clout_raw),
        authentic=squash(authentic_raw),
        tone=squash(tone_raw),
        swear=profile["swear"],
    )
