"""Rule-based valence scoring: one compound score in [-1, +1] per document.

Word valences come from a lexicon file; rule adjustments use the published
reference constants of the compound-score method (negation scaling -0.74
in a 3-word window, booster increments +/-0.293 with distance decay,
all-caps emphasis 0.733, exclamation emphasis 0.292 for up to 3 marks,
"but" clause reweighting 0.5/1.5, normalization s / sqrt(s^2 + 15)).
Every heuristic can be switched off individually through SentimentRules.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .errors import ParseError
from .textprep import Token, TokenStream


@dataclass(frozen=True)
class ValenceLexicon:
    valences: Mapping[str, float]
    boosters: Mapping[str, float]  # word -> signed increment (+ amplifies, - dampens)
    negations: frozenset[str]


@dataclass(frozen=True)
class SentimentRules:
    use_negation: bool = True
    use_boosters: bool = True
    use_allcaps: bool = True
    use_exclamation: bool = True
    use_but_clause: bool = True
    negation_scalar: float = -0.74
    allcaps_increment: float = 0.733
    exclaim_increment: float = 0.292
    max_exclaim: int = 3
    but_before: float = 0.5
    but_after: float = 1.5
    alpha: float = 15.0
    window: int = 3
    booster_decay: tuple[float, ...] = (1.0, 0.95, 0.9)


DEFAULT_RULES = SentimentRules()

BOOSTER_INCREMENT = 0.293


def load_valence_lexicon(tsv_path, modifiers_path=None) -> ValenceLexicon:
    """TSV rows "word<TAB>valence"; modifiers live in a JSON sidecar with
    "boosters", "dampeners" and "negations" lists."""
    tsv_path = Path(tsv_path)
    valences: dict[str, float] = {}
    for lineno, raw in enumerate(tsv_path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) < 2:
            raise ParseError(f"expected 'word<TAB>valence' in {tsv_path}", line=lineno)
        try:
            value = float(parts[1])
        except ValueError as exc:
            raise ParseError(f"bad valence {parts[1]!r} in {tsv_path}", line=lineno) from exc
        if not math.isfinite(value):
            raise ParseError(f"non-finite valence in {tsv_path}", line=lineno)
        valences[parts[0].casefold()] = value

    boosters: dict[str, float] = {}
    negations: frozenset[str] = frozenset()
    if modifiers_path is not None:
        payload = json.loads(Path(modifiers_path).read_text(encoding="utf-8"))
        increment = float(payload.get("booster_increment", BOOSTER_INCREMENT))
        for word in payload.get("boosters", []):
            boosters[word.casefold()] = increment
        for word in payload.get("dampeners", []):
            boosters[word.casefold()] = -increment
        negations = frozenset(w.casefold() for w in payload.get("negations", []))

    return ValenceLexicon(valences=valences, boosters=boosters, negations=negations)


def _sign(x: float) -> float:
    return 1.0 if x > 0 else -1.0


def _adjusted_valence(
    index: int, words: list[Token], vl: ValenceLexicon, rules: SentimentRules
) -> float:
    token = words[index]
    valence = vl.valences.get(token.lower, 0.0)
    if valence == 0.0:
        return 0.0

    if rules.use_allcaps and token.is_all_caps:
        valence += rules.allcaps_increment * _sign(valence)

    if rules.use_boosters:
        for distance in range(1, rules.window + 1):
            j = index - distance
            if j < 0:
                break
            increment = vl.boosters.get(words[j].lower)
            if increment is None:
                continue
            effective = increment * rules.booster_decay[distance - 1]
            if valence < 0:
                effective = -effective
            valence += effective

    if rules.use_negation:
        lo = max(0, index - rules.window)
        if any(words[j].lower in vl.negations for j in range(lo, index)):
            valence *= rules.negation_scalar

    return valence


def compound(ts: TokenStream, vl: ValenceLexicon, rules: SentimentRules = DEFAULT_RULES) -> float:
    """Sum of rule-adjusted valences, normalized to (-1, 1); 0.0 when no
    word hits the lexicon."""
    words = ts.words()
    valences = [_adjusted_valence(i, words, vl, rules) for i in range(len(words))]

    if rules.use_but_clause:
        but_index = next((i for i, t in enumerate(words) if t.lower == "but"), None)
        if but_index is not None:
            valences = [
                v * (rules.but_before if i < but_index else rules.but_after if i > but_index else 1.0)
                for i, v in enumerate(valences)
            ]

    total = sum(valences)

    if rules.use_exclamation and total != 0.0:
        marks = min(rules.max_exclaim, sum(1 for t in ts.tokens if t.surface == "!"))
        total += rules.exclaim_increment * marks * _sign(total)

    if total == 0.0:
        return 0.0
    score = total / math.sqrt(total * total + rules.alpha)
    return max(-1.0, min(1.0, score))
