"""Deterministic tokenization feeding every lexicon-based extractor.

Rules (a declared convention, kept deliberately small):

* fenced code blocks (``` ... ```) and inline backtick spans are replaced
  by a single non-word sentinel before splitting, so code identifiers are
  never counted as words;
* the text is split on whitespace;
* chunks starting with http://, https:// or www. become single non-word
  URL tokens;
* leading and trailing non-alphanumeric characters are peeled off into
  one punctuation token per character; the remaining core is one token,
  so contractions ("don't") stay whole;
* a token is a word iff its surface contains at least one letter.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

# Private-use codepoint: survives whitespace splitting, never alphabetic.
CODE_SENTINEL = ""

_FENCE_RE = re.compile(r"```.*?```", re.DOTALL)
_INLINE_CODE_RE = re.compile(r"`[^`\n]+`")
_URL_RE = re.compile(r"(?:https?://|www\.)", re.IGNORECASE)


@dataclass(frozen=True)
class Token:
    surface: str
    lower: str
    is_word: bool
    is_all_caps: bool


@dataclass(frozen=True)
class TokenStream:
    tokens: tuple[Token, ...]
    word_count: int

    def words(self) -> list[Token]:
        return [t for t in self.tokens if t.is_word]


def _punct_token(char: str) -> Token:
    return Token(surface=char, lower=char, is_word=False, is_all_caps=False)


def _core_token(core: str, *, force_non_word: bool = False) -> Token:
    letters = [c for c in core if c.isalpha()]
    is_word = bool(letters) and not force_non_word
    all_caps = len(letters) >= 2 and all(c.isupper() for c in letters)
    return Token(surface=core, lower=core.casefold(), is_word=is_word, is_all_caps=all_caps)


def tokenize(text: str) -> TokenStream:
    """Total function: any unicode string in, TokenStream out."""
    masked = _FENCE_RE.sub(f" {CODE_SENTINEL} ", text)
    masked = _INLINE_CODE_RE.sub(f" {CODE_SENTINEL} ", masked)

    tokens: list[Token] = []
    for chunk in masked.split():
        if _URL_RE.match(chunk):
            tokens.append(_core_token(chunk, force_non_word=True))
            continue
        start = 0
        end = len(chunk)
        while start < end and not chunk[start].isalnum():
            start += 1
        while end > start and not chunk[end - 1].isalnum():
            end -= 1
        for char in chunk[:start]:
            tokens.append(_punct_token(char))
        core = chunk[start:end]
        if core:
            # a URL can surface here after brackets are stripped: "(http://x)"
            tokens.append(_core_token(core, force_non_word=bool(_URL_RE.match(core))))
        for char in chunk[end:]:
            tokens.append(_punct_token(char))

    word_count = sum(1 for t in tokens if t.is_word)
    return TokenStream(tokens=tuple(tokens), word_count=word_count)
