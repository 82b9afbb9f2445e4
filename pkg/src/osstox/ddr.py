"""Distributed dictionary representations over a word-embedding table.

A dictionary's vector is the mean embedding of its words; a document's
vector is the mean embedding of its in-vocabulary word tokens (tokens,
not types, so repeated words weigh more); the loading of a dictionary on
a document is the cosine between the two. Degenerate cases (nothing in
vocabulary, zero vector) load as 0.0 so downstream features stay total.
"""

from __future__ import annotations

import gzip
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigurationError, EmptyDictionaryError, ParseError
from .lexicon import Lexicon
from .textprep import TokenStream

MORAL_CATEGORIES = (
    "care_virtue",
    "care_vice",
    "fairness_virtue",
    "fairness_vice",
    "ingroup_virtue",
    "ingroup_vice",
    "authority_virtue",
    "authority_vice",
    "purity_virtue",
    "purity_vice",
)


class EmbeddingTable:
    """Immutable word -> vector map with a fixed dimension."""

    def __init__(self, dimension: int, vectors: dict[str, np.ndarray]):
        if dimension <= 0:
            raise ValueError("dimension must be positive")
        self.dimension = dimension
        self._vectors = {}
        for word, vec in vectors.items():
            arr = np.asarray(vec, dtype=np.float64)
            if arr.shape != (dimension,):
                raise ValueError(f"vector for '{word}' has shape {arr.shape}, expected ({dimension},)")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"non-finite vector for '{word}'")
            arr.setflags(write=False)
            self._vectors[word] = arr

    def __contains__(self, word: str) -> bool:
        return word in self._vectors

    def __len__(self) -> int:
        return len(self._vectors)

    def get(self, word: str):
        return self._vectors.get(word)

    @property
    def vocabulary(self) -> Iterable[str]:
        return self._vectors.keys()


def _open_maybe_gzip(path: Path):
    with open(path, "rb") as probe:
        magic = probe.read(2)
    if magic == b"\x1f\x8b":
        return gzip.open(path, "rt", encoding="utf-8")
    return open(path, "r", encoding="utf-8")


def load_embeddings(path) -> EmbeddingTable:
    """word2vec text format: header "V d", then "word v1 ... vd" rows.
    Gzip input is decompressed transparently. Duplicate words keep the
    last row and emit a warning."""
    path = Path(path)
    vectors: dict[str, np.ndarray] = {}
    with _open_maybe_gzip(path) as handle:
        header = handle.readline()
        parts = header.split()
        if len(parts) != 2:
            raise ParseError(f"{path}: header must be 'V d'", line=1)
        try:
            count, dimension = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise ParseError(f"{path}: non-integer header fields", line=1) from exc
        if count < 0 or dimension <= 0:
            raise ParseError(f"{path}: bad header values {count} {dimension}", line=1)

        rows = 0
        for lineno, raw in enumerate(handle, start=2):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            fields = line.split()
            if len(fields) != dimension + 1:
                raise ParseError(
                    f"{path}: expected {dimension} coordinates, got {len(fields) - 1}",
                    line=lineno,
                )
            word = fields[0]
            try:
                vec = np.array([float(f) for f in fields[1:]], dtype=np.float64)
            except ValueError as exc:
                raise ParseError(f"{path}: non-numeric coordinate", line=lineno) from exc
            if word in vectors:
                warnings.warn(
                    f"duplicate embedding for '{word}' (line {lineno}); keeping last",
                    RuntimeWarning,
                    stacklevel=2,
                )
            vectors[word] = vec
            rows += 1
        if rows != count:
            warnings.warn(
                f"{path}: header declares {count} rows, file has {rows}",
                RuntimeWarning,
                stacklevel=2,
            )
    return EmbeddingTable(dimension, vectors)


def expand_entries(entries: Sequence[str], emb: EmbeddingTable) -> list[str]:
    """Resolve lexicon entries to concrete vocabulary words. Literals pass
    through if in vocabulary; stems expand to every vocabulary word with
    that prefix. Result is sorted and duplicate-free."""
    out: set[str] = set()
    for entry in entries:
        if entry.endswith("*"):
            prefix = entry[:-1]
            out.update(w for w in emb.vocabulary if w.startswith(prefix))
        elif entry in emb:
            out.add(entry)
    return sorted(out)


def dictionary_vector(words: Sequence[str], emb: EmbeddingTable) -> np.ndarray:
    """Arithmetic mean of the in-vocabulary word vectors."""
    hits = [emb.get(w) for w in words if w in emb]
    if not hits:
        raise EmptyDictionaryError(
            f"none of {len(list(words))} dictionary words are in the embedding vocabulary"
        )
    return np.mean(np.stack(hits), axis=0)


def document_vector(ts: TokenStream, emb: EmbeddingTable):
    """Mean vector over in-vocabulary word tokens; None when no token is
    in vocabulary."""
    hits = [emb.get(t.lower) for t in ts.tokens if t.is_word and t.lower in emb]
    if not hits:
        return None
    return np.mean(np.stack(hits), axis=0)


def _cosine(a: np.ndarray, b: np.ndarray) -> float:
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    value = float(np.dot(a, b) / (na * nb))
    return max(-1.0, min(1.0, value))


def loading(ts: TokenStream, dict_vec: np.ndarray, emb: EmbeddingTable) -> float:
    """Cosine of the document vector against a dictionary vector; 0.0 for
    degenerate documents or zero vectors."""
    doc_vec = document_vector(ts, emb)
    if doc_vec is None:
        return 0.0
    return _cosine(doc_vec, np.asarray(dict_vec, dtype=np.float64))


@dataclass(frozen=True)
class MoralLoadings:
    care_virtue: float
    care_vice: float
    fairness_virtue: float
    fairness_vice: float
    ingroup_virtue: float
    ingroup_vice: float
    authority_virtue: float
    authority_vice: float
    purity_virtue: float
    purity_vice: float

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(getattr(self, name) for name in MORAL_CATEGORIES)


def moral_loadings(ts: TokenStream, moral_lex: Lexicon, emb: EmbeddingTable) -> MoralLoadings:
    """One loading per moral category, in the fixed MORAL_CATEGORIES order.
    A category with no in-vocabulary words loads 0.0 (with a warning)."""
    found = set(moral_lex.categories)
    expected = set(MORAL_CATEGORIES)
    if found != expected:
        raise ConfigurationError(
            f"moral lexicon must have exactly the categories {sorted(expected)}, got {sorted(found)}"
        )

    doc_vec = document_vector(ts, emb)
    values = {}
    for category in MORAL_CATEGORIES:
        words = expand_entries(moral_lex.entries(category), emb)
        if not words:
            warnings.warn(
                f"moral category '{category}' has no words in the embedding vocabulary",
                RuntimeWarning,
                stacklevel=2,
            )
            values[category] = 0.0
            continue
        if doc_vec is None:
            values[category] = 0.0
            continue
        values[category] = _cosine(doc_vec, dictionary_vector(words, emb))
    return MoralLoadings(**values)
