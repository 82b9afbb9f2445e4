"""Corpus ingestion, class-ratio undersampling, stratified folds, test sets.

Serialized form is line-delimited JSON records

    {"id": str, "channel": "issue_comment"|"code_review", "text": str,
     "label": "toxic"|"non_toxic"|null, "scores": {"politeness": num, ...}}

with a CSV loader (identical columns, header row required) accepted too.
Every sampling operation is a pure function of (input, seed) through the
portable SplitMix64 generator.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from .errors import CorpusError, EmptyMinorityError, ParseError
from .rng import SplitMix64

CHANNELS = ("issue_comment", "code_review")
TOXIC = "toxic"
NON_TOXIC = "non_toxic"
LABELS = (TOXIC, NON_TOXIC)


@dataclass(frozen=True)
class Document:
    id: str
    channel: str
    text: str
    label: str | None = None
    precomputed: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not self.id:
            raise CorpusError("document id must be non-empty")
        if self.channel not in CHANNELS:
            raise CorpusError(f"document '{self.id}': unknown channel {self.channel!r}")
        if self.label is not None and self.label not in LABELS:
            raise CorpusError(f"document '{self.id}': unknown label {self.label!r}")
        object.__setattr__(self, "precomputed", MappingProxyType(dict(self.precomputed)))


class Corpus:
    """Immutable ordered collection of documents with unique ids."""

    def __init__(self, documents: Iterable[Document]):
        docs = tuple(documents)
        seen = set()
        for doc in docs:
            if doc.id in seen:
                raise CorpusError(f"duplicate document id '{doc.id}'")
            seen.add(doc.id)
        self._documents = docs
        self._by_id = {doc.id: doc for doc in docs}

    @property
    def documents(self) -> tuple[Document, ...]:
        return self._documents

    def __len__(self) -> int:
        return len(self._documents)

    def __iter__(self):
        return iter(self._documents)

    def __eq__(self, other):
        return isinstance(other, Corpus) and self._documents == other._documents

    def __getitem__(self, doc_id: str) -> Document:
        return self._by_id[doc_id]

    @property
    def counts(self) -> tuple[int, int]:
        """(n_toxic, n_non_toxic)."""
        n_toxic = sum(1 for d in self._documents if d.label == TOXIC)
        n_non_toxic = sum(1 for d in self._documents if d.label == NON_TOXIC)
        return (n_toxic, n_non_toxic)

    def subset(self, ids: Iterable[str]) -> "Corpus":
        """Documents whose id is in `ids`, in corpus order."""
        wanted = set(ids)
        missing = wanted - set(self._by_id)
        if missing:
            raise CorpusError(f"unknown document ids: {sorted(missing)[:5]}")
        return Corpus(d for d in self._documents if d.id in wanted)

    def labels(self) -> list[str]:
        out = []
        for doc in self._documents:
            if doc.label is None:
                raise CorpusError(f"document '{doc.id}' has no label")
            out.append(doc.label)
        return out


def _record_to_document(record: dict, lineno: int, require_label: bool) -> Document:
    if not isinstance(record, dict):
        raise ParseError("record is not an object", line=lineno)
    for key in ("id", "channel", "text"):
        if key not in record or record[key] is None:
            ident = record.get("id", "<unknown>") if isinstance(record, dict) else "<unknown>"
            raise ParseError(f"record '{ident}' missing field '{key}'", line=lineno)
    label = record.get("label")
    if label is None and require_label:
        raise ParseError(f"record '{record['id']}' has no label", line=lineno)

    precomputed: dict[str, float] = {}
    scores = record.get("scores") or {}
    if not isinstance(scores, dict):
        raise ParseError(f"record '{record['id']}': 'scores' must be an object", line=lineno)
    for name, value in scores.items():
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            precomputed[name] = float(value)
    for name, value in record.items():
        if name in ("id", "channel", "text", "label", "scores"):
            continue
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            precomputed[name] = float(value)

    try:
        return Document(
            id=str(record["id"]),
            channel=record["channel"],
            text=record["text"],
            label=label,
            precomputed=precomputed,
        )
    except CorpusError as exc:
        raise ParseError(str(exc), line=lineno) from exc


def _load_jsonl(path: Path, require_labels: bool) -> list[Document]:
    documents = []
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", line=lineno) from exc
            documents.append(_record_to_document(record, lineno, require_labels))
    return documents


def _load_csv(path: Path, require_labels: bool) -> list[Document]:
    documents = []
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None:
            return []
        required = {"id", "channel", "text", "label"}
        missing = required - set(reader.fieldnames)
        if missing:
            raise ParseError(f"CSV header missing columns: {sorted(missing)}", line=1)
        extra = [c for c in reader.fieldnames if c not in required]
        for lineno, row in enumerate(reader, start=2):
            record: dict = {k: row.get(k) for k in ("id", "channel", "text")}
            record["label"] = row.get("label") or None
            scores = {}
            for column in extra:
                cell = (row.get(column) or "").strip()
                if not cell:
                    continue
                try:
                    scores[column] = float(cell)
                except ValueError as exc:
                    raise ParseError(
                        f"record '{record.get('id')}': non-numeric value in column '{column}'",
                        line=lineno,
                    ) from exc
            record["scores"] = scores
            documents.append(_record_to_document(record, lineno, require_labels))
    return documents


def load_corpus(path, format: str = "auto", require_labels: bool = True) -> Corpus:
    """Load a corpus file. Unlabeled records are rejected unless
    require_labels=False (fail-fast for training/eval corpora)."""
    path = Path(path)
    if not path.exists():
        raise ParseError(f"no such file: {path}")
    if format == "auto":
        format = "csv" if path.suffix.lower() == ".csv" else "jsonl"
    if format == "jsonl":
        documents = _load_jsonl(path, require_labels)
    elif format == "csv":
        documents = _load_csv(path, require_labels)
    else:
        raise ValueError(f"unknown corpus format {format!r}")
    return Corpus(documents)


def save_corpus(corpus: Corpus, path) -> None:
    """Write line-delimited JSON; round-trips through load_corpus with
    order and content preserved."""
    path = Path(path)
    with open(path, "w", encoding="utf-8") as handle:
        for doc in corpus:
            record = {
                "id": doc.id,
                "channel": doc.channel,
                "text": doc.text,
                "label": doc.label,
                "scores": dict(sorted(doc.precomputed.items())),
            }
            handle.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")


def corpus_sha256(corpus: Corpus) -> str:
    """Content hash of the canonical serialized form."""
    import hashlib

    digest = hashlib.sha256()
    for doc in corpus:
        record = {
            "id": doc.id,
            "channel": doc.channel,
            "text": doc.text,
            "label": doc.label,
            "scores": dict(sorted(doc.precomputed.items())),
        }
        digest.update(json.dumps(record, ensure_ascii=True, sort_keys=True).encode("ascii"))
        digest.update(b"\n")
    return digest.hexdigest()


def undersample(corpus: Corpus, ratio: int = 3, seed: int = 0) -> Corpus:
    """Keep every toxic document; sample the non-toxic class uniformly
    without replacement down to min(ratio * n_toxic, available)."""
    if ratio <= 0:
        raise ValueError("ratio must be a positive integer")
    toxic_ids = [d.id for d in corpus if d.label == TOXIC]
    non_toxic_ids = [d.id for d in corpus if d.label == NON_TOXIC]
    if not toxic_ids:
        raise EmptyMinorityError("corpus has no toxic documents to anchor the ratio")
    keep = min(ratio * len(toxic_ids), len(non_toxic_ids))
    rng = SplitMix64(seed)
    selected = set(rng.sample(non_toxic_ids, keep))
    selected.update(toxic_ids)
    return Corpus(d for d in corpus if d.id in selected)


@dataclass(frozen=True)
class FoldPlan:
    k: int
    assignment: Mapping[str, int]

    def __post_init__(self):
        object.__setattr__(self, "assignment", MappingProxyType(dict(self.assignment)))

    def members(self, fold: int) -> set[str]:
        return {doc_id for doc_id, f in self.assignment.items() if f == fold}

    def validate(self, corpus: Corpus) -> None:
        """Assert the stratification invariants against a corpus."""
        ids = {d.id for d in corpus}
        assigned = set(self.assignment)
        if assigned != ids:
            raise CorpusError("fold plan does not partition the corpus")
        totals = [0] * self.k
        toxic = [0] * self.k
        for doc in corpus:
            fold = self.assignment[doc.id]
            totals[fold] += 1
            if doc.label == TOXIC:
                toxic[fold] += 1
        if max(totals) - min(totals) > 1:
            raise CorpusError(f"fold sizes not balanced: {totals}")
        if max(toxic) - min(toxic) > 1:
            raise CorpusError(f"fold toxic counts not balanced: {toxic}")


def stratified_assignment(labels: Sequence[str], k: int, seed: int) -> list[int]:
    """Fold index per position: shuffle each class independently, then deal
    round-robin, each class continuing where the previous one stopped so
    fold totals also differ by at most one."""
    if k < 2:
        raise ValueError("k must be at least 2")
    by_class: dict[str, list[int]] = {}
    for position, label in enumerate(labels):
        by_class.setdefault(label, []).append(position)
    for label in LABELS:
        members = by_class.get(label, [])
        if len(members) < k:
            raise CorpusError(f"class '{label}' has {len(members)} members, fewer than k={k}")

    rng = SplitMix64(seed)
    assignment = [0] * len(labels)
    next_fold = 0
    for label in LABELS:  # fixed class order keeps the plan deterministic
        members = by_class.get(label, [])
        rng.shuffle(members)
        for offset, position in enumerate(members):
            assignment[position] = (next_fold + offset) % k
        next_fold = (next_fold + len(members)) % k
    return assignment


def stratified_folds(corpus: Corpus, k: int, seed: int) -> FoldPlan:
    labels = corpus.labels()
    assignment = stratified_assignment(labels, k, seed)
    plan = FoldPlan(k=k, assignment={doc.id: fold for doc, fold in zip(corpus, assignment)})
    plan.validate(corpus)
    return plan


def build_issue_testset(threads: Corpus, max_chars: int) -> Corpus:
    """Retain only documents whose text length is <= max_chars."""
    return Corpus(d for d in threads if len(d.text) <= max_chars)


def sample_review_testset(
    corpus: Corpus, n_per_class: int, seed: int
) -> tuple[Corpus, Corpus]:
    """Disjoint (test, rest) split with exactly n_per_class documents of
    each class in the test part."""
    toxic_ids = [d.id for d in corpus if d.label == TOXIC]
    non_toxic_ids = [d.id for d in corpus if d.label == NON_TOXIC]
    if len(toxic_ids) < n_per_class or len(non_toxic_ids) < n_per_class:
        raise CorpusError(
            f"need {n_per_class} per class, have {len(toxic_ids)} toxic / "
            f"{len(non_toxic_ids)} non-toxic"
        )
    rng = SplitMix64(seed)
    selected = set(rng.sample(toxic_ids, n_per_class))
    selected.update(rng.sample(non_toxic_ids, n_per_class))
    test = Corpus(d for d in corpus if d.id in selected)
    rest = Corpus(d for d in corpus if d.id not in selected)
    return test, rest
