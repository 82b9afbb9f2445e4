"""Per-document feature vectors in the three compared configurations.

Column order is a frozen public contract:

    politeness, perspective,
    analytic, clout, authentic, tone, swear, sentiment,
    care_virtue, care_vice, fairness_virtue, fairness_vice,
    ingroup_virtue, ingroup_vice, authority_virtue, authority_vice,
    purity_virtue, purity_vice

"baseline" keeps the first 2 columns, "baseline_psych" the first 8,
"baseline_psych_moral" all 18.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import data as _data
from .baseline import ProviderConfig, baseline_scores
from .corpus import Corpus, Document, corpus_sha256
from .ddr import EmbeddingTable, load_embeddings, moral_loadings
from .errors import ConfigurationError, FeaturizeError, OsstoxError
from .lexicon import Lexicon, category_percentages, summary_scores
from .sentiment import ValenceLexicon, compound, load_valence_lexicon
from .textprep import tokenize

FEATURE_SETS = ("baseline", "baseline_psych", "baseline_psych_moral")

BASELINE_COLUMNS = ("politeness", "perspective")
PSYCH_COLUMNS = ("analytic", "clout", "authentic", "tone", "swear", "sentiment")
MORAL_COLUMNS = (
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
ALL_COLUMNS = BASELINE_COLUMNS + PSYCH_COLUMNS + MORAL_COLUMNS


def feature_names(feature_set: str) -> tuple[str, ...]:
    if feature_set == "baseline":
        return BASELINE_COLUMNS
    if feature_set == "baseline_psych":
        return BASELINE_COLUMNS + PSYCH_COLUMNS
    if feature_set == "baseline_psych_moral":
        return ALL_COLUMNS
    raise ValueError(f"unknown feature set {feature_set!r}")


@dataclass(frozen=True)
class FeatureConfig:
    feature_set: str = "baseline_psych_moral"
    provider: ProviderConfig = field(default_factory=ProviderConfig)

    def __post_init__(self):
        if self.feature_set not in FEATURE_SETS:
            raise ValueError(f"unknown feature set {self.feature_set!r}")


@dataclass
class Resources:
    """Loaded inputs featurization needs; unused ones may stay None."""

    psych_lexicon: Lexicon | None = None
    valence_lexicon: ValenceLexicon | None = None
    moral_lexicon: Lexicon | None = None
    embeddings: EmbeddingTable | None = None
    embeddings_sha256: str | None = None


def load_resources(
    feature_set: str, lexicon_dir=None, embeddings_path=None
) -> Resources:
    """Load the lexicons and embeddings a feature set needs; defaults come
    from the shipped data files."""
    resources = Resources()
    if feature_set in ("baseline_psych", "baseline_psych_moral"):
        if lexicon_dir is not None:
            lexicon_dir = Path(lexicon_dir)
            resources.psych_lexicon = Lexicon.from_json_file(lexicon_dir / "psycholinguistic.json")
            resources.valence_lexicon = load_valence_lexicon(
                lexicon_dir / "valence.tsv", lexicon_dir / "valence_modifiers.json"
            )
        else:
            resources.psych_lexicon = _data.default_psych_lexicon()
            resources.valence_lexicon = _data.default_valence_lexicon()
    if feature_set == "baseline_psych_moral":
        if lexicon_dir is not None:
            resources.moral_lexicon = Lexicon.from_json_file(
                Path(lexicon_dir) / "moral_foundations.json"
            )
        else:
            resources.moral_lexicon = _data.default_moral_lexicon()
        if embeddings_path is None:
            raise ConfigurationError(
                "feature set 'baseline_psych_moral' requires an embeddings file"
            )
        resources.embeddings = load_embeddings(embeddings_path)
        resources.embeddings_sha256 = _sha256_file(embeddings_path)
    return resources


@dataclass(frozen=True)
class FeatureVector:
    names: tuple[str, ...]
    values: tuple[float, ...]
    label: str | None

    def __len__(self) -> int:
        return len(self.values)

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.names, self.values))


def featurize(doc: Document, cfg: FeatureConfig, resources: Resources) -> FeatureVector:
    names = feature_names(cfg.feature_set)
    try:
        base = baseline_scores(doc, cfg.provider)
        values = [base.politeness, base.perspective_toxicity]
        if cfg.feature_set in ("baseline_psych", "baseline_psych_moral"):
            if resources.psych_lexicon is None or resources.valence_lexicon is None:
                raise ConfigurationError("psycholinguistic resources are not loaded")
            ts = tokenize(doc.text)
            profile = category_percentages(ts, resources.psych_lexicon)
            summary = summary_scores(profile)
            values += [
                summary.analytic,
                summary.clout,
                summary.authentic,
                summary.tone,
                summary.swear,
                compound(ts, resources.valence_lexicon),
            ]
        if cfg.feature_set == "baseline_psych_moral":
            if resources.moral_lexicon is None or resources.embeddings is None:
                raise ConfigurationError("moral lexicon or embeddings are not loaded")
            loadings = moral_loadings(ts, resources.moral_lexicon, resources.embeddings)
            values += list(loadings.as_tuple())
    except (OsstoxError, ValueError) as exc:
        raise FeaturizeError([doc.id], detail=str(exc)) from exc
    return FeatureVector(names=names, values=tuple(values), label=doc.label)


def feature_matrix(
    corpus: Corpus, cfg: FeatureConfig, resources: Resources
) -> tuple[np.ndarray, np.ndarray]:
    """Row order follows corpus order. Returns (X, y) with y[i] = 1 for
    toxic. Any per-document failure aborts with the full id list."""
    names = feature_names(cfg.feature_set)
    rows = []
    labels = []
    failed: list[str] = []
    detail = ""
    for doc in corpus:
        if doc.label is None:
            failed.append(doc.id)
            detail = detail or "unlabeled document"
            continue
        try:
            fv = featurize(doc, cfg, resources)
        except FeaturizeError as exc:
            failed.append(doc.id)
            detail = detail or str(exc)
            continue
        rows.append(fv.values)
        labels.append(1 if doc.label == "toxic" else 0)
    if failed:
        raise FeaturizeError(failed, detail=detail)
    if not rows:
        return np.zeros((0, len(names))), np.zeros(0, dtype=np.int64)
    return np.asarray(rows, dtype=np.float64), np.asarray(labels, dtype=np.int64)


def _sha256_file(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for block in iter(lambda: handle.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


def _lexicon_sha256(lex: Lexicon | None) -> str | None:
    if lex is None:
        return None
    payload = json.dumps(lex.to_json_dict(), sort_keys=True, ensure_ascii=True)
    return hashlib.sha256(payload.encode("ascii")).hexdigest()


def _valence_sha256(vl: ValenceLexicon | None) -> str | None:
    if vl is None:
        return None
    payload = json.dumps(
        {
            "valences": dict(sorted(vl.valences.items())),
            "boosters": dict(sorted(vl.boosters.items())),
            "negations": sorted(vl.negations),
        },
        sort_keys=True,
        ensure_ascii=True,
    )
    return hashlib.sha256(payload.encode("ascii")).hexdigest()


def resource_hashes(cfg: FeatureConfig, resources: Resources) -> dict:
    hashes = {
        "psych_lexicon": _lexicon_sha256(resources.psych_lexicon),
        "valence_lexicon": _valence_sha256(resources.valence_lexicon),
        "moral_lexicon": _lexicon_sha256(resources.moral_lexicon),
        "embeddings": resources.embeddings_sha256,
    }
    return {k: v for k, v in hashes.items() if v is not None}


def matrix_cache_key(corpus: Corpus, cfg: FeatureConfig, resources: Resources) -> str:
    payload = json.dumps(
        {
            "corpus": corpus_sha256(corpus),
            "feature_set": cfg.feature_set,
            "provider_mode": cfg.provider.mode,
            "resources": resource_hashes(cfg, resources),
        },
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode("ascii")).hexdigest()


def save_matrix(path, X: np.ndarray, y: np.ndarray, names) -> None:
    """CSV with the feature columns plus a trailing label column. Floats are
    written with repr precision so a round-trip is exact."""
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(",".join(list(names) + ["label"]) + "\n")
        for row, label in zip(X, y):
            cells = [f"{v:.17g}" for v in row]
            cells.append("toxic" if label == 1 else "non_toxic")
            handle.write(",".join(cells) + "\n")


def load_matrix(path) -> tuple[np.ndarray, np.ndarray, tuple[str, ...]]:
    path = Path(path)
    with open(path, "r", encoding="utf-8") as handle:
        header = handle.readline().strip().split(",")
        if not header or header[-1] != "label":
            raise ConfigurationError(f"{path}: expected a trailing 'label' column")
        names = tuple(header[:-1])
        rows = []
        labels = []
        for line in handle:
            line = line.strip()
            if not line:
                continue
            cells = line.split(",")
            rows.append([float(c) for c in cells[:-1]])
            labels.append(1 if cells[-1] == "toxic" else 0)
    X = np.asarray(rows, dtype=np.float64) if rows else np.zeros((0, len(names)))
    return X, np.asarray(labels, dtype=np.int64), names


def cached_feature_matrix(
    corpus: Corpus, cfg: FeatureConfig, resources: Resources, cache_dir
) -> tuple[np.ndarray, np.ndarray]:
    """feature_matrix with a disk cache keyed by corpus, configuration and
    resource hashes. A manifest sits next to each cached CSV."""
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    key = matrix_cache_key(corpus, cfg, resources)
    csv_path = cache_dir / f"matrix-{key[:16]}.csv"
    manifest_path = cache_dir / f"matrix-{key[:16]}.manifest.json"
    if csv_path.exists() and manifest_path.exists():
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        if manifest.get("key") == key:
            X, y, _ = load_matrix(csv_path)
            return X, y
    X, y = feature_matrix(corpus, cfg, resources)
    save_matrix(csv_path, X, y, feature_names(cfg.feature_set))
    manifest = {
        "key": key,
        "corpus_sha256": corpus_sha256(corpus),
        "feature_set": cfg.feature_set,
        "provider_mode": cfg.provider.mode,
        "resources": resource_hashes(cfg, resources),
        "columns": list(feature_names(cfg.feature_set)),
        "rows": int(X.shape[0]),
    }
    manifest_path.write_text(
        json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    return X, y
