import json
import time

import numpy as np
import pytest

from osstox.corpus import Corpus, Document


def make_doc(doc_id, text="hello world", label="non_toxic", channel="issue_comment", scores=None):
    return Document(
        id=doc_id, channel=channel, text=text, label=label, precomputed=scores or {}
    )


def make_corpus(n_toxic, n_non_toxic, text_toxic="you are stupid", text_non="thanks a lot"):
    docs = [make_doc(f"t{i}", text=text_toxic, label="toxic") for i in range(n_toxic)]
    docs += [make_doc(f"n{i}", text=text_non, label="non_toxic") for i in range(n_non_toxic)]
    return Corpus(docs)


@pytest.fixture
def corpus_builder():
    return make_corpus


TOXIC_TEXTS = [
    "You are a fucking idiot and this code is garbage.",
    "This is stupid, stop wasting my time with this crap.",
    "What a dumb patch, did you even test this shit?",
    "Nobody wants your worthless contribution, get lost.",
    "This is the worst, most useless piece of trash ever.",
    "Damn it, you broke everything again, pathetic.",
    "Are you an idiot? This is such a brain-dead change.",
    "Stop submitting this garbage, you incompetent fool.",
]

NON_TOXIC_TEXTS = [
    "Thanks for the patch, looks good to me.",
    "Could you please rebase this branch on main?",
    "Nice work, I appreciate the quick turnaround.",
    "I think we should refactor this helper slightly.",
    "The build passes now, merging soon.",
    "Please add a unit test for the new endpoint.",
    "Great catch, that race condition was subtle.",
    "Sorry for the delay, reviewing this today.",
    "This looks reasonable, just one minor comment.",
    "Maybe we could simplify the loop a little.",
    "Appreciate the detailed writeup, very helpful.",
    "Let me know if you need help with the migration.",
    "Good point, I will update the docs.",
    "The benchmark numbers look solid to me.",
    "Thanks again, merging once CI is green.",
    "Would you mind splitting this into two commits?",
    "Looks fine overall, nice and clean.",
    "I wonder if we should cache this result.",
    "This seems fine, thanks for checking the edge cases.",
    "Good idea, the fallback path reads much better now.",
    "We could perhaps batch these writes, thoughts?",
    "Thanks, the fix works on my machine as well.",
    "Happy to help review the follow-up change.",
    "Solid improvement, the tests are much faster.",
]


def write_demo_corpus(path, n_toxic=8, n_non_toxic=24):
    """Labeled corpus file with precomputed baseline scores."""
    with open(path, "w", encoding="utf-8") as handle:
        for i in range(n_toxic):
            record = {
                "id": f"t{i}",
                "channel": "issue_comment",
                "text": TOXIC_TEXTS[i % len(TOXIC_TEXTS)],
                "label": "toxic",
                "scores": {"politeness": 0.15 + 0.01 * (i % 5), "perspective": 0.85 + 0.01 * (i % 5)},
            }
            handle.write(json.dumps(record) + "\n")
        for i in range(n_non_toxic):
            record = {
                "id": f"n{i}",
                "channel": "code_review",
                "text": NON_TOXIC_TEXTS[i % len(NON_TOXIC_TEXTS)],
                "label": "non_toxic",
                "scores": {"politeness": 0.75 + 0.01 * (i % 5), "perspective": 0.05 + 0.01 * (i % 5)},
            }
            handle.write(json.dumps(record) + "\n")
    return path


DEMO_EMBEDDING_WORDS = {
    "good": (0.9, 0.1, 0.0, 0.1),
    "great": (0.85, 0.2, 0.0, 0.1),
    "kind": (0.8, 0.3, 0.0, 0.0),
    "help": (0.7, 0.3, 0.1, 0.0),
    "thanks": (0.75, 0.25, 0.1, 0.0),
    "care": (0.8, 0.25, 0.05, 0.0),
    "fair": (0.7, 0.1, 0.3, 0.0),
    "loyal": (0.6, 0.1, 0.4, 0.0),
    "respect": (0.65, 0.2, 0.35, 0.0),
    "pure": (0.6, 0.3, 0.3, 0.1),
    "clean": (0.55, 0.35, 0.2, 0.1),
    "bad": (-0.9, -0.1, 0.0, 0.0),
    "stupid": (-0.85, -0.2, 0.0, -0.1),
    "idiot": (-0.8, -0.25, -0.1, 0.0),
    "garbage": (-0.75, -0.1, -0.2, 0.0),
    "trash": (-0.7, -0.15, -0.2, 0.0),
    "harm": (-0.8, -0.2, -0.1, -0.1),
    "hurt": (-0.75, -0.25, -0.1, 0.0),
    "cheat": (-0.6, -0.1, -0.4, 0.0),
    "betray": (-0.55, -0.1, -0.45, 0.0),
    "defy": (-0.5, -0.2, -0.4, -0.1),
    "dirty": (-0.6, -0.3, -0.2, -0.1),
    "filthy": (-0.65, -0.3, -0.2, -0.1),
    "toxic": (-0.7, -0.3, -0.15, -0.05),
    "corrupt": (-0.6, -0.25, -0.3, -0.05),
    "patch": (0.0, 0.1, 0.0, 0.9),
    "code": (0.05, 0.0, 0.1, 0.85),
    "test": (0.1, 0.05, 0.0, 0.8),
    "build": (0.0, 0.15, 0.05, 0.8),
    "merge": (0.05, 0.1, 0.1, 0.75),
    "branch": (0.0, 0.05, 0.0, 0.85),
    "docs": (0.1, 0.1, 0.0, 0.7),
    "you": (0.0, 0.5, 0.0, 0.2),
    "this": (0.0, 0.4, 0.1, 0.3),
    "time": (0.0, 0.3, 0.0, 0.4),
    "work": (0.2, 0.3, 0.0, 0.5),
}


def write_demo_embeddings(path):
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(f"{len(DEMO_EMBEDDING_WORDS)} 4\n")
        for word, vec in DEMO_EMBEDDING_WORDS.items():
            handle.write(word + " " + " ".join(repr(float(v)) for v in vec) + "\n")
    return path


@pytest.fixture(scope="session")
def demo_corpus_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("corpus") / "demo.jsonl"
    return write_demo_corpus(path)


@pytest.fixture(scope="session")
def demo_embeddings_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("emb") / "demo_embeddings.txt"
    return write_demo_embeddings(path)


def separable_fixture(n_toxic=100, n_non_toxic=300, n_noise=3, margin=2.0, seed=7):
    """Linearly separable matrix: class means +/-(margin/2 + 1) on column 0
    with noise clipped so the class gap on column 0 is at least `margin`."""
    rng = np.random.default_rng(seed)
    center = margin / 2.0 + 1.0
    tox_x0 = center + np.clip(0.3 * rng.standard_normal(n_toxic), -0.99, 0.99)
    non_x0 = -center + np.clip(0.3 * rng.standard_normal(n_non_toxic), -0.99, 0.99)
    X = np.vstack(
        [
            np.column_stack([tox_x0, rng.standard_normal((n_toxic, n_noise))]),
            np.column_stack([non_x0, rng.standard_normal((n_non_toxic, n_noise))]),
        ]
    )
    y = np.concatenate([np.ones(n_toxic, dtype=np.int64), np.zeros(n_non_toxic, dtype=np.int64)])
    return X, y


@pytest.fixture(scope="session")
def separable_matrix():
    return separable_fixture()


def pytest_sessionstart(session):
    session.config._osstox_start = time.monotonic()


def pytest_sessionfinish(session, exitstatus):
    started = getattr(session.config, "_osstox_start", None)
    if started is not None:
        elapsed = time.monotonic() - started
        print(f"\n[osstox] full suite wall time: {elapsed:.1f}s (desk-scale budget 300s)")
