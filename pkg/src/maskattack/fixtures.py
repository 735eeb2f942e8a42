"""Deterministic fixtures: hand-built toy model suites, a seeded random
setup generator for brute-force cross-checks, and a synthetic movie-review
corpus with lightweight trainable backends.

Everything here is reproducible from its seed; nothing touches the network.
"""

from __future__ import annotations

import random
from typing import Sequence

from .backends import (
    Backends,
    BagOfWordsEncoder,
    BagOfWordsLogisticClassifier,
    CorpusMaskedLM,
    TableTagger,
    ToyFixture,
    default_antonyms,
)
from .core import Label
from .ingestion import Dataset, Example

# ---------------------------------------------------------------------------
# Hand-built fixtures
# ---------------------------------------------------------------------------

def food_fixture(
    weights: dict[str, float] | None = None,
    candidates: tuple[str, ...] = ("bad", "nice"),
    antonym_pairs: tuple[tuple[str, str], ...] = (("good", "bad"),),
) -> ToyFixture:
    """The 4-token restaurant-review fixture used across the test suite.

    Sentence under attack: "the food was good", class 1 = positive.
    """
    return ToyFixture(
        classifier_weights=weights if weights is not None else {"good": 2.0},
        bias=0.0,
        mlm_table={("was", "<end>"): candidates},
        pos_table={
            "the": "OTHER",
            "food": "NOUN",
            "was": "VERB",
            "good": "ADJ",
            "bad": "ADJ",
            "nice": "ADJ",
            "awful": "ADJ",
            "ok": "ADJ",
        },
        antonym_pairs=frozenset(frozenset(p) for p in antonym_pairs),
    )


def film_fixture() -> ToyFixture:
    """Two-replacement fixture: 'this film offers many delights and surprises .'

    Designed so a replace-only attack lands 'film -> movie' first (no flip)
    and then flips on 'many -> enough'.
    """
    return ToyFixture(
        classifier_weights={"film": 2.0, "many": 2.0, "movie": -1.0, "enough": -1.5},
        bias=0.0,
        mlm_table={
            ("this", "offers"): ("movie",),
            ("offers", "delights"): ("enough",),
        },
        pos_table={
            "this": "OTHER",
            "film": "NOUN",
            "movie": "NOUN",
            "offers": "VERB",
            "many": "ADJ",
            "enough": "ADJ",
            "delights": "NOUN",
            "and": "OTHER",
            "surprises": "NOUN",
            ".": "OTHER",
        },
    )


# ---------------------------------------------------------------------------
# Randomized toy setups for brute-force cross-checks
# ---------------------------------------------------------------------------

_POOL_TAGS = {
    "film": "NOUN", "story": "NOUN", "plot": "NOUN", "cast": "NOUN",
    "music": "NOUN", "scene": "NOUN", "script": "NOUN", "acting": "NOUN",
    "ending": "NOUN", "pacing": "NOUN",
    "runs": "VERB", "feels": "VERB", "looks": "VERB", "drags": "VERB",
    "shines": "VERB", "builds": "VERB",
    "good": "ADJ", "bad": "ADJ", "fine": "ADJ", "dull": "ADJ",
    "sharp": "ADJ", "warm": "ADJ", "cold": "ADJ", "bright": "ADJ",
    "bland": "ADJ", "rich": "ADJ", "thin": "ADJ", "grand": "ADJ",
    "truly": "ADV", "barely": "ADV", "quite": "ADV",
    # stop words: legal sentence tokens, and candidates the filter must drop
    "the": "OTHER", "was": "OTHER", "very": "OTHER", "and": "OTHER",
}

_POOL = tuple(sorted(_POOL_TAGS))


def random_attack_setup(rng: random.Random) -> dict:
    """One random toy scenario: fixture, sentence tokens, label, config knobs.

    Vocabulary stays at or below 20 words and sentences at or below 8
    tokens so brute-force enumeration stays instant.
    """
    vocab = sorted(rng.sample(_POOL, rng.randint(8, 20)))
    weights = {w: round(rng.uniform(-3.0, 3.0), 2) for w in vocab}
    bias = round(rng.uniform(-1.0, 1.0), 2)

    mlm_table: dict[tuple[str, str], tuple[str, ...]] = {}
    lefts = ["<start>", *vocab]
    rights = ["<end>", *vocab]
    for left in lefts:
        for right in rights:
            if rng.random() < 0.22:
                size = rng.randint(1, 4)
                mlm_table[(left, right)] = tuple(rng.sample(vocab, size))

    pair_pool = [p for p in vocab if _POOL_TAGS[p] == "ADJ"]
    antonym_pairs = set()
    for _ in range(rng.randint(0, 3)):
        if len(pair_pool) >= 2:
            antonym_pairs.add(frozenset(rng.sample(pair_pool, 2)))

    fixture = ToyFixture(
        classifier_weights=weights,
        bias=bias,
        mlm_table=mlm_table,
        pos_table={w: _POOL_TAGS[w] for w in vocab},
        antonym_pairs=frozenset(antonym_pairs),
    )
    tokens = tuple(rng.choice(vocab) for _ in range(rng.randint(3, 8)))
    return {
        "fixture": fixture,
        "tokens": tokens,
        "label": Label(rng.randint(0, 1)),
        "k": rng.randint(1, 4),
        "sim_threshold": rng.choice([0.5, 0.6, 0.7, 0.8]),
        "sentiment_task": rng.random() < 0.5,
    }


# ---------------------------------------------------------------------------
# Synthetic movie-review corpus + lightweight trained backends
# ---------------------------------------------------------------------------

POSITIVE_ADJ = (
    "great", "wonderful", "charming", "delightful", "superb", "engaging",
    "gripping", "clever", "fresh", "funny", "terrific", "lovely",
)
NEGATIVE_ADJ = (
    "dull", "tedious", "clumsy", "shallow", "bland", "messy", "tired",
    "hollow", "grim", "flat", "terrible", "awful",
)
REVIEW_NOUNS = (
    "movie", "film", "story", "plot", "script", "cast", "acting",
    "ending", "pacing", "dialogue",
)

_TEMPLATES = (
    "the {n1} was {a1} overall",
    "the {n1} was {a1} and {a2}",
    "a {a1} {n1} with {a2} {n2}",
    "it was a {a1} {n1} overall",
    "the {n1} was really {a1} and the {n2} felt {a2}",
    "the {n1} had a {a1} {n2} and stayed {a2} throughout",
    "critics called the {n1} {a1} because the {n2} was {a2}",
)


def synthetic_reviews(n: int, seed: int) -> list[tuple[str, int]]:
    """n template-generated reviews; label 1 positive, 0 negative."""
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        label = rng.randint(0, 1)
        adjectives = POSITIVE_ADJ if label == 1 else NEGATIVE_ADJ
        a1, a2 = rng.sample(adjectives, 2)
        n1, n2 = rng.sample(REVIEW_NOUNS, 2)
        text = rng.choice(_TEMPLATES).format(a1=a1, a2=a2, n1=n1, n2=n2)
        out.append((text, label))
    return out


def _reviews_dataset(rows: Sequence[tuple[str, int]], name: str, split: str) -> Dataset:
    examples = tuple(
        Example(id=str(i), text=text, label=Label(label))
        for i, (text, label) in enumerate(rows, start=1)
    )
    return Dataset(
        name=name, examples=examples, num_classes=2, sentiment_task=True, split=split
    )


def _review_pos_table() -> dict[str, str]:
    table = {w: "ADJ" for w in POSITIVE_ADJ + NEGATIVE_ADJ}
    table.update({w: "NOUN" for w in REVIEW_NOUNS})
    table.update(
        {
            "was": "VERB", "felt": "VERB", "had": "VERB", "stayed": "VERB",
            "called": "VERB", "critics": "NOUN",
            "really": "ADV", "overall": "ADV", "throughout": "ADV",
        }
    )
    return table


def synthetic_review_bundle(
    train_size: int = 800,
    test_size: int = 200,
    seed: int = 11,
) -> tuple[Backends, Dataset, Dataset]:
    """Trainable-victim pipeline: BoW logistic classifier + corpus-trained
    mask filler, both fitted on the train split only.

    Returns (backends, train set, test set); deterministic given the seed.
    """
    train_rows = synthetic_reviews(train_size, seed)
    test_rows = synthetic_reviews(test_size, seed + 1)
    train = _reviews_dataset(train_rows, "synthetic-reviews", "train")
    test = _reviews_dataset(test_rows, "synthetic-reviews", "test")

    classifier = BagOfWordsLogisticClassifier.train(
        [e.text for e in train.examples],
        [e.label.class_index for e in train.examples],
    )
    mlm = CorpusMaskedLM.train([e.text for e in train.examples])
    backends = Backends(
        classifier=classifier,
        mlm=mlm,
        encoder=BagOfWordsEncoder(),
        pos_tagger=TableTagger(_review_pos_table()),
        antonyms=default_antonyms(),
    )
    return backends, train, test
