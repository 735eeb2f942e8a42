"""Masked-variant construction and the candidate filter pipeline.

A candidate survives, in order: the identity/adjacent-duplicate screen,
the stop-word screen, the part-of-speech match (replacements only), the
antonym screen (sentiment tasks only), and the sentence-similarity
threshold against the *original* input. Removal counts per stage are kept
as provenance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

from .backends import (
    AntonymLexicon,
    MaskedLMBackend,
    PosTaggerBackend,
    SentenceEncoderBackend,
    load_stopwords,
)
from .core import (
    MASK_TOKEN,
    PerturbationKind,
    PerturbationOp,
    Sentence,
    apply_perturbation,
)

if TYPE_CHECKING:
    from .attack import AttackConfig

FILTER_STAGES = ("identity", "duplicate", "stopword", "pos", "antonym", "similarity")

_DEFAULT_STOPWORDS: frozenset[str] | None = None


def _stopwords() -> frozenset[str]:
    global _DEFAULT_STOPWORDS
    if _DEFAULT_STOPWORDS is None:
        _DEFAULT_STOPWORDS = load_stopwords()
    return _DEFAULT_STOPWORDS


@dataclass(frozen=True)
class Candidate:
    """One filter-surviving perturbation, ready for classifier evaluation."""

    op: PerturbationOp
    word: str
    mlm_score: float
    sentence: Sentence
    similarity: float


@dataclass(frozen=True)
class CandidateSet:
    position: int
    kind: PerturbationKind
    candidates: tuple[Candidate, ...]
    provenance: dict[str, int]


def make_masked(s: Sentence, position: int, kind: PerturbationKind) -> list[str]:
    """Token list with exactly one mask at the slot the op would touch."""
    i = s.resolve(position)
    tokens = list(s.tokens)
    if kind is PerturbationKind.REPLACE:
        tokens[i] = MASK_TOKEN
    elif kind is PerturbationKind.INSERT_LEFT:
        tokens.insert(i, MASK_TOKEN)
    else:
        tokens.insert(i + 1, MASK_TOKEN)
    return tokens


def generate_candidates(
    mlm: MaskedLMBackend,
    s: Sentence,
    position: int,
    kind: PerturbationKind,
    k: int,
) -> list[tuple[str, float]]:
    """Raw ranked (word, score) predictions for the masked variant."""
    if k <= 0:
        return []
    return mlm.predict_mask(make_masked(s, position, kind), k)


def _insertion_neighbors(
    s_current: Sentence, i: int, kind: PerturbationKind
) -> tuple[str | None, str | None]:
    """Tokens that would flank the inserted word."""
    if kind is PerturbationKind.INSERT_LEFT:
        left = s_current.tokens[i - 1] if i > 0 else None
        right = s_current.tokens[i]
    else:
        left = s_current.tokens[i]
        right = s_current.tokens[i + 1] if i + 1 < len(s_current.tokens) else None
    return left, right


def filter_candidates(
    raw: list[tuple[str, float]],
    s_original: Sentence,
    s_current: Sentence,
    position: int,
    kind: PerturbationKind,
    config: "AttackConfig",
    pos_tagger: PosTaggerBackend,
    antonyms: AntonymLexicon,
    encoder: SentenceEncoderBackend,
    stopwords: frozenset[str] | None = None,
) -> CandidateSet:
    """Run the staged filter pipeline over raw masked-LM predictions.

    Similarity is always measured between the candidate's full sentence and
    the original input, never the intermediate attack state. An empty
    surviving set is a normal outcome.
    """
    if stopwords is None:
        stopwords = _stopwords()
    provenance = {stage: 0 for stage in FILTER_STAGES}
    original_token = s_original.tokens[position]
    i = s_current.resolve(position)
    original_tags: tuple[str, ...] | None = None

    survivors: list[Candidate] = []
    for word, score in raw:
        if kind is PerturbationKind.REPLACE:
            if word == original_token:
                provenance["identity"] += 1
                continue
        else:
            left, right = _insertion_neighbors(s_current, i, kind)
            if word == left or word == right:
                provenance["duplicate"] += 1
                continue

        if word in stopwords:
            provenance["stopword"] += 1
            continue

        if kind is PerturbationKind.REPLACE:
            op = PerturbationOp(
                kind=kind, position=position, new_token=word, original_token=original_token
            )
        else:
            op = PerturbationOp(kind=kind, position=position, new_token=word)
        perturbed = apply_perturbation(s_current, op)

        if kind is PerturbationKind.REPLACE:
            if original_tags is None:
                original_tags = pos_tagger.tag(s_original)
            candidate_tag = pos_tagger.tag(perturbed)[i]
            if candidate_tag != original_tags[position]:
                provenance["pos"] += 1
                continue

        if config.sentiment_task:
            if kind is PerturbationKind.REPLACE:
                anchors = (original_token,)
            else:
                anchors = tuple(t for t in _insertion_neighbors(s_current, i, kind) if t)
            if any(antonyms.are_antonyms(word, anchor) for anchor in anchors):
                provenance["antonym"] += 1
                continue

        similarity = encoder.similarity(s_original.text(), perturbed.text())
        if similarity < config.sim_threshold:
            provenance["similarity"] += 1
            continue

        survivors.append(
            Candidate(op=op, word=word, mlm_score=score, sentence=perturbed, similarity=similarity)
        )

    return CandidateSet(
        position=position, kind=kind, candidates=tuple(survivors), provenance=provenance
    )
