"""Token importance by deletion probing.

Each token's importance is the drop in the true-class probability when
that token is deleted. Importance is computed once, on the original
sentence, and fixes the attack's position visit order.
"""

from __future__ import annotations

from dataclasses import dataclass

from .backends import ClassifierBackend
from .core import Label, ProbDist, Sentence, detokenize


@dataclass(frozen=True)
class ImportanceScores:
    """Per-token deletion scores plus the descending visit order."""

    scores: tuple[float, ...]
    order: tuple[int, ...]


def rank_tokens(scores: tuple[float, ...] | list[float]) -> tuple[int, ...]:
    """Indices sorted by descending score; ties break toward the lower index."""
    return tuple(sorted(range(len(scores)), key=lambda i: (-scores[i], i)))


def token_importance(
    classifier: ClassifierBackend,
    s: Sentence,
    y: Label,
    base_probs: ProbDist | None = None,
) -> ImportanceScores:
    """Deletion-probe every token: scores[i] = P(y|s) - P(y|s minus token i).

    Costs n+1 classifier queries for n tokens (n when `base_probs` is
    supplied). Deleting the only token of a 1-token sentence is scored
    against the uniform distribution instead of querying empty text.
    """
    if base_probs is None:
        base_probs = classifier.predict(s.text())
    base = base_probs.p(y)
    scores = []
    for i in range(len(s.tokens)):
        remaining = s.tokens[:i] + s.tokens[i + 1:]
        if remaining:
            deleted = classifier.predict(detokenize(remaining)).p(y)
        else:
            deleted = 1.0 / classifier.num_classes
        scores.append(base - deleted)
    scores_t = tuple(scores)
    return ImportanceScores(scores=scores_t, order=rank_tokens(scores_t))
