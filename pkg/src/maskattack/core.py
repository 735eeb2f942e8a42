"""Core domain types: sentences, labels, perturbation ops, attack results.

Everything here is an immutable value object, safe to share across threads.
Perturbation positions always refer to the *original* sentence; the
``origin_map`` on :class:`Sentence` resolves them after insertions have
shifted indices, so a recorded op sequence can be replayed bit-exactly.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from enum import Enum

MASK_TOKEN = "[MASK]"

_PUNCT = frozenset(string.punctuation)


class EmptyText(ValueError):
    """Raised when a text yields no tokens."""


class PositionResolutionError(LookupError):
    """Raised when an op's original-sentence position has no surviving image."""


class PerturbationKind(str, Enum):
    REPLACE = "replace"
    INSERT_LEFT = "insert_left"
    INSERT_RIGHT = "insert_right"


class AttackMode(str, Enum):
    """The four attack modes built from replace/insert primitives.

    Values double as the human-readable labels used on the command line
    and in reports.
    """

    R = "R"
    I = "I"  # noqa: E741 - single-letter mode name is the domain vocabulary
    RI_CHOICE = "R/I"
    R_PLUS_I = "R+I"

    @classmethod
    def parse(cls, text: str) -> "AttackMode":
        for mode in cls:
            if text == mode.value or text == mode.name:
                return mode
        raise ValueError(f"unknown attack mode {text!r} (choose from R, I, R/I, R+I)")


class AttackStatus(str, Enum):
    SUCCESS = "success"
    FAILURE = "failure"
    SKIPPED_ALREADY_MISCLASSIFIED = "skipped_already_misclassified"


class StopReason(str, Enum):
    EXHAUSTED = "exhausted"          # every original position was tried
    PERTURB_CAP = "perturb_cap"      # next op would exceed max_perturb_ratio
    QUERY_BUDGET = "query_budget"    # next step would exceed the query budget
    ERROR = "error"                  # backend error recorded by attack_corpus


@dataclass(frozen=True)
class Label:
    class_index: int

    def __post_init__(self) -> None:
        if self.class_index < 0:
            raise ValueError(f"class_index must be >= 0, got {self.class_index}")


@dataclass(frozen=True)
class ProbDist:
    """Classifier output distribution, one probability per class."""

    probs: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.probs) < 2:
            raise ValueError("a probability distribution needs at least 2 classes")
        if any(p < -1e-9 or p > 1.0 + 1e-9 for p in self.probs):
            raise ValueError(f"probabilities out of [0, 1]: {self.probs}")
        if abs(sum(self.probs) - 1.0) > 1e-6:
            raise ValueError(f"probabilities sum to {sum(self.probs)}, expected 1")

    def p(self, label: Label) -> float:
        return self.probs[label.class_index]

    def top(self) -> int:
        """Index of the highest-probability class (ties: lowest index)."""
        best = max(self.probs)
        return self.probs.index(best)


def misclassifies(probs: ProbDist, label: Label) -> bool:
    """True when some class strictly beats the true label's probability.

    An exact tie with the top class counts as *not* misclassified, so a
    candidate that merely drags P(y) down to 0.5 on a binary task does not
    flip the prediction.
    """
    return probs.p(label) < max(probs.probs)


def predicted_label(probs: ProbDist, label: Label) -> Label:
    """The classifier's decision under the tie convention of `misclassifies`."""
    if not misclassifies(probs, label):
        return label
    return Label(probs.top())


@dataclass(frozen=True)
class Sentence:
    """An ordered word-token view of a text.

    ``origin_map[i]`` is the original-token index token ``i`` derives from,
    or ``None`` for inserted tokens. Original indices appear in strictly
    increasing order among non-inserted entries.
    """

    tokens: tuple[str, ...]
    raw_text: str
    origin_map: tuple[int | None, ...]

    def __post_init__(self) -> None:
        if not self.tokens:
            raise EmptyText("a sentence must contain at least one token")
        if len(self.origin_map) != len(self.tokens):
            raise ValueError("origin_map length must equal token count")
        kept = [i for i in self.origin_map if i is not None]
        if any(b <= a for a, b in zip(kept, kept[1:])):
            raise ValueError("non-inserted origin indices must strictly increase")

    @classmethod
    def from_tokens(cls, tokens: list[str] | tuple[str, ...], raw_text: str | None = None) -> "Sentence":
        toks = tuple(tokens)
        return cls(
            tokens=toks,
            raw_text=raw_text if raw_text is not None else " ".join(toks),
            origin_map=tuple(range(len(toks))),
        )

    def text(self) -> str:
        return detokenize(self.tokens)

    def resolve(self, position: int) -> int:
        """Current index of the token derived from original `position`."""
        for i, origin in enumerate(self.origin_map):
            if origin == position:
                return i
        raise PositionResolutionError(
            f"original position {position} has no surviving token"
        )


def _split_chunk(chunk: str) -> list[str]:
    """Peel leading/trailing punctuation runs off one whitespace chunk."""
    head = 0
    while head < len(chunk) and chunk[head] in _PUNCT:
        head += 1
    tail = len(chunk)
    while tail > head and chunk[tail - 1] in _PUNCT:
        tail -= 1
    if head == tail:  # pure punctuation, keep as a single token
        return [chunk]
    parts = []
    if head:
        parts.append(chunk[:head])
    parts.append(chunk[head:tail])
    if tail < len(chunk):
        parts.append(chunk[tail:])
    return parts


def tokenize(text: str) -> Sentence:
    """Lowercased word-level split: whitespace plus edge punctuation.

    Interior punctuation (apostrophes, hyphens) stays attached, so
    "don't" is one token while "surprises." becomes two.
    """
    if not text.strip():
        raise EmptyText("no tokens survive tokenization")
    tokens: list[str] = []
    for chunk in text.lower().split():
        tokens.extend(_split_chunk(chunk))
    return Sentence(
        tokens=tuple(tokens),
        raw_text=text,
        origin_map=tuple(range(len(tokens))),
    )


def detokenize(tokens: tuple[str, ...] | list[str]) -> str:
    return " ".join(tokens)


@dataclass(frozen=True)
class PerturbationOp:
    """One replace or insert action, addressed by original-token position."""

    kind: PerturbationKind
    position: int
    new_token: str
    original_token: str | None = None

    def __post_init__(self) -> None:
        if self.position < 0:
            raise ValueError("position must be >= 0")
        if not self.new_token:
            raise ValueError("new_token must be non-empty")
        if self.kind is PerturbationKind.REPLACE:
            if self.original_token is None:
                raise ValueError("replace ops require original_token")
            if self.new_token == self.original_token:
                raise ValueError("replace ops must change the token")
        elif self.original_token is not None:
            raise ValueError("insert ops carry no original_token")


def apply_perturbation(s: Sentence, op: PerturbationOp) -> Sentence:
    """Apply one op, resolving the original position through origin_map.

    Replace swaps in place (the slot keeps its origin index); inserts add
    the new token immediately adjacent, marked as inserted. The input
    sentence is never mutated.
    """
    i = s.resolve(op.position)
    tokens = list(s.tokens)
    origins = list(s.origin_map)
    if op.kind is PerturbationKind.REPLACE:
        if tokens[i] != op.original_token:
            raise ValueError(
                f"op expects {op.original_token!r} at position {op.position}, "
                f"found {tokens[i]!r}"
            )
        tokens[i] = op.new_token
    elif op.kind is PerturbationKind.INSERT_LEFT:
        tokens.insert(i, op.new_token)
        origins.insert(i, None)
    else:
        tokens.insert(i + 1, op.new_token)
        origins.insert(i + 1, None)
    return Sentence(
        tokens=tuple(tokens),
        raw_text=detokenize(tokens),
        origin_map=tuple(origins),
    )


@dataclass(frozen=True)
class AttackResult:
    """Outcome of one attack on a single example."""

    status: AttackStatus
    original: Sentence
    adversarial: Sentence
    label: Label
    predicted: Label
    ops_applied: tuple[PerturbationOp, ...]
    similarity: float
    queries: int
    final_probs: ProbDist
    stop_reason: StopReason | None = None
    example_id: str | None = None
    error: str | None = None


def replay_ops(original: Sentence, ops: tuple[PerturbationOp, ...] | list[PerturbationOp]) -> Sentence:
    """Re-apply a recorded op sequence to its original sentence."""
    current = original
    for op in ops:
        current = apply_perturbation(current, op)
    return current


def perturbation_ratio(result: AttackResult) -> float:
    """Applied ops over original token count; can exceed 1 for R+I runs."""
    return len(result.ops_applied) / len(result.original.tokens)
