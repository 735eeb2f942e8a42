"""The greedy attack engine and its four replace/insert modes.

Positions are visited once each, in descending deletion-importance order.
At every position the mode's candidate sets are built, filtered, and all
survivors are scored against the classifier. A label flip ends the attack
immediately with the flipping candidate most similar to the original;
otherwise the candidate with the largest drop in P(y) is applied
unconditionally (even when the best available drop is negative) and the
search moves on.
"""

from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable, Sequence

from .backends import BackendError, Backends, CountingClassifier
from .core import (
    AttackMode,
    AttackResult,
    AttackStatus,
    Label,
    PerturbationKind,
    PerturbationOp,
    ProbDist,
    Sentence,
    StopReason,
    misclassifies,
    predicted_label,
    tokenize,
)
from .importance import ImportanceScores, token_importance
from .perturb import Candidate, filter_candidates, generate_candidates

if TYPE_CHECKING:
    from .ingestion import Dataset

_KIND_RANK = {
    PerturbationKind.REPLACE: 0,
    PerturbationKind.INSERT_LEFT: 1,
    PerturbationKind.INSERT_RIGHT: 2,
}


@dataclass(frozen=True)
class AttackConfig:
    mode: AttackMode = AttackMode.R
    k: int = 50
    sim_threshold: float = 0.8
    max_perturb_ratio: float | None = None
    query_budget: int | None = None
    sentiment_task: bool = False

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if not -1.0 <= self.sim_threshold <= 1.0:
            raise ValueError("sim_threshold must lie in [-1, 1]")
        if self.max_perturb_ratio is not None and not 0.0 <= self.max_perturb_ratio <= 1.0:
            raise ValueError("max_perturb_ratio must lie in [0, 1] or be None")
        if self.query_budget is not None and self.query_budget < 1:
            raise ValueError("query_budget must be >= 1 or None")

    def fingerprint(self) -> dict:
        return {
            "mode": self.mode.value,
            "k": self.k,
            "sim_threshold": self.sim_threshold,
            "max_perturb_ratio": self.max_perturb_ratio,
            "query_budget": self.query_budget,
            "sentiment_task": self.sentiment_task,
        }


@dataclass(frozen=True)
class CandidateEval:
    """One candidate scored against the classifier."""

    candidate: Candidate
    probs: ProbDist
    reduction: float  # P(y | current) - P(y | candidate); may be negative
    flips: bool


@dataclass(frozen=True)
class StepOutcome:
    """What happened at one position (or one R+I sub-step)."""

    position: int
    kinds: tuple[PerturbationKind, ...]
    evaluated: tuple[CandidateEval, ...]
    chosen: PerturbationOp | None
    flipped: bool
    stop_reason: StopReason | None


def _flip_key(e: CandidateEval):
    # among flipping candidates: max similarity, then MLM score, then word
    return (
        -e.candidate.similarity,
        -e.candidate.mlm_score,
        e.candidate.word,
        _KIND_RANK[e.candidate.op.kind],
    )


def _reduction_key(e: CandidateEval):
    # among non-flipping candidates: max P(y) reduction, same tie chain
    return (
        -e.reduction,
        -e.candidate.similarity,
        -e.candidate.mlm_score,
        e.candidate.word,
        _KIND_RANK[e.candidate.op.kind],
    )


_MODE_KINDS: dict[AttackMode, tuple[tuple[PerturbationKind, ...], ...]] = {
    AttackMode.R: ((PerturbationKind.REPLACE,),),
    AttackMode.I: ((PerturbationKind.INSERT_LEFT, PerturbationKind.INSERT_RIGHT),),
    AttackMode.RI_CHOICE: (
        (PerturbationKind.REPLACE, PerturbationKind.INSERT_LEFT, PerturbationKind.INSERT_RIGHT),
    ),
    AttackMode.R_PLUS_I: (
        (PerturbationKind.REPLACE,),
        (PerturbationKind.INSERT_LEFT, PerturbationKind.INSERT_RIGHT),
    ),
}


def attack(
    backends: Backends,
    s: Sentence,
    y: Label,
    config: AttackConfig,
    *,
    precomputed: tuple[ProbDist, ImportanceScores] | None = None,
    trace: list[StepOutcome] | None = None,
) -> AttackResult:
    """Attack one sentence; see the module docstring for the search rules.

    `precomputed` supplies the base distribution and importance scores when
    a sweep shares them across runs; the n+1 probe queries are still billed
    to this result so query accounting matches a standalone run.
    """
    if y.class_index >= backends.classifier.num_classes:
        raise ValueError(
            f"label {y.class_index} out of range for "
            f"{backends.classifier.num_classes}-class classifier"
        )
    n = len(s.tokens)

    if precomputed is None:
        counting = CountingClassifier(backends.classifier)
        base = counting.predict(s.text())
        if misclassifies(base, y):
            return _skipped(s, y, base, queries=counting.queries)
        if config.query_budget is not None and counting.queries + n > config.query_budget:
            return _failure(s, s, y, base, (), 1.0, counting.queries, StopReason.QUERY_BUDGET)
        imp = token_importance(counting, s, y, base_probs=base)
    else:
        base, imp = precomputed
        if misclassifies(base, y):
            return _skipped(s, y, base, queries=1)
        counting = CountingClassifier(backends.classifier, precharged=n + 1)

    cur = s
    ops: list[PerturbationOp] = []
    p_cur = base.p(y)
    last_probs = base
    last_similarity = 1.0
    max_ops = (
        None
        if config.max_perturb_ratio is None
        else math.floor(config.max_perturb_ratio * n + 1e-9)
    )
    stop: StopReason | None = None

    def cap_reached() -> bool:
        return max_ops is not None and len(ops) >= max_ops

    def evaluate(position: int, kinds: tuple[PerturbationKind, ...]):
        survivors: list[Candidate] = []
        for kind in kinds:
            raw = generate_candidates(backends.mlm, cur, position, kind, config.k)
            cset = filter_candidates(
                raw, s, cur, position, kind, config,
                backends.pos_tagger, backends.antonyms, backends.encoder,
            )
            survivors.extend(cset.candidates)
        if not survivors:
            return StepOutcome(position, kinds, (), None, False, None), None
        if (
            config.query_budget is not None
            and counting.queries + len(survivors) > config.query_budget
        ):
            return StepOutcome(position, kinds, (), None, False, StopReason.QUERY_BUDGET), None
        evals = []
        for cand in survivors:
            probs = counting.predict(cand.sentence.text())
            evals.append(
                CandidateEval(
                    candidate=cand,
                    probs=probs,
                    reduction=p_cur - probs.p(y),
                    flips=misclassifies(probs, y),
                )
            )
        flipping = [e for e in evals if e.flips]
        chosen = min(flipping, key=_flip_key) if flipping else min(evals, key=_reduction_key)
        outcome = StepOutcome(
            position, kinds, tuple(evals), chosen.candidate.op, bool(flipping), None
        )
        return outcome, chosen

    for position in imp.order:
        if cap_reached():
            stop = StopReason.PERTURB_CAP
            break
        stopped = False
        for sub_index, kinds in enumerate(_MODE_KINDS[config.mode]):
            if sub_index > 0 and cap_reached():
                stop = StopReason.PERTURB_CAP
                stopped = True
                break
            outcome, chosen = evaluate(position, kinds)
            if trace is not None:
                trace.append(outcome)
            if outcome.stop_reason is not None:
                stop = outcome.stop_reason
                stopped = True
                break
            if chosen is None:
                continue  # nothing survived the filters at this sub-step
            cand = chosen.candidate
            cur = cand.sentence
            ops.append(cand.op)
            p_cur = chosen.probs.p(y)
            last_probs = chosen.probs
            last_similarity = cand.similarity
            if outcome.flipped:
                return AttackResult(
                    status=AttackStatus.SUCCESS,
                    original=s,
                    adversarial=cur,
                    label=y,
                    predicted=predicted_label(chosen.probs, y),
                    ops_applied=tuple(ops),
                    similarity=cand.similarity,
                    queries=counting.queries,
                    final_probs=chosen.probs,
                )
        if stopped:
            break

    return _failure(
        s, cur, y, last_probs, tuple(ops), last_similarity, counting.queries,
        stop if stop is not None else StopReason.EXHAUSTED,
    )


def attack_with_trace(
    backends: Backends, s: Sentence, y: Label, config: AttackConfig
) -> tuple[AttackResult, list[StepOutcome]]:
    steps: list[StepOutcome] = []
    result = attack(backends, s, y, config, trace=steps)
    return result, steps


def _skipped(s: Sentence, y: Label, base: ProbDist, queries: int) -> AttackResult:
    return AttackResult(
        status=AttackStatus.SKIPPED_ALREADY_MISCLASSIFIED,
        original=s,
        adversarial=s,
        label=y,
        predicted=predicted_label(base, y),
        ops_applied=(),
        similarity=1.0,
        queries=queries,
        final_probs=base,
    )


def _failure(
    original: Sentence,
    adversarial: Sentence,
    y: Label,
    probs: ProbDist,
    ops: tuple[PerturbationOp, ...],
    similarity: float,
    queries: int,
    stop: StopReason,
) -> AttackResult:
    return AttackResult(
        status=AttackStatus.FAILURE,
        original=original,
        adversarial=adversarial,
        label=y,
        predicted=predicted_label(probs, y),
        ops_applied=ops,
        similarity=similarity,
        queries=queries,
        final_probs=probs,
        stop_reason=stop,
    )


def _map_examples(examples: Sequence, fn: Callable, jobs: int) -> list:
    if jobs <= 1 or len(examples) <= 1:
        return [fn(example) for example in examples]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, examples))


def attack_corpus(
    backends: Backends,
    dataset: "Dataset",
    config: AttackConfig,
    jobs: int = 1,
) -> list[AttackResult]:
    """One AttackResult per example, order preserved.

    Backend errors are recorded on the affected result (status Failure,
    stop_reason error) and never abort the corpus. Serial-only backends
    force jobs=1.
    """
    if jobs > 1 and not backends.concurrency_safe:
        jobs = 1

    def run_one(example) -> AttackResult:
        s = tokenize(example.text)
        try:
            result = attack(backends, s, example.label, config)
        except BackendError as exc:
            k = backends.classifier.num_classes
            uniform = ProbDist(tuple([1.0 / k] * k))
            result = AttackResult(
                status=AttackStatus.FAILURE,
                original=s,
                adversarial=s,
                label=example.label,
                predicted=example.label,
                ops_applied=(),
                similarity=1.0,
                queries=0,
                final_probs=uniform,
                stop_reason=StopReason.ERROR,
                error=str(exc),
            )
        return dataclasses.replace(result, example_id=example.id)

    return _map_examples(dataset.examples, run_one, jobs)


@dataclass(frozen=True)
class SweepResult:
    """Per-cap corpus runs from one shared importance computation."""

    caps: tuple[float, ...]
    per_cap: tuple[tuple[AttackResult, ...], ...]

    def results_at(self, cap: float) -> tuple[AttackResult, ...]:
        return self.per_cap[self.caps.index(cap)]


def capped_sweep(
    backends: Backends,
    dataset: "Dataset",
    config: AttackConfig,
    caps: Sequence[float],
    jobs: int = 1,
) -> SweepResult:
    """Run attack_corpus once per perturbation cap, ascending.

    Importance probes are computed once per example and billed to every
    cap's result, so each per-cap list is byte-identical to a standalone
    run at that cap.
    """
    caps = list(caps)
    if not caps:
        raise ValueError("caps must be non-empty")
    if caps != sorted(caps):
        raise ValueError("caps must be sorted ascending")
    for cap in caps:
        if not 0.0 <= cap <= 1.0:
            raise ValueError(f"cap {cap} outside [0, 1]")
    if jobs > 1 and not backends.concurrency_safe:
        jobs = 1

    def run_one(example) -> list[AttackResult]:
        s = tokenize(example.text)
        base = backends.classifier.predict(s.text())
        if misclassifies(base, example.label):
            skipped = dataclasses.replace(
                _skipped(s, example.label, base, queries=1), example_id=example.id
            )
            return [skipped] * len(caps)
        imp = token_importance(backends.classifier, s, example.label, base_probs=base)
        row = []
        for cap in caps:
            capped = dataclasses.replace(config, max_perturb_ratio=cap)
            result = attack(backends, s, example.label, capped, precomputed=(base, imp))
            row.append(dataclasses.replace(result, example_id=example.id))
        return row

    rows = _map_examples(dataset.examples, run_one, jobs)
    per_cap = tuple(
        tuple(row[c] for row in rows) for c in range(len(caps))
    )
    return SweepResult(caps=tuple(caps), per_cap=per_cap)
