"""Corpus-level evaluation: accuracy drop, similarity, budget curves,
replace-vs-insert ablation splits, and human-evaluation packaging.

Accuracy conventions: an example counts toward original accuracy when the
classifier got it right before the attack, and toward after-attack accuracy
when it was right before and the attack failed. Originally misclassified
examples are skipped, counting against both columns, so summary rows stay
directly comparable across attack modes.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path
from statistics import fmean
from typing import TYPE_CHECKING, Sequence

from .core import AttackResult, AttackStatus, perturbation_ratio

if TYPE_CHECKING:
    from .attack import SweepResult
    from .ingestion import Dataset


class MismatchedCorpora(ValueError):
    """Raised when result sets being compared cover different examples."""


class IncompleteAnnotations(ValueError):
    def __init__(self, missing: list[str]) -> None:
        self.missing = missing
        super().__init__(f"annotations missing for items: {', '.join(missing)}")


LIKERT_SCALE = (
    (1, "Sure adversarial sample"),
    (2, "Likely an adversarial example"),
    (3, "Neutral"),
    (4, "Likely an original sample"),
    (5, "Sure original sample"),
)


@dataclass(frozen=True)
class EvaluationReport:
    n: int
    original_accuracy: float       # percent
    after_attack_accuracy: float   # percent
    success_count: int
    avg_similarity: float | None   # over successful attacks; None when no successes
    mean_perturb_ratio: float | None  # percent, over successful attacks
    total_queries: int
    per_example: tuple[dict, ...]


def summarize(results: Sequence[AttackResult], dataset: "Dataset") -> EvaluationReport:
    """Corpus metrics over one attack run."""
    ids = [r.example_id for r in results]
    if ids != list(dataset.ids()):
        raise MismatchedCorpora("results do not cover the dataset in order")
    n = len(results)
    correct_before = sum(
        1 for r in results if r.status is not AttackStatus.SKIPPED_ALREADY_MISCLASSIFIED
    )
    successes = [r for r in results if r.status is AttackStatus.SUCCESS]
    correct_after = correct_before - len(successes)
    per_example = tuple(
        {
            "id": r.example_id,
            "status": r.status.value,
            "queries": r.queries,
            "ops": len(r.ops_applied),
            "perturb_ratio": perturbation_ratio(r),
            "similarity": r.similarity,
        }
        for r in results
    )
    return EvaluationReport(
        n=n,
        original_accuracy=100.0 * correct_before / n,
        after_attack_accuracy=100.0 * correct_after / n,
        success_count=len(successes),
        avg_similarity=fmean(r.similarity for r in successes) if successes else None,
        mean_perturb_ratio=(
            100.0 * fmean(perturbation_ratio(r) for r in successes) if successes else None
        ),
        total_queries=sum(r.queries for r in results),
        per_example=per_example,
    )


def summary_row(attack_label: str, report: EvaluationReport) -> str:
    """One table row: attack name, after-attack accuracy, similarity in parens."""
    sim = f"{report.avg_similarity:.3f}" if report.avg_similarity is not None else "--"
    return f"{attack_label:<10} {report.after_attack_accuracy:.1f} ({sim})"


def original_row(report: EvaluationReport) -> str:
    return f"{'Original':<10} {report.original_accuracy:.1f}"


def write_report_csv(report: EvaluationReport, path: str | Path) -> None:
    lines = ["id,status,queries,ops,perturb_ratio,similarity"]
    for row in report.per_example:
        lines.append(
            f"{row['id']},{row['status']},{row['queries']},{row['ops']},"
            f"{row['perturb_ratio']:.6f},{row['similarity']:.6f}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# Replace-vs-insert ablation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AblationSplits:
    """Percentages of the test set needing insert (A), replace (B), or both (C).

    A: attacked by the choice mode but not replace-only; B: by choice but
    not insert-only; C: by choice but by neither single-op mode. As sets,
    C is exactly the intersection of A and B.
    """

    a: float
    b: float
    c: float
    set_a: frozenset[str]
    set_b: frozenset[str]
    set_c: frozenset[str]
    n: int


def _success_ids(results: Sequence[AttackResult]) -> frozenset[str]:
    return frozenset(
        r.example_id for r in results if r.status is AttackStatus.SUCCESS
    )


def ablation_splits(
    results_r: Sequence[AttackResult],
    results_i: Sequence[AttackResult],
    results_ri: Sequence[AttackResult],
) -> AblationSplits:
    ids = [r.example_id for r in results_r]
    if [r.example_id for r in results_i] != ids or [r.example_id for r in results_ri] != ids:
        raise MismatchedCorpora("ablation runs cover different example ids")
    n = len(ids)
    succ_r = _success_ids(results_r)
    succ_i = _success_ids(results_i)
    succ_ri = _success_ids(results_ri)
    set_a = succ_ri - succ_r
    set_b = succ_ri - succ_i
    set_c = succ_ri - (succ_r | succ_i)
    return AblationSplits(
        a=100.0 * len(set_a) / n,
        b=100.0 * len(set_b) / n,
        c=100.0 * len(set_c) / n,
        set_a=set_a,
        set_b=set_b,
        set_c=set_c,
        n=n,
    )


def ablation_table(splits: AblationSplits, corpus_label: str = "corpus") -> str:
    header = f"{'Dataset':<12} {'A':>6} {'B':>6} {'C':>6}"
    row = f"{corpus_label:<12} {splits.a:>6.1f} {splits.b:>6.1f} {splits.c:>6.1f}"
    return header + "\n" + row


# ---------------------------------------------------------------------------
# Effectiveness curves
# ---------------------------------------------------------------------------

def effectiveness_curve(sweep: "SweepResult") -> list[tuple[float, float]]:
    """(cap, after-attack accuracy %) series; non-increasing in the cap."""
    series = []
    for cap, results in zip(sweep.caps, sweep.per_cap):
        n = len(results)
        correct_after = sum(
            1 for r in results if r.status is AttackStatus.FAILURE
        )
        series.append((cap, 100.0 * correct_after / n))
    return series


def write_curve_csv(curve: list[tuple[float, float]], path: str | Path) -> None:
    lines = ["cap,after_attack_accuracy"]
    for cap, accuracy in curve:
        lines.append(f"{cap:.2f},{accuracy:.2f}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def render_curve_ascii(curve: list[tuple[float, float]], width: int = 50) -> str:
    """Data-first plotting: a terminal bar chart of the curve CSV contents."""
    out = []
    for cap, accuracy in curve:
        bar = "#" * round(accuracy / 100.0 * width)
        out.append(f"{cap:>5.2f} | {bar:<{width}} {accuracy:6.2f}")
    return "\n".join(out)


# ---------------------------------------------------------------------------
# Human evaluation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HumanEvalItem:
    item_id: str
    text: str


@dataclass(frozen=True)
class HumanEvalPacket:
    """Shuffled originals + adversarials for annotators, with a hidden key.

    The key maps item ids to their source and true label and must never be
    written into the annotator-facing sheet.
    """

    items: tuple[HumanEvalItem, ...]
    key: dict[str, dict]
    seed: int
    annotators: int = 3


def export_human_eval(
    dataset: "Dataset",
    results: Sequence[AttackResult],
    n: int,
    seed: int,
) -> HumanEvalPacket:
    """Sample n successful attacks; pack originals and adversarials shuffled."""
    successes = [r for r in results if r.status is AttackStatus.SUCCESS]
    if len(successes) < n:
        raise ValueError(
            f"need at least {n} successful attacks, have {len(successes)}"
        )
    rng = random.Random(seed)
    chosen = rng.sample(successes, n)
    entries = []
    for r in chosen:
        entries.append(("original", r.example_id, r.original.text(), r.label.class_index))
        entries.append(("adversarial", r.example_id, r.adversarial.text(), r.label.class_index))
    rng.shuffle(entries)
    items = []
    key = {}
    for i, (source, example_id, text, label) in enumerate(entries, start=1):
        item_id = f"item-{i:04d}"
        items.append(HumanEvalItem(item_id=item_id, text=text))
        key[item_id] = {"source": source, "example_id": example_id, "label": label}
    return HumanEvalPacket(items=tuple(items), key=key, seed=seed)


def write_annotation_sheet(packet: HumanEvalPacket, path: str | Path) -> None:
    lines = [
        "Rate each sentence on the scale below and give the class label you",
        "would assign. Judge grammar and how likely the sentence is to come",
        "from the original dataset.",
        "",
    ]
    lines += [f"  {score}) {meaning}" for score, meaning in LIKERT_SCALE]
    lines.append("")
    for item in packet.items:
        lines.append(f"{item.item_id}\t{item.text}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_key_file(packet: HumanEvalPacket, path: str | Path) -> None:
    doc = {"seed": packet.seed, "annotators": packet.annotators, "key": packet.key}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_key_file(path: str | Path) -> HumanEvalPacket:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    # items are reconstructed id-only: aggregation needs the key, not the texts
    items = tuple(HumanEvalItem(item_id=i, text="") for i in sorted(doc["key"]))
    return HumanEvalPacket(
        items=items, key=doc["key"], seed=doc["seed"], annotators=doc["annotators"]
    )


@dataclass(frozen=True)
class HumanEvalSummary:
    sentiment_accuracy: float  # percent over all items
    mean_naturalness: float    # 1-5 over all items
    by_source: dict[str, tuple[float, float]]  # source -> (accuracy %, naturalness)


def aggregate_human_scores(
    packet: HumanEvalPacket,
    annotations: dict[str, dict],
) -> HumanEvalSummary:
    """Average the per-item annotator scores and score label agreement.

    `annotations` maps item id to {"label": int, "scores": [s1, s2, s3]}.
    Every packet item needs a label and exactly `packet.annotators` scores
    in 1..5; offenders are reported via IncompleteAnnotations.
    """
    missing = []
    for item in packet.items:
        ann = annotations.get(item.item_id)
        if (
            ann is None
            or "label" not in ann
            or len(ann.get("scores", ())) != packet.annotators
            or any(not 1 <= s <= 5 for s in ann["scores"])
        ):
            missing.append(item.item_id)
    if missing:
        raise IncompleteAnnotations(missing)

    overall_hits = []
    overall_scores = []
    per_source: dict[str, list[tuple[bool, float]]] = {}
    for item in packet.items:
        ann = annotations[item.item_id]
        meta = packet.key[item.item_id]
        hit = ann["label"] == meta["label"]
        score = fmean(ann["scores"])
        overall_hits.append(hit)
        overall_scores.append(score)
        per_source.setdefault(meta["source"], []).append((hit, score))

    by_source = {
        source: (
            100.0 * sum(h for h, _ in rows) / len(rows),
            fmean(s for _, s in rows),
        )
        for source, rows in per_source.items()
    }
    return HumanEvalSummary(
        sentiment_accuracy=100.0 * sum(overall_hits) / len(overall_hits),
        mean_naturalness=fmean(overall_scores),
        by_source=by_source,
    )
