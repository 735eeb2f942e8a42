"""Dataset loading/validation and canonical result persistence.

Dataset files are UTF-8 with one example per line, either "label<TAB>text"
or two-column CSV (label, text). Example ids are line numbers, so they are
stable across loads. Result files are versioned JSON and round-trip
byte-identically.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass
from pathlib import Path

from .core import (
    AttackResult,
    AttackStatus,
    Label,
    PerturbationKind,
    PerturbationOp,
    ProbDist,
    Sentence,
    StopReason,
    tokenize,
)

logger = logging.getLogger(__name__)

RESULTS_SCHEMA = "maskattack.results/1"


class ParseError(ValueError):
    def __init__(self, line: int, detail: str) -> None:
        self.line = line
        super().__init__(f"line {line}: {detail}")


class LabelRangeError(ValueError):
    pass


class SchemaVersionError(ValueError):
    pass


#: name -> (num_classes, train size, test size, average token length)
DATASET_EXPECTATIONS: dict[str, tuple[int, int, int, float]] = {
    "amazon": (2, 900, 100, 10.29),
    "yelp": (2, 900, 100, 11.66),
    "imdb": (2, 900, 100, 17.56),
    "mr": (2, 9595, 1067, 20.04),
    "mpqa": (2, 9543, 1060, 3.24),
    "subj": (2, 9000, 1000, 23.46),
    "trec": (6, 5951, 500, 7.57),
}

#: datasets where the antonym filter applies
SENTIMENT_DATASETS = frozenset({"amazon", "yelp", "imdb", "mr", "mpqa"})


@dataclass(frozen=True)
class Example:
    id: str
    text: str
    label: Label


@dataclass(frozen=True)
class Dataset:
    name: str
    examples: tuple[Example, ...]
    num_classes: int
    sentiment_task: bool
    split: str  # train | test

    def __len__(self) -> int:
        return len(self.examples)

    def ids(self) -> tuple[str, ...]:
        return tuple(e.id for e in self.examples)

    def average_length(self) -> float:
        total = sum(len(tokenize(e.text).tokens) for e in self.examples)
        return total / len(self.examples)


def _iter_rows(path: Path, format: str):
    if format == "tsv":
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line:
                    continue
                label, sep, text = line.partition("\t")
                if not sep:
                    raise ParseError(lineno, "expected label<TAB>text")
                yield lineno, label, text
    elif format == "csv":
        with open(path, encoding="utf-8", newline="") as fh:
            for lineno, row in enumerate(csv.reader(fh), start=1):
                if not row:
                    continue
                if len(row) != 2:
                    raise ParseError(lineno, f"expected 2 columns, found {len(row)}")
                yield lineno, row[0], row[1]
    else:
        raise ValueError(f"unknown dataset format {format!r} (tsv or csv)")


def load_dataset(
    path: str | Path,
    format: str = "tsv",
    *,
    name: str | None = None,
    split: str = "test",
    num_classes: int | None = None,
    sentiment_task: bool | None = None,
) -> Dataset:
    """Parse and fully validate a dataset before any attack runs.

    num_classes defaults to max(label)+1; sentiment_task defaults by
    dataset name and to False for unknown names. For known names the
    recomputed average token length is compared against the declared
    statistic and a >10% drift logs a warning.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    key = (name or path.stem).lower()

    examples = []
    for lineno, raw_label, text in _iter_rows(path, format):
        try:
            label_index = int(raw_label)
        except ValueError:
            raise ParseError(lineno, f"label {raw_label!r} is not an integer") from None
        if label_index < 0:
            raise LabelRangeError(f"line {lineno}: negative label {label_index}")
        if not text.strip():
            raise ParseError(lineno, "empty text")
        examples.append(Example(id=str(lineno), text=text, label=Label(label_index)))
    if not examples:
        raise ParseError(0, "dataset contains no examples")

    max_label = max(e.label.class_index for e in examples)
    if num_classes is None:
        num_classes = max(max_label + 1, 2)
    elif max_label >= num_classes:
        raise LabelRangeError(
            f"label {max_label} out of range for declared {num_classes} classes"
        )
    if sentiment_task is None:
        sentiment_task = key in SENTIMENT_DATASETS

    dataset = Dataset(
        name=key,
        examples=tuple(examples),
        num_classes=num_classes,
        sentiment_task=sentiment_task,
        split=split,
    )

    expected = DATASET_EXPECTATIONS.get(key)
    if expected is not None:
        _, _, _, declared_length = expected
        actual = dataset.average_length()
        if abs(actual - declared_length) > 0.10 * declared_length:
            logger.warning(
                "%s: average token length %.2f deviates >10%% from declared %.2f",
                key, actual, declared_length,
            )
    return dataset


def validate_declared_stats(dataset: Dataset) -> list[str]:
    """Hard mismatches against the declared per-dataset statistics."""
    expected = DATASET_EXPECTATIONS.get(dataset.name)
    if expected is None:
        return []
    classes, train_size, test_size, _ = expected
    problems = []
    if dataset.num_classes != classes:
        problems.append(
            f"expected {classes} classes, found {dataset.num_classes}"
        )
    declared_size = train_size if dataset.split == "train" else test_size
    if len(dataset) != declared_size:
        problems.append(
            f"expected {declared_size} {dataset.split} examples, found {len(dataset)}"
        )
    return problems


# ---------------------------------------------------------------------------
# Result persistence
# ---------------------------------------------------------------------------

def _sentence_to_doc(s: Sentence) -> dict:
    return {
        "tokens": list(s.tokens),
        "raw_text": s.raw_text,
        "origin_map": list(s.origin_map),
    }


def _sentence_from_doc(doc: dict) -> Sentence:
    return Sentence(
        tokens=tuple(doc["tokens"]),
        raw_text=doc["raw_text"],
        origin_map=tuple(doc["origin_map"]),
    )


def _result_to_doc(r: AttackResult) -> dict:
    return {
        "example_id": r.example_id,
        "status": r.status.value,
        "label": r.label.class_index,
        "predicted": r.predicted.class_index,
        "original": _sentence_to_doc(r.original),
        "adversarial": _sentence_to_doc(r.adversarial),
        "ops": [
            {
                "kind": op.kind.value,
                "position": op.position,
                "original_token": op.original_token,
                "new_token": op.new_token,
            }
            for op in r.ops_applied
        ],
        "similarity": r.similarity,
        "queries": r.queries,
        "final_probs": list(r.final_probs.probs),
        "stop_reason": r.stop_reason.value if r.stop_reason else None,
        "error": r.error,
    }


def _result_from_doc(doc: dict) -> AttackResult:
    return AttackResult(
        status=AttackStatus(doc["status"]),
        original=_sentence_from_doc(doc["original"]),
        adversarial=_sentence_from_doc(doc["adversarial"]),
        label=Label(doc["label"]),
        predicted=Label(doc["predicted"]),
        ops_applied=tuple(
            PerturbationOp(
                kind=PerturbationKind(op["kind"]),
                position=op["position"],
                new_token=op["new_token"],
                original_token=op["original_token"],
            )
            for op in doc["ops"]
        ),
        similarity=doc["similarity"],
        queries=doc["queries"],
        final_probs=ProbDist(tuple(doc["final_probs"])),
        stop_reason=StopReason(doc["stop_reason"]) if doc["stop_reason"] else None,
        example_id=doc["example_id"],
        error=doc["error"],
    )


@dataclass(frozen=True)
class ResultsFile:
    results: tuple[AttackResult, ...]
    fingerprint: dict


def persist_results(
    results: list[AttackResult] | tuple[AttackResult, ...],
    path: str | Path,
    fingerprint: dict | None = None,
) -> None:
    """Canonical JSON dump: saving the same results twice is byte-identical."""
    doc = {
        "schema": RESULTS_SCHEMA,
        "fingerprint": fingerprint or {},
        "results": [_result_to_doc(r) for r in results],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_results(path: str | Path) -> ResultsFile:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    schema = doc.get("schema")
    if schema != RESULTS_SCHEMA:
        raise SchemaVersionError(
            f"result file schema {schema!r} incompatible with {RESULTS_SCHEMA!r}"
        )
    return ResultsFile(
        results=tuple(_result_from_doc(d) for d in doc["results"]),
        fingerprint=doc.get("fingerprint", {}),
    )
