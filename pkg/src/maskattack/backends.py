"""Model backends: abstract interfaces, deterministic in-repo doubles, and
adapters for real pretrained models.

The attack engine only ever sees the five interfaces defined here, so a toy
fixture, a corpus-trained lightweight model, and a pretrained transformer
are interchangeable. Toy backends are pure functions of their inputs:
identical calls yield identical outputs across runs and platforms.
"""

from __future__ import annotations

import configparser
import json
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from .core import MASK_TOKEN, ProbDist, Sentence, tokenize

BOUNDARY_LEFT = "<start>"
BOUNDARY_RIGHT = "<end>"

COARSE_TAGS = ("NOUN", "VERB", "ADJ", "ADV", "OTHER")


class BackendError(RuntimeError):
    """Wraps failures raised by a model backend."""


class ConfigError(ValueError):
    """Adapter config rejected; the message starts with the offending field path."""

    def __init__(self, path: str, detail: str = "") -> None:
        self.path = path
        super().__init__(f"{path}: {detail}" if detail else path)


# ---------------------------------------------------------------------------
# Interfaces
# ---------------------------------------------------------------------------

class ClassifierBackend(ABC):
    """Soft-label black-box victim: text in, class distribution out."""

    #: set True on adapters that must not receive concurrent calls
    serial_only = False

    @property
    @abstractmethod
    def num_classes(self) -> int: ...

    @abstractmethod
    def predict(self, text: str) -> ProbDist: ...


class MaskedLMBackend(ABC):
    """Fills a single mask slot with ranked one-word candidates."""

    serial_only = False

    @abstractmethod
    def predict_mask(self, tokens: Sequence[str], k: int) -> list[tuple[str, float]]:
        """Top candidates for the one MASK_TOKEN in `tokens`.

        Returns at most k (word, score) pairs with non-increasing scores.
        The mask symbol itself is never a candidate.
        """


class SentenceEncoderBackend(ABC):
    serial_only = False

    @abstractmethod
    def similarity(self, text_a: str, text_b: str) -> float:
        """Cosine-style similarity in [-1, 1]; symmetric; sim(x, x) == 1."""


class PosTaggerBackend(ABC):
    serial_only = False

    @abstractmethod
    def tag(self, sentence: Sentence) -> tuple[str, ...]:
        """One coarse tag (NOUN/VERB/ADJ/ADV/OTHER) per token."""


class AntonymLexicon(ABC):
    serial_only = False

    @abstractmethod
    def are_antonyms(self, a: str, b: str) -> bool: ...


@dataclass
class Backends:
    """The full backend bundle an attack runs against."""

    classifier: ClassifierBackend
    mlm: MaskedLMBackend
    encoder: SentenceEncoderBackend
    pos_tagger: PosTaggerBackend
    antonyms: AntonymLexicon

    @property
    def concurrency_safe(self) -> bool:
        parts = (self.classifier, self.mlm, self.encoder, self.pos_tagger, self.antonyms)
        return not any(p.serial_only for p in parts)


class CountingClassifier(ClassifierBackend):
    """Decorator that counts predict() calls for query-budget accounting.

    `charge()` adds virtual queries, used when importance probes were
    precomputed and shared (capped sweeps) but must still be billed to the
    per-result query count.
    """

    def __init__(self, inner: ClassifierBackend, precharged: int = 0) -> None:
        self._inner = inner
        self.queries = precharged
        self.serial_only = inner.serial_only

    @property
    def num_classes(self) -> int:
        return self._inner.num_classes

    def predict(self, text: str) -> ProbDist:
        self.queries += 1
        try:
            return self._inner.predict(text)
        except BackendError:
            raise
        except Exception as exc:  # adapter bugs surface as BackendError
            raise BackendError(f"classifier failed on {text!r}: {exc}") from exc

    def charge(self, n: int) -> None:
        self.queries += n


# ---------------------------------------------------------------------------
# Toy fixture and its backends
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ToyFixture:
    """A complete deterministic model suite small enough to enumerate.

    classifier_weights/bias define a 2-class bag-of-words logistic model;
    mlm_table maps the (left, right) word context of a mask to a ranked
    candidate list; pos_table assigns coarse tags; antonym_pairs is an
    unordered pair set. Sentence boundaries use <start>/<end> sentinels.
    """

    classifier_weights: dict[str, float]
    bias: float
    mlm_table: dict[tuple[str, str], tuple[str, ...]]
    pos_table: dict[str, str]
    antonym_pairs: frozenset[frozenset[str]] = frozenset()

    def __post_init__(self) -> None:
        for context, words in self.mlm_table.items():
            for word in words:
                if word not in self.pos_table:
                    raise ValueError(
                        f"mlm candidate {word!r} (context {context}) missing from pos_table"
                    )
        for tag in self.pos_table.values():
            if tag not in COARSE_TAGS:
                raise ValueError(f"unknown POS tag {tag!r}")

    @classmethod
    def from_file(cls, path: str | Path) -> "ToyFixture":
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        table = {}
        for entry in doc.get("mlm", []):
            table[(entry["left"], entry["right"])] = tuple(entry["candidates"])
        return cls(
            classifier_weights=dict(doc["classifier"]["weights"]),
            bias=float(doc["classifier"].get("bias", 0.0)),
            mlm_table=table,
            pos_table=dict(doc["pos"]),
            antonym_pairs=frozenset(frozenset(p) for p in doc.get("antonyms", [])),
        )

    def to_file(self, path: str | Path) -> None:
        doc = {
            "classifier": {"weights": self.classifier_weights, "bias": self.bias},
            "mlm": [
                {"left": left, "right": right, "candidates": list(words)}
                for (left, right), words in sorted(self.mlm_table.items())
            ],
            "pos": self.pos_table,
            "antonyms": sorted(sorted(pair) for pair in self.antonym_pairs),
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _logistic(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


class ToyClassifier(ClassifierBackend):
    """P(class 1) = logistic(bias + sum of weights over token occurrences)."""

    def __init__(self, fixture: ToyFixture) -> None:
        self._weights = fixture.classifier_weights
        self._bias = fixture.bias

    @property
    def num_classes(self) -> int:
        return 2

    def predict(self, text: str) -> ProbDist:
        score = self._bias
        for token in tokenize(text).tokens:
            score += self._weights.get(token, 0.0)
        p1 = _logistic(score)
        return ProbDist((1.0 - p1, p1))


class ToyMaskedLM(MaskedLMBackend):
    """Candidates keyed on the mask's immediate (left, right) word context.

    Unlisted contexts yield an empty list. Scores are 1/rank, strictly
    decreasing, so deterministic tie-breaks downstream stay exercised.
    """

    def __init__(self, fixture: ToyFixture) -> None:
        self._table = fixture.mlm_table

    def predict_mask(self, tokens: Sequence[str], k: int) -> list[tuple[str, float]]:
        slots = [i for i, t in enumerate(tokens) if t == MASK_TOKEN]
        if len(slots) != 1:
            raise BackendError(f"expected exactly one mask slot, found {len(slots)}")
        if k <= 0:
            return []
        i = slots[0]
        left = tokens[i - 1] if i > 0 else BOUNDARY_LEFT
        right = tokens[i + 1] if i + 1 < len(tokens) else BOUNDARY_RIGHT
        words = self._table.get((left, right), ())
        return [(w, 1.0 / (rank + 1)) for rank, w in enumerate(words[:k])]


class BagOfWordsEncoder(SentenceEncoderBackend):
    """Cosine of binary bag-of-words indicator vectors over word tokens."""

    def similarity(self, text_a: str, text_b: str) -> float:
        set_a = set(tokenize(text_a).tokens)
        set_b = set(tokenize(text_b).tokens)
        if not set_a or not set_b:
            return 0.0
        shared = len(set_a & set_b)
        return shared / math.sqrt(len(set_a) * len(set_b))


class TableTagger(PosTaggerBackend):
    """Context-free word -> tag lookup; unknown words tag OTHER."""

    def __init__(self, table: dict[str, str]) -> None:
        self._table = table

    def tag(self, sentence: Sentence) -> tuple[str, ...]:
        return tuple(self._table.get(t, "OTHER") for t in sentence.tokens)


_ADJ_SUFFIXES = ("ous", "ful", "ive", "able", "ible", "less", "ish", "ic", "al")
_CLOSED_CLASS = frozenset(
    "a an the and or but if of at by for with to from in on is are was were "
    "be been am do does did not no this that these those it its he she they "
    "we you i as so than then there here".split()
)


class RuleTagger(PosTaggerBackend):
    """Suffix-heuristic coarse tagger for corpora without a fixture table.

    Deterministic and crude; good enough to enforce like-for-like
    replacements on the lightweight pipelines.
    """

    def tag(self, sentence: Sentence) -> tuple[str, ...]:
        return tuple(self._tag_word(t) for t in sentence.tokens)

    @staticmethod
    def _tag_word(word: str) -> str:
        if word in _CLOSED_CLASS or not any(c.isalpha() for c in word):
            return "OTHER"
        if word.endswith("ly"):
            return "ADV"
        if word.endswith(("ing", "ed")):
            return "VERB"
        if word.endswith(_ADJ_SUFFIXES):
            return "ADJ"
        return "NOUN"


class PairAntonyms(AntonymLexicon):
    def __init__(self, pairs: frozenset[frozenset[str]]) -> None:
        self._pairs = pairs

    @classmethod
    def from_file(cls, path: str | Path) -> "PairAntonyms":
        pairs = set()
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line:
                    continue
                parts = line.split("\t")
                if len(parts) != 2:
                    raise ConfigError("antonyms.path", f"line {lineno} is not word<TAB>word")
                pairs.add(frozenset(parts))
        return cls(frozenset(pairs))

    def are_antonyms(self, a: str, b: str) -> bool:
        return frozenset((a, b)) in self._pairs


class NoAntonyms(AntonymLexicon):
    def are_antonyms(self, a: str, b: str) -> bool:
        return False


def toy_backends(fixture: ToyFixture) -> Backends:
    """Assemble the full deterministic bundle from one fixture."""
    return Backends(
        classifier=ToyClassifier(fixture),
        mlm=ToyMaskedLM(fixture),
        encoder=BagOfWordsEncoder(),
        pos_tagger=TableTagger(fixture.pos_table),
        antonyms=PairAntonyms(fixture.antonym_pairs),
    )


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    """The pinned English stop-word list shipped with the package."""
    if path is not None:
        text = Path(path).read_text(encoding="utf-8")
    else:
        text = resources.files("maskattack.data").joinpath("stopwords.txt").read_text("utf-8")
    return frozenset(w for w in text.split("\n") if w)


def default_antonyms() -> PairAntonyms:
    text = resources.files("maskattack.data").joinpath("antonyms.txt").read_text("utf-8")
    pairs = set()
    for line in text.splitlines():
        if line:
            a, b = line.split("\t")
            pairs.add(frozenset((a, b)))
    return PairAntonyms(frozenset(pairs))


# ---------------------------------------------------------------------------
# Lightweight trainable victim + corpus-trained masked LM
# ---------------------------------------------------------------------------

class BagOfWordsLogisticClassifier(ClassifierBackend):
    """Multinomial logistic regression over token counts, trained in numpy.

    Full-batch gradient descent from zero-initialized weights: fully
    deterministic for a fixed corpus and hyperparameters.
    """

    def __init__(self, vocab: dict[str, int], weights: np.ndarray, bias: np.ndarray) -> None:
        self._vocab = vocab
        self._weights = weights  # (V, C)
        self._bias = bias        # (C,)

    @classmethod
    def train(
        cls,
        texts: Sequence[str],
        labels: Sequence[int],
        *,
        num_classes: int = 2,
        epochs: int = 300,
        lr: float = 0.5,
        l2: float = 1e-4,
    ) -> "BagOfWordsLogisticClassifier":
        vocab: dict[str, int] = {}
        rows, cols, vals = [], [], []
        for r, text in enumerate(texts):
            for token in tokenize(text).tokens:
                idx = vocab.setdefault(token, len(vocab))
                rows.append(r)
                cols.append(idx)
                vals.append(1.0)
        n, v = len(texts), len(vocab)
        x = np.zeros((n, v))
        x[rows, cols] += np.array(vals)
        y = np.zeros((n, num_classes))
        y[np.arange(n), np.asarray(labels)] = 1.0

        w = np.zeros((v, num_classes))
        b = np.zeros(num_classes)
        for _ in range(epochs):
            logits = x @ w + b
            logits -= logits.max(axis=1, keepdims=True)
            exp = np.exp(logits)
            probs = exp / exp.sum(axis=1, keepdims=True)
            grad = (probs - y) / n
            w -= lr * (x.T @ grad + l2 * w)
            b -= lr * grad.sum(axis=0)
        return cls(vocab, w, b)

    @property
    def num_classes(self) -> int:
        return self._bias.shape[0]

    def predict(self, text: str) -> ProbDist:
        scores = self._bias.copy()
        for token in tokenize(text).tokens:
            idx = self._vocab.get(token)
            if idx is not None:
                scores = scores + self._weights[idx]
        scores -= scores.max()
        exp = np.exp(scores)
        probs = exp / exp.sum()
        return ProbDist(tuple(float(p) for p in probs))


class CorpusMaskedLM(MaskedLMBackend):
    """Mask filler learned from a plain text corpus.

    Candidates for a mask are words seen in the same (left, right) trigram
    context, backed off to the union of left- and right-bigram matches.
    Ranking is by descending count then alphabetically; scores are 1/rank.
    """

    def __init__(
        self,
        trigram: dict[tuple[str, str], dict[str, int]],
        after: dict[str, dict[str, int]],
        before: dict[str, dict[str, int]],
    ) -> None:
        self._trigram = trigram
        self._after = after
        self._before = before

    @classmethod
    def train(cls, texts: Sequence[str]) -> "CorpusMaskedLM":
        trigram: dict[tuple[str, str], dict[str, int]] = {}
        after: dict[str, dict[str, int]] = {}
        before: dict[str, dict[str, int]] = {}
        for text in texts:
            tokens = [BOUNDARY_LEFT, *tokenize(text).tokens, BOUNDARY_RIGHT]
            for i in range(1, len(tokens) - 1):
                word, left, right = tokens[i], tokens[i - 1], tokens[i + 1]
                slot = trigram.setdefault((left, right), {})
                slot[word] = slot.get(word, 0) + 1
                slot = after.setdefault(left, {})
                slot[word] = slot.get(word, 0) + 1
                slot = before.setdefault(right, {})
                slot[word] = slot.get(word, 0) + 1
        return cls(trigram, after, before)

    def predict_mask(self, tokens: Sequence[str], k: int) -> list[tuple[str, float]]:
        slots = [i for i, t in enumerate(tokens) if t == MASK_TOKEN]
        if len(slots) != 1:
            raise BackendError(f"expected exactly one mask slot, found {len(slots)}")
        if k <= 0:
            return []
        i = slots[0]
        left = tokens[i - 1] if i > 0 else BOUNDARY_LEFT
        right = tokens[i + 1] if i + 1 < len(tokens) else BOUNDARY_RIGHT

        ranked: list[str] = []
        seen: set[str] = set()
        exact = self._trigram.get((left, right), {})
        for word in sorted(exact, key=lambda w: (-exact[w], w)):
            ranked.append(word)
            seen.add(word)
        backoff: dict[str, int] = {}
        for word, count in self._after.get(left, {}).items():
            backoff[word] = backoff.get(word, 0) + count
        for word, count in self._before.get(right, {}).items():
            backoff[word] = backoff.get(word, 0) + count
        for word in sorted(backoff, key=lambda w: (-backoff[w], w)):
            if word not in seen:
                ranked.append(word)
                seen.add(word)
        return [(w, 1.0 / (rank + 1)) for rank, w in enumerate(ranked[:k])]


# ---------------------------------------------------------------------------
# Pretrained-model adapters (optional; imported lazily)
# ---------------------------------------------------------------------------

class TransformerClassifier(ClassifierBackend):
    """Sequence-classification checkpoint behind the soft-label interface."""

    serial_only = True

    def __init__(self, model_name_or_path: str, device: str = "cpu") -> None:
        try:
            import torch
            from transformers import AutoModelForSequenceClassification, AutoTokenizer
        except ImportError as exc:
            raise BackendError(f"transformers unavailable: {exc}") from exc
        self._torch = torch
        self._tokenizer = AutoTokenizer.from_pretrained(model_name_or_path)
        self._model = AutoModelForSequenceClassification.from_pretrained(model_name_or_path)
        self._model.to(device)
        self._model.eval()
        self._device = device

    @property
    def num_classes(self) -> int:
        return int(self._model.config.num_labels)

    def predict(self, text: str) -> ProbDist:
        torch = self._torch
        enc = self._tokenizer(text, truncation=True, max_length=512, return_tensors="pt")
        enc = {k: v.to(self._device) for k, v in enc.items()}
        with torch.no_grad():
            logits = self._model(**enc).logits[0]
            probs = torch.softmax(logits, dim=-1).cpu().tolist()
        total = sum(probs)
        return ProbDist(tuple(p / total for p in probs))


class TransformerMaskedLM(MaskedLMBackend):
    """Pretrained masked LM adapter.

    The whole word under attack occupies a single mask symbol regardless of
    how the model's subword tokenizer would split it, and only single-token
    predictions that are plain words are accepted.
    """

    serial_only = True

    def __init__(self, model_name_or_path: str, device: str = "cpu") -> None:
        try:
            import torch
            from transformers import AutoModelForMaskedLM, AutoTokenizer
        except ImportError as exc:
            raise BackendError(f"transformers unavailable: {exc}") from exc
        self._torch = torch
        self._tokenizer = AutoTokenizer.from_pretrained(model_name_or_path)
        self._model = AutoModelForMaskedLM.from_pretrained(model_name_or_path)
        self._model.to(device)
        self._model.eval()
        self._device = device

    def predict_mask(self, tokens: Sequence[str], k: int) -> list[tuple[str, float]]:
        torch = self._torch
        slots = [i for i, t in enumerate(tokens) if t == MASK_TOKEN]
        if len(slots) != 1:
            raise BackendError(f"expected exactly one mask slot, found {len(slots)}")
        if k <= 0:
            return []
        text = " ".join(
            self._tokenizer.mask_token if t == MASK_TOKEN else t for t in tokens
        )
        enc = self._tokenizer(text, truncation=True, max_length=512, return_tensors="pt")
        ids = enc["input_ids"][0].tolist()
        if self._tokenizer.mask_token_id not in ids:
            return []  # mask truncated away
        mask_index = ids.index(self._tokenizer.mask_token_id)
        enc = {key: v.to(self._device) for key, v in enc.items()}
        with torch.no_grad():
            logits = self._model(**enc).logits[0, mask_index]
            probs = torch.softmax(logits, dim=-1)
            scores, indices = torch.topk(probs, min(4 * k, probs.shape[-1]))
        out: list[tuple[str, float]] = []
        for score, idx in zip(scores.cpu().tolist(), indices.cpu().tolist()):
            word = self._tokenizer.convert_ids_to_tokens(idx)
            if word.startswith("##") or word == self._tokenizer.mask_token:
                continue
            word = word.lower()
            if not word.isalpha():
                continue
            out.append((word, float(score)))
            if len(out) == k:
                break
        return out


class TransformerEncoder(SentenceEncoderBackend):
    """Sentence-embedding checkpoint behind the cosine-similarity interface."""

    serial_only = True

    def __init__(self, model_name_or_path: str, device: str = "cpu") -> None:
        try:
            from sentence_transformers import SentenceTransformer
        except ImportError as exc:
            raise BackendError(f"sentence-transformers unavailable: {exc}") from exc
        self._model = SentenceTransformer(model_name_or_path, device=device)

    def similarity(self, text_a: str, text_b: str) -> float:
        emb = self._model.encode([text_a, text_b], normalize_embeddings=True)
        value = float(np.dot(emb[0], emb[1]))
        return max(-1.0, min(1.0, value))


# ---------------------------------------------------------------------------
# Adapter configuration
# ---------------------------------------------------------------------------

_SECTIONS = ("classifier", "mlm", "encoder", "pos", "antonyms", "attack")

_ATTACK_KEYS = {
    "mode", "k", "sim_threshold", "max_perturb_ratio", "query_budget",
    "sentiment_task",
}


def _want(section: configparser.SectionProxy, name: str, key: str) -> str:
    if key not in section:
        raise ConfigError(f"{name}.{key}", "required key missing")
    return section[key]


def _fixture_cache(cache: dict[str, ToyFixture], base: Path, rel: str) -> ToyFixture:
    path = str((base / rel).resolve())
    if path not in cache:
        cache[path] = ToyFixture.from_file(path)
    return cache[path]


def _read_labeled_lines(path: Path) -> tuple[list[str], list[int]]:
    texts, labels = [], []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            label, _, text = line.partition("\t")
            labels.append(int(label))
            texts.append(text)
    return texts, labels


def load_adapter_config(path: str | Path) -> tuple[Backends, dict]:
    """Build a backend bundle plus [attack] defaults from an INI document.

    Sections: [classifier], [mlm], [encoder], [pos], [antonyms], [attack].
    Raises ConfigError carrying the offending field path.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(str(path), "config file not found")
    parser = configparser.ConfigParser()
    try:
        parser.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise ConfigError(str(path), f"unparseable config: {exc}") from exc

    for section in parser.sections():
        if section not in _SECTIONS:
            raise ConfigError(section, "unknown section")
    for required in ("classifier", "mlm", "encoder", "pos", "antonyms"):
        if required not in parser:
            raise ConfigError(required, "required section missing")

    base = path.parent
    fixtures: dict[str, ToyFixture] = {}

    sec = parser["classifier"]
    kind = _want(sec, "classifier", "kind")
    if kind == "toy":
        classifier: ClassifierBackend = ToyClassifier(
            _fixture_cache(fixtures, base, _want(sec, "classifier", "fixture"))
        )
    elif kind == "bow":
        train_path = base / _want(sec, "classifier", "train")
        if not train_path.exists():
            raise ConfigError("classifier.train", f"file not found: {train_path}")
        texts, labels = _read_labeled_lines(train_path)
        classifier = BagOfWordsLogisticClassifier.train(
            texts,
            labels,
            num_classes=max(labels) + 1,
            epochs=sec.getint("epochs", fallback=300),
            lr=sec.getfloat("lr", fallback=0.5),
        )
    elif kind == "transformer":
        classifier = TransformerClassifier(
            _want(sec, "classifier", "model"), device=sec.get("device", "cpu")
        )
    else:
        raise ConfigError("classifier.kind", f"unknown kind {kind!r}")

    sec = parser["mlm"]
    kind = _want(sec, "mlm", "kind")
    if kind == "toy":
        mlm: MaskedLMBackend = ToyMaskedLM(
            _fixture_cache(fixtures, base, _want(sec, "mlm", "fixture"))
        )
    elif kind == "corpus":
        train_path = base / _want(sec, "mlm", "train")
        if not train_path.exists():
            raise ConfigError("mlm.train", f"file not found: {train_path}")
        texts, _ = _read_labeled_lines(train_path)
        mlm = CorpusMaskedLM.train(texts)
    elif kind == "transformer":
        mlm = TransformerMaskedLM(
            _want(sec, "mlm", "model"), device=sec.get("device", "cpu")
        )
    else:
        raise ConfigError("mlm.kind", f"unknown kind {kind!r}")

    sec = parser["encoder"]
    kind = _want(sec, "encoder", "kind")
    if kind == "bow":
        encoder: SentenceEncoderBackend = BagOfWordsEncoder()
    elif kind == "transformer":
        encoder = TransformerEncoder(
            _want(sec, "encoder", "model"), device=sec.get("device", "cpu")
        )
    else:
        raise ConfigError("encoder.kind", f"unknown kind {kind!r}")

    sec = parser["pos"]
    kind = _want(sec, "pos", "kind")
    if kind == "toy":
        tagger: PosTaggerBackend = TableTagger(
            _fixture_cache(fixtures, base, _want(sec, "pos", "fixture")).pos_table
        )
    elif kind == "rules":
        tagger = RuleTagger()
    else:
        raise ConfigError("pos.kind", f"unknown kind {kind!r}")

    sec = parser["antonyms"]
    kind = _want(sec, "antonyms", "kind")
    if kind == "toy":
        antonyms: AntonymLexicon = PairAntonyms(
            _fixture_cache(fixtures, base, _want(sec, "antonyms", "fixture")).antonym_pairs
        )
    elif kind == "file":
        antonyms = PairAntonyms.from_file(base / _want(sec, "antonyms", "path"))
    elif kind == "default":
        antonyms = default_antonyms()
    elif kind == "none":
        antonyms = NoAntonyms()
    else:
        raise ConfigError("antonyms.kind", f"unknown kind {kind!r}")

    attack_defaults: dict = {}
    if "attack" in parser:
        sec = parser["attack"]
        for key in sec:
            if key not in _ATTACK_KEYS:
                raise ConfigError(f"attack.{key}", "unknown key")
        try:
            if "mode" in sec:
                attack_defaults["mode"] = sec["mode"]
            if "k" in sec:
                attack_defaults["k"] = sec.getint("k")
            if "sim_threshold" in sec:
                attack_defaults["sim_threshold"] = sec.getfloat("sim_threshold")
            if "max_perturb_ratio" in sec:
                raw = sec["max_perturb_ratio"]
                attack_defaults["max_perturb_ratio"] = (
                    None if raw.lower() in ("none", "unlimited") else float(raw)
                )
            if "query_budget" in sec:
                raw = sec["query_budget"]
                attack_defaults["query_budget"] = (
                    None if raw.lower() in ("none", "unlimited") else int(raw)
                )
            if "sentiment_task" in sec:
                attack_defaults["sentiment_task"] = sec.getboolean("sentiment_task")
        except ValueError as exc:
            raise ConfigError("attack", f"bad value: {exc}") from exc

    bundle = Backends(
        classifier=classifier,
        mlm=mlm,
        encoder=encoder,
        pos_tagger=tagger,
        antonyms=antonyms,
    )
    return bundle, attack_defaults
