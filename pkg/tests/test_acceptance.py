"""Acceptance suite: one test per criterion, one PASS/FAIL line each.

Criteria 1-6 and 8 run entirely on deterministic in-repo fixtures; no
pretrained model is required. Criterion 7 is the directional check on the
synthetic review corpus with the lightweight trainable pipeline.
"""

import math
import random
import time
from pathlib import Path

from maskattack.attack import AttackConfig, attack_corpus, attack_with_trace, capped_sweep
from maskattack.backends import load_stopwords, toy_backends
from maskattack.cli import main
from maskattack.core import (
    AttackMode,
    AttackStatus,
    Label,
    PerturbationKind,
    StopReason,
    replay_ops,
    tokenize,
)
from maskattack.evaluation import (
    ablation_splits,
    ablation_table,
    effectiveness_curve,
    summarize,
)
from maskattack.fixtures import random_attack_setup, synthetic_review_bundle
from maskattack.ingestion import Dataset, Example, persist_results

from oracle_sim import simulate_attack

STOPWORDS = load_stopwords()
GOLDEN = Path(__file__).parent / "data" / "golden"
FIXTURES = Path(__file__).parents[1] / "demos" / "fixtures"

_STATUS_NAMES = {
    AttackStatus.SUCCESS: "success",
    AttackStatus.FAILURE: "failure",
    AttackStatus.SKIPPED_ALREADY_MISCLASSIFIED: "skipped",
}


def _line(number: int, name: str, ok: bool) -> None:
    print(f"ACCEPTANCE {number} {name}: {'PASS' if ok else 'FAIL'}")


def _setups(count: int, seed: int):
    rng = random.Random(seed)
    return [random_attack_setup(rng) for _ in range(count)]


def _random_corpus(rng: random.Random, size: int):
    """A shared-fixture corpus of random sentences."""
    setup = random_attack_setup(rng)
    examples = []
    for i in range(size):
        tokens = tuple(
            rng.choice(sorted(setup["fixture"].classifier_weights))
            for _ in range(rng.randint(3, 8))
        )
        examples.append(Example(id=str(i + 1), text=" ".join(tokens), label=Label(rng.randint(0, 1))))
    dataset = Dataset(
        name="toy", examples=tuple(examples), num_classes=2,
        sentiment_task=setup["sentiment_task"], split="test",
    )
    return setup, dataset


def test_criterion_1_oracle_equivalence():
    """Every engine step matches an independent brute-force enumeration."""
    started = time.monotonic()
    violations = []
    for setup in _setups(count=110, seed=20240101):
        backends = toy_backends(setup["fixture"])
        s = tokenize(" ".join(setup["tokens"]))
        for mode in AttackMode:
            config = AttackConfig(
                mode=mode, k=setup["k"], sim_threshold=setup["sim_threshold"],
                sentiment_task=setup["sentiment_task"],
            )
            result, steps = attack_with_trace(backends, s, setup["label"], config)
            expected = simulate_attack(
                setup["fixture"], STOPWORDS, list(s.tokens),
                setup["label"].class_index, mode.value, setup["k"],
                setup["sim_threshold"], setup["sentiment_task"],
            )
            got_ops = [(o.kind.value, o.position, o.new_token) for o in result.ops_applied]
            got_steps = [
                (step.position, (step.chosen.kind.value, step.chosen.position, step.chosen.new_token)
                 if step.chosen else None, step.flipped)
                for step in steps
            ]
            want_steps = [
                (step["position"], step["chosen"], step["flipped"])
                for step in expected["steps"]
            ]
            if (
                _STATUS_NAMES[result.status] != expected["status"]
                or got_ops != expected["ops"]
                or list(result.adversarial.tokens) != expected["final_tokens"]
                or got_steps != want_steps
            ):
                violations.append((mode.value, setup["tokens"], got_ops, expected["ops"]))
    elapsed = time.monotonic() - started
    ok = not violations and elapsed < 60
    _line(1, "oracle equivalence", ok)
    assert not violations, violations[:3]
    assert elapsed < 60, f"took {elapsed:.1f}s"


def _check_filter_compliance(setup, config, result):
    """Independently re-verify every applied op against the filter rules."""
    fixture = setup["fixture"]
    problems = []
    current = result.original
    for op in result.ops_applied:
        before = current
        current = replay_ops(before, [op])
        sa = set(result.original.tokens)
        sb = set(current.tokens)
        sim = len(sa & sb) / math.sqrt(len(sa) * len(sb))
        if sim < config.sim_threshold:
            problems.append(f"similarity {sim:.3f} < {config.sim_threshold} after {op}")
        if op.new_token in STOPWORDS:
            problems.append(f"stop word applied: {op}")
        if op.kind is PerturbationKind.REPLACE:
            table = fixture.pos_table
            if table.get(op.new_token, "OTHER") != table.get(op.original_token, "OTHER"):
                problems.append(f"POS mismatch: {op}")
            anchors = [op.original_token]
        else:
            target = before.origin_map.index(op.position)
            j = target if op.kind is PerturbationKind.INSERT_LEFT else target + 1
            anchors = []
            if j > 0:
                anchors.append(current.tokens[j - 1])
            if j + 1 < len(current.tokens):
                anchors.append(current.tokens[j + 1])
        if config.sentiment_task:
            for anchor in anchors:
                if frozenset((op.new_token, anchor)) in fixture.antonym_pairs:
                    problems.append(f"antonym applied on sentiment task: {op}")
    return problems


def test_criterion_2_filter_compliance():
    """No applied op ever violates a filter rule, across modes and setups."""
    violations = []
    for setup in _setups(count=60, seed=7777):
        backends = toy_backends(setup["fixture"])
        s = tokenize(" ".join(setup["tokens"]))
        for mode in AttackMode:
            config = AttackConfig(
                mode=mode, k=setup["k"], sim_threshold=setup["sim_threshold"],
                sentiment_task=setup["sentiment_task"],
            )
            result, _ = attack_with_trace(backends, s, setup["label"], config)
            violations.extend(_check_filter_compliance(setup, config, result))
    _line(2, "filter compliance", not violations)
    assert not violations, violations[:5]


def test_criterion_3_monotone_budget():
    """Per-sentence success and corpus curves are monotone in the cap."""
    started = time.monotonic()
    caps = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0]
    violations = []
    rng = random.Random(31337)
    for _ in range(12):
        setup, dataset = _random_corpus(rng, size=5)
        backends = toy_backends(setup["fixture"])
        for mode in AttackMode:
            config = AttackConfig(
                mode=mode, k=setup["k"], sim_threshold=setup["sim_threshold"],
                sentiment_task=setup["sentiment_task"],
            )
            sweep = capped_sweep(backends, dataset, config, caps)
            for idx in range(len(dataset)):
                flags = [
                    sweep.per_cap[c][idx].status is AttackStatus.SUCCESS
                    for c in range(len(caps))
                ]
                if any(a and not b for a, b in zip(flags, flags[1:])):
                    violations.append(f"{mode.value} example {idx}: success not monotone {flags}")
            accuracies = [a for _, a in effectiveness_curve(sweep)]
            if any(b > a + 1e-9 for a, b in zip(accuracies, accuracies[1:])):
                violations.append(f"{mode.value}: curve increases {accuracies}")
    elapsed = time.monotonic() - started
    ok = not violations and elapsed < 60
    _line(3, "monotone budget property", ok)
    assert not violations, violations[:5]
    assert elapsed < 60, f"took {elapsed:.1f}s"


def test_criterion_4_ablation_identity():
    """C equals the intersection of A and B, as membership sets, always."""
    violations = []
    rng = random.Random(515151)
    for _ in range(15):
        setup, dataset = _random_corpus(rng, size=8)
        backends = toy_backends(setup["fixture"])
        runs = {}
        for mode in (AttackMode.R, AttackMode.I, AttackMode.RI_CHOICE):
            config = AttackConfig(
                mode=mode, k=setup["k"], sim_threshold=setup["sim_threshold"],
                sentiment_task=setup["sentiment_task"],
            )
            runs[mode] = attack_corpus(backends, dataset, config)
        splits = ablation_splits(
            runs[AttackMode.R], runs[AttackMode.I], runs[AttackMode.RI_CHOICE]
        )
        if splits.set_c != splits.set_a & splits.set_b:
            violations.append(f"C != A∩B: {splits}")
        if not math.isclose(splits.c, 100.0 * len(splits.set_c) / splits.n):
            violations.append("percentage inconsistent with membership set")
    table = ablation_table(splits, corpus_label="toy")
    header_ok = table.splitlines()[0].split() == ["Dataset", "A", "B", "C"]
    if not header_ok:
        violations.append(f"table layout wrong: {table!r}")
    _line(4, "ablation identity", not violations)
    assert not violations, violations[:5]


def test_criterion_5_structural_invariants():
    """Length preservation, subsequence property, replay, query accounting."""
    violations = []
    for setup in _setups(count=80, seed=99999):
        backends = toy_backends(setup["fixture"])
        s = tokenize(" ".join(setup["tokens"]))
        for mode in AttackMode:
            config = AttackConfig(
                mode=mode, k=setup["k"], sim_threshold=setup["sim_threshold"],
                sentiment_task=setup["sentiment_task"],
            )
            result, steps = attack_with_trace(backends, s, setup["label"], config)
            if replay_ops(result.original, result.ops_applied) != result.adversarial:
                violations.append(f"replay mismatch: {result.ops_applied}")
            if result.status is AttackStatus.SKIPPED_ALREADY_MISCLASSIFIED:
                if result.queries != 1:
                    violations.append("skipped result queried more than once")
                continue
            evaluations = sum(len(step.evaluated) for step in steps)
            if result.queries != len(s.tokens) + 1 + evaluations:
                violations.append(
                    f"queries {result.queries} != {len(s.tokens) + 1} + {evaluations}"
                )
            if mode is AttackMode.R:
                if len(result.adversarial.tokens) != len(result.original.tokens):
                    violations.append("R mode changed token count")
            if mode is AttackMode.I:
                it = iter(result.adversarial.tokens)
                if not all(tok in it for tok in result.original.tokens):
                    violations.append("I mode broke the in-order subsequence property")
            if result.status is AttackStatus.FAILURE and result.stop_reason is StopReason.EXHAUSTED:
                visited = {step.position for step in steps}
                if visited != set(range(len(s.tokens))):
                    violations.append("exhausted failure did not try every position")
    _line(5, "structural invariants", not violations)
    assert not violations, violations[:5]


def test_criterion_6_determinism(tmp_path):
    """Two identical corpus runs persist byte-identical result files."""
    rng = random.Random(6)
    setup, dataset = _random_corpus(rng, size=6)
    backends = toy_backends(setup["fixture"])
    config = AttackConfig(
        mode=AttackMode.R_PLUS_I, k=setup["k"], sim_threshold=setup["sim_threshold"],
        sentiment_task=setup["sentiment_task"],
    )
    first = attack_corpus(backends, dataset, config)
    second = attack_corpus(toy_backends(setup["fixture"]), dataset, config)
    persist_results(first, tmp_path / "a.json", config.fingerprint())
    persist_results(second, tmp_path / "b.json", config.fingerprint())
    identical = (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    _line(6, "determinism", identical)
    assert identical


def test_criterion_7_directional_check():
    """Trainable-victim run: every mode drops accuracy; R+I is no weaker than R.

    The table-scale numbers need fine-tuned large models, so this checks the
    direction of the effect on 200 synthetic review examples. One inversion
    per run is tolerated. Runs on the in-repo lightweight pipeline; a
    pretrained masked-LM adapter is optional and not required here.
    """
    started = time.monotonic()
    backends, _, test = synthetic_review_bundle(train_size=800, test_size=200, seed=11)
    reports = {}
    for mode in AttackMode:
        config = AttackConfig(mode=mode, k=50, sim_threshold=0.8, sentiment_task=True)
        results = attack_corpus(backends, test, config)
        reports[mode] = summarize(results, test)

    claims = []
    for mode in AttackMode:
        report = reports[mode]
        claims.append(
            (f"{mode.value} reduces accuracy",
             report.after_attack_accuracy < report.original_accuracy)
        )
    claims.append(
        ("R+I success rate >= R success rate",
         reports[AttackMode.R_PLUS_I].success_count >= reports[AttackMode.R].success_count)
    )
    failed = [name for name, ok in claims if not ok]
    elapsed = time.monotonic() - started
    ok = len(failed) <= 1 and elapsed < 900
    _line(7, "directional check", ok)
    for mode in AttackMode:
        report = reports[mode]
        print(
            f"    {mode.value:<4} original={report.original_accuracy:.1f} "
            f"after={report.after_attack_accuracy:.1f} successes={report.success_count}"
        )
    assert len(failed) <= 1, f"inverted claims: {failed}"
    assert elapsed < 900, f"took {elapsed:.1f}s"


def test_criterion_8_report_fidelity(tmp_path):
    """Summary rows and curve CSVs match the frozen golden files exactly."""
    dataset = str(FIXTURES / "toy.tsv")
    cfg = str(FIXTURES / "toy.cfg")
    assert main(
        ["attack", "--mode", "R", "--dataset", dataset, "--backends", cfg,
         "--out", str(tmp_path / "run")]
    ) == 0
    assert main(
        ["curve", "--caps", "25,50,75,100", "--dataset", dataset, "--backends", cfg,
         "--out", str(tmp_path / "curves")]
    ) == 0

    mismatches = []
    pairs = [
        (tmp_path / "run" / "summary.txt", GOLDEN / "summary.txt"),
        (tmp_path / "curves" / "curve_r.csv", GOLDEN / "curve_r.csv"),
        (tmp_path / "curves" / "curve_i.csv", GOLDEN / "curve_i.csv"),
        (tmp_path / "curves" / "curve_r_i.csv", GOLDEN / "curve_r_i.csv"),
        (tmp_path / "curves" / "curve_r_plus_i.csv", GOLDEN / "curve_r_plus_i.csv"),
    ]
    for produced, golden in pairs:
        if produced.read_bytes() != golden.read_bytes():
            mismatches.append(golden.name)
    _line(8, "report fidelity", not mismatches)
    assert not mismatches, mismatches
