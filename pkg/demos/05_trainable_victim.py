"""The full pipeline against a trained victim instead of a lookup table.

Builds a synthetic movie-review corpus, trains a bag-of-words logistic
classifier on the train split, fits the mask filler on the same split, and
then runs all four attack modes against the held-out test split. Expect
the combined replace+insert mode to be the strongest and the insert-only
mode to keep the highest similarity. Run with:

    python demos/05_trainable_victim.py
"""

from maskattack import AttackConfig, AttackMode
from maskattack.attack import attack_corpus
from maskattack.core import AttackStatus
from maskattack.evaluation import original_row, summarize, summary_row
from maskattack.fixtures import synthetic_review_bundle

backends, train, test = synthetic_review_bundle(train_size=800, test_size=200, seed=11)
print(f"train {len(train)} / test {len(test)} synthetic reviews")

clean = sum(
    1 for e in test.examples
    if backends.classifier.predict(e.text).top() == e.label.class_index
)
print(f"victim accuracy before attack: {100.0 * clean / len(test):.1f}%\n")

reports = {}
example_shown = False
for mode in AttackMode:
    config = AttackConfig(mode=mode, k=50, sim_threshold=0.8, sentiment_task=True)
    results = attack_corpus(backends, test, config)
    reports[mode] = summarize(results, test)
    if not example_shown:
        flip = next(r for r in results if r.status is AttackStatus.SUCCESS)
        print("sample flip:")
        print(f"  original:    {flip.original.text()}")
        print(f"  adversarial: {flip.adversarial.text()}")
        print(f"  similarity:  {flip.similarity:.3f}, queries: {flip.queries}\n")
        example_shown = True

print(original_row(reports[AttackMode.R]))
for mode in AttackMode:
    print(summary_row(mode.value, reports[mode]))

print("\nmean perturbation ratio over successful attacks:")
for mode in AttackMode:
    print(f"  {mode.value:<4} {reports[mode].mean_perturb_ratio:.1f}%")
