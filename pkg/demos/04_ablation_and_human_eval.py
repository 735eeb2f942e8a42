"""Replace-vs-insert ablation splits, and packaging for human annotators.

Split A counts test items the choice mode cracks but replace-only cannot
(insertion is load-bearing); B is the same for insert-only; C needs both.
The human-eval packet shuffles originals with their adversarials so the
annotators cannot tell which is which; the answer key lives in a separate
file. Run with:

    python demos/04_ablation_and_human_eval.py
"""

from pathlib import Path

from maskattack import AttackConfig, AttackMode
from maskattack.attack import attack_corpus
from maskattack.backends import load_adapter_config
from maskattack.evaluation import (
    ablation_splits,
    ablation_table,
    aggregate_human_scores,
    export_human_eval,
)
from maskattack.ingestion import load_dataset

fixtures = Path(__file__).parent / "fixtures"
backends, defaults = load_adapter_config(fixtures / "toy.cfg")
dataset = load_dataset(fixtures / "toy.tsv")


def run(mode):
    config = AttackConfig(
        mode=mode,
        k=defaults.get("k", 50),
        sim_threshold=defaults.get("sim_threshold", 0.8),
        sentiment_task=defaults.get("sentiment_task", False),
    )
    return attack_corpus(backends, dataset, config)


results_r, results_i, results_ri = run(AttackMode.R), run(AttackMode.I), run(AttackMode.RI_CHOICE)
splits = ablation_splits(results_r, results_i, results_ri)
print(ablation_table(splits, corpus_label=dataset.name))
print(f"\nA items {sorted(splits.set_a)}  B items {sorted(splits.set_b)}  "
      f"C items {sorted(splits.set_c)}")
assert splits.set_c == splits.set_a & splits.set_b

# --- human evaluation -------------------------------------------------------
packet = export_human_eval(dataset, results_r, n=2, seed=7)
print(f"\npacket: {len(packet.items)} shuffled items (seed {packet.seed})")
for item in packet.items:
    print(f"  {item.item_id}  {item.text}")

# a scripted annotator standing in for the three humans: full marks for
# originals, middling scores and flipped labels for adversarials
annotations = {}
for item in packet.items:
    meta = packet.key[item.item_id]
    if meta["source"] == "original":
        annotations[item.item_id] = {"label": meta["label"], "scores": [5, 5, 4]}
    else:
        annotations[item.item_id] = {"label": 1 - meta["label"], "scores": [3, 2, 3]}

summary = aggregate_human_scores(packet, annotations)
print(f"\nsentiment accuracy: {summary.sentiment_accuracy:.1f}%")
print(f"mean naturalness:   {summary.mean_naturalness:.2f} / 5")
for source, (accuracy, naturalness) in sorted(summary.by_source.items()):
    print(f"  {source:<12} accuracy {accuracy:.1f}%  naturalness {naturalness:.2f}")
