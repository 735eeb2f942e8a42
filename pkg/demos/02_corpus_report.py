"""Attack a small corpus with all four modes and print the summary table.

Uses the committed fixture files in demos/fixtures/, the same ones the
command-line interface consumes. Run with:

    python demos/02_corpus_report.py
"""

from pathlib import Path

from maskattack import AttackConfig, AttackMode
from maskattack.attack import attack_corpus
from maskattack.backends import load_adapter_config
from maskattack.evaluation import original_row, summarize, summary_row
from maskattack.ingestion import load_dataset

fixtures = Path(__file__).parent / "fixtures"
backends, defaults = load_adapter_config(fixtures / "toy.cfg")
dataset = load_dataset(fixtures / "toy.tsv")

print(f"corpus: {len(dataset)} examples, sentiment filters "
      f"{'on' if defaults.get('sentiment_task') else 'off'}\n")

reports = {}
for mode in AttackMode:
    config = AttackConfig(
        mode=mode,
        k=defaults.get("k", 50),
        sim_threshold=defaults.get("sim_threshold", 0.8),
        sentiment_task=defaults.get("sentiment_task", False),
    )
    results = attack_corpus(backends, dataset, config)
    reports[mode] = summarize(results, dataset)

# after-attack accuracy with mean similarity of the generated adversarial
# examples in parentheses, one row per attack
print(original_row(reports[AttackMode.R]))
for mode in AttackMode:
    print(summary_row(mode.value, reports[mode]))

print("\nper-example view (replace-only run):")
for row in reports[AttackMode.R].per_example:
    print(f"  #{row['id']}: {row['status']:<28} ops={row['ops']} "
          f"ratio={row['perturb_ratio']:.2f} queries={row['queries']}")
