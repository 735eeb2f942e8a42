"""Effectiveness as a function of the perturbation budget.

Sweeps the cap on (edits / original length) from 10% to 100% and plots
after-attack accuracy per attack mode. Importance probes are shared across
caps, so the sweep costs little more than a single run. Run with:

    python demos/03_budget_curves.py
"""

from pathlib import Path

from maskattack import AttackConfig, AttackMode
from maskattack.attack import capped_sweep
from maskattack.backends import load_adapter_config
from maskattack.evaluation import effectiveness_curve, render_curve_ascii
from maskattack.ingestion import load_dataset

fixtures = Path(__file__).parent / "fixtures"
backends, defaults = load_adapter_config(fixtures / "toy.cfg")
dataset = load_dataset(fixtures / "toy.tsv")

caps = [i / 10 for i in range(1, 11)]

for mode in AttackMode:
    config = AttackConfig(
        mode=mode,
        k=defaults.get("k", 50),
        sim_threshold=defaults.get("sim_threshold", 0.8),
        sentiment_task=defaults.get("sentiment_task", False),
    )
    sweep = capped_sweep(backends, dataset, config, caps)
    curve = effectiveness_curve(sweep)

    print(f"\nmode {mode.value}: after-attack accuracy by max perturbation")
    print(render_curve_ascii(curve))

    # the greedy search makes success monotone in the cap, so curves only
    # ever step downward
    accuracies = [accuracy for _, accuracy in curve]
    assert all(b <= a + 1e-9 for a, b in zip(accuracies, accuracies[1:]))
