"""Walk through one attack step by step on a tiny hand-built model suite.

The victim is a bag-of-words logistic classifier that only cares about the
word "good". The mask filler proposes {bad, nice, awful} when the masked
slot sits between "was" and the end of the sentence. Run with:

    python demos/01_single_attack.py
"""

from maskattack import AttackConfig, AttackMode, Label, tokenize
from maskattack.attack import attack_with_trace
from maskattack.backends import ToyFixture, toy_backends
from maskattack.importance import token_importance

fixture = ToyFixture(
    classifier_weights={"good": 2.0, "awful": -3.0},
    bias=0.0,
    mlm_table={("was", "<end>"): ("bad", "nice", "awful")},
    pos_table={
        "the": "OTHER", "food": "NOUN", "was": "VERB",
        "good": "ADJ", "bad": "ADJ", "nice": "ADJ", "awful": "ADJ",
    },
    antonym_pairs=frozenset({frozenset(("good", "bad"))}),
)
backends = toy_backends(fixture)

sentence = tokenize("The food was good")
label = Label(1)  # positive

print("input tokens:", sentence.tokens)
print("P(classes):  ", backends.classifier.predict(sentence.text()).probs)

# Deletion probing decides the visit order: "good" carries all the signal.
importance = token_importance(backends.classifier, sentence, label)
print("\nimportance per token:")
for token, score in zip(sentence.tokens, importance.scores):
    print(f"  {token:<6} {score:+.4f}")
print("visit order:", importance.order)

# The antonym filter is active (sentiment task), so "bad" is discarded even
# though it would flip the classifier; "awful" is not a listed antonym of
# "good" here and survives to do the damage.
config = AttackConfig(
    mode=AttackMode.R, k=10, sim_threshold=0.7, sentiment_task=True
)
result, steps = attack_with_trace(backends, sentence, label, config)

print("\nsteps:")
for step in steps:
    evaluated = [(e.candidate.word, round(e.probs.probs[1], 3)) for e in step.evaluated]
    chosen = step.chosen.new_token if step.chosen else None
    print(f"  position {step.position}: evaluated {evaluated} -> chose {chosen!r}")

print("\noutcome:    ", result.status.value)
print("adversarial:", result.adversarial.text())
print("ops applied:", [(o.kind.value, o.position, o.new_token) for o in result.ops_applied])
print("similarity: ", round(result.similarity, 3))
print("queries:    ", result.queries)
