# Score three toy "models" against a benchmark: a yes-sayer, a coin flipper
# and an oracle that reads the answer key.
#
# Run: python3 demos/04_scoring.py

import random

from temporal_qa import GenerationConfig, PredictionRecord, build_benchmark, score
from temporal_qa.synthetic import overlapping_corpus

bench = build_benchmark(overlapping_corpus(80, seed=2), GenerationConfig(per_category_target=100, global_seed=3))
booleans = [it for it in bench.items if it.qtype == "boolean"]
rng = random.Random(0)

models = {
    "always yes": lambda it: "Yes, it does.",
    "coin flip": lambda it: rng.choice(["yes", "No."]) if it.qtype == "boolean" else f"({rng.choice('abcd')})",
    "answer key": lambda it: it.answer,
}
for name, model in models.items():
    items = booleans if name == "always yes" else bench.items
    table = score(bench, [PredictionRecord(it.id, model(it)) for it in items], qtype="boolean" if name == "always yes" else None)
    print(f"== {name}")
    print(table.render())
    print()

# Unparseable responses count as wrong by default, or can be dropped.
preds = [PredictionRecord(it.id, "I cannot tell from the video.") for it in booleans[:10]]
preds += [PredictionRecord(it.id, it.answer) for it in booleans[10:40]]
for policy in ("wrong", "drop"):
    t = score(bench, preds, policy=policy)
    print(f"policy={policy}: mean acc {t.mean_accuracy:.1f}, unparseable {t.unparseable_count}")
