# Timelines and temporal categories on a hand-made kitchen video.
#
# Run: python3 demos/01_timelines_and_logic.py

from temporal_qa import ActionPhrase, TemporalCategory as C, VideoAnnotation, build_instance_states, evaluate
from temporal_qa.timeline import sanitize_pair

ann = VideoAnnotation.from_spans(
    "kitchen01",
    [
        ("hold phone", 0, 40),
        ("crack egg", 2, 8),
        ("whisk egg", 8, 16),
        ("fry egg", 20, 32),
        ("sand shelf", 34, 38),
        ("sand shelf", 10, 12),  # a second occurrence, which breaks "always before"
    ],
)
tl = build_instance_states(ann)
print(tl.render())
print()

# Instance state at one step: the set of actions active there.
print("active at step 10:", sorted(str(a) for a in tl.active(10)))

crack, whisk, fry, phone, sand = (ActionPhrase.of(x) for x in ("crack egg", "whisk egg", "fry egg", "hold phone", "sand shelf"))

checks = [
    (C.ALWAYS, (phone,)),
    (C.BEFORE, (crack, fry)),
    (C.IMMEDIATE_NEXT, (whisk, crack)),
    (C.IMPLIES, (fry, phone)),
    (C.BEFORE, (sand, fry)),
    (C.ALWAYS_BEFORE, (sand, fry)),
    (C.STRICT_ABC, (crack, whisk, fry)),
]
for cat, actions in checks:
    args = ", ".join(str(a) for a in actions)
    print(f"{cat.label:>14}({args}) -> {evaluate(cat, tl, actions).value}")
print()

# Boundaries that nearly touch are treated as annotation noise and excluded.
print("overlap of 1 on 10 steps:", sanitize_pair([(0, 10)], [(9, 20)]).value)
print("gap of 2 on 10 steps:    ", sanitize_pair([(0, 10)], [(12, 22)]).value)
