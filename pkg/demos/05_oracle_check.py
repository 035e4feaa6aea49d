# Cross-check the interval evaluator against step-by-step brute force.
#
# Run: python3 demos/05_oracle_check.py [cases]

import random
import sys

from temporal_qa import TemporalCategory as C, brute_force_eval, evaluate, oracle_check
from temporal_qa.oracle import random_timeline

cases = int(sys.argv[1]) if len(sys.argv) > 1 else 300
print(oracle_check(cases=cases, seed=0).summary())

# One random timeline in detail.
tl = random_timeline(random.Random(20), max_actions=3, max_steps=24)
print(tl.render())
a, b = tl.actions[:2]
for cat in (C.BEFORE, C.NEXT, C.CO_OCCUR, C.UNTIL, C.SINCE):
    fast = evaluate(cat, tl, (a, b)).value
    slow = brute_force_eval(cat, tl, (a, b))
    print(f"{cat.label:>8}({a}, {b}): interval {fast:<8} brute force {slow}")
