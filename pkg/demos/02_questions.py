# From true/false action tuples to natural-language questions.
#
# Run: python3 demos/02_questions.py

from temporal_qa import ActionPhrase as A, TemporalCategory as C, inflect, render_boolean, render_mcq
from temporal_qa.language import Tense

for phrase in ("pour milk", "stir cereals", "take cup", "fry egg", "eat sandwich"):
    forms = [inflect(phrase, t) for t in Tense]
    print(" | ".join(forms))
print()

pairs = [
    (C.EVENTUAL, (A.of("pour milk"),)),
    (C.BEFORE, (A.of("add kimchi"), A.of("pour sesame oil"))),
    (C.SINCE, (A.of("hold phone"), A.of("open door"))),
    (C.IMMEDIATE_NEXT, (A.of("pack cucumbers in the jar"), A.of("pour vinegar"))),
    (C.LOOSE_ABC, (A.of("crack egg"), A.of("whisk egg"), A.of("fry egg"))),
    (C.CO_OCCUR, (A.of("open door"), A.of("bark", "dog"))),
]
for cat, actions in pairs:
    print(f"[{cat.label}] {render_boolean(cat, None, actions, 'yes').question}")
print()

item = render_mcq(
    C.BEFORE, "person", (A.of("pour sesame oil"),), A.of("add kimchi"),
    (A.of("wash hands"), A.of("open fridge"), A.of("cut onion")), seed=42,
)
print(item.question)
for letter, choice in zip("abcd", item.choices):
    print(f"  ({letter}) {choice}")
print("answer:", item.answer)
