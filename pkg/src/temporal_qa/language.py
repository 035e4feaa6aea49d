"""Question text: verb inflection, category templates, negatives and distractors."""

from __future__ import annotations

import os
import random
import re
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from importlib import resources
from itertools import permutations
from typing import Iterable, Mapping, Sequence

from .annotations import DEFAULT_ACTOR, ActionPhrase
from .errors import ArityMismatch, DuplicateChoice, EmptyPhrase
from .logic import TemporalCategory as C

LEXICON_ENV = "TLQA_LEXICON"


class Tense(str, Enum):
    BASE = "base"
    SIMPLE_PAST = "simple_past"
    PAST_PARTICIPLE = "past_participle"
    PRESENT_PARTICIPLE = "present_participle"
    THIRD_PERSON = "third_person"


# column order of the lexicon file after the base form
_LEXICON_COLUMNS = (Tense.SIMPLE_PAST, Tense.PAST_PARTICIPLE, Tense.PRESENT_PARTICIPLE, Tense.THIRD_PERSON)

Lexicon = Mapping[str, Mapping[Tense, str]]


def parse_lexicon(text: str) -> dict[str, dict[Tense, str]]:
    """Parse ``base<TAB>past<TAB>participle<TAB>ing<TAB>3rd`` lines; ``#`` starts a comment."""
    out = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != 5 or not all(p.strip() for p in parts):
            raise ValueError(f"lexicon line {line_no}: expected 5 tab-separated forms")
        base, *forms = (p.strip().lower() for p in parts)
        out[base] = dict(zip(_LEXICON_COLUMNS, forms))
    return out


@lru_cache(maxsize=8)
def _load_lexicon(path: str | None) -> dict[str, dict[Tense, str]]:
    if path is None:
        text = resources.files("temporal_qa").joinpath("data/verb_lexicon.tsv").read_text(encoding="utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    return parse_lexicon(text)


def default_lexicon() -> dict[str, dict[Tense, str]]:
    """The shipped lexicon, or the file named by ``$TLQA_LEXICON`` when set."""
    return _load_lexicon(os.environ.get(LEXICON_ENV) or None)


# Heads that mark a label as not starting with a verb.
NON_VERB_HEADS = frozenset(
    "a an the this that these those some any no none null nothing background sil other".split()
)

_VOWELS = set("aeiou")


def _is_cvc(word: str) -> bool:
    """Single-syllable consonant-vowel-consonant ending, e.g. stir, stop, plan."""
    if len(word) < 3:
        return False
    c1, v, c2 = word[-3], word[-2], word[-1]
    if c2 in "wxy" or c2 in _VOWELS or v not in _VOWELS or c1 in _VOWELS:
        return False
    return sum(1 for i, ch in enumerate(word) if ch in _VOWELS and (i == 0 or word[i - 1] not in _VOWELS)) == 1


def _regular(verb: str, tense: Tense) -> str:
    if tense is Tense.BASE:
        return verb
    if tense is Tense.THIRD_PERSON:
        if verb.endswith(("s", "x", "z", "ch", "sh", "o")):
            return verb + "es"
        if verb.endswith("y") and len(verb) > 1 and verb[-2] not in _VOWELS:
            return verb[:-1] + "ies"
        return verb + "s"
    if tense is Tense.PRESENT_PARTICIPLE:
        if verb.endswith("ie"):
            return verb[:-2] + "ying"
        if verb.endswith("e") and not verb.endswith(("ee", "ye", "oe")) and len(verb) > 2:
            return verb[:-1] + "ing"
        if _is_cvc(verb):
            return verb + verb[-1] + "ing"
        return verb + "ing"
    # simple past and past participle coincide for regular verbs
    if verb.endswith("e"):
        return verb + "d"
    if verb.endswith("y") and len(verb) > 1 and verb[-2] not in _VOWELS:
        return verb[:-1] + "ied"
    if _is_cvc(verb):
        return verb + verb[-1] + "ed"
    return verb + "ed"


def is_verb_led(phrase: str) -> bool:
    head = phrase.split(" ", 1)[0]
    return head.isalpha() and head not in NON_VERB_HEADS


@dataclass(frozen=True)
class VerbLexiconEntry:
    base: str
    forms: Mapping[Tense, str]
    inflected: bool = True

    def __getitem__(self, tense: Tense) -> str:
        return self.forms[Tense(tense)]


def lexicon_entry(phrase: str, lexicon: Lexicon | None = None) -> VerbLexiconEntry:
    """All five forms of ``phrase``, inflecting only its head word.

    Phrases whose head is not a verb (see :data:`NON_VERB_HEADS`) are kept
    verbatim in every form and marked ``inflected=False``.
    """
    phrase = phrase.strip() if phrase else ""
    if not phrase:
        raise EmptyPhrase("cannot inflect an empty phrase")
    if lexicon is None:
        return _default_entry(phrase, os.environ.get(LEXICON_ENV) or None)
    return _build_entry(phrase, lexicon)


@lru_cache(maxsize=4096)
def _default_entry(phrase: str, path: str | None) -> VerbLexiconEntry:
    return _build_entry(phrase, _load_lexicon(path))


def _build_entry(phrase: str, lexicon: Lexicon) -> VerbLexiconEntry:
    if not is_verb_led(phrase):
        return VerbLexiconEntry(phrase, {t: phrase for t in Tense}, inflected=False)
    head, _, rest = phrase.partition(" ")
    known = lexicon.get(head)
    forms = {}
    for tense in Tense:
        word = head if tense is Tense.BASE else (known[tense] if known else _regular(head, tense))
        forms[tense] = f"{word} {rest}" if rest else word
    return VerbLexiconEntry(phrase, forms)


def inflect(entry: VerbLexiconEntry | str, tense: Tense | str, lexicon: Lexicon | None = None) -> str:
    """
    >>> inflect("pour milk", Tense.SIMPLE_PAST)
    'poured milk'
    """
    if not isinstance(entry, VerbLexiconEntry):
        entry = lexicon_entry(entry, lexicon)
    return entry[Tense(tense)]


# Templates. {person} is the actor of the first action; {aN:tense} is action N of
# the tuple; {actorN} is the actor of action N; {cN:tense} is context action N of a
# multiple-choice question.
BOOLEAN_TEMPLATES: dict[C, str] = {
    C.EVENTUAL: "Does the {person} eventually {a0:base} ?",
    C.ALWAYS: "Is the {person} always {a0:ing} ?",
    C.UNTIL: "Did the {person} {a0:base} until {a1:ing} ?",
    C.SINCE: "Has the {person} been {a0:ing} since they {a1:past} ?",
    C.DISJOINT: "Is it true that {person} {a0:ing} does not overlap with {a1:ing} ?",
    C.IMPLIES: "Does the {person} {a0:ing} imply {a1:ing} ?",
    C.BEFORE: "Did the {person} {a0:base} before {a1:ing} ?",
    C.NEXT: "Did the {person} {a0:base} after {a1:ing} ?",
    C.CO_OCCUR: "Do {person} {a0:ing} and {a1:ing} co-occur ?",
    C.IMMEDIATE_NEXT: "Did the {person} {a0:base} immediately after {a1:ing} ?",
    C.ALWAYS_BEFORE: "Did the {person} {a0:base} always before {a1:ing} ?",
    C.ALWAYS_NEXT: "Did the {person} {a0:base} always after {a1:ing} ?",
    C.ALWAYS_CO_OCCUR: "Is it true that {person} {a0:ing} always co-occur with {a1:ing} ?",
    C.STRICT_ABC: (
        "Is it true that {actor0} {a0:ing} always occurs before {actor1} {a1:ing}, "
        "which in turn always occurs before {actor2} {a2:ing} ?"
    ),
    C.LOOSE_ABC: (
        "Is it true that {actor0} {a0:ing} occurs before {actor1} {a1:ing}, "
        "which in turn occurs before {actor2} {a2:ing} ?"
    ),
    C.A_ALWAYS_BEFORE_BC: (
        "Is it true that {actor0} {a0:ing} always occurs before {actor1} {a1:ing} and {actor2} {a2:ing} ?"
    ),
}

MCQ_TEMPLATES: dict[C, str] = {
    C.EVENTUAL: "What does the {person} do in this video ?",
    C.ALWAYS: "What action does the {person} do throughout the video ?",
    C.UNTIL: "What did the {person} do until {c0:ing} ?",
    C.SINCE: "What has been the {person} doing since they {c0:past} ?",
    C.IMPLIES: "While the {person} is {c0:ing}, what does this imply about {person} action ?",
    C.BEFORE: "What did the {person} do before {c0:ing} ?",
    C.NEXT: "What did the {person} do after {c0:ing} ?",
    C.CO_OCCUR: "What does the {person} do when {c0:ing}?",
    C.DISJOINT: "Which action by the {person} does not overlap with {c0:ing} ?",
    C.IMMEDIATE_NEXT: "What did the {person} do immediately after {c0:ing} ?",
    C.ALWAYS_BEFORE: "What did the {person} do always before {c0:ing} ?",
    C.ALWAYS_NEXT: "What did the {person} do always after {c0:ing} ?",
    C.ALWAYS_CO_OCCUR: "Which action always co-occurs with {c0:ing} ?",
    C.STRICT_ABC: (
        "Which action always occurs before {ctx0} {c0:ing} which in turn always occurs before {ctx1} {c1:ing} ?"
    ),
    C.LOOSE_ABC: "Which action occurs before {ctx0} {c0:ing} which in turn occurs before {ctx1} {c1:ing} ?",
    C.A_ALWAYS_BEFORE_BC: "Which action always occurs before {ctx0} {c0:ing} and {ctx1} {c1:ing} ?",
}

# Position of the asked-for action inside the category's tuple; the others are context.
MCQ_ANSWER_SLOT: dict[C, int] = {c: (1 if c is C.IMPLIES else 0) for c in C}

_TENSE_CODES = {
    "base": Tense.BASE,
    "past": Tense.SIMPLE_PAST,
    "pp": Tense.PAST_PARTICIPLE,
    "ing": Tense.PRESENT_PARTICIPLE,
    "s": Tense.THIRD_PERSON,
}
_PLACEHOLDER = re.compile(r"\{(person|actor\d|ctx\d|[ac]\d)(?::(\w+))?\}")


def template_action_slots(template: str) -> list[str]:
    return [m.group(1) for m in _PLACEHOLDER.finditer(template) if m.group(1)[0] in "ac" and m.group(1)[1:].isdigit()]


def _fill(template: str, lead_actor: str, slots: Mapping[str, ActionPhrase], lexicon) -> str:
    explicit = {m.group(1)[-1] for m in _PLACEHOLDER.finditer(template) if m.group(1).startswith(("actor", "ctx"))}

    def sub(m):
        name, code = m.group(1), m.group(2)
        if name == "person":
            return lead_actor
        if name.startswith("actor"):
            return slots["a" + name[-1]].actor
        if name.startswith("ctx"):
            return slots["c" + name[-1]].actor
        action = slots[name]
        text = inflect(action.verb_phrase, _TENSE_CODES[code or "base"], lexicon)
        if action.actor != lead_actor and name[-1] not in explicit:
            text = f"the {action.actor} {text}"
        return text

    return _PLACEHOLDER.sub(sub, template)


@dataclass(frozen=True)
class BooleanQuestion:
    question: str
    answer: str


def render_boolean(
    cat: C, actor: str | None, actions: Sequence[ActionPhrase], answer: str | bool, lexicon: Lexicon | None = None
) -> BooleanQuestion:
    """
    >>> from temporal_qa.annotations import ActionPhrase as A
    >>> render_boolean(C.BEFORE, "person", (A.of("add kimchi"), A.of("pour sesame oil")), "yes").question
    'Did the person add kimchi before pouring sesame oil ?'
    """
    if len(actions) != cat.arity:
        raise ArityMismatch(f"{cat.label} takes {cat.arity} action(s), got {len(actions)}")
    if isinstance(answer, bool):
        answer = "yes" if answer else "no"
    if answer not in ("yes", "no"):
        raise ValueError(f"boolean answer must be yes/no, got {answer!r}")
    actor = actor or (actions[0].actor if actions else DEFAULT_ACTOR)
    slots = {f"a{i}": a for i, a in enumerate(actions)}
    return BooleanQuestion(_fill(BOOLEAN_TEMPLATES[cat], actor, slots, lexicon), answer)


LETTERS = "abcd"


@dataclass(frozen=True)
class MCQItem:
    question: str
    choices: tuple[str, str, str, str]
    correct_index: int
    choice_actions: tuple[ActionPhrase, ...] = ()

    def __post_init__(self):
        if len(self.choices) != 4 or len(set(self.choices)) != 4:
            raise DuplicateChoice(f"need 4 distinct choices, got {self.choices}")
        if not 0 <= self.correct_index < 4:
            raise ValueError(f"correct_index {self.correct_index} out of range")

    @property
    def answer(self) -> str:
        return LETTERS[self.correct_index]


def choice_text(action: ActionPhrase, lead_actor: str) -> str:
    if action.actor != lead_actor:
        return f"{action.actor} {action.verb_phrase}"
    return action.verb_phrase


def render_mcq(
    cat: C,
    actor: str | None,
    context_actions: Sequence[ActionPhrase],
    correct: ActionPhrase,
    distractors: Sequence[ActionPhrase],
    seed: int,
    lexicon: Lexicon | None = None,
) -> MCQItem:
    """Fill the multiple-choice template and place ``correct`` at a seeded position."""
    if len(context_actions) != cat.arity - 1:
        raise ArityMismatch(f"{cat.label} needs {cat.arity - 1} context action(s), got {len(context_actions)}")
    if len(distractors) != 3:
        raise ArityMismatch(f"need exactly 3 distractors, got {len(distractors)}")
    options = [correct, *distractors]
    if len(set(options)) != 4:
        raise DuplicateChoice("distractors must differ from the correct action and each other")
    actor = actor or correct.actor
    texts = [choice_text(a, actor) for a in options]
    if len(set(texts)) != 4:
        raise DuplicateChoice(f"choice texts collide: {texts}")
    question = _fill(MCQ_TEMPLATES[cat], actor, {f"c{i}": a for i, a in enumerate(context_actions)}, lexicon)

    rng = random.Random(seed)
    wrong = list(distractors)
    rng.shuffle(wrong)
    idx = rng.randrange(4)
    ordered = wrong[:idx] + [correct] + wrong[idx:]
    return MCQItem(question, tuple(choice_text(a, actor) for a in ordered), idx, tuple(ordered))


def _extension_pool(positives: Sequence[tuple], outside: Sequence[ActionPhrase], arity: int):
    """Lazily indexable tuples formed by swapping one slot of a positive for an outside action."""
    total = len(positives) * arity * len(outside)

    def get(i):
        p, rem = divmod(i, arity * len(outside))
        slot, o = divmod(rem, len(outside))
        tup = list(positives[p])
        tup[slot] = outside[o]
        return tuple(tup)

    return total, get


def sample_negatives(
    cat: C,
    positives: Iterable[tuple],
    video_actions: Iterable[ActionPhrase],
    dataset_actions: Iterable[ActionPhrase],
    n: int,
    seed: int,
    excluded: Iterable[tuple] = (),
) -> tuple[list[tuple], int]:
    """Sample ``n`` false tuples for ``cat``; returns ``(tuples, shortfall)``.

    Hard negatives come first: every ordered tuple of distinct video actions
    that is neither positive nor excluded. When there are fewer than ``n`` of
    those, the rest is drawn from tuples where one slot of a positive is
    replaced by a dataset action that never occurs in the video (false under
    the occurrence requirement).
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return [], 0
    positives = sorted(set(positives))
    blocked = set(positives) | set(excluded)
    video = sorted(set(video_actions))
    hard = [t for t in permutations(video, cat.arity) if t not in blocked]
    rng = random.Random(seed)
    if len(hard) >= n:
        return sorted(rng.sample(hard, n)), 0

    chosen = set(hard)
    vset = set(video)
    outside = sorted(a for a in set(dataset_actions) if a not in vset)
    base = positives
    if not base and len(video) >= cat.arity:
        base = [tuple(video[: cat.arity])]
    total, get = _extension_pool(base, outside, cat.arity) if base and outside else (0, None)
    need = n - len(chosen)
    if total:
        # sample indices without materializing; collisions are topped up
        order = rng.sample(range(total), total) if total <= 4 * need + 64 else None
        tried = set()
        while need and len(tried) < total:
            i = order[len(tried)] if order is not None else rng.randrange(total)
            if i in tried:
                continue
            tried.add(i)
            tup = get(i)
            if tup not in chosen and tup not in blocked:
                chosen.add(tup)
                need -= 1
    return sorted(chosen), n - len(chosen)


def sample_distractors(
    cat: C,
    context: Sequence[ActionPhrase],
    correct_answers: Iterable[ActionPhrase],
    excluded: Iterable[tuple],
    video_actions: Iterable[ActionPhrase],
    dataset_actions: Iterable[ActionPhrase],
    rng: random.Random,
    k: int = 3,
) -> list[ActionPhrase]:
    """Pick ``k`` wrong answers for an MCQ with the given context actions.

    Candidates from the video are preferred; dataset actions absent from the
    video fill the remainder. A candidate is rejected if it answers the
    question correctly or would form an excluded tuple with the context.
    """
    slot = MCQ_ANSWER_SLOT[cat]
    bad = set(correct_answers) | set(context)
    excluded = set(excluded)

    def admissible(a):
        if a in bad:
            return False
        tup = list(context)
        tup.insert(slot, a)
        return tuple(tup) not in excluded

    video = sorted(set(video_actions))
    vset = set(video)
    hard = [a for a in video if admissible(a)]
    picked = rng.sample(hard, min(k, len(hard)))
    if len(picked) < k:
        rest = [a for a in sorted(set(dataset_actions)) if a not in vset and admissible(a)]
        picked += rng.sample(rest, min(k - len(picked), len(rest)))
    return picked
