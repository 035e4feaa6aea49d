"""The sixteen temporal categories and their interval-based evaluation.

Every category is evaluated over maximal intervals (``Timeline.spans``). The
semantics are pinned here; :mod:`temporal_qa.oracle` restates each one as
direct quantifier loops over steps and is used to cross-check this module.

Conventions shared by all categories:

* every named action must occur at least once (no vacuous positives);
* multi-action categories return :attr:`Verdict.EXCLUDED` when any pair of
  the named actions has ambiguous boundaries (see ``sanitize_pair``).
"""

from __future__ import annotations

import bisect
from enum import Enum
from itertools import combinations, permutations
from typing import Sequence

from .annotations import ActionPhrase
from .errors import IdenticalActions, WrongArity
from .timeline import DEFAULT_THETA, PairVerdict, Timeline, sanitize_pair

DEFAULT_TAU_ADJ = 1


class TemporalCategory(Enum):
    # value: (display label, arity, complexity)
    EVENTUAL = ("Eventual", 1, 1)
    ALWAYS = ("Always", 1, 2)
    UNTIL = ("Until", 2, 3)
    SINCE = ("Since", 2, 3)
    IMPLIES = ("Implies", 2, 3)
    BEFORE = ("Before", 2, 3)
    NEXT = ("Next", 2, 3)
    CO_OCCUR = ("CoOccur", 2, 3)
    DISJOINT = ("Disjoint", 2, 3)
    IMMEDIATE_NEXT = ("ImmediateNext", 2, 4)
    ALWAYS_BEFORE = ("AlwaysBefore", 2, 4)
    ALWAYS_NEXT = ("AlwaysNext", 2, 4)
    ALWAYS_CO_OCCUR = ("AlwaysCoOccur", 2, 4)
    STRICT_ABC = ("StrictABC", 3, 5)
    LOOSE_ABC = ("LooseABC", 3, 5)
    A_ALWAYS_BEFORE_BC = ("AAlwaysBeforeBC", 3, 5)

    @property
    def label(self) -> str:
        return self.value[0]

    @property
    def arity(self) -> int:
        return self.value[1]

    @property
    def complexity(self) -> int:
        return self.value[2]

    @classmethod
    def from_label(cls, label: str) -> "TemporalCategory":
        for cat in cls:
            if cat.label == label or cat.name == label:
                return cat
        raise KeyError(label)

    def __str__(self):
        return self.label


UNARY = tuple(c for c in TemporalCategory if c.arity == 1)
BINARY = tuple(c for c in TemporalCategory if c.arity == 2)
COMPOUND = tuple(c for c in TemporalCategory if c.arity == 3)


class Verdict(Enum):
    TRUE = "true"
    FALSE = "false"
    EXCLUDED = "excluded"

    @classmethod
    def of(cls, value: bool) -> "Verdict":
        return cls.TRUE if value else cls.FALSE


Spans = Sequence[tuple[int, int]]


def _overlaps(xs: Spans, ys: Spans) -> bool:
    i = j = 0
    while i < len(xs) and j < len(ys):
        if xs[i][0] < ys[j][1] and ys[j][0] < xs[i][1]:
            return True
        if xs[i][1] <= ys[j][1]:
            i += 1
        else:
            j += 1
    return False


def _covered(xs: Spans, ys: Spans) -> bool:
    """Every span of ``xs`` lies inside one span of ``ys`` (both merged)."""
    starts = [s for s, _ in ys]
    for s, e in xs:
        k = bisect.bisect_right(starts, s) - 1
        if k < 0 or ys[k][1] < e:
            return False
    return True


def _binary(cat: TemporalCategory, xs: Spans, ys: Spans, n: int, tau_adj: int) -> bool:
    if not xs or not ys:
        return False
    if cat is TemporalCategory.UNTIL:
        first_y = ys[0][0]
        return first_y >= 1 and xs[0][0] == 0 and xs[0][1] >= first_y
    if cat is TemporalCategory.SINCE:
        # X already active at the last Y step and stays active to the end
        last_y = ys[-1][1] - 1
        return last_y < n - 1 and xs[-1][1] == n and xs[-1][0] <= last_y
    if cat is TemporalCategory.IMPLIES:
        return _covered(xs, ys)
    if cat is TemporalCategory.BEFORE:
        return xs[0][1] <= ys[-1][0]
    if cat is TemporalCategory.NEXT:
        return xs[-1][0] >= ys[0][1]
    if cat is TemporalCategory.CO_OCCUR:
        return _overlaps(xs, ys)
    if cat is TemporalCategory.DISJOINT:
        return not _overlaps(xs, ys)
    if cat is TemporalCategory.IMMEDIATE_NEXT:
        ends = sorted(e for _, e in ys)
        for s, _ in xs:
            # need some Y end with s - tau_adj < end <= s
            k = bisect.bisect_right(ends, s) - 1
            if k >= 0 and s - ends[k] < tau_adj:
                return True
        return False
    if cat is TemporalCategory.ALWAYS_BEFORE:
        return xs[-1][1] <= ys[0][0]
    if cat is TemporalCategory.ALWAYS_NEXT:
        return xs[0][0] >= ys[-1][1]
    if cat is TemporalCategory.ALWAYS_CO_OCCUR:
        return tuple(xs) == tuple(ys)
    raise WrongArity(f"{cat.label} is not a binary category")


def _check(cat: TemporalCategory, arity: int, actions: Sequence[ActionPhrase]):
    if cat.arity != arity or len(actions) != arity:
        raise WrongArity(f"{cat.label} takes {cat.arity} action(s), got {len(actions)}")
    if len(set(actions)) != len(actions):
        raise IdenticalActions(f"{cat.label} needs distinct actions, got {list(map(str, actions))}")


def eval_unary(cat: TemporalCategory, timeline: Timeline, x: ActionPhrase) -> bool:
    _check(cat, 1, (x,))
    spans = timeline.spans(x)
    if cat is TemporalCategory.EVENTUAL:
        return bool(spans)
    return spans == ((0, timeline.num_steps),)


def _pair_ok(timeline: Timeline, a, b, theta: float) -> bool:
    return sanitize_pair(timeline.spans(a), timeline.spans(b), theta) is PairVerdict.OK


def eval_binary(
    cat: TemporalCategory,
    timeline: Timeline,
    x: ActionPhrase,
    y: ActionPhrase,
    theta: float = DEFAULT_THETA,
    tau_adj: int = DEFAULT_TAU_ADJ,
) -> Verdict:
    _check(cat, 2, (x, y))
    if not _pair_ok(timeline, x, y, theta):
        return Verdict.EXCLUDED
    return Verdict.of(_binary(cat, timeline.spans(x), timeline.spans(y), timeline.num_steps, tau_adj))


def _loose(a: Spans, b: Spans, c: Spans) -> bool:
    if not (a and b and c):
        return False
    first_a_end, last_c_start = a[0][1], c[-1][0]
    return any(s >= first_a_end and e <= last_c_start for s, e in b)


def _compound(cat: TemporalCategory, a: Spans, b: Spans, c: Spans, n: int) -> bool:
    ab = lambda p, q: _binary(TemporalCategory.ALWAYS_BEFORE, p, q, n, DEFAULT_TAU_ADJ)
    if cat is TemporalCategory.STRICT_ABC:
        return ab(a, b) and ab(b, c)
    if cat is TemporalCategory.LOOSE_ABC:
        return _loose(a, b, c)
    if cat is TemporalCategory.A_ALWAYS_BEFORE_BC:
        return ab(a, b) and ab(a, c)
    raise WrongArity(f"{cat.label} is not a compound category")


def eval_compound(
    cat: TemporalCategory,
    timeline: Timeline,
    a: ActionPhrase,
    b: ActionPhrase,
    c: ActionPhrase,
    theta: float = DEFAULT_THETA,
) -> Verdict:
    _check(cat, 3, (a, b, c))
    if not all(_pair_ok(timeline, p, q, theta) for p, q in combinations((a, b, c), 2)):
        return Verdict.EXCLUDED
    return Verdict.of(_compound(cat, timeline.spans(a), timeline.spans(b), timeline.spans(c), timeline.num_steps))


def evaluate(
    cat: TemporalCategory,
    timeline: Timeline,
    actions: Sequence[ActionPhrase],
    theta: float = DEFAULT_THETA,
    tau_adj: int = DEFAULT_TAU_ADJ,
) -> Verdict:
    """Dispatch on arity; unary categories never come back EXCLUDED."""
    if cat.arity == 1:
        _check(cat, 1, actions)
        return Verdict.of(eval_unary(cat, timeline, actions[0]))
    if cat.arity == 2:
        _check(cat, 2, actions)
        return eval_binary(cat, timeline, actions[0], actions[1], theta, tau_adj)
    _check(cat, 3, actions)
    return eval_compound(cat, timeline, *actions, theta=theta)


def classify_tuples(
    timeline: Timeline,
    cat: TemporalCategory,
    theta: float = DEFAULT_THETA,
    tau_adj: int = DEFAULT_TAU_ADJ,
    actions: Sequence[ActionPhrase] | None = None,
    pair_cache: dict | None = None,
) -> tuple[list[tuple], set[tuple]]:
    """Return ``(positives, excluded)`` over all ordered tuples of distinct actions.

    Sanitization verdicts are computed once per unordered action pair and
    reused by every tuple containing that pair (pass the same ``pair_cache``
    across categories to share them further); interval lists come from the
    timeline's cache. Positives are in lexicographic order.
    """
    actions = tuple(sorted(actions if actions is not None else timeline.actions))
    n = timeline.num_steps
    if cat.arity == 1:
        return [(a,) for a in actions if eval_unary(cat, timeline, a)], set()

    usable = {} if pair_cache is None else pair_cache
    bad = set()
    for p, q in combinations(actions, 2):
        key = (p, q, theta)
        if key not in usable:
            usable[key] = _pair_ok(timeline, p, q, theta)
        if not usable[key]:
            bad.add((p, q))
            bad.add((q, p))

    spans = {a: timeline.spans(a) for a in actions}
    positives, excluded = [], set()
    for tup in permutations(actions, cat.arity):
        if bad and ((tup[0], tup[1]) in bad or (cat.arity == 3 and ((tup[0], tup[2]) in bad or (tup[1], tup[2]) in bad))):
            excluded.add(tup)
            continue
        if cat.arity == 2:
            hit = _binary(cat, spans[tup[0]], spans[tup[1]], n, tau_adj)
        else:
            hit = _compound(cat, spans[tup[0]], spans[tup[1]], spans[tup[2]], n)
        if hit:
            positives.append(tup)
    return positives, excluded


def enumerate_positives(
    timeline: Timeline,
    cat: TemporalCategory,
    theta: float = DEFAULT_THETA,
    tau_adj: int = DEFAULT_TAU_ADJ,
) -> list[tuple]:
    return classify_tuples(timeline, cat, theta, tau_adj)[0]
