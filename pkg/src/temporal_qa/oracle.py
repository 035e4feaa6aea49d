"""Brute-force reference semantics: quantifier loops over individual steps.

Nothing here looks at interval lists. Occurrence boundaries are recovered
pointwise: step ``t`` is the first step of an occurrence of X when X holds at
``t`` but not at ``t - 1``, and the last step when X holds at ``t`` but not at
``t + 1``. No sanitization is applied; compare against the fast path only
where it does not report EXCLUDED.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from itertools import permutations

from .annotations import ActionPhrase
from .errors import WrongArity
from .logic import DEFAULT_TAU_ADJ, TemporalCategory as C, Verdict, evaluate
from .timeline import DEFAULT_THETA, Timeline, build_instance_states


def _first_steps(h: list[bool]) -> list[int]:
    return [t for t in range(len(h)) if h[t] and (t == 0 or not h[t - 1])]


def _last_steps(h: list[bool]) -> list[int]:
    n = len(h)
    return [t for t in range(n) if h[t] and (t == n - 1 or not h[t + 1])]


def _occurs(h):
    return any(h)


def _always_before(hx, hy, n):
    return _occurs(hx) and _occurs(hy) and all(
        t < u for t in range(n) if hx[t] for u in range(n) if hy[u]
    )


def brute_force_eval(
    cat: C, timeline: Timeline, actions: tuple, tau_adj: int = DEFAULT_TAU_ADJ
) -> bool:
    if len(actions) != cat.arity:
        raise WrongArity(f"{cat.label} takes {cat.arity} action(s), got {len(actions)}")
    n = timeline.num_steps
    rows = [[timeline.holds(a, t) for t in range(n)] for a in actions]
    T = range(n)

    if cat is C.EVENTUAL:
        return any(rows[0][t] for t in T)
    if cat is C.ALWAYS:
        return all(rows[0][t] for t in T)

    if cat.arity == 3:
        ha, hb, hc = rows
        if cat is C.STRICT_ABC:
            return _always_before(ha, hb, n) and _always_before(hb, hc, n)
        if cat is C.A_ALWAYS_BEFORE_BC:
            return _always_before(ha, hb, n) and _always_before(ha, hc, n)
        # LooseABC: an A occurrence ends, then a whole B occurrence, then a C occurrence starts
        return any(
            la < fb and all(hb[t] for t in range(fb, lb + 1)) and lb < fc
            for la in _last_steps(ha)
            for fb in _first_steps(hb)
            for lb in _last_steps(hb)
            if fb <= lb
            for fc in _first_steps(hc)
        )

    hx, hy = rows
    if not (_occurs(hx) and _occurs(hy)):
        return False
    if cat is C.UNTIL:
        f = min(t for t in T if hy[t])
        return f >= 1 and all(hx[t] for t in range(f))
    if cat is C.SINCE:
        last = max(t for t in T if hy[t])
        return last < n - 1 and all(hx[t] for t in range(last, n))
    if cat is C.IMPLIES:
        return all(hy[t] for t in T if hx[t])
    if cat is C.BEFORE:
        return any(lx < fy for lx in _last_steps(hx) for fy in _first_steps(hy))
    if cat is C.NEXT:
        return any(fx > ly for fx in _first_steps(hx) for ly in _last_steps(hy))
    if cat is C.IMMEDIATE_NEXT:
        return any(1 <= fx - ly <= tau_adj for fx in _first_steps(hx) for ly in _last_steps(hy))
    if cat is C.ALWAYS_BEFORE:
        return _always_before(hx, hy, n)
    if cat is C.ALWAYS_NEXT:
        return _always_before(hy, hx, n)
    if cat is C.CO_OCCUR:
        return any(hx[t] and hy[t] for t in T)
    if cat is C.ALWAYS_CO_OCCUR:
        return all(hx[t] == hy[t] for t in T)
    if cat is C.DISJOINT:
        return not any(hx[t] and hy[t] for t in T)
    raise WrongArity(cat.label)


def random_timeline(rng: random.Random, max_actions: int = 5, max_steps: int = 50, video_id: str = "rand") -> Timeline:
    """A small random timeline of at most ``max_actions`` actions, each with 1-3 random spans."""
    from .annotations import VideoAnnotation

    n = rng.randint(1, max_steps)
    k = rng.randint(1, max_actions)
    spans, used = [], 0
    for i in range(k):
        if used >= k:
            break
        used += 1
        action = ActionPhrase("person", f"act {chr(ord('a') + i)}")
        for _ in range(rng.randint(1, 3)):
            s = rng.randrange(n)
            e = rng.randint(s + 1, min(n, s + 1 + rng.randint(0, n)))
            spans.append((action, s, e))
        if rng.random() < 0.1 and used < k:
            used += 1
            # an exact copy makes AlwaysCoOccur reachable
            twin = ActionPhrase("person", f"act {chr(ord('a') + i)} twin")
            spans += [(twin, s, e) for a, s, e in spans if a == action]
    return build_instance_states(VideoAnnotation(video_id, n, tuple(spans)))


@dataclass
class OracleReport:
    cases: int = 0
    comparisons: int = 0
    excluded: int = 0
    mismatches: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def summary(self) -> str:
        return (
            f"{self.cases} cases, {self.comparisons} comparisons, {self.excluded} excluded, "
            f"{len(self.mismatches)} mismatches ({self.seconds:.1f}s)"
        )


def oracle_check(
    cases: int = 1000,
    max_steps: int = 50,
    max_actions: int = 5,
    seed: int = 0,
    theta: float = DEFAULT_THETA,
    tau_adj: int = DEFAULT_TAU_ADJ,
) -> OracleReport:
    """Compare the fast evaluator with :func:`brute_force_eval` on random timelines."""
    rng = random.Random(seed)
    report = OracleReport()
    t0 = time.perf_counter()
    for case in range(cases):
        tl = random_timeline(rng, max_actions, max_steps, video_id=f"case{case}")
        report.cases += 1
        for cat in C:
            for tup in permutations(tl.actions, cat.arity):
                verdict = evaluate(cat, tl, tup, theta, tau_adj)
                if verdict is Verdict.EXCLUDED:
                    report.excluded += 1
                    continue
                report.comparisons += 1
                expected = brute_force_eval(cat, tl, tup, tau_adj)
                if (verdict is Verdict.TRUE) != expected:
                    report.mismatches.append((case, cat.label, tuple(map(str, tup))))
    report.seconds = time.perf_counter() - t0
    return report
