"""Per-step instance states and the interval view used by the logic engine."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .annotations import ActionPhrase, VideoAnnotation

DEFAULT_THETA = 0.20

# float slack for the strict "< theta * length" comparison
_EPS = 1e-9


@dataclass(frozen=True, order=True)
class Interval:
    start: int
    end: int
    action: ActionPhrase | None = None

    def __post_init__(self):
        if self.start >= self.end:
            raise ValueError(f"empty interval [{self.start}, {self.end})")

    def __len__(self):
        return self.end - self.start


class Timeline:
    """Instance states of one video.

    Each action owns a boolean row of length ``num_steps``; row ``x`` at step
    ``t`` is true iff the action is active at ``t``. Maximal intervals are
    computed once at construction and cached, so the object is effectively
    immutable and safe to share.
    """

    def __init__(self, video_id: str, num_steps: int, rows: dict[ActionPhrase, np.ndarray]):
        if num_steps <= 0:
            raise ValueError("num_steps must be positive")
        self.video_id = video_id
        self.num_steps = num_steps
        self._rows = {}
        for action, row in rows.items():
            row = np.asarray(row, dtype=bool)
            if row.shape != (num_steps,):
                raise ValueError(f"row for {action} has shape {row.shape}, expected ({num_steps},)")
            if row.any():
                row.setflags(write=False)
                self._rows[action] = row
        self._intervals = {a: _runs(r) for a, r in self._rows.items()}
        self._actions = tuple(sorted(self._rows))

    def holds(self, action: ActionPhrase, t: int) -> bool:
        if not 0 <= t < self.num_steps:
            raise IndexError(t)
        row = self._rows.get(action)
        return bool(row is not None and row[t])

    def row(self, action: ActionPhrase) -> np.ndarray:
        row = self._rows.get(action)
        if row is None:
            return np.zeros(self.num_steps, dtype=bool)
        return row

    def active(self, t: int) -> frozenset[ActionPhrase]:
        if not 0 <= t < self.num_steps:
            raise IndexError(t)
        return frozenset(a for a, r in self._rows.items() if r[t])

    def spans(self, action: ActionPhrase) -> tuple[tuple[int, int], ...]:
        """Maximal runs of ``action`` as ``(start, end)`` pairs, end exclusive."""
        return self._intervals.get(action, ())

    @property
    def actions(self) -> tuple[ActionPhrase, ...]:
        return self._actions

    def render(self, width: int | None = None) -> str:
        """ASCII bars, one row per action: ``#`` where active, ``.`` elsewhere."""
        n = self.num_steps
        width = n if width is None else max(1, min(width, n))
        # bucket steps when the timeline is wider than the requested width
        edges = np.linspace(0, n, width + 1).astype(int)
        label_w = max((len(str(a)) for a in self._actions), default=0)
        lines = [f"{'step':<{label_w}} |0{'':{max(0, width - len(str(n)) - 1)}}{n}|"]
        for a in self._actions:
            row = self._rows[a]
            bar = "".join("#" if row[lo:max(hi, lo + 1)].any() else "." for lo, hi in zip(edges[:-1], edges[1:]))
            lines.append(f"{str(a):<{label_w}} |{bar}|")
        return "\n".join(lines)

    def __repr__(self):
        return f"Timeline({self.video_id!r}, num_steps={self.num_steps}, actions={len(self._actions)})"


def _runs(row: np.ndarray) -> tuple[tuple[int, int], ...]:
    padded = np.concatenate(([False], row, [False])).astype(np.int8)
    edges = np.flatnonzero(np.diff(padded))
    return tuple((int(s), int(e)) for s, e in zip(edges[::2], edges[1::2]))


def build_instance_states(annotation: VideoAnnotation) -> Timeline:
    rows: dict[ActionPhrase, np.ndarray] = {}
    for action, start, end in annotation.intervals:
        row = rows.setdefault(action, np.zeros(annotation.num_steps, dtype=bool))
        row[start:end] = True
    return Timeline(annotation.video_id, annotation.num_steps, rows)


def maximal_intervals(timeline: Timeline, action: ActionPhrase) -> list[Interval]:
    return [Interval(s, e, action) for s, e in timeline.spans(action)]


def video_action_set(timeline: Timeline) -> tuple[ActionPhrase, ...]:
    return timeline.actions


class PairVerdict(str, Enum):
    OK = "ok"
    AMBIGUOUS_OVERLAP = "ambiguous_overlap"
    AMBIGUOUS_GAP = "ambiguous_gap"

    @property
    def usable(self) -> bool:
        return self is PairVerdict.OK

    @property
    def reason(self) -> str:
        return self.value


def _as_pairs(intervals: Iterable) -> list[tuple[int, int]]:
    out = []
    for iv in intervals:
        if isinstance(iv, Interval):
            out.append((iv.start, iv.end))
        else:
            out.append((int(iv[0]), int(iv[1])))
    return sorted(out)


def sanitize_pair(xs: Sequence, ys: Sequence, theta: float = DEFAULT_THETA) -> PairVerdict:
    """Flag boundary noise between the occurrences of two actions.

    A pair of occurrences is ambiguous when they overlap by ``0 < L`` or are
    separated by a gap ``0 < G`` that is strictly below ``theta`` times the
    shorter of the two. Gaps are only measured between occurrences that are
    adjacent, i.e. no other occurrence of either action lies between them.
    Overlaps are checked before gaps.
    """
    xs, ys = _as_pairs(xs), _as_pairs(ys)
    if theta <= 0 or not xs or not ys:
        return PairVerdict.OK
    everything = xs + ys
    gap_found = False
    for xs0, xe in xs:
        for ys0, ye in ys:
            limit = theta * min(xe - xs0, ye - ys0) - _EPS
            overlap = min(xe, ye) - max(xs0, ys0)
            if overlap > 0:
                if overlap < limit:
                    return PairVerdict.AMBIGUOUS_OVERLAP
                continue
            gap = -overlap
            if gap == 0 or gap >= limit or gap_found:
                continue
            lo, hi = min(xe, ye), max(xs0, ys0)
            if not any(lo <= s and e <= hi for s, e in everything):
                gap_found = True
    return PairVerdict.AMBIGUOUS_GAP if gap_found else PairVerdict.OK
