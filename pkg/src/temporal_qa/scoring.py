"""Score model responses against a benchmark.

Responses are free text. Boolean answers are read as the first standalone
``yes``/``no`` token; multiple-choice answers as a leading letter or an exact
choice text. Anything else is *unparseable* and handled by ``policy``.
"""

from __future__ import annotations

import io
import json
import re
from collections import defaultdict
from dataclasses import dataclass, field
from typing import IO, Iterable

from .builder import Benchmark, QAPair
from .errors import DuplicatePrediction, MalformedRecord, SchemaViolation, UnknownId, UnparseableResponse
from .language import LETTERS
from .logic import TemporalCategory

UNPARSEABLE = "unparseable"
POLICIES = ("wrong", "drop")

_YES_NO = re.compile(r"\b(yes|no)\b", re.IGNORECASE)
_PREFIX = r"^\s*(?:(?:the\s+)?answer(?:\s+is)?\s*[:\-]?\s*)?"
_OPT = r"\(?([a-d])\)?"
_LETTER = re.compile(_PREFIX + _OPT + r"(?=$|[\s.,;:)!?])", re.IGNORECASE)
_SEVERAL = re.compile(_PREFIX + _OPT + r"\s*(?:,|/|or|and)\s*" + _OPT + r"(?=$|[\s.,;:)!?])", re.IGNORECASE)
_HEDGED = re.compile(r"\b(?:maybe|either|perhaps)\b.*\b[a-d]\b.*\bor\b", re.IGNORECASE)


def parse_response_boolean(raw: str) -> str:
    m = _YES_NO.search(raw or "")
    return m.group(1).lower() if m else UNPARSEABLE


def parse_response_choice(raw: str, choices: Iterable[str] = (), n_choices: int = 4) -> int | str:
    """Index of the chosen option, or ``UNPARSEABLE``.

    A leading letter wins ("(b)", "C.", "Answer: d"). Otherwise the response
    must equal exactly one choice text. Responses naming several letters,
    e.g. "maybe a or b", are ambiguous.
    """
    text = (raw or "").strip()
    if not text:
        return UNPARSEABLE
    letters = LETTERS[:n_choices]
    several = _SEVERAL.match(text)
    if (several and several.group(1).lower() != several.group(2).lower()) or _HEDGED.search(text):
        return UNPARSEABLE
    m = _LETTER.match(text)
    if m and m.group(1).lower() in letters:
        return letters.index(m.group(1).lower())
    norm = _norm(text)
    hits = [i for i, c in enumerate(choices) if _norm(c) == norm]
    return hits[0] if len(hits) == 1 else UNPARSEABLE


def _norm(s: str) -> str:
    return " ".join(s.lower().strip().rstrip(".").split())


@dataclass(frozen=True)
class PredictionRecord:
    id: str
    raw_response: str


@dataclass(frozen=True)
class MetricsRow:
    category: str
    accuracy: float
    f1: float | None  # None when the category has no boolean items scored
    pct_yes: float | None
    n: int
    correct: int
    complexity: int = 0

    @property
    def error_rate(self) -> float:
        return 100.0 - self.accuracy

    def to_dict(self) -> dict:
        return {
            "category": self.category,
            "complexity": self.complexity,
            "n": self.n,
            "correct": self.correct,
            "accuracy": self.accuracy,
            "f1": self.f1,
            "pct_yes": self.pct_yes,
        }


@dataclass(frozen=True)
class MetricsTable:
    rows: tuple[MetricsRow, ...]
    unparseable_count: int
    policy: str = "wrong"
    unpredicted_count: int = 0
    notes: tuple[str, ...] = field(default=())

    @property
    def mean_accuracy(self) -> float | None:
        if not self.rows:
            return None
        return sum(r.accuracy for r in self.rows) / len(self.rows)

    def row(self, category: str) -> MetricsRow:
        for r in self.rows:
            if r.category == category:
                return r
        raise KeyError(category)

    def to_dict(self) -> dict:
        return {
            "rows": [r.to_dict() for r in self.rows],
            "mean_accuracy": self.mean_accuracy,
            "unparseable_count": self.unparseable_count,
            "unpredicted_count": self.unpredicted_count,
            "policy": self.policy,
            "notes": list(self.notes),
        }

    def render(self) -> str:
        fmt = lambda v: "     -" if v is None else f"{v:6.1f}"
        lines = [f"{'category':<16} {'cx':>2} {'n':>6}    acc     f1   %yes", "-" * 47]
        for r in self.rows:
            lines.append(f"{r.category:<16} {r.complexity:>2} {r.n:>6} {fmt(r.accuracy)} {fmt(r.f1)} {fmt(r.pct_yes)}")
        lines.append("-" * 47)
        lines.append(f"{'mean acc':<26} {fmt(self.mean_accuracy)}")
        lines.append(f"unparseable: {self.unparseable_count} (policy: {self.policy})")
        if self.unpredicted_count:
            lines.append(f"benchmark items without a prediction: {self.unpredicted_count}")
        lines += self.notes
        return "\n".join(lines)


@dataclass
class _Counts:
    n: int = 0
    correct: int = 0
    tp: int = 0
    fp: int = 0
    fn: int = 0
    parsed_bool: int = 0
    said_yes: int = 0
    n_bool: int = 0


def _f1(c: _Counts) -> float:
    denom = 2 * c.tp + c.fp + c.fn
    return 100.0 * 2 * c.tp / denom if denom else 0.0


def score(
    benchmark: Benchmark,
    predictions: Iterable[PredictionRecord],
    policy: str = "wrong",
    strict: bool = False,
    qtype: str | None = None,
) -> MetricsTable:
    """Per-category Accuracy, F1 and %Yes plus unweighted mean accuracy.

    Only predicted items are scored; categories with no predicted item are
    omitted and noted. ``qtype`` restricts scoring to "boolean" or "mcq".
    """
    if policy not in POLICIES:
        raise ValueError(f"policy must be one of {POLICIES}, got {policy!r}")
    by_id = {it.id: it for it in benchmark.items}
    seen: set[str] = set()
    counts: dict[str, _Counts] = defaultdict(_Counts)
    unparseable = 0
    for pred in predictions:
        item = by_id.get(pred.id)
        if item is None:
            raise UnknownId(pred.id)
        if pred.id in seen:
            raise DuplicatePrediction(pred.id)
        seen.add(pred.id)
        if qtype is not None and item.qtype != qtype:
            continue
        parsed = _parse(item, pred.raw_response)
        if parsed == UNPARSEABLE:
            unparseable += 1
            if strict:
                raise UnparseableResponse(f"{pred.id}: {pred.raw_response!r}")
            if policy == "drop":
                continue
        _tally(counts[item.category], item, parsed)

    present = {it.category for it in benchmark.items if qtype is None or it.qtype == qtype}
    rows, notes = [], []
    for cat in sorted(TemporalCategory, key=lambda c: (c.complexity, c.label)):
        c = counts.get(cat.label)
        if c is None or c.n == 0:
            if cat.label in present:
                notes.append(f"{cat.label}: no scored predictions, row omitted")
            continue
        rows.append(MetricsRow(
            category=cat.label,
            accuracy=100.0 * c.correct / c.n,
            f1=_f1(c) if c.n_bool else None,
            pct_yes=100.0 * c.said_yes / c.parsed_bool if c.parsed_bool else None,
            n=c.n,
            correct=c.correct,
            complexity=cat.complexity,
        ))
    unpredicted = sum(1 for it in benchmark.items if it.id not in seen and (qtype is None or it.qtype == qtype))
    return MetricsTable(tuple(rows), unparseable, policy, unpredicted, tuple(notes))


def _parse(item: QAPair, raw: str):
    if item.qtype == "boolean":
        return parse_response_boolean(raw)
    idx = parse_response_choice(raw, item.choices or ())
    return UNPARSEABLE if idx == UNPARSEABLE else LETTERS[idx]


def _tally(c: _Counts, item: QAPair, parsed: str):
    c.n += 1
    hit = parsed == item.answer
    c.correct += hit
    if item.qtype != "boolean":
        return
    c.n_bool += 1
    truth_yes = item.answer == "yes"
    if parsed != UNPARSEABLE:
        c.parsed_bool += 1
        c.said_yes += parsed == "yes"
    if truth_yes and parsed == "yes":
        c.tp += 1
    elif truth_yes:
        c.fn += 1
    elif parsed == "yes":
        c.fp += 1


def read_predictions(source: IO[str] | IO[bytes]) -> list[PredictionRecord]:
    """Parse a JSONL predictions file of ``{"id", "raw_response"}`` records."""
    if isinstance(source, (io.BufferedIOBase, io.RawIOBase)) or "b" in getattr(source, "mode", ""):
        source = io.TextIOWrapper(source, encoding="utf-8")
    out = []
    for line_no, line in enumerate(source, 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            raise MalformedRecord(line_no, str(e)) from None
        if not isinstance(obj, dict):
            raise SchemaViolation(line_no, "expected an object")
        pid, raw = obj.get("id"), obj.get("raw_response")
        if not isinstance(pid, str) or not isinstance(raw, str):
            raise SchemaViolation(line_no, "need string fields 'id' and 'raw_response'")
        out.append(PredictionRecord(pid, raw))
    return out


def write_report(table: MetricsTable, sink: IO[str]):
    json.dump(table.to_dict(), sink, indent=2, sort_keys=False)
    sink.write("\n")
