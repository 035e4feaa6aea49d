"""Parsing of external temporal annotations into canonical per-video form.

Two input shapes are supported:

* segment files (one ``video_id, start, end, label`` record per line, as used
  by action segmentation datasets), described by a :class:`SegmentSchema`;
* scene-graph records (JSON lines with ``video_id``, ``frame``, optional
  ``actor`` and ``action``), as exported from dense scene-graph annotations.

Everything downstream works on integer steps. Second-based segment files are
converted with ``SegmentSchema.resolution`` steps per second, rounding the
start down and the end up.
"""

from __future__ import annotations

import json
import math
import re
from collections import defaultdict
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator

from .errors import EmptyInput, EmptyLabel, MalformedRecord

DEFAULT_ACTOR = "person"

_SEPARATORS = re.compile(r"[\s_]+")


def normalize_label(raw: str) -> str:
    """Lowercase ``raw`` and collapse underscores/whitespace runs to one space.

    >>> normalize_label("  Add  Kimchi ")
    'add kimchi'
    """
    if raw is None:
        raise EmptyLabel("label is missing")
    text = _SEPARATORS.sub(" ", raw).strip().lower()
    if not text:
        raise EmptyLabel(f"label {raw!r} is empty after normalization")
    return text


@dataclass(frozen=True, order=True)
class ActionPhrase:
    actor: str
    verb_phrase: str

    def __post_init__(self):
        if not self.actor or self.actor != self.actor.strip():
            raise ValueError(f"invalid actor {self.actor!r}")
        if "_" in self.verb_phrase or self.verb_phrase != self.verb_phrase.strip() or not self.verb_phrase:
            raise ValueError(f"verb phrase {self.verb_phrase!r} is not normalized")

    @classmethod
    def of(cls, label: str, actor: str | None = None) -> "ActionPhrase":
        actor = (actor or "").strip() or DEFAULT_ACTOR
        return cls(actor, normalize_label(label))

    def __str__(self):
        if self.actor == DEFAULT_ACTOR:
            return self.verb_phrase
        return f"{self.actor}: {self.verb_phrase}"


@dataclass(frozen=True)
class RawSegmentRecord:
    video_id: str
    start: int
    end: int
    action_label: str
    actor: str | None = None


@dataclass(frozen=True)
class SceneGraphRecord:
    video_id: str
    frame: int
    action_label: str
    actor: str | None = None


def _merge(spans: Iterable[tuple[int, int]]) -> list[tuple[int, int]]:
    """Merge overlapping or touching half-open spans."""
    merged: list[list[int]] = []
    for start, end in sorted(spans):
        if merged and start <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], end)
        else:
            merged.append([start, end])
    return [(s, e) for s, e in merged]


@dataclass(frozen=True)
class VideoAnnotation:
    """All action intervals of one video, in steps.

    Intervals of the same :class:`ActionPhrase` are merged on construction, so
    they never overlap or touch. Use :meth:`from_spans` to build one from raw
    (possibly overlapping) spans.
    """

    video_id: str
    num_steps: int
    intervals: tuple[tuple[ActionPhrase, int, int], ...]
    source_dataset: str = "custom"

    def __post_init__(self):
        if self.num_steps <= 0:
            raise ValueError("num_steps must be positive")
        by_action: dict[ActionPhrase, list[tuple[int, int]]] = defaultdict(list)
        for action, start, end in self.intervals:
            if not 0 <= start < end <= self.num_steps:
                raise ValueError(f"interval ({start}, {end}) outside [0, {self.num_steps}]")
            by_action[action].append((start, end))
        canonical = tuple(
            (action, s, e) for action in sorted(by_action) for s, e in _merge(by_action[action])
        )
        object.__setattr__(self, "intervals", canonical)

    @classmethod
    def from_spans(cls, video_id, spans, num_steps=None, source_dataset="custom"):
        """``spans`` is an iterable of ``(action, start, end)``; ``action`` may be a label."""
        spans = [
            (a if isinstance(a, ActionPhrase) else ActionPhrase.of(a), int(s), int(e)) for a, s, e in spans
        ]
        if num_steps is None:
            num_steps = max((e for _, _, e in spans), default=0)
        return cls(video_id, num_steps, tuple(spans), source_dataset)

    @property
    def actions(self) -> list[ActionPhrase]:
        return sorted({a for a, _, _ in self.intervals})


@dataclass(frozen=True)
class SegmentSchema:
    """Describes a delimited segment file.

    ``delimiter`` of ``None`` splits on any whitespace. ``columns`` names the
    fields in file order; it must contain ``video_id``, ``start``, ``end`` and
    ``action`` and may contain ``actor``. Unknown column names are ignored.
    """

    delimiter: str | None = "\t"
    columns: tuple[str, ...] = ("video_id", "start", "end", "action")
    time_unit: str = "step"  # or "second"
    resolution: int = 10
    has_header: bool = False
    ignore_labels: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        missing = {"video_id", "start", "end", "action"} - set(self.columns)
        if missing:
            raise ValueError(f"schema is missing columns {sorted(missing)}")
        if self.time_unit not in ("step", "second"):
            raise ValueError(f"unknown time unit {self.time_unit!r}")
        if self.resolution <= 0:
            raise ValueError("resolution must be positive")


def _to_steps(text: str, schema: SegmentSchema, line_no: int, is_end: bool) -> int:
    try:
        if schema.time_unit == "step":
            return int(text)
        value = float(text) * schema.resolution
    except ValueError:
        raise MalformedRecord(line_no, f"non-numeric bound {text!r}") from None
    if not math.isfinite(value):
        raise MalformedRecord(line_no, f"non-finite bound {text!r}")
    return math.ceil(value) if is_end else math.floor(value)


def read_segment_records(reader: IO[str], schema: SegmentSchema = SegmentSchema()) -> Iterator[RawSegmentRecord]:
    """Yield validated :class:`RawSegmentRecord` objects from a segment stream."""
    ncols = len(schema.columns)
    last = schema.columns.index("action") == ncols - 1
    for line_no, line in enumerate(reader, start=1):
        if schema.has_header and line_no == 1:
            continue
        line = line.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        # the label may contain the delimiter when it is the final column
        maxsplit = ncols - 1 if last else -1
        parts = line.split(schema.delimiter, maxsplit) if schema.delimiter else line.split(None, maxsplit)
        if len(parts) < ncols:
            raise MalformedRecord(line_no, f"expected {ncols} fields, got {len(parts)}")
        row = dict(zip(schema.columns, (p.strip() for p in parts)))
        start = _to_steps(row["start"], schema, line_no, is_end=False)
        end = _to_steps(row["end"], schema, line_no, is_end=True)
        if start < 0 or start >= end:
            raise MalformedRecord(line_no, f"start {row['start']} must be below end {row['end']}")
        if not row["video_id"]:
            raise MalformedRecord(line_no, "empty video id")
        if not row["action"].strip():
            raise MalformedRecord(line_no, "empty action label")
        yield RawSegmentRecord(row["video_id"], start, end, row["action"], row.get("actor") or None)


def parse_segment_annotations(
    reader: IO[str], schema: SegmentSchema = SegmentSchema(), source_dataset: str = "custom"
) -> list[VideoAnnotation]:
    """Parse a segment stream into one :class:`VideoAnnotation` per video id.

    Videos are returned sorted by id; ``num_steps`` is the largest end seen
    for the video.
    """
    ignored = {normalize_label(x) for x in schema.ignore_labels}
    spans: dict[str, list[tuple[ActionPhrase, int, int]]] = defaultdict(list)
    extent: dict[str, int] = defaultdict(int)
    seen = False
    for rec in read_segment_records(reader, schema):
        seen = True
        extent[rec.video_id] = max(extent[rec.video_id], rec.end)
        action = ActionPhrase.of(rec.action_label, rec.actor)
        if action.verb_phrase in ignored:
            continue
        spans[rec.video_id].append((action, rec.start, rec.end))
    if not seen:
        raise EmptyInput("no segment records in input")
    return [
        VideoAnnotation(vid, extent[vid], tuple(spans[vid]), source_dataset) for vid in sorted(extent)
    ]


def read_scene_graph_records(reader: IO[str]) -> Iterator[SceneGraphRecord]:
    for line_no, line in enumerate(reader, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            video_id = str(obj["video_id"])
            frame = obj["frame"]
            label = obj["action"]
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise MalformedRecord(line_no, f"bad record: {exc}") from None
        if isinstance(frame, bool) or not isinstance(frame, int):
            raise MalformedRecord(line_no, f"frame must be an integer, got {frame!r}")
        if frame < 0:
            raise MalformedRecord(line_no, f"negative frame {frame}")
        if not isinstance(label, str) or not label.strip():
            raise MalformedRecord(line_no, "empty action label")
        actor = obj.get("actor")
        yield SceneGraphRecord(video_id, frame, label, actor if isinstance(actor, str) else None)


def parse_scene_graph_annotations(
    reader: IO[str], source_dataset: str = "custom", retain_annotated_only: bool = False
) -> list[VideoAnnotation]:
    """Compact per-frame scene-graph records into intervals.

    Runs of consecutive frames of the same (actor, action) become one
    interval ``[first, last + 1)``. Frames without any record contribute no
    action. With ``retain_annotated_only`` the frames that carry no record at
    all are removed and the remaining ones re-indexed ``0..k-1``.
    """
    frames: dict[str, dict[ActionPhrase, set[int]]] = defaultdict(lambda: defaultdict(set))
    seen = False
    for rec in read_scene_graph_records(reader):
        seen = True
        frames[rec.video_id][ActionPhrase.of(rec.action_label, rec.actor)].add(rec.frame)
    if not seen:
        raise EmptyInput("no scene-graph records in input")

    out = []
    for vid in sorted(frames):
        per_action = frames[vid]
        if retain_annotated_only:
            kept = sorted(set().union(*per_action.values()))
            index = {f: i for i, f in enumerate(kept)}
            per_action = {a: {index[f] for f in fs} for a, fs in per_action.items()}
        spans = []
        for action, fs in per_action.items():
            for start, end in _runs(sorted(fs)):
                spans.append((action, start, end))
        num_steps = max(e for _, _, e in spans)
        out.append(VideoAnnotation(vid, num_steps, tuple(spans), source_dataset))
    return out


def _runs(sorted_frames: list[int]) -> Iterator[tuple[int, int]]:
    start = prev = sorted_frames[0]
    for f in sorted_frames[1:]:
        if f != prev + 1:
            yield start, prev + 1
            start = f
        prev = f
    yield start, prev + 1


def format_segment_annotations(annotations: Iterable[VideoAnnotation], schema: SegmentSchema = SegmentSchema()) -> str:
    """Inverse of :func:`parse_segment_annotations` for step-unit schemas."""
    if schema.time_unit != "step":
        raise ValueError("only step-unit schemas can be written")
    delim = schema.delimiter or "\t"
    lines = []
    if schema.has_header:
        lines.append(delim.join(schema.columns))
    for ann in annotations:
        for action, start, end in sorted(ann.intervals, key=lambda iv: (iv[1], iv[2], iv[0])):
            row = {
                "video_id": ann.video_id,
                "start": str(start),
                "end": str(end),
                "action": action.verb_phrase.replace(" ", "_"),
                "actor": action.actor,
            }
            lines.append(delim.join(row.get(col, "") for col in schema.columns))
    return "".join(line + "\n" for line in lines)


def format_scene_graph_records(annotations: Iterable[VideoAnnotation]) -> str:
    """Expand annotations back into one JSON record per (frame, actor, action)."""
    lines = []
    for ann in annotations:
        for action, start, end in ann.intervals:
            for frame in range(start, end):
                rec = {"video_id": ann.video_id, "frame": frame, "actor": action.actor, "action": action.verb_phrase}
                lines.append(json.dumps(rec))
    return "".join(line + "\n" for line in lines)


@dataclass(frozen=True)
class ActionVocabulary:
    dataset: str
    actions: tuple[ActionPhrase, ...]
    verb_forms: dict = field(default_factory=dict, compare=False, hash=False)

    def __len__(self):
        return len(self.actions)

    def __contains__(self, action):
        return action in set(self.actions)


def load_action_vocabulary(annotations: list[VideoAnnotation], dataset: str | None = None, lexicon=None) -> ActionVocabulary:
    """Union of all actions across ``annotations`` in lexicographic order.

    ``verb_forms`` maps each action to its :class:`~temporal_qa.language.VerbLexiconEntry`.
    """
    from .language import default_lexicon, lexicon_entry

    if not annotations:
        raise EmptyInput("no annotations to build a vocabulary from")
    actions = tuple(sorted({a for ann in annotations for a, _, _ in ann.intervals}))
    if dataset is None:
        dataset = annotations[0].source_dataset
    lexicon = default_lexicon() if lexicon is None else lexicon
    forms = {a: lexicon_entry(a.verb_phrase, lexicon) for a in actions}
    return ActionVocabulary(dataset, actions, forms)
