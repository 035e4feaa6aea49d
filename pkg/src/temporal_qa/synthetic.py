"""Synthetic corpora standing in for real annotation files in tests and demos.

Two flavours mirror the two families of source data:

* :func:`overlapping_corpus` resembles scene-graph data: a background action
  spans each whole video, sequential actions sit on top of it, and some
  actions overlap or co-occur exactly.
* :func:`single_label_corpus` resembles action segmentation data: every step
  carries exactly one label and segments tile the video.

Boundaries are kept clear of the sanitization threshold: neighbouring
segments either touch or are separated by a wide gap.
"""

from __future__ import annotations

import random

from .annotations import ActionPhrase, VideoAnnotation

VERBS = (
    "open door", "close door", "take cup", "pour milk", "stir cereals", "eat sandwich",
    "wash dish", "wipe table", "read book", "put bag", "fold towel", "throw paper",
    "drink water", "sit on chair", "stand up", "turn light", "watch television", "lift box",
    "crack egg", "fry egg", "cut bun", "spread butter", "peel orange", "squeeze lemon",
    "add salt", "mix batter", "whisk egg", "sand shelf", "tidy closet", "write note",
)
BACKGROUND = ("hold phone", "wear apron", "sit on sofa")
TWINS = (("look at laptop", "type on laptop"), ("hold broom", "sweep floor"), ("hold cup", "sip coffee"))


def overlapping_video(rng: random.Random, video_id: str, dataset: str = "synthetic") -> VideoAnnotation:
    """One video with a background action, 4-6 sequential actions and overlaps."""
    actions = rng.sample(VERBS, rng.randint(4, 6))
    spans = []
    t = rng.randint(4, 8)  # leave room so the background leads the first action
    for a in actions:
        length = rng.randint(6, 14)
        spans.append((a, t, t + length))
        t += length + (0 if rng.random() < 0.5 else rng.randint(8, 12))
    n = t + rng.randint(6, 10)

    # long overlap with one sequential action
    host = rng.randrange(len(spans))
    _, hs, he = spans[host]
    spans.append((rng.choice([v for v in VERBS if v not in actions]), hs + (he - hs) // 3, he + 4))

    # a pair that always co-occurs
    a1, a2 = rng.choice(TWINS)
    s = rng.randint(0, n - 8)
    spans += [(a1, s, s + 6), (a2, s, s + 6)]

    spans.append((rng.choice(BACKGROUND), 0, n))
    return VideoAnnotation.from_spans(video_id, spans, num_steps=n, source_dataset=dataset)


def overlapping_corpus(n_videos: int, seed: int = 0, dataset: str = "synthetic") -> list[VideoAnnotation]:
    rng = random.Random(seed)
    return [overlapping_video(rng, f"vid{i:05d}", dataset) for i in range(n_videos)]


def single_label_corpus(n_videos: int, seed: int = 0, dataset: str = "segments") -> list[VideoAnnotation]:
    """Videos tiled by 3-7 consecutive segments; at least two distinct labels each."""
    rng = random.Random(seed)
    out = []
    for i in range(n_videos):
        labels = rng.sample(VERBS, rng.randint(3, 7))
        spans, t = [], 0
        for a in labels:
            length = rng.randint(5, 20)
            spans.append((a, t, t + length))
            t += length
        out.append(VideoAnnotation.from_spans(f"seg{i:05d}", spans, num_steps=t, source_dataset=dataset))
    return out


def person(label: str) -> ActionPhrase:
    return ActionPhrase.of(label)
