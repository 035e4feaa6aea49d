import pytest

from temporal_qa.annotations import ActionPhrase, VideoAnnotation
from temporal_qa.timeline import build_instance_states


def A(label, actor=None):
    return ActionPhrase.of(label, actor)


def make_timeline(n, video_id="v", **spans):
    """``make_timeline(8, x=[(0, 4)], y=[(4, 8)])``; keyword names become action labels."""
    flat = [(A(name), s, e) for name, ss in spans.items() for s, e in ss]
    return build_instance_states(VideoAnnotation(video_id, n, tuple(flat)))


@pytest.fixture
def tl():
    return make_timeline
