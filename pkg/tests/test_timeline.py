import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from temporal_qa.annotations import VideoAnnotation
from temporal_qa.timeline import (
    Interval,
    PairVerdict,
    build_instance_states,
    maximal_intervals,
    sanitize_pair,
    video_action_set,
)

from conftest import A, make_timeline


def test_active_set_is_containment():
    tl = make_timeline(6, x=[(0, 4)], y=[(2, 6)])
    assert tl.active(3) == {A("x"), A("y")}
    assert tl.active(5) == {A("y")}


def test_background_action_holds_everywhere():
    tl = make_timeline(12, hold_phone=[(0, 12)])
    assert all(A("hold phone") in tl.active(t) for t in range(12))


def test_no_intervals_means_empty_states():
    tl = build_instance_states(VideoAnnotation("v", 5, ()))
    assert all(tl.active(t) == frozenset() for t in range(5))
    assert video_action_set(tl) == ()


def test_maximal_intervals():
    tl = make_timeline(10, x=[(0, 3), (5, 7)], y=[(0, 10)])
    assert [(i.start, i.end) for i in maximal_intervals(tl, A("x"))] == [(0, 3), (5, 7)]
    assert [(i.start, i.end) for i in maximal_intervals(tl, A("y"))] == [(0, 10)]
    assert maximal_intervals(tl, A("absent")) == []


def test_video_action_set_counts_once():
    tl = make_timeline(10, x=[(0, 2), (6, 8)], y=[(3, 4)])
    assert video_action_set(tl) == (A("x"), A("y"))


def test_interval_rejects_empty():
    with pytest.raises(ValueError):
        Interval(3, 3, A("x"))


def test_render_bars():
    text = make_timeline(4, x=[(0, 2)], yy=[(2, 4)]).render()
    assert text.splitlines()[1:] == ["x  |##..|", "yy |..##|"]


@pytest.mark.parametrize(
    "xs,ys,expected",
    [
        ([(0, 10)], [(9, 20)], PairVerdict.AMBIGUOUS_OVERLAP),
        ([(0, 10)], [(12, 22)], PairVerdict.OK),  # gap 2 equals the limit
        ([(0, 10)], [(11, 22)], PairVerdict.AMBIGUOUS_GAP),
        ([(0, 10)], [(40, 50)], PairVerdict.OK),
        ([(0, 10)], [(10, 20)], PairVerdict.OK),  # touching
        ([(0, 10)], [(0, 10)], PairVerdict.OK),  # identical
        ([(0, 10)], [(5, 20)], PairVerdict.OK),  # overlap 5 of 10
    ],
)
def test_sanitize_pair_examples(xs, ys, expected):
    assert sanitize_pair(xs, ys, 0.2) is expected


def test_gap_only_between_adjacent_occurrences():
    # the 5-step gap between x=(0,20) and y=(25,45) is below 0.5*20, but x=(21,25) sits between them
    assert sanitize_pair([(0, 20), (21, 25)], [(25, 45)], 0.5) is PairVerdict.OK
    assert sanitize_pair([(0, 20)], [(25, 45)], 0.5) is PairVerdict.AMBIGUOUS_GAP


def test_theta_zero_disables():
    assert sanitize_pair([(0, 10)], [(9, 20)], 0.0) is PairVerdict.OK


def test_verdict_reason():
    assert PairVerdict.OK.usable and not PairVerdict.AMBIGUOUS_GAP.usable
    assert "gap" in PairVerdict.AMBIGUOUS_GAP.reason


span_lists = st.lists(
    st.tuples(st.integers(0, 60), st.integers(1, 15)).map(lambda t: (t[0], t[0] + t[1])), min_size=1, max_size=4
)


def _merged(spans):
    row = np.zeros(80, dtype=bool)
    for s, e in spans:
        row[s:e] = True
    tl = make_timeline(80, x=spans)
    return [(i.start, i.end) for i in maximal_intervals(tl, A("x"))], row


@settings(max_examples=200, deadline=None)
@given(span_lists, span_lists, st.sampled_from([0.0, 0.1, 0.2, 0.5]))
def test_sanitize_is_symmetric(xs, ys, theta):
    xs, _ = _merged(xs)
    ys, _ = _merged(ys)
    assert sanitize_pair(xs, ys, theta) is sanitize_pair(ys, xs, theta)


@settings(max_examples=200, deadline=None)
@given(span_lists)
def test_maximal_intervals_partition_the_row(spans):
    merged, row = _merged(spans)
    rebuilt = np.zeros(80, dtype=bool)
    for s, e in merged:
        assert not rebuilt[s:e].any()
        rebuilt[s:e] = True
    assert (rebuilt == row).all()
    # maximal: neighbours of every interval are inactive
    for s, e in merged:
        assert s == 0 or not row[s - 1]
        assert e == 80 or not row[e]
