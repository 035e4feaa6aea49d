import random
from itertools import permutations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from temporal_qa.errors import IdenticalActions, WrongArity
from temporal_qa.logic import (
    BINARY,
    COMPOUND,
    TemporalCategory as C,
    Verdict,
    classify_tuples,
    enumerate_positives,
    eval_binary,
    eval_compound,
    eval_unary,
    evaluate,
)
from temporal_qa.oracle import brute_force_eval, random_timeline

from conftest import A, make_timeline

X, Y, Z = A("x"), A("y"), A("z")
T, F, EX = Verdict.TRUE, Verdict.FALSE, Verdict.EXCLUDED


def test_category_table():
    assert len(C) == 16
    assert [c.label for c in C if c.complexity == 5] == ["StrictABC", "LooseABC", "AAlwaysBeforeBC"]
    assert C.from_label("ImmediateNext") is C.IMMEDIATE_NEXT
    assert C.from_label("CO_OCCUR") is C.CO_OCCUR


def test_unary():
    tl = make_timeline(10, hold_phone=[(0, 10)], x=[(3, 4)])
    assert eval_unary(C.ALWAYS, tl, A("hold phone"))
    assert eval_unary(C.EVENTUAL, tl, X) and not eval_unary(C.ALWAYS, tl, X)
    assert not eval_unary(C.EVENTUAL, tl, Y)


def test_sequential_pair():
    tl = make_timeline(8, x=[(0, 4)], y=[(4, 8)])
    assert eval_binary(C.BEFORE, tl, X, Y) is T
    assert eval_binary(C.IMMEDIATE_NEXT, tl, Y, X) is T
    assert eval_binary(C.IMMEDIATE_NEXT, tl, X, Y) is F
    assert eval_binary(C.DISJOINT, tl, X, Y) is T
    assert eval_binary(C.CO_OCCUR, tl, X, Y) is F
    assert eval_binary(C.ALWAYS_BEFORE, tl, X, Y) is T
    assert eval_binary(C.UNTIL, tl, X, Y) is T
    assert eval_binary(C.NEXT, tl, Y, X) is T
    assert eval_binary(C.ALWAYS_NEXT, tl, Y, X) is T


def test_repeated_action_breaks_always_before():
    tl = make_timeline(8, x=[(0, 3), (6, 8)], y=[(4, 5)])
    assert eval_binary(C.ALWAYS_BEFORE, tl, X, Y) is F
    assert eval_binary(C.BEFORE, tl, X, Y) is T


def test_implication_from_background():
    tl = make_timeline(8, x=[(0, 8)], y=[(2, 5)])
    assert eval_binary(C.IMPLIES, tl, Y, X) is T
    assert eval_binary(C.IMPLIES, tl, X, Y) is F
    assert eval_binary(C.ALWAYS_CO_OCCUR, tl, X, Y) is F
    assert eval_binary(C.CO_OCCUR, tl, X, Y) is T


def test_since_needs_x_to_continue_after_last_y():
    tl = make_timeline(10, x=[(3, 10)], y=[(0, 5)])
    assert eval_binary(C.SINCE, tl, X, Y) is T
    # tiling segments: x starts right after y, so x was not already active at y's last step
    tl = make_timeline(10, x=[(5, 10)], y=[(0, 5)])
    assert eval_binary(C.SINCE, tl, X, Y) is F


def test_until_needs_y_after_step_zero():
    tl = make_timeline(8, x=[(0, 8)], y=[(0, 3)])
    assert eval_binary(C.UNTIL, tl, X, Y) is F


def test_immediate_next_tolerance():
    tl = make_timeline(20, x=[(0, 5)], y=[(7, 12)])
    assert eval_binary(C.IMMEDIATE_NEXT, tl, Y, X, theta=0) is F
    assert eval_binary(C.IMMEDIATE_NEXT, tl, Y, X, theta=0, tau_adj=3) is T


def test_compounds():
    tl = make_timeline(8, a=[(0, 2)], b=[(3, 5)], c=[(6, 8)])
    a, b, c = A("a"), A("b"), A("c")
    for cat in COMPOUND:
        assert eval_compound(cat, tl, a, b, c) is T
    tl = make_timeline(8, a=[(0, 2)], b=[(6, 8)], c=[(3, 5)])
    assert eval_compound(C.STRICT_ABC, tl, a, b, c) is F
    assert eval_compound(C.A_ALWAYS_BEFORE_BC, tl, a, b, c) is T
    assert eval_compound(C.STRICT_ABC, tl, a, b, A("missing")) is F


def test_ambiguous_pair_is_excluded():
    tl = make_timeline(30, x=[(0, 10)], y=[(9, 20)], z=[(25, 30)])
    assert eval_binary(C.BEFORE, tl, X, Y) is EX
    assert eval_compound(C.LOOSE_ABC, tl, X, Z, Y) is EX
    assert eval_binary(C.BEFORE, tl, X, Z) is T
    assert eval_binary(C.CO_OCCUR, tl, X, Y, theta=0) is T


def test_arity_errors():
    tl = make_timeline(4, x=[(0, 2)], y=[(2, 4)])
    with pytest.raises(WrongArity):
        eval_unary(C.BEFORE, tl, X)
    with pytest.raises(WrongArity):
        evaluate(C.BEFORE, tl, (X,))
    with pytest.raises(IdenticalActions):
        eval_binary(C.BEFORE, tl, X, X)


def test_enumerate_positives():
    assert enumerate_positives(make_timeline(4, x=[(0, 4)]), C.BEFORE) == []
    tl = make_timeline(8, x=[(0, 4)], y=[(4, 8)])
    assert enumerate_positives(tl, C.BEFORE) == [(X, Y)]
    tiles = make_timeline(12, x=[(0, 4)], y=[(4, 8)], z=[(8, 12)])
    assert enumerate_positives(tiles, C.CO_OCCUR) == []
    assert enumerate_positives(tiles, C.LOOSE_ABC) == [(X, Y, Z)]


def test_classify_reports_excluded():
    tl = make_timeline(30, x=[(0, 10)], y=[(9, 20)], z=[(25, 30)])
    positives, excluded = classify_tuples(tl, C.BEFORE)
    assert excluded == {(X, Y), (Y, X)}
    assert (X, Z) in positives


def test_shared_pair_cache_gives_same_result():
    rng = random.Random(5)
    cache = {}
    for _ in range(30):
        tl = random_timeline(rng)
        for cat in BINARY + COMPOUND:
            assert classify_tuples(tl, cat, pair_cache=cache) == classify_tuples(tl, cat)
        cache.clear()


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from([0.0, 0.2]), st.integers(1, 3))
def test_fast_path_matches_brute_force(seed, theta, tau_adj):
    tl = random_timeline(random.Random(seed), max_actions=4, max_steps=30)
    for cat in C:
        for tup in permutations(tl.actions, cat.arity):
            v = evaluate(cat, tl, tup, theta, tau_adj)
            if v is not EX:
                assert (v is T) == brute_force_eval(cat, tl, tup, tau_adj), (cat, tup)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32))
def test_classify_matches_evaluate(seed):
    tl = random_timeline(random.Random(seed), max_actions=4, max_steps=30)
    for cat in BINARY + COMPOUND:
        positives, excluded = classify_tuples(tl, cat)
        for tup in permutations(tl.actions, cat.arity):
            v = evaluate(cat, tl, tup)
            assert (tup in excluded) == (v is EX)
            assert (tup in positives) == (v is T)


IMPLICATIONS = [
    (C.ALWAYS, C.EVENTUAL),
    (C.ALWAYS_BEFORE, C.BEFORE),
    (C.ALWAYS_NEXT, C.NEXT),
    (C.ALWAYS_CO_OCCUR, C.CO_OCCUR),
    (C.ALWAYS_CO_OCCUR, C.IMPLIES),
    (C.STRICT_ABC, C.LOOSE_ABC),
    (C.STRICT_ABC, C.A_ALWAYS_BEFORE_BC),
]


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32))
def test_monotone_implications(seed):
    tl = random_timeline(random.Random(seed), max_actions=4, max_steps=40)
    for strong, weak in IMPLICATIONS:
        for tup in permutations(tl.actions, strong.arity):
            if evaluate(strong, tl, tup) is T:
                assert evaluate(weak, tl, tup) is T, (strong, weak, tup)
    for tup in permutations(tl.actions, 2):
        d, co = evaluate(C.DISJOINT, tl, tup), evaluate(C.CO_OCCUR, tl, tup)
        if d is not EX:
            assert (d is T) == (co is F)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32))
def test_converse_relations(seed):
    tl = random_timeline(random.Random(seed), max_actions=4, max_steps=40)
    for x, y in permutations(tl.actions, 2):
        assert evaluate(C.ALWAYS_BEFORE, tl, (x, y)) is evaluate(C.ALWAYS_NEXT, tl, (y, x))
        assert evaluate(C.CO_OCCUR, tl, (x, y)) is evaluate(C.CO_OCCUR, tl, (y, x))
