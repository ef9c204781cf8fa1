import pytest
from hypothesis import given, strategies

from annular_webs.sl3_paths import (
    PathError,
    all_sign_strings,
    count_closed_paths,
    enumerate_states,
    honeycomb_count,
    hull_count,
    is_admissible,
    negate_pair,
    parse_signs,
    parse_states,
    path_of,
    render_signs,
    render_states,
    rotate_pair,
    signs_admissible,
)
from oracles import closed_path_count


def sign_strings(max_len=6):
    return strategies.lists(strategies.sampled_from("+-"), max_size=max_len).map(tuple)


def test_admissibility_examples():
    assert is_admissible(("+", "-"), (1, -1))
    assert not is_admissible(("+", "+", "+"), (0, 0, 0))
    assert sum((0, 0, 0)) == 0
    assert is_admissible((), ())
    assert path_of((), ()) == [(0, 0)]


def test_length_mismatch_is_rejected():
    with pytest.raises(PathError):
        path_of(("+", "-"), (1,))


def test_enumeration_examples():
    assert enumerate_states("+-") == [(-1, 1), (0, 0), (1, -1)]
    assert enumerate_states("+") == []
    assert len(enumerate_states("+++")) == 6


def test_count_examples():
    assert count_closed_paths("+-") == 3
    assert count_closed_paths("+-+-") == 15
    assert count_closed_paths("+++") == 6
    assert [honeycomb_count(n) for n in range(4)] == [1, 3, 15, 93]


@pytest.mark.parametrize("length", range(7))
def test_count_equals_enumeration_equals_dp(length):
    for s in all_sign_strings(length):
        states = enumerate_states(s)
        assert len(states) == len(set(states))
        assert count_closed_paths(s) == len(states) == closed_path_count(s)
        assert (len(states) > 0) == signs_admissible(s)
        for j in states:
            assert is_admissible(s, j) and sum(j) == 0


def test_honeycomb_agrees_with_hull_sum():
    for n in range(8):
        assert hull_count(n, n) == honeycomb_count(n)


@given(strategies.data())
def test_adjacent_transposition_preserves_counts(data):
    s = data.draw(sign_strings())
    if len(s) < 2:
        return
    i = data.draw(strategies.integers(0, len(s) - 2))
    t = s[:i] + (s[i + 1], s[i]) + s[i + 2:]
    assert len(enumerate_states(s)) == len(enumerate_states(t))


@given(strategies.data())
def test_orientation_reversal(data):
    s = data.draw(sign_strings())
    neg, _ = negate_pair(s, (0,) * len(s))
    assert count_closed_paths(s) == count_closed_paths(neg)
    for j in enumerate_states(s):
        assert is_admissible(*negate_pair(s, j))


@given(strategies.data())
def test_basepoint_independence(data):
    s = data.draw(sign_strings())
    states = enumerate_states(s)
    if not states:
        return
    j = data.draw(strategies.sampled_from(states))
    k = data.draw(strategies.integers(0, len(s)))
    assert is_admissible(*rotate_pair(s, j, k))
    rotated = {rotate_pair(s, x, k)[1] for x in states}
    assert rotated == set(enumerate_states(rotate_pair(s, j, k)[0]))


@given(strategies.data())
def test_parse_render_round_trip(data):
    s = data.draw(sign_strings())
    assert parse_signs(render_signs(s)) == s
    j = tuple(data.draw(strategies.lists(strategies.sampled_from([-1, 0, 1]), max_size=6)))
    assert parse_states(render_states(j)) == j


def test_bad_input_is_rejected():
    with pytest.raises(PathError):
        parse_signs("+x")
    with pytest.raises(PathError):
        parse_states("2,0")
