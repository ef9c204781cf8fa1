import json
import random
from math import comb

import pytest
from hypothesis import given, settings, strategies

from annular_webs.curves import (
    FlatTangle,
    Matching,
    MatchingError,
    TangleError,
    admissible_saddle_orders,
    closure_counts,
    compose_flat,
    count_matchings,
    dehn_twist,
    enumerate_matchings,
    glue,
    identity_tangle,
    matching_tangle,
    random_flat_tangle,
    reflect,
    saddle_sequence,
    tangle_matching,
    twist_tangle,
)
from annular_webs.tqft import Closure, Edge, cap, cup, saddle

MATCHINGS = {n: enumerate_matchings(n) for n in range(4)}


def matchings(n_max=3):
    return strategies.integers(0, n_max).flatmap(lambda n: strategies.sampled_from(MATCHINGS[n]))


@pytest.mark.parametrize("n", range(7))
def test_matching_count_is_central_binomial(n):
    ms = enumerate_matchings(n)
    assert len(ms) == len(set(ms)) == comb(2 * n, n) == count_matchings(n)


def test_small_matching_sets():
    assert enumerate_matchings(0) == [Matching(0, ())]
    assert len(enumerate_matchings(1)) == 2
    assert len(enumerate_matchings(2)) == 6


def test_enumeration_order_is_deterministic():
    assert [str(m) for m in enumerate_matchings(3)] == [str(m) for m in enumerate_matchings(3)]


def test_crossing_pairs_are_rejected():
    with pytest.raises(MatchingError):
        Matching(2, [(0, 2), (1, 3)])
    with pytest.raises(MatchingError):
        Matching(1, [(0, 1)], puncture=5)


@given(strategies.data())
def test_glue_examples(data):
    n = data.draw(strategies.integers(0, 3))
    a = data.draw(strategies.sampled_from(MATCHINGS[n]))
    cfg = glue(a, a)
    assert cfg.n_contractible == n and cfg.n_essential == 0


def test_glue_distinct_b1_gives_one_essential_circle():
    a, b = MATCHINGS[1]
    cfg = glue(a, b)
    assert cfg.n_essential == 1 and cfg.n_contractible == 0
    assert glue(Matching(0, ()), Matching(0, ())).circles == ()


@given(strategies.data())
def test_glue_is_symmetric_in_circle_data(data):
    n = data.draw(strategies.integers(0, 3))
    a = data.draw(strategies.sampled_from(MATCHINGS[n]))
    b = data.draw(strategies.sampled_from(MATCHINGS[n]))
    assert glue(a, b).data() == glue(b, a).data()
    ca, cb = glue(a, b), glue(b, a)
    assert ca.n_essential + ca.n_contractible == len(ca.circles)
    # the rectangle model of b-bar a agrees with the region tree
    assert closure_counts(a, b) == (ca.n_contractible, ca.n_essential)


@given(strategies.data())
def test_essential_count_is_at_most_n(data):
    n = data.draw(strategies.integers(1, 3))
    a = data.draw(strategies.sampled_from(MATCHINGS[n]))
    b = data.draw(strategies.sampled_from(MATCHINGS[n]))
    assert glue(a, b).n_essential <= n


def _apply_saddles(a, b, c, order):
    """Run the saddles of ``order`` on c-bar (b b-bar) a, returning the final point graph."""
    graph = Closure([cup(a), cap(b), cup(b), cap(c)]).graph
    kinds = []
    for arc in order:
        i, j = arc
        add = [Edge((1, i), (5, i), 0, (), ("v", i)), Edge((1, j), (5, j), 0, (), ("v", j))]
        _, graph, kind = saddle({}, graph, [(1, arc), (2, arc)], add)
        kinds.append(kind)
    return graph, kinds


def _circle_data(graph):
    return sorted((len(c.key) // 2, c.essential) for c in graph.circles())


def test_saddle_sequence_reaches_the_glued_configuration():
    for n in range(4):
        for a in MATCHINGS[n]:
            for b in MATCHINGS[n]:
                order = saddle_sequence(b)
                assert len(order) == n
                for c in MATCHINGS[n]:
                    graph, kinds = _apply_saddles(a, b, c, order)
                    assert _circle_data(graph) == glue(a, c).data()
                    assert set(kinds) <= {"merge", "split"}


@given(strategies.data())
def test_every_admissible_saddle_order_gives_the_same_result(data):
    n = data.draw(strategies.integers(1, 3))
    a, b, c = (data.draw(strategies.sampled_from(MATCHINGS[n])) for _ in range(3))
    results = {tuple(_circle_data(_apply_saddles(a, b, c, order)[0])) for order in admissible_saddle_orders(b)}
    assert results == {tuple(glue(a, c).data())}
    assert saddle_sequence(b) in admissible_saddle_orders(b)


@given(strategies.data())
def test_depth_is_the_length_of_the_nesting_chain(data):
    a = data.draw(matchings())
    for arc in a.pairs:
        above = [o for o in a.pairs if o != arc and a.interval(arc) < a.interval(o)]
        assert a.depth(arc) == len(above)
        # the arcs above form a chain
        for x in above:
            for y in above:
                assert a.interval(x) <= a.interval(y) or a.interval(y) <= a.interval(x)


@given(strategies.data())
def test_flip_is_an_involution_on_outermost_components(data):
    a = data.draw(matchings())
    for arc in a.pairs:
        if a.depth(arc) == 0:
            b = a.flip(arc)
            assert b != a or a.n == 0
            assert b.flip(arc) == a
        else:
            with pytest.raises(MatchingError):
                a.flip(arc)


def test_flip_in_b1_gives_the_other_matching():
    a, b = MATCHINGS[1]
    assert a.flip((0, 1)) == b and b.flip((0, 1)) == a


def test_swap_of_nested_components_unnests():
    for a in MATCHINGS[2]:
        for arc1, arc2, side in a.surgery_arcs():
            nested = a.interval(arc1) < a.interval(arc2) or a.interval(arc2) < a.interval(arc1)
            b = a.swap(arc1, arc2, side)
            if nested:
                x, y = b.pairs
                assert not (b.interval(x) < b.interval(y) or b.interval(y) < b.interval(x))


@given(strategies.data())
def test_swap_results_are_matchings(data):
    a = data.draw(matchings())
    for arc1, arc2, side in a.surgery_arcs():
        b = a.swap(arc1, arc2, side)
        assert b in MATCHINGS[a.n]


@given(strategies.data())
def test_rotation_and_reflection_preserve_gluing(data):
    n = data.draw(strategies.integers(1, 3))
    a, b = (data.draw(strategies.sampled_from(MATCHINGS[n])) for _ in range(2))
    k = data.draw(strategies.integers(0, 2 * n))
    assert glue(a.rotate(k), b.rotate(k)).data() == glue(a, b).data()
    assert glue(a.reflect(), b.reflect()).data() == glue(a, b).data()
    assert a.rotate(2 * n) == a and a.reflect().reflect() == a


@given(strategies.data())
def test_matching_json_round_trip(data):
    a = data.draw(matchings())
    text = json.dumps(a.to_json())
    assert Matching.from_json(text) == a


# flat tangles


def tangles(data, top=None, bottom=None):
    rng = random.Random(data.draw(strategies.integers(0, 10 ** 6)))
    top = data.draw(strategies.sampled_from([0, 2, 4])) if top is None else top
    bottom = data.draw(strategies.sampled_from([0, 2, 4])) if bottom is None else bottom
    return random_flat_tangle(rng, top, bottom)


@given(strategies.data())
def test_identity_is_neutral(data):
    t = tangles(data)
    assert compose_flat(identity_tangle(t.top // 2), t) == t
    assert compose_flat(t, identity_tangle(t.bottom // 2)) == t


@given(strategies.data())
def test_composition_is_associative(data):
    t1 = tangles(data)
    t2 = tangles(data, bottom=t1.top)
    t3 = tangles(data, bottom=t2.top)
    assert compose_flat(t3, compose_flat(t2, t1)) == compose_flat(compose_flat(t3, t2), t1)


@pytest.mark.parametrize("n", [1, 2])
def test_twist_and_inverse_twist_cancel(n):
    assert compose_flat(twist_tangle(n, -1), twist_tangle(n, 1)) == identity_tangle(n)
    assert compose_flat(twist_tangle(n, 1), twist_tangle(n, -1)) == identity_tangle(n)


@given(strategies.data())
def test_closed_components_wind_at_most_once(data):
    t1 = tangles(data)
    t2 = tangles(data, bottom=t1.top)
    t = compose_flat(t2, t1)
    assert t.check_windings()
    assert t.validate()


@given(strategies.data())
def test_closing_matchings_agrees_with_glue(data):
    n = data.draw(strategies.integers(0, 3))
    a, b = (data.draw(strategies.sampled_from(MATCHINGS[n])) for _ in range(2))
    t = compose_flat(reflect(matching_tangle(b)), matching_tangle(a))
    cfg = glue(a, b)
    assert (t.loops, len(t.essential_loops())) == (cfg.n_contractible, cfg.n_essential)
    assert tangle_matching(matching_tangle(a)) == a


def test_mismatched_composition_is_rejected():
    with pytest.raises(TangleError):
        compose_flat(identity_tangle(1), identity_tangle(2))


@given(strategies.data())
def test_tangle_json_round_trip(data):
    t = tangles(data)
    if data.draw(strategies.booleans()) and t.top:
        t = dehn_twist(t, data.draw(strategies.sampled_from([-1, 1])))
    assert FlatTangle.from_json(json.dumps(t.to_json())) == t
