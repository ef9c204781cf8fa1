import json
import random

import pytest
from hypothesis import given, settings, strategies

from annular_webs.cli import admissible_pairs, random_elliptic_webs
from annular_webs.rings import LaurentQA
from annular_webs.sl3_paths import all_sign_strings, count_closed_paths, enumerate_states, signs_admissible
from annular_webs.sl3_webs import (
    CylinderBuilder,
    EllipticError,
    UnsupportedRelation,
    Web,
    WebError,
    canonical_flow,
    canonical_form,
    enumerate_webs,
    euler_counts,
    face_depths,
    grow,
    is_nonelliptic,
    isomorphic,
    min_cut_states,
    order_independence_check,
    outer_small_faces,
    random_web,
    reduce_web,
)
from oracles import tait_colorings

PAIRS = list(admissible_pairs(5))
ONE = LaurentQA.monomial(0, 0)
QINT2 = LaurentQA.monomial(1, 0) + LaurentQA.monomial(-1, 0)
QINT3 = LaurentQA.monomial(2, 0) + ONE + LaurentQA.monomial(-2, 0)


def build(signs, moves):
    b = CylinderBuilder(tuple(signs))
    for name, *args in moves:
        getattr(b, name + "_move")(*args)
    return b.finish()


def pairs():
    return strategies.sampled_from(PAIRS)


def test_growth_examples():
    u = grow("+-", (1, -1))
    assert u.inner_vertices() == [] and min_cut_states(u) == (("+", "-"), (1, -1))
    h = grow("+-", (0, 0))
    assert len(h.inner_vertices()) == 2
    worked = grow("+++", (-1, 0, 1))
    assert len(worked.inner_vertices()) == 3
    assert min_cut_states(worked) == (("+", "+", "+"), (-1, 0, 1))


def test_inadmissible_input_is_rejected():
    with pytest.raises(WebError):
        grow("+-", (1, 0))
    with pytest.raises(WebError):
        grow("+++", (0, 0, 0))


def test_face_depths_examples():
    depths = sorted((f.depth, f.puncture) for f in face_depths(grow("+-", (1, -1))))
    assert depths == [(0, True), (1, False)]
    assert [f.depth for f in face_depths(Web())] == [0]
    # the boundary faces of the worked example sit at depths 2, 1, 1
    from annular_webs.sl3_webs import _boundary_faces
    w = grow("+++", (-1, 0, 1))
    info = face_depths(w)
    assert [info[f].depth for f in _boundary_faces(w)] == [2, 1, 1]


def test_canonical_flow_examples():
    assert canonical_flow(grow("+-", (1, -1))) == set()
    w = grow("+++", (-1, 0, 1))
    # one balanced edge per vertex; here the three vertices share two edges
    assert len(canonical_flow(w)) == 2


def test_min_cut_of_empty_web():
    assert min_cut_states(Web()) == ((), ())


@pytest.mark.parametrize("signs,states", PAIRS)
def test_min_cut_inverts_growth(signs, states):
    w = grow(signs, states)
    assert is_nonelliptic(w) == (True, None)
    assert min_cut_states(w) == (signs, states)
    # the flow check passes on every grown web
    canonical_flow(w)


@settings(deadline=None, max_examples=60)
@given(strategies.data())
def test_growth_inverts_min_cut(data):
    signs, states = data.draw(pairs())
    w = grow(signs, states, rng=random.Random(data.draw(strategies.integers(0, 10 ** 6))))
    assert isomorphic(grow(*min_cut_states(w)), w)


@pytest.mark.parametrize("length", range(7))
def test_basis_size_equals_path_count(length):
    for s in all_sign_strings(length):
        if not signs_admissible(s):
            continue
        webs = enumerate_webs(s)
        assert len(webs) == count_closed_paths(s)
        if length <= 4:
            forms = {canonical_form(w) for w in webs.values()}
            assert len(forms) == len(webs)


def test_small_bases():
    assert len(enumerate_webs("+-")) == 3
    assert len(enumerate_webs("+++")) == 6
    assert list(enumerate_webs("")) == [()]


@settings(deadline=None, max_examples=80)
@given(strategies.data())
def test_euler_identities(data):
    w = grow(*data.draw(pairs()))
    for vi, vb, ei, eb, fi, fb in euler_counts(w):
        assert vi == 2 * fi + fb - 2
        assert ei == vi + fi - 1
        assert 3 * vi == 2 * ei + eb


@settings(deadline=None, max_examples=80)
@given(strategies.data())
def test_connected_webs_have_an_outer_u_y_or_h_face(data):
    w = grow(*data.draw(pairs()))
    if w.n_boundary and len(w.components()) == 1:
        assert outer_small_faces(w)


@settings(deadline=None, max_examples=60)
@given(strategies.data())
def test_inner_faces_have_even_sides_and_depths_step_by_one(data):
    w = grow(*data.draw(pairs()))
    faces = w.face_data()
    info = face_depths(w)
    owner = {h: i for i, f in enumerate(faces) for h in f["half_edges"]}
    for i, f in enumerate(faces):
        if not f["outer"]:
            assert f["sides"] % 2 == 0
    for h in w.edges():
        assert abs(info[owner[h]].depth - info[owner[w.twin[h]]].depth) <= 1


def test_order_independence():
    assert order_independence_check("+-", (0, 0), trials=50)
    assert order_independence_check("+++", (-1, 0, 1), trials=100)


def test_bigon_is_detected_and_reduced():
    w = build("+-", [("split", 0), ("y", 0), ("u", 0)])
    ok, witness = is_nonelliptic(w)
    assert not ok and witness[0] == "bigon"
    assert dict(reduce_web(w)) == {(("+", "-"), (1, -1)): QINT2}


def test_punctured_bigon_is_allowed():
    w = grow("+-", (0, 0))
    punctured = [f for f in w.face_data() if not f["outer"] and f["winding"] and f["sides"] == 2]
    assert punctured
    assert is_nonelliptic(w) == (True, None)


def test_circle_multiplies_by_quantum_three():
    w = build("+-", [("cap", 0, "+"), ("u", 0), ("u", 0)])
    assert not is_nonelliptic(w)[0]
    assert dict(reduce_web(w)) == {(("+", "-"), (1, -1)): QINT3}


@pytest.mark.parametrize("k", range(4))
def test_k_circles_give_three_to_the_k(k):
    moves = []
    for _ in range(k):
        moves += [("cap", 0, "+"), ("u", 0)]
    w = build("", moves)
    r = reduce_web(w)
    assert r.total_at_q1() == 3 ** k
    assert dict(r) == {((), ()): QINT3 ** k}


def test_square_resolves_into_two_webs():
    w = build("-++-", [("h", 0), ("h", 1), ("y", 2), ("y", 1), ("u", 1, True)])
    assert is_nonelliptic(w)[1][0] == "square"
    r = reduce_web(w)
    assert len(r) == 2 and all(c == ONE for c in r.values())
    with pytest.raises(EllipticError):
        min_cut_states(w)


def test_essential_circle_is_refused_without_a_value():
    w = build("", [("cap", 0, "+"), ("u", 1, True)])
    with pytest.raises(UnsupportedRelation):
        reduce_web(w)
    two = ONE + ONE
    assert dict(reduce_web(w, essential_circle=two)) == {((), ()): two}


@settings(deadline=None, max_examples=30)
@given(strategies.data())
def test_reduction_is_confluent(data):
    seed = data.draw(strategies.integers(0, 10 ** 6))
    (w,) = random_elliptic_webs(1, seed)
    ref = reduce_web(w)
    rng = random.Random(seed)
    for _ in range(4):
        assert reduce_web(w, rng=rng) == ref
    for (s, j) in ref:
        assert j in enumerate_states(s)


@settings(deadline=None, max_examples=40)
@given(strategies.data())
def test_closed_webs_count_tait_colorings(data):
    rng = random.Random(data.draw(strategies.integers(0, 10 ** 6)))
    try:
        w = random_web(rng, (), extra_moves=rng.randint(1, 5))
        r = reduce_web(w)
    except (WebError, UnsupportedRelation):
        return
    assert r.total_at_q1() == tait_colorings(w)


@settings(deadline=None, max_examples=40)
@given(strategies.data())
def test_web_json_round_trip(data):
    w = grow(*data.draw(pairs()))
    doc = w.to_json()
    back = Web.from_json(json.dumps(doc))
    assert canonical_form(back) == canonical_form(w)
    # without windings the seam is redrawn from the puncture face
    for h in doc["half_edges"]:
        h.pop("winding")
    bare = Web.from_json(doc)
    assert min_cut_states(bare) == min_cut_states(w)


def test_bad_web_json_is_rejected():
    doc = grow("+-", (0, 0)).to_json()
    doc["vertices"][0]["type"] = "hexagon"
    with pytest.raises(WebError):
        Web.from_json(doc)


def test_tait_oracle_sees_trivalent_closed_webs():
    checked = 0
    for seed in range(300):
        rng = random.Random(seed)
        try:
            w = random_web(rng, (), extra_moves=rng.randint(1, 6))
            r = reduce_web(w)
        except (WebError, UnsupportedRelation):
            continue
        if w.inner_vertices():
            assert r.total_at_q1() == tait_colorings(w)
            checked += 1
    assert checked >= 30


def test_flow_check_rejects_a_vertex_with_three_balanced_edges():
    w = build("+-", [("split", 1), ("cap", 3, "-"), ("cap", 1, "+"), ("h", 2), ("h", 4), ("y", 6, True),
                     ("h", 2), ("u", 0), ("u", 1), ("h", 0), ("u", 1, True)])
    with pytest.raises(EllipticError):
        canonical_flow(w)
    assert not is_nonelliptic(w)[0]
