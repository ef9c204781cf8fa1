import itertools

import pytest
from hypothesis import given, settings, strategies

from annular_webs.curves import enumerate_matchings, saddle_sequence
from annular_webs.rings import A1, A2, ONE, ZERO, LaurentQA
from annular_webs.tqft import (
    DOT,
    PROD_ALPHA,
    SUM_ALPHA,
    UNIT,
    Closure,
    Edge,
    PointGraph,
    TQFTError,
    add_dot,
    adeg_state,
    cap,
    counit,
    cup,
    merge_rule,
    qdeg_state,
    render_state,
    saddle,
    split_rule,
    state_basis,
    state_space,
    tau_vector,
    trace_eval,
    vsum,
)

Q = LaurentQA.monomial(1, 0) + LaurentQA.monomial(-1, 0)
A = LaurentQA.monomial(0, 1) + LaurentQA.monomial(0, -1)


def circle_edges(t, essential, height=0):
    """Two points (t,0),(t,1) joined by an 'a' edge and a 'b' edge."""
    w = 1 if essential else 0
    hs = ((height, 0),) if essential else ()
    return [Edge((t, 0), (t, 1), w, hs, (t, "a")), Edge((t, 1), (t, 0), 0, (), (t, "b"))]


def config(kinds):
    """A point graph with one circle per entry of ``kinds`` ('c' or 'e')."""
    edges = []
    for t, k in enumerate(kinds):
        edges.extend(circle_edges(t, k == "e", height=t))
    return PointGraph(edges)


def merge_move(graph, s, t):
    """The saddle joining circles s and t along their 'a' edges."""
    es, et = graph.edges[graph.edge_index((s, "a"))], graph.edges[graph.edge_index((t, "a"))]
    add = [Edge((s, 0), (t, 0), es.w, es.heights, ("m", 0)),
           Edge((t, 1), (s, 1), -et.w, et.heights, ("m", 1))]
    return [(s, "a"), (t, "a")], add


def split_move(graph, s, t):
    """The saddle undoing ``merge_move``."""
    em0, em1 = graph.edges[graph.edge_index(("m", 0))], graph.edges[graph.edge_index(("m", 1))]
    ws, wt = em0.w, -em1.w
    add = [Edge((s, 0), (s, 1), ws, em0.heights, (s, "a")),
           Edge((t, 0), (t, 1), wt, em1.heights, (t, "a"))]
    return [("m", 0), ("m", 1)], add


def key_of(graph, t):
    return graph.circle_of_edge(graph.edge_index((t, "b"))).key


def basis_vector(state):
    return {state: ONE}


def test_state_space_examples():
    basis, rank = state_space(config("c"))
    assert len(basis) == 2 and rank == Q
    basis, rank = state_space(config("e"))
    assert len(basis) == 2 and rank == A
    basis, rank = state_space(PointGraph([]))
    assert basis == [()] and rank == LaurentQA.monomial(0, 0)


@given(strategies.data())
def test_graded_rank_formula(data):
    kinds = data.draw(strategies.lists(strategies.sampled_from("ce"), max_size=4))
    _, rank = state_space(config(kinds))
    k, m = kinds.count("c"), kinds.count("e")
    assert rank == Q ** k * A ** m


def test_merge_examples():
    kind, terms = merge_rule("c", DOT, "c", DOT)
    assert kind == "c" and dict(terms) == {DOT: SUM_ALPHA, UNIT: -PROD_ALPHA}
    kind, terms = merge_rule("e", 1, "e", 1)
    assert kind == "c" and dict(terms) == {DOT: ONE, UNIT: -A1}
    assert merge_rule("e", 1, "e", 2) == ("c", [])
    assert merge_rule("c", UNIT, "e", 2) == ("e", [(2, ONE)])
    assert merge_rule("c", DOT, "e", 1) == ("e", [(1, A2)])


def test_split_examples():
    assert dict(split_rule("c", UNIT, "c", "c")) == {(UNIT, DOT): ONE, (DOT, UNIT): ONE, (UNIT, UNIT): -SUM_ALPHA}
    assert dict(split_rule("c", DOT, "c", "c")) == {(DOT, DOT): ONE, (UNIT, UNIT): -PROD_ALPHA}
    assert dict(split_rule("e", 1, "e", "c")) == {(1, DOT): ONE, (1, UNIT): -A1}
    assert dict(split_rule("c", UNIT, "e", "e")) == {(1, 1): ONE, (2, 2): ONE}
    assert dict(split_rule("c", DOT, "e", "e")) == {(1, 1): A2, (2, 2): A1}
    with pytest.raises(TQFTError):
        split_rule("e", 1, "e", "e")


def test_dot_examples():
    g = config("c")
    (key,) = [c.key for c in g.circles()]
    assert add_dot({((key, UNIT),): ONE}, g, key) == {((key, DOT),): ONE}
    twice = add_dot(add_dot({((key, UNIT),): ONE}, g, key), g, key)
    assert twice == {((key, DOT),): SUM_ALPHA, ((key, UNIT),): -PROD_ALPHA}
    e = config("e")
    (key,) = [c.key for c in e.circles()]
    assert add_dot({((key, 1),): ONE}, e, key) == {((key, 1),): A2}


def test_trace_examples():
    g = config("c")
    (key,) = [c.key for c in g.circles()]
    assert trace_eval({((key, UNIT),): ONE}, g) == ZERO
    assert trace_eval({((key, DOT),): ONE}, g) == ONE
    assert trace_eval({((key, DOT),): SUM_ALPHA, ((key, UNIT),): -PROD_ALPHA}, g) == SUM_ALPHA
    with pytest.raises(TQFTError):
        counit("e", 1)


@pytest.mark.parametrize("i", [1, 2])
@pytest.mark.parametrize("j", [1, 2])
def test_essential_pairing_is_the_identity_matrix(i, j):
    g = config("ee")
    remove, add = merge_move(g, 0, 1)
    state = tuple(sorted([(key_of(g, 0), i), (key_of(g, 1), j)]))
    v, g2, kind = saddle({state: ONE}, g, remove, add)
    assert kind == "merge"
    assert trace_eval(v, g2) == (ONE if i == j else ZERO)


@pytest.mark.parametrize("d", [UNIT, DOT])
def test_counit_laws(d):
    for left in (True, False):
        out = {}
        for (e1, e2), c in split_rule("c", d, "c", "c"):
            kept, used = (e2, e1) if left else (e1, e2)
            out[kept] = out.get(kept, ZERO) + c * counit("c", used)
        assert {k: v for k, v in out.items() if v} == {d: ONE}


def test_merge_is_associative_and_commutative_on_contractible():
    def mult(x, y):
        return dict(merge_rule("c", x, "c", y)[1])

    def mult_vec(u, y):
        out = {}
        for x, c in u.items():
            for z, cc in mult(x, y).items():
                out[z] = out.get(z, ZERO) + c * cc
        return {k: v for k, v in out.items() if v}

    for x, y, z in itertools.product((UNIT, DOT), repeat=3):
        assert mult(x, y) == mult(y, x)
        assert mult_vec(mult(x, y), z) == mult_vec(mult(y, z), x)


def _pair(graph, u, v):
    """Trace pairing of two vectors on the same all-contractible configuration."""
    total = ZERO
    for s, c in u.items():
        for t, cc in v.items():
            val = ONE
            for (k, d1), (_, d2) in zip(s, t):
                _, terms = merge_rule("c", d1, "c", d2)
                val = val * sum((coef * counit("c", d) for d, coef in terms), ZERO)
            total = total + c * cc * val
    return total


@pytest.mark.parametrize("spectators", [0, 1])
def test_merge_split_adjunction_on_contractible_circles(spectators):
    g = config("c" * (2 + spectators))
    remove, add = merge_move(g, 0, 1)
    _, g2, _ = saddle({}, g, remove, add)
    back_remove, back_add = split_move(g2, 0, 1)
    for x in state_basis(g):
        mx, _, _ = saddle(basis_vector(x), g, remove, add)
        for z in state_basis(g2):
            sz, g_back, kind = saddle(basis_vector(z), g2, back_remove, back_add)
            assert kind == "split"
            assert _pair(g2, mx, basis_vector(z)) == _pair(g_back, basis_vector(x), sz)


KINDS = ["cc", "ce", "ec", "ee", "ccc", "cee", "ece", "eec", "cce"]


def _bidegree_ok(v_in, g_in, v_out, g_out):
    (s_in,) = v_in
    for s, c in v_out.items():
        if not c.is_homogeneous():
            return False
        if qdeg_state(s, g_out) + c.degree() != qdeg_state(s_in, g_in) + 1:
            return False
    return True


@pytest.mark.parametrize("kinds", KINDS)
def test_saddles_have_q_degree_one(kinds):
    g = config(kinds)
    remove, add = merge_move(g, 0, 1)
    _, g2, _ = saddle({}, g, remove, add)
    back = split_move(g2, 0, 1)
    for s in state_basis(g):
        v, _, _ = saddle(basis_vector(s), g, remove, add)
        assert _bidegree_ok(basis_vector(s), g, v, g2)
    for s in state_basis(g2):
        v, g3, _ = saddle(basis_vector(s), g2, *back)
        assert _bidegree_ok(basis_vector(s), g2, v, g3)


@pytest.mark.parametrize("kinds", KINDS)
def test_tau_commutes_with_saddles_and_dots(kinds):
    g = config(kinds)
    remove, add = merge_move(g, 0, 1)
    _, g2, _ = saddle({}, g, remove, add)
    back = split_move(g2, 0, 1)
    for s in state_basis(g):
        v = {s: A1 + 2 * A2}
        m1, _, _ = saddle(tau_vector(v, g), g, remove, add)
        m2, _, _ = saddle(v, g, remove, add)
        assert m1 == tau_vector(m2, g2)
        for c in g.circles():
            assert add_dot(tau_vector(v, g), g, c.key) == tau_vector(add_dot(v, g, c.key), g)
    for s in state_basis(g2):
        v = {s: ONE - A2}
        s1, g3, _ = saddle(tau_vector(v, g2), g2, *back)
        s2, _, _ = saddle(v, g2, *back)
        assert s1 == tau_vector(s2, g3)


MATCHINGS = {n: enumerate_matchings(n) for n in range(4)}


@settings(deadline=None, max_examples=40)
@given(strategies.data())
def test_annular_saddles_have_bidegree_one_zero(data):
    """Saddles along a matching cobordism change (q, A) by (+1, 0) termwise."""
    n = data.draw(strategies.integers(1, 3))
    a, b, c = (data.draw(strategies.sampled_from(MATCHINGS[n])) for _ in range(3))
    closure = Closure([cup(a), cap(b), cup(b), cap(c)])
    graph = closure.graph
    s = data.draw(strategies.sampled_from(state_basis(graph)))
    v = basis_vector(s)
    for arc in saddle_sequence(b):
        i, j = arc
        add = [Edge((1, i), (5, i), 0, (), ("v", i)), Edge((1, j), (5, j), 0, (), ("v", j))]
        nv, ng, _ = saddle(v, graph, [(1, arc), (2, arc)], add)
        (src,) = v
        for t, coeff in nv.items():
            assert coeff.is_homogeneous()
            assert qdeg_state(t, ng) + coeff.degree() == qdeg_state(src, graph) + 1
            assert adeg_state(t, ng) == adeg_state(src, graph)
        if not nv:
            break
        v = {data.draw(strategies.sampled_from(sorted(nv))): ONE}
        graph = ng


def test_merge_of_a_circle_with_itself_is_rejected():
    from annular_webs.tqft import apply_merge
    g = config("cc")
    k = key_of(g, 0)
    with pytest.raises(TQFTError):
        apply_merge({}, g, g, k, k)


def test_render_state_notation():
    g = config("ce")
    s = tuple(sorted([(key_of(g, 0), DOT), (key_of(g, 1), 2)]))
    assert render_state(s, g) == "(X,e2)"


def test_vsum_drops_zero_entries():
    g = config("c")
    (s, t) = state_basis(g)
    assert vsum({s: ONE}, {s: -ONE, t: A1}) == {t: A1}
