import random

import pytest
from hypothesis import given, settings, strategies

from annular_webs.algebra import (
    ArcAlgebra,
    Bimodule,
    ProjectiveCheck,
    bimodule_iso_check,
    certify_all,
    composition_check,
    identity_check,
    relations_suite,
    twist_check,
    zigzag_check,
)
from annular_webs.cli import h1_expected_products, h1_named_elements
from annular_webs.curves import (
    compose_flat,
    identity_tangle,
    matching_tangle,
    random_flat_tangle,
    reflect,
    turnback_corpus,
)
from annular_webs.linalg import poly_det
from annular_webs.rings import A1, A2, ONE, LaurentQA
from annular_webs.tqft import Closure, cap, cup

ALG = {n: ArcAlgebra(n) for n in range(4)}
ELEMS = {n: [ALG[n].element(k) for k in ALG[n].basis] for n in range(3)}


def basis_keys(n):
    return strategies.sampled_from(ALG[n].basis)


def test_h1_has_rank_eight_and_n0_is_the_ground_ring():
    assert len(ALG[1].basis) == 8
    assert len(ALG[0].basis) == 1
    one = ALG[0].unit()
    assert one * one == one


def test_h1_multiplication_table():
    alg, named = h1_named_elements(ALG[1])
    seen = set()
    for a, b, expect in h1_expected_products():
        want = alg.zero()
        for name, c in expect.items():
            want = want + named[name] * c
        assert named[a] * named[b] == want, (a, b)
        seen.add((a, b))
    for a in named:
        for b in named:
            if (a, b) not in seen:
                assert (named[a] * named[b]).is_zero()


def test_idempotents_are_orthogonal():
    H = ALG[2]
    for i in range(len(H.matchings)):
        for j in range(len(H.matchings)):
            p = H.idempotent(i) * H.idempotent(j)
            assert p == (H.idempotent(i) if i == j else H.zero())


@pytest.mark.parametrize("n", [1, 2, 3])
def test_unit(n):
    H = ALG[n]
    one = H.unit()
    for k in H.basis:
        x = H.element(k)
        assert one * x == x and x * one == x


@pytest.mark.parametrize("n", [0, 1, 2])
def test_associativity_exhaustive(n):
    elems = ELEMS[n]
    for x in elems:
        for y in elems:
            xy = x * y
            if xy.is_zero():
                continue
            for z in elems:
                assert xy * z == x * (y * z)


@settings(deadline=None, max_examples=60)
@given(strategies.data())
def test_associativity_sampled_n3(data):
    H = ALG[3]
    x, y, z = (H.element(data.draw(basis_keys(3))) for _ in range(3))
    assert (x * y) * z == x * (y * z)


@pytest.mark.parametrize("n", [1, 2])
def test_gradings_are_additive(n):
    H = ALG[n]
    for x in H.basis:
        for y in H.basis:
            p = H.element(x) * H.element(y)
            for k, c in p.terms.items():
                assert c.is_homogeneous()
                assert H.qdeg(k) + c.degree() == H.qdeg(x) + H.qdeg(y)
                # the annular degree alternates with the essential circles of the right factor
                assert H.adeg(k) == H.adeg(y) + (-1) ** H.n_essential(y) * H.adeg(x)


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_graded_rank_is_the_sum_over_closures(n):
    H = ALG[n]
    q = LaurentQA.monomial(1, 0) + LaurentQA.monomial(-1, 0)
    a = LaurentQA.monomial(0, 1) + LaurentQA.monomial(0, -1)
    total = LaurentQA()
    for b in H.matchings:
        for c in H.matchings:
            cl = Closure([cup(c), cap(b)])
            k = sum(1 for x in cl.circles if not x.essential)
            total = total + LaurentQA.monomial(n, 0) * q ** k * a ** (len(cl.circles) - k)
    assert H.rank() == total
    assert all(H.qdeg(k) >= 0 for k in H.basis)


def test_trace_on_h1():
    alg, named = h1_named_elements(ALG[1])
    assert alg.trace(named["1_0"]) == 0 and alg.trace(named["x_0"]) == ONE
    for k in alg.basis:
        if alg.trace(alg.element(k)):
            # the trace has degree -2n
            assert alg.qdeg(k) == 2 * alg.n


@given(strategies.data())
def test_trace_is_symmetric(data):
    n = data.draw(strategies.integers(1, 2))
    H = ALG[n]
    x, y = H.element(data.draw(basis_keys(n))), H.element(data.draw(basis_keys(n)))
    assert H.pairing(x, y) == H.pairing(y, x)


@pytest.mark.parametrize("n", [1, 2])
def test_gram_matrix_is_unimodular(n):
    for (rows, cols, mat) in ALG[n].gram_blocks().values():
        if rows:
            det = poly_det(mat)
            assert det.is_constant() and det.constant() in (1, -1)


def test_h1_full_gram_determinant():
    # the full 8x8 Gram matrix, assembled without the block structure
    H = ALG[1]
    mat = [[H.trace(H.element(r) * H.element(c)) for c in H.basis] for r in H.basis]
    det = poly_det(mat)
    assert det.is_constant() and det.constant() in (1, -1)


@pytest.mark.parametrize("n", [1, 2])
def test_comultiplication_counit_laws(n):
    H = ALG[n]
    dual = H.dual_basis()
    for k in H.basis:
        e = H.element(k)
        d = H.comultiply(e, dual)
        assert H.counit_left(d) == e and H.counit_right(d) == e


def test_h1_dot_as_product_of_flips():
    alg, named = h1_named_elements(ALG[1])
    assert named["y1_10"] * named["y1_01"] + named["1_1"] * A1 == named["x_1"]


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_generation_in_degree_one(n):
    H = ALG[n]
    certs, failures = certify_all(H)
    assert not failures and len(certs) == len(H.basis)
    for k in H.degree_zero() + H.degree_one():
        assert certs[k].leaves() == [k]


@pytest.mark.parametrize("n", [1, 2, 3])
def test_relations(n):
    insts = relations_suite(ALG[n])
    assert insts and all(i.holds for i in insts), [i for i in insts if not i.holds][:3]


def test_mixed_flip_vanishes_in_h1():
    H = ALG[1]
    a = 0
    arc = H.matchings[a].pairs[0]
    y1 = H.flip_element(a, arc, 1)
    b = H.idx(H.matchings[a].flip(arc))
    back2 = H.flip_element(b, arc, 2)
    assert (back2 * y1).is_zero()


@pytest.mark.parametrize("n", [1, 2])
def test_symmetries_respect_products(n):
    H = ALG[n]
    tau = lambda z: H.tau_coeffs(H.tau_n(z))  # noqa: E731
    rng = random.Random(n)
    elems = ELEMS[n]
    pairs = [(x, y) for x in elems for y in elems]
    for x, y in rng.sample(pairs, min(len(pairs), 400)):
        xy = x * y
        assert H.rotate(xy) == H.rotate(x) * H.rotate(y)
        assert H.reflect(xy) == H.reflect(x) * H.reflect(y)
        assert H.opposite(xy) == H.opposite(y) * H.opposite(x)
        assert tau(xy) == tau(x) * tau(y)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_symmetry_orders(n):
    H = ALG[n]
    elems = [H.element(k) for k in H.basis]
    # rotation by pi/n has order exactly 2n
    fixed_at = []
    for k in range(1, 2 * n + 1):
        if all(H.rotate(x, k) == x for x in elems):
            fixed_at.append(k)
    assert fixed_at == [2 * n]
    for x in elems:
        assert H.reflect(H.reflect(x)) == x
        assert H.tau_n(H.tau_n(x)) == x
        assert H.opposite(H.opposite(x)) == x


def test_rotation_of_h1_has_order_two():
    H = ALG[1]
    moved = [k for k in H.basis if H.rotate(H.element(k)) != H.element(k)]
    assert moved
    assert all(H.rotate(H.rotate(H.element(k))) == H.element(k) for k in H.basis)


def test_dihedral_relation_n2():
    # reflection conjugates rotation to its inverse
    H = ALG[2]
    for x in ELEMS[2]:
        assert H.reflect(H.rotate(H.reflect(x))) == H.rotate(x, -1)


def test_different_middles_multiply_to_zero():
    H = ALG[2]
    for x in H.basis:
        for y in H.basis:
            if x[1] != y[0]:
                assert (H.element(x) * H.element(y)).is_zero()


# bimodules


@pytest.mark.parametrize("n", [1, 2])
def test_identity_bimodule_is_the_algebra(n):
    assert identity_check(n, ALG[n]) == []


def _algebras():
    return {n: ALG[n] for n in range(3)}


@pytest.mark.parametrize("i", range(len(turnback_corpus())))
def test_projectivity_on_the_turnback_corpus(i):
    t = turnback_corpus()[i]
    M = Bimodule(t, ALG[t.top // 2], ALG[t.bottom // 2])
    assert ProjectiveCheck(M).check(sample=60, rng=random.Random(i)) == []


@settings(deadline=None, max_examples=8)
@given(strategies.data())
def test_composition_of_sampled_pairs(data):
    rng = random.Random(data.draw(strategies.integers(0, 10 ** 6)))
    shape = data.draw(strategies.sampled_from([(2, 2, 2), (4, 2, 4), (2, 4, 2), (2, 2, 4)]))
    top, mid, bottom = shape
    t1 = random_flat_tangle(rng, mid, bottom)
    t2 = random_flat_tangle(rng, top, mid)
    r = composition_check(t2, t1, balanced_samples=40, seed=0, algebras=_algebras())
    assert r.ok, r.failures[:2]


@pytest.mark.parametrize("i", [0, 3, 7, 11])
def test_twisting_gives_an_isomorphic_bimodule(i):
    t = turnback_corpus()[i]
    for p in (1, -1):
        assert twist_check(t, p, algebras=_algebras()) == []


@pytest.mark.parametrize("i", range(0, 15, 3))
def test_zigzag_identities(i):
    assert zigzag_check(turnback_corpus()[i], algebras=_algebras()) == []


def test_mismatched_tangles_are_not_identified():
    # the identity and the turnback through a cap-cup have the same boundary but differ
    H = ALG[1]
    a = H.matchings[0]
    turnback = compose_flat(matching_tangle(a), reflect(matching_tangle(a)))
    W = Bimodule(turnback, H, H)
    M = Bimodule(identity_tangle(1), H, H)
    assert bimodule_iso_check(W, M) != []


def test_bimodule_actions_commute():
    rng = random.Random(5)
    t = random_flat_tangle(rng, 4, 2)
    M = Bimodule(t, ALG[2], ALG[1])
    for key in M.basis[:20]:
        x = {key: ONE}
        for hk in rng.sample(ALG[2].basis, 10):
            for gk in rng.sample(ALG[1].basis, 4):
                h, g = ALG[2].element(hk), ALG[1].element(gk)
                assert M.right(M.left(h, x), g) == M.left(h, M.right(x, g))
