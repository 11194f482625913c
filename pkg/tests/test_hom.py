import itertools

import pytest
from hypothesis import given, settings, strategies as st

from flowcat import (
    Diagram,
    Edge,
    FlowMorphism,
    achronal_set,
    cartesian_product,
    check_adjunction,
    check_morphism,
    curry,
    enumerate_morphisms,
    find_isomorphism,
    glob_concat,
    globe,
    hom_direct,
    hom_globe,
    hom_postcompose,
    hom_precompose,
    hom_via_decomposition,
    limit,
    point,
    product_projections,
    pushout,
    segment,
    tensor,
    terminal,
    uncurry,
    unit_right,
    validate,
)

from conftest import CORPUS, CORPUS_IDS, SMALL_IDS, naive_morphisms, small_flows

CONCAT = glob_concat(["x"], ["y"])


def naive_hom_paths(Y, Z) -> set:
    """(u, v, family) triples found by trying every family of Z-paths."""
    ms = naive_morphisms(Y, Z)
    states = Y.sorted_states
    out = set()
    for u, v in itertools.product(ms, repeat=2):
        for values in itertools.product(Z.sorted_paths, repeat=len(states)):
            h = dict(zip(states, values))
            if any(Z.src[h[a]] != u.state_map[a] or Z.tgt[h[a]] != v.state_map[a] for a in states):
                continue
            if all(
                Z.comp.get((u.path_map[y], h[Y.tgt[y]])) == Z.comp.get((h[Y.src[y]], v.path_map[y]))
                and Z.comp.get((u.path_map[y], h[Y.tgt[y]])) is not None
                for y in Y.paths
            ):
                out.add((u, v, tuple(sorted(h.items(), key=repr))))
    return out


def test_hom_from_empty_is_terminal():
    for Z in CORPUS.values():
        H = hom_direct(achronal_set(0), Z)
        assert len(H.states) == 1 and len(H.paths) == 1
        (p,) = H.paths
        assert H.comp == {(p, p): p}


def test_hom_from_point_is_the_codomain():
    for Z in CORPUS.values():
        assert find_isomorphism(hom_direct(point(), Z), Z) is not None


def test_hom_segment_segment_is_a_point():
    H = hom_direct(segment(), segment())
    assert len(H.states) == 1 and not H.paths


_ORACLE_PAIRS = [
    (a, b)
    for a, b in itertools.product(SMALL_IDS, repeat=2)
    if len(CORPUS[b].paths) ** len(CORPUS[a].states) * len(CORPUS[b].states) ** (2 * len(CORPUS[a].states)) < 5000
][::3]


@pytest.mark.parametrize("a,b", _ORACLE_PAIRS)
def test_hom_direct_against_brute_force(a, b):
    Y, Z = CORPUS[a], CORPUS[b]
    H = hom_direct(Y, Z)
    assert validate(H) == []
    assert len(H.states) == len(naive_morphisms(Y, Z))
    got = {(p.u, p.v, tuple(sorted(p.h, key=repr))) for p in H.paths}
    assert got == naive_hom_paths(Y, Z)


@pytest.mark.parametrize("name", CORPUS_IDS)
def test_every_hom_path_is_coherent(name):
    Y = CORPUS[name]
    for Z in (segment(), terminal(), CONCAT, globe(["a", "b"])):
        H = hom_direct(Y, Z)
        for p in H.paths:
            assert p.is_coherent()
            for y in Y.paths:
                assert Z.comp[p.u.path_map[y], p.family[Y.tgt[y]]] == Z.comp[p.family[Y.src[y]], p.v.path_map[y]]


def test_hom_globe_examples():
    H = hom_globe(["a"], CONCAT)
    assert len(H.states) == 3
    Z = CONCAT
    assert len(hom_globe([], Z).states) == len(Z.states) ** 2
    T = hom_globe(["a"], terminal())
    assert len(T.states) == 1 and len(T.paths) == 1
    (p,) = T.paths
    assert T.comp == {(p, p): p}


@pytest.mark.parametrize("name", CORPUS_IDS)
@pytest.mark.parametrize("labels", [(), ("a",), ("a", "b")])
def test_hom_globe_matches_direct(name, labels):
    Z = CORPUS[name]
    H = hom_globe(labels, Z)
    assert validate(H) == []
    expected = sum(len(Z.fiber(a, b)) ** len(labels) for a in Z.states for b in Z.states)
    assert len(H.states) == expected
    assert find_isomorphism(H, hom_direct(globe(labels), Z)) is not None


def test_hom_via_decomposition_examples():
    for Z in CORPUS.values():
        assert find_isomorphism(hom_via_decomposition(point(), Z), Z) is not None
    assert find_isomorphism(hom_via_decomposition(segment(), segment()), point()) is not None


@pytest.mark.parametrize("name", SMALL_IDS)
def test_hom_via_decomposition_matches_direct(name):
    Z = CORPUS[name]
    for Y in (CONCAT, terminal(), segment(), CORPUS[name]):
        assert find_isomorphism(hom_via_decomposition(Y, Z), hom_direct(Y, Z)) is not None


# ---------------------------------------------------------------------------
# currying


def test_curry_at_a_point():
    Y, Z = segment(), CONCAT
    P = point()
    for f in enumerate_morphisms(tensor(P, Y), Z):
        g = curry(f, P, Y)
        u = g.state_map[0]
        assert u.state_map == {b: f.state_map[0, b] for b in Y.states}
        m = uncurry(g, Y, Z)
        assert m == f


def test_curry_of_the_unit_is_the_identity_up_to_evaluation():
    for X in (segment(), CONCAT, terminal()):
        f = unit_right(X)
        g = curry(f, X, point())
        # hom(point, X) -> X evaluates at the single state
        ev = FlowMorphism(
            g.target, X, {u: u.state_map[0] for u in g.target.states}, {p: p.family[0] for p in g.target.paths}
        )
        assert g.then(ev) == FlowMorphism.identity(X)


@pytest.mark.parametrize("X,Y,Z", [(segment(), segment(), CONCAT), (segment(), CONCAT, CONCAT)])
def test_curry_round_trips(X, Y, Z):
    XY = tensor(X, Y)
    H = hom_direct(Y, Z)
    lhs = enumerate_morphisms(XY, Z)
    rhs = enumerate_morphisms(X, H)
    assert len(lhs) == len(rhs)
    for f in lhs:
        assert uncurry(curry(f, X, Y, H), Y, Z, XY) == f
    for g in rhs:
        assert curry(uncurry(g, Y, Z, XY), X, Y, H) == g


def test_constant_uncurry_acts_as_the_morphism():
    Y, Z = segment(), CONCAT
    H = hom_direct(Y, Z)
    for m in H.states:
        g = FlowMorphism(point(), H, {0: m}, {})
        f = uncurry(g, Y, Z)
        assert {b: f.state_map[0, b] for b in Y.states} == dict(m.state_map)


def test_adjunction_examples():
    r = check_adjunction(point(), segment(), CONCAT)
    assert r.lhs_count == r.rhs_count == len(enumerate_morphisms(segment(), CONCAT))
    r = check_adjunction(segment(), segment(), CONCAT)
    assert r.lhs_count == r.rhs_count and r.bijection_ok
    r = check_adjunction(segment(), CONCAT, CONCAT)
    assert r.holds


@given(small_flows, small_flows, small_flows)
@settings(max_examples=40, deadline=None)
def test_adjunction_holds(X, Y, Z):
    r = check_adjunction(X, Y, Z, naturality_samples=5)
    assert r.holds


# ---------------------------------------------------------------------------
# functoriality and limit exchange


@given(small_flows, small_flows, st.data())
@settings(max_examples=30, deadline=None)
def test_hom_is_functorial(Y, Z, data):
    ends = enumerate_morphisms(Y, Y)
    f = data.draw(st.sampled_from(ends))
    g = data.draw(st.sampled_from(ends))
    H = hom_direct(Y, Z)
    # contravariant: hom(g . f) = hom(f) . hom(g) in diagram order
    lhs = hom_precompose(f.then(g), Z, H, H)
    rhs = hom_precompose(g, Z, H, H).then(hom_precompose(f, Z, H, H))
    assert lhs == rhs and check_morphism(lhs)
    assert hom_precompose(FlowMorphism.identity(Y), Z, H, H) == FlowMorphism.identity(H)
    zs = enumerate_morphisms(Z, Z)
    k = data.draw(st.sampled_from(zs))
    post = hom_postcompose(Y, k, H, H)
    assert check_morphism(post)


def _concat_span():
    star = achronal_set(1)
    Iv, Iw = globe(["v"]), globe(["w"])
    return FlowMorphism(star, Iv, {0: 1}, {}), FlowMorphism(star, Iw, {0: 0}, {})


def _pullback_of_homs(f, g, P, cocone, Z):
    nodes = {i: hom_direct(F, Z) for i, F in ((0, f.source), (1, f.target), (2, g.target))}
    D = Diagram(
        nodes,
        [
            Edge(1, 0, hom_precompose(f, Z, nodes[1], nodes[0])),
            Edge(2, 0, hom_precompose(g, Z, nodes[2], nodes[0])),
        ],
    )
    return limit(D)[0]


@pytest.mark.parametrize("name", SMALL_IDS[:12])
def test_hom_turns_pushouts_into_pullbacks(name):
    Z = CORPUS[name]
    f, g = _concat_span()
    P, cocone = pushout(f, g)
    assert find_isomorphism(hom_direct(P, Z), _pullback_of_homs(f, g, P, cocone, Z)) is not None


@pytest.mark.parametrize("name", SMALL_IDS[:12])
def test_hom_preserves_products(name):
    Y = CORPUS[name]
    for A, B in ((segment(), CONCAT), (terminal(), globe(["a", "b"]))):
        lhs = hom_direct(Y, cartesian_product(A, B))
        rhs = cartesian_product(hom_direct(Y, A), hom_direct(Y, B))
        assert find_isomorphism(lhs, rhs) is not None
        p1, p2 = product_projections(A, B)
        assert check_morphism(hom_postcompose(Y, p1, lhs))
