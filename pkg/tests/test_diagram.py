import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from flowcat import (
    Diagram,
    Edge,
    Flow,
    FlowMorphism,
    Overflow,
    achronal_set,
    canonical_decomposition,
    cartesian_product,
    check_morphism,
    colimit,
    counterexample_cartesian,
    enumerate_morphisms,
    find_isomorphism,
    glob_concat,
    globe,
    induced_from_colimit,
    induced_into_limit,
    limit,
    point,
    pushout,
    segment,
    tensor,
    tensor_morphism,
    terminal,
    validate,
)
from flowcat.textio import serialize_flow

from conftest import CORPUS, CORPUS_IDS, corpus_flows, small_flows


def naive_limit(D: Diagram) -> Flow:
    """Every tuple of elements, kept when compatible along all edges."""
    nodes = D.sorted_nodes
    flows = [D.nodes[n] for n in nodes]
    pos = {n: i for i, n in enumerate(nodes)}

    def families(level):
        pools = [F.sorted_states if level == "s" else F.sorted_paths for F in flows]
        for t in itertools.product(*pools):
            if all(
                (m.state_map if level == "s" else m.path_map)[t[pos[a]]] == t[pos[b]]
                for a, b, m in D.edges
            ):
                yield t

    states, paths = list(families("s")), list(families("p"))
    src = {p: tuple(F.src[x] for F, x in zip(flows, p)) for p in paths}
    tgt = {p: tuple(F.tgt[x] for F, x in zip(flows, p)) for p in paths}
    comp = {
        (p, q): tuple(F.comp[x, y] for F, x, y in zip(flows, p, q))
        for p in paths
        for q in paths
        if tgt[p] == src[q]
    }
    return Flow(states, paths, src, tgt, comp)


def _star():
    return Flow(["*"], (), {}, {})


def _concat_span():
    Iv, Iw = globe(["v"]), globe(["w"])
    return FlowMorphism(_star(), Iv, {"*": 1}, {}), FlowMorphism(_star(), Iw, {"*": 0}, {})


def _self_gluing():
    I = segment()
    return Diagram(
        {"p": point(), "I": I},
        [Edge("p", "I", FlowMorphism(point(), I, {0: 0}, {})), Edge("p", "I", FlowMorphism(point(), I, {0: 1}, {}))],
    )


# ---------------------------------------------------------------------------
# limits


def test_discrete_limit_is_the_product():
    for X, Y in [(segment(), segment()), (glob_concat(["x"], ["y"]), terminal())]:
        L, _ = limit(Diagram({0: X, 1: Y}, []))
        assert find_isomorphism(L, cartesian_product(X, Y)) is not None


def test_empty_limit_is_terminal():
    L, cone = limit(Diagram({}, []))
    assert L == terminal() and not cone.legs


def test_pullback_of_concat_inclusions():
    C = glob_concat(["x"], ["y"])
    gx, gy = globe(["x"]), globe(["y"])
    ix = FlowMorphism(gx, C, {0: 0, 1: 1}, {"x": "x"})
    iy = FlowMorphism(gy, C, {0: 1, 1: 2}, {"y": "y"})
    D = Diagram({"x": gx, "y": gy, "c": C}, [Edge("x", "c", ix), Edge("y", "c", iy)])
    L, _ = limit(D)
    assert len(L.states) == 1 and not L.paths
    assert find_isomorphism(L, naive_limit(D)) is not None


def _random_diagram(data, flows, n_nodes=3, n_edges=3):
    nodes = {i: data.draw(flows) for i in range(n_nodes)}
    edges = []
    for _ in range(n_edges):
        a, b = data.draw(st.tuples(st.integers(0, n_nodes - 1), st.integers(0, n_nodes - 1)))
        if a == b:
            continue
        ms = enumerate_morphisms(nodes[a], nodes[b])
        if ms:
            edges.append(Edge(a, b, data.draw(st.sampled_from(ms))))
    return Diagram(nodes, edges)


@given(st.data())
@settings(max_examples=60, deadline=None)
def test_limit_matches_naive_families(data):
    D = _random_diagram(data, small_flows)
    L, cone = limit(D)
    assert validate(L) == []
    N = naive_limit(D)
    assert len(L.states) == len(N.states) and len(L.paths) == len(N.paths)
    assert L == N  # same tuple naming, so equal on the nose
    for a, b, m in D.edges:
        assert cone.legs[a].then(m) == cone.legs[b]


_PROBES = [point(), achronal_set(2), segment(), terminal()]


@given(st.data())
@settings(max_examples=30, deadline=None)
def test_limit_universal_property(data):
    D = _random_diagram(data, small_flows, n_nodes=2, n_edges=2)
    L, cone = limit(D)
    nodes = D.sorted_nodes
    for T in _PROBES:
        cones = []
        for legs in itertools.product(*(enumerate_morphisms(T, D.nodes[n]) for n in nodes)):
            legs = dict(zip(nodes, legs))
            if all(legs[a].then(m) == legs[b] for a, b, m in D.edges):
                cones.append(legs)
        into = enumerate_morphisms(T, L)
        assert len(into) == len(cones)
        for legs in cones:
            u = induced_into_limit(D, L, legs)
            assert check_morphism(u)
            assert all(u.then(cone.legs[n]) == legs[n] for n in nodes)


# ---------------------------------------------------------------------------
# colimits


def test_concatenation_pushout():
    P, cocone = pushout(*_concat_span())
    assert len(P.states) == 3 and len(P.paths) == 3
    assert find_isomorphism(P, glob_concat(["x"], ["y"])) is not None
    assert len(P.comp) == 1


def test_coproduct():
    C, _ = colimit(Diagram({0: segment(), 1: point()}, []))
    assert len(C.states) == 3 and len(C.paths) == 1


def test_empty_colimit_is_empty():
    C, _ = colimit(Diagram({}, []))
    assert not C.states and not C.paths


@pytest.mark.parametrize("budget", [1, 3, 10, 100, 1000])
def test_self_gluing_overflows_at_every_budget(budget):
    with pytest.raises(Overflow) as info:
        colimit(_self_gluing(), budget)
    assert info.value.budget == budget
    assert info.value.cycle == [("I", "I")]


def test_self_gluing_words_keep_growing():
    # in the free monoid on one loop every power is new: a budget of n
    # truncates the words I, II, ..., so larger budgets never settle
    seen = []
    for budget in (2, 4, 8, 16):
        try:
            colimit(_self_gluing(), budget)
        except Overflow:
            seen.append(budget)
    assert seen == [2, 4, 8, 16]


def test_idempotent_gluing_terminates():
    # gluing both ends of the segment into the terminal flow is fine: u*u = u
    T = terminal()
    D = Diagram({"I": segment(), "T": T}, [Edge("I", "T", FlowMorphism(segment(), T, {0: 0, 1: 0}, {"I": "u"}))])
    C, _ = colimit(D)
    assert find_isomorphism(C, T) is not None


def _spans(apex, flows):
    out = []
    for B, C in itertools.product(flows, repeat=2):
        for f in enumerate_morphisms(apex, B):
            for g in enumerate_morphisms(apex, C):
                out.append((f, g))
    return out


_SPAN_FLOWS = [point(), segment(), globe(["a", "b"]), glob_concat(["x"], ["y"]), terminal()]


def _pushout_or_skip(f, g, budget=500):
    try:
        return pushout(f, g, budget)
    except Overflow:
        return None


# spans whose pushout is finite; gluing both ends of a path overflows
SPANS = [
    (f, g)
    for f, g in _spans(point(), _SPAN_FLOWS)[::3] + _spans(achronal_set(2), _SPAN_FLOWS[:3])[::5]
    if _pushout_or_skip(f, g) is not None
]


@pytest.mark.parametrize("i", range(len(SPANS)))
def test_pushout_universal_property(i):
    f, g = SPANS[i]
    P, cocone = pushout(f, g)
    assert validate(P) == []
    assert f.then(cocone.legs[1]) == cocone.legs[0] == g.then(cocone.legs[2])
    for T in (point(), segment(), terminal(), glob_concat(["x"], ["y"])):
        pairs = [
            (b, c)
            for b in enumerate_morphisms(f.target, T)
            for c in enumerate_morphisms(g.target, T)
            if f.then(b) == g.then(c)
        ]
        out = enumerate_morphisms(P, T)
        assert len(out) == len(pairs)
        for b, c in pairs:
            u = induced_from_colimit(cocone, {0: f.then(b), 1: b, 2: c}, T)
            assert check_morphism(u)
            assert cocone.legs[1].then(u) == b and cocone.legs[2].then(u) == c


def _shuffled(D: Diagram, rng: random.Random) -> Diagram:
    keys = list(D.nodes)
    rng.shuffle(keys)
    edges = list(D.edges)
    rng.shuffle(edges)
    return Diagram({k: D.nodes[k] for k in keys}, edges)


@pytest.mark.parametrize("name", CORPUS_IDS)
def test_colimit_is_confluent(name):
    D = canonical_decomposition(CORPUS[name])
    reference = serialize_flow(colimit(D)[0])
    rng = random.Random(name)
    for _ in range(5):
        assert serialize_flow(colimit(_shuffled(D, rng))[0]) == reference


@given(corpus_flows, st.sampled_from(range(len(SPANS))))
@settings(max_examples=60, deadline=None)
def test_tensor_preserves_pushouts(W, i):
    f, g = SPANS[i]
    P, _ = pushout(f, g)
    idW = FlowMorphism.identity(W)
    glued = _pushout_or_skip(tensor_morphism(idW, f), tensor_morphism(idW, g), 2000)
    assert glued is not None
    assert find_isomorphism(glued[0], tensor(W, P)) is not None


# ---------------------------------------------------------------------------
# canonical decomposition


def _kinds(D):
    out = {"point": 0, "globe": 0, "concat": 0}
    for n in D.nodes:
        out[n[0]] += 1
    return out


def test_decomposition_examples():
    D = canonical_decomposition(segment())
    assert _kinds(D) == {"point": 2, "globe": 1, "concat": 0} and len(D.edges) == 2
    D = canonical_decomposition(glob_concat(["x"], ["y"]))
    assert _kinds(D) == {"point": 3, "globe": 3, "concat": 1}
    D = canonical_decomposition(terminal())
    assert _kinds(D) == {"point": 1, "globe": 1, "concat": 1}
    assert find_isomorphism(colimit(D)[0], terminal()) is not None


@pytest.mark.parametrize("name", CORPUS_IDS)
def test_decomposition_reconstructs(name):
    X = CORPUS[name]
    D = canonical_decomposition(X)
    assert D.problems() == []
    L, _ = colimit(D)
    assert find_isomorphism(L, X) is not None


# ---------------------------------------------------------------------------
# products do not commute with colimits


def test_counterexample_cartesian():
    r = counterexample_cartesian()
    assert (r.lhs_paths, r.rhs_paths, r.isomorphic) == (2, 3, False)


def test_counterexample_with_tensor():
    r = counterexample_cartesian("tensor")
    assert r.isomorphic and r.lhs_paths == r.rhs_paths
    with pytest.raises(ValueError):
        counterexample_cartesian("smash")
