"""The internal hom of flows, three ways, and the currying bijection.

``hom_direct`` enumerates morphisms and coherent path families directly.
``hom_globe`` is the explicit construction for a globe domain, whose paths
are pullback quadruples.  ``hom_via_decomposition`` glues ``hom_globe``
objects along the canonical decomposition of the domain by a limit.
"""

from __future__ import annotations

import random
from collections import defaultdict
from dataclasses import dataclass
from itertools import product as cartesian
from typing import Callable, Hashable, Mapping, NamedTuple

from .core import (
    DEFAULT_SEARCH_BUDGET,
    BudgetExceeded,
    Flow,
    FlowMorphism,
    achronal_set,
    check_morphism,
    enumerate_morphisms,
    point,
    segment,
    sort_key,
)
from .diagram import Diagram, Edge, canonical_decomposition, limit
from .monoidal import TensorComponent, tensor, tensor_morphism

__all__ = [
    "AdjunctionReport",
    "GlobeMap",
    "GlobePath",
    "HomPath",
    "check_adjunction",
    "curry",
    "hom_direct",
    "hom_globe",
    "hom_postcompose",
    "hom_precompose",
    "hom_via_decomposition",
    "uncurry",
]


@dataclass(frozen=True)
class HomPath:
    """A path of ``hom(Y, Z)`` from ``u`` to ``v``.

    ``h`` assigns to each state of ``Y`` a path of ``Z`` from ``u(state)`` to
    ``v(state)``, subject to ``u(y) * h(t y) = h(s y) * v(y)`` for every
    path ``y`` of ``Y``.  It is stored as sorted ``(state, path)`` pairs.
    """

    u: FlowMorphism
    v: FlowMorphism
    h: tuple

    def __post_init__(self):
        if isinstance(self.h, Mapping):
            object.__setattr__(self, "h", tuple(sorted(self.h.items(), key=sort_key)))

    @property
    def family(self) -> dict:
        return dict(self.h)

    def _sort_key(self) -> tuple:
        return (self.u._sort_key(), self.v._sort_key(), sort_key(self.h))

    def is_coherent(self) -> bool:
        Y, Z = self.u.source, self.u.target
        h = self.family
        if set(h) != Y.states:
            return False
        for a, p in h.items():
            if p not in Z.fiber(self.u.state_map[a], self.v.state_map[a]):
                return False
        for y in Y.paths:
            left = Z.comp.get((self.u.path_map[y], h[Y.tgt[y]]))
            right = Z.comp.get((h[Y.src[y]], self.v.path_map[y]))
            if left is None or left != right:
                return False
        return True


def _hom_families(Y: Flow, Z: Flow, u: FlowMorphism, v: FlowMorphism, budget: list):
    """Coherent families for the pair ``(u, v)``, by backtracking over states."""
    states = Y.sorted_states
    position = {s: i for i, s in enumerate(states)}
    # a path of Y is checked once both of its endpoints carry a value
    checks = defaultdict(list)
    for y in Y.sorted_paths:
        checks[max(position[Y.src[y]], position[Y.tgt[y]])].append(y)
    h: dict = {}

    def go(i):
        if i == len(states):
            yield dict(h)
            return
        a = states[i]
        for p in Z.fiber(u.state_map[a], v.state_map[a]):
            budget[0] -= 1
            if budget[0] < 0:
                raise BudgetExceeded("hom path enumeration exceeded its budget")
            h[a] = p
            if all(
                Z.comp.get((u.path_map[y], h[Y.tgt[y]])) == Z.comp.get((h[Y.src[y]], v.path_map[y]))
                for y in checks[i]
            ):
                yield from go(i + 1)
            del h[a]

    yield from go(0)


def hom_direct(Y: Flow, Z: Flow, *, budget: int = DEFAULT_SEARCH_BUDGET) -> Flow:
    """``hom(Y, Z)``: morphisms ``Y -> Z`` as states, :class:`HomPath` as paths."""
    morphisms = enumerate_morphisms(Y, Z, budget=budget)
    remaining = [budget]
    paths = []
    for u in morphisms:
        for v in morphisms:
            for h in _hom_families(Y, Z, u, v, remaining):
                paths.append(HomPath(u, v, h))
    index = {(p.u, p.v, p.h): p for p in paths}
    by_source = defaultdict(list)
    for p in paths:
        by_source[p.u].append(p)
    comp = {}
    for p in paths:
        hp = p.family
        for q in by_source[p.v]:
            hq = q.family
            h = tuple((a, Z.comp[hp[a], hq[a]]) for a, _ in p.h)
            comp[p, q] = index[p.u, q.v, h]
    return Flow(
        morphisms,
        paths,
        {p: p.u for p in paths},
        {p: p.v for p in paths},
        comp,
    )


# ---------------------------------------------------------------------------
# the explicit construction for globes


class GlobeMap(NamedTuple):
    """A state of ``hom(Glob(A), Z)``: endpoints and a map ``A -> P_{alpha,beta} Z``."""

    alpha: Hashable
    beta: Hashable
    m: tuple  # sorted (a, path) pairs


class GlobePath(NamedTuple):
    """A path ``(m, p, q, n)`` with ``m(a) * p = q * n(a)`` for all ``a``."""

    m: GlobeMap
    p: Hashable  # in P_{beta, delta} Z
    q: Hashable  # in P_{alpha, gamma} Z
    n: GlobeMap


def _globe_maps(A: tuple, Z: Flow) -> list[GlobeMap]:
    out = []
    for alpha in Z.sorted_states:
        for beta in Z.sorted_states:
            fiber = Z.fiber(alpha, beta)
            for images in cartesian(fiber, repeat=len(A)):
                out.append(GlobeMap(alpha, beta, tuple(zip(A, images))))
    return out


def hom_globe(A, Z: Flow) -> Flow:
    """``hom(Glob(A), Z)`` built from the pullback description of its paths."""
    A = tuple(sorted(A, key=sort_key))
    states = _globe_maps(A, Z)
    by_ends = defaultdict(list)
    for s in states:
        by_ends[s.alpha, s.beta].append(s)
    paths = []
    for m in states:
        for n in states:
            for p in Z.fiber(m.beta, n.beta):
                for q in Z.fiber(m.alpha, n.alpha):
                    if all(
                        Z.comp[ma, p] == Z.comp[q, na]
                        for (_, ma), (_, na) in zip(m.m, n.m)
                    ):
                        paths.append(GlobePath(m, p, q, n))
    by_source = defaultdict(list)
    for x in paths:
        by_source[x.m].append(x)
    comp = {}
    for x in paths:
        for y in by_source[x.n]:
            comp[x, y] = GlobePath(x.m, Z.comp[x.p, y.p], Z.comp[x.q, y.q], y.n)
    return Flow(
        states,
        paths,
        {x: x.m for x in paths},
        {x: x.n for x in paths},
        comp,
    )


# ---------------------------------------------------------------------------
# gluing along the canonical decomposition


class _Evaluated(NamedTuple):
    """A hom flow over a decomposition node, with evaluation at node elements.

    ``state_eval(s)`` maps every state and path of the node flow to ``Z``;
    ``path_eval(x)`` maps every state of the node flow to a path of ``Z``.
    """

    node: Flow
    flow: Flow
    state_eval: Callable[[Hashable], dict]
    path_eval: Callable[[Hashable], dict]


def _signatures(ev: _Evaluated):
    elems = ev.node.sorted_states + ev.node.sorted_paths

    def state_sig(values: dict) -> tuple:
        return tuple(values[e] for e in elems)

    def path_sig(src_values: dict, tgt_values: dict, values: dict) -> tuple:
        return (state_sig(src_values), state_sig(tgt_values), tuple(values[a] for a in ev.node.sorted_states))

    return state_sig, path_sig


def _restriction(big: _Evaluated, small: _Evaluated, m: FlowMorphism) -> FlowMorphism:
    """``hom(m, Z)``: restrict along ``m: small.node -> big.node``."""
    state_sig, path_sig = _signatures(small)
    state_index = {state_sig(small.state_eval(s)): s for s in small.flow.states}
    path_index = {
        path_sig(
            small.state_eval(small.flow.src[x]),
            small.state_eval(small.flow.tgt[x]),
            small.path_eval(x),
        ): x
        for x in small.flow.paths
    }
    node = small.node

    def pull_state(values: dict) -> dict:
        return {e: values[m(e)] for e in node.states | node.paths}

    def pull_path(values: dict) -> dict:
        return {a: values[m.state_map[a]] for a in node.states}

    F = big.flow
    smap = {s: state_index[state_sig(pull_state(big.state_eval(s)))] for s in F.states}
    pmap = {
        x: path_index[
            path_sig(
                pull_state(big.state_eval(F.src[x])),
                pull_state(big.state_eval(F.tgt[x])),
                pull_path(big.path_eval(x)),
            )
        ]
        for x in F.paths
    }
    return FlowMorphism(F, small.flow, smap, pmap)


def _evaluated_point(Z: Flow, node: Flow) -> _Evaluated:
    return _Evaluated(node, Z, lambda z: {0: z}, lambda p: {0: p})


def _evaluated_globe(Z: Flow, node: Flow) -> _Evaluated:
    (label,) = node.paths
    H = hom_globe([label], Z)

    def state_eval(s: GlobeMap) -> dict:
        return {0: s.alpha, 1: s.beta, **dict(s.m)}

    return _Evaluated(node, H, state_eval, lambda x: {0: x.q, 1: x.p})


def _evaluated_concat(Z: Flow, node: Flow) -> _Evaluated:
    """Pullback of ``hom(Glob(a), Z) -> Z <- hom(Glob(b), Z)`` over the middle state."""
    first = hom_globe(["a"], Z)
    second = hom_globe(["b"], Z)
    at_end = FlowMorphism(first, Z, {s: s.beta for s in first.states}, {x: x.p for x in first.paths})
    at_start = FlowMorphism(second, Z, {s: s.alpha for s in second.states}, {x: x.q for x in second.paths})
    D = Diagram({"A": first, "B": second, "mid": Z}, [Edge("A", "mid", at_end), Edge("B", "mid", at_start)])
    L, cone = limit(D)
    leg_a, leg_b = cone.legs["A"], cone.legs["B"]

    def state_eval(s) -> dict:
        sa, sb = leg_a.state_map[s], leg_b.state_map[s]
        ma, mb = dict(sa.m)["a"], dict(sb.m)["b"]
        return {0: sa.alpha, 1: sa.beta, 2: sb.beta, "a": ma, "b": mb, ("a", "b"): Z.comp[ma, mb]}

    def path_eval(x) -> dict:
        xa, xb = leg_a.path_map[x], leg_b.path_map[x]
        return {0: xa.q, 1: xa.p, 2: xb.p}

    return _Evaluated(node, L, state_eval, path_eval)


def hom_via_decomposition(Y: Flow, Z: Flow) -> Flow:
    """``hom(Y, Z)`` as the limit of ``hom(-, Z)`` over the decomposition of ``Y``."""
    D = canonical_decomposition(Y)
    builders = {"point": _evaluated_point, "globe": _evaluated_globe, "concat": _evaluated_concat}
    cache: dict = {}
    evaluated = {}
    for n, node_flow in D.nodes.items():
        kind = n[0]
        if kind not in cache:
            cache[kind] = builders[kind](Z, node_flow)
        evaluated[n] = cache[kind]
    restrictions: dict = {}
    edges = []
    for a, b, m in D.edges:
        key = (a[0], b[0], frozenset(m.state_map.items()), frozenset(m.path_map.items()))
        if key not in restrictions:
            restrictions[key] = _restriction(evaluated[b], evaluated[a], m)
        edges.append(Edge(b, a, restrictions[key]))
    L, _ = limit(Diagram({n: ev.flow for n, ev in evaluated.items()}, edges))
    return L


# ---------------------------------------------------------------------------
# functoriality of hom


def hom_precompose(f: FlowMorphism, Z: Flow, source: Flow | None = None, target: Flow | None = None) -> FlowMorphism:
    """``hom(f, Z): hom(Y, Z) -> hom(Y', Z)`` for ``f: Y' -> Y``."""
    source = source or hom_direct(f.target, Z)
    target = target or hom_direct(f.source, Z)
    smap = {u: f.then(u) for u in source.states}
    pmap = {
        x: HomPath(smap[x.u], smap[x.v], {a: x.family[f.state_map[a]] for a in f.source.states})
        for x in source.paths
    }
    return FlowMorphism(source, target, smap, pmap)


def hom_postcompose(Y: Flow, g: FlowMorphism, source: Flow | None = None, target: Flow | None = None) -> FlowMorphism:
    """``hom(Y, g): hom(Y, Z) -> hom(Y, Z')`` for ``g: Z -> Z'``."""
    source = source or hom_direct(Y, g.source)
    target = target or hom_direct(Y, g.target)
    smap = {u: u.then(g) for u in source.states}
    pmap = {
        x: HomPath(smap[x.u], smap[x.v], {a: g.path_map[p] for a, p in x.h})
        for x in source.paths
    }
    return FlowMorphism(source, target, smap, pmap)


# ---------------------------------------------------------------------------
# currying


def curry(f: FlowMorphism, X: Flow, Y: Flow, hom: Flow | None = None) -> FlowMorphism:
    """Turn ``f: X (x) Y -> Z`` into ``X -> hom(Y, Z)``."""
    Z = f.target
    hom = hom or hom_direct(Y, Z)
    u = {}
    for a in X.states:
        u[a] = FlowMorphism(
            Y,
            Z,
            {b: f.state_map[a, b] for b in Y.states},
            {y: f.path_map[TensorComponent("SP", a, y)] for y in Y.paths},
        )
    pmap = {
        x: HomPath(u[X.src[x]], u[X.tgt[x]], {b: f.path_map[TensorComponent("PS", x, b)] for b in Y.states})
        for x in X.paths
    }
    return FlowMorphism(X, hom, u, pmap)


def uncurry(g: FlowMorphism, Y: Flow, Z: Flow, source: Flow | None = None) -> FlowMorphism:
    """Turn ``g: X -> hom(Y, Z)`` into ``X (x) Y -> Z``."""
    X = g.source
    source = source or tensor(X, Y)
    smap = {(a, b): g.state_map[a].state_map[b] for a, b in source.states}
    pmap = {}
    for c in source.paths:
        tag, left, right = c
        if tag == "SP":
            pmap[c] = g.state_map[left].path_map[right]
        elif tag == "PS":
            pmap[c] = g.path_map[left].family[right]
        else:
            hp = g.path_map[left]
            # equal to h(src y) * v(y) by coherence
            pmap[c] = Z.comp[hp.u.path_map[right], hp.family[Y.tgt[right]]]
    return FlowMorphism(source, Z, smap, pmap)


# ---------------------------------------------------------------------------
# the adjunction, checked by enumeration


@dataclass(frozen=True)
class AdjunctionReport:
    lhs_count: int
    rhs_count: int
    bijection_ok: bool
    natural_ok: bool
    naturality_checked: int = 0

    @property
    def holds(self) -> bool:
        return self.lhs_count == self.rhs_count and self.bijection_ok and self.natural_ok


def _probe_flows() -> list[Flow]:
    return [point(), achronal_set(2), segment()]


def check_adjunction(
    X: Flow,
    Y: Flow,
    Z: Flow,
    *,
    naturality_samples: int = 20,
    seed: int = 0,
    budget: int = DEFAULT_SEARCH_BUDGET,
) -> AdjunctionReport:
    """Compare ``Flow(X (x) Y, Z)`` with ``Flow(X, hom(Y, Z))`` exhaustively.

    Naturality in ``X`` is sampled: for morphisms ``k: X' -> X`` from a few
    small probe flows (and ``X`` itself) and morphisms ``f``, checks
    ``curry(f . (k (x) id)) == curry(f) . k``.
    """
    XY = tensor(X, Y)
    H = hom_direct(Y, Z, budget=budget)
    lhs = enumerate_morphisms(XY, Z, budget=budget)
    rhs = enumerate_morphisms(X, H, budget=budget)
    rhs_set = set(rhs)

    bijection_ok = len(lhs) == len(rhs)
    curried = []
    for f in lhs:
        c = curry(f, X, Y, H)
        curried.append(c)
        if c not in rhs_set or uncurry(c, Y, Z, XY) != f:
            bijection_ok = False
    if len(set(curried)) != len(curried):
        bijection_ok = False
    for g in rhs:
        if curry(uncurry(g, Y, Z, XY), X, Y, H) != g:
            bijection_ok = False

    rng = random.Random(seed)
    pairs = []
    for probe in _probe_flows() + [X]:
        for k in enumerate_morphisms(probe, X, budget=budget):
            pairs.extend((k, i) for i in range(len(lhs)))
    rng.shuffle(pairs)
    natural_ok = True
    checked = 0
    idY = FlowMorphism.identity(Y)
    for k, i in pairs[:naturality_samples]:
        f = lhs[i]
        kY = tensor_morphism(k, idY, target=XY)
        before = curry(kY.then(f), k.source, Y, H)
        after = k.then(curried[i])
        checked += 1
        if before != after or not check_morphism(before):
            natural_ok = False
    return AdjunctionReport(len(lhs), len(rhs), bijection_ok, natural_ok, checked)
