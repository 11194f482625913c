"""Finite diagrams of flows, their limits and colimits.

Limits are computed levelwise as compatible families.  Colimits glue the
states, then present the path space as the free category on the glued
generators modulo each node's composition table, and enumerate that
quotient with a Todd-Coxeter style coset enumeration bounded by a budget.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Hashable, Mapping, NamedTuple, Sequence

from .core import (
    Flow,
    FlowMorphism,
    check_morphism,
    empty,
    find_isomorphism,
    glob_concat,
    globe,
    point,
    segment,
    sort_key,
    terminal,
)
from .monoidal import cartesian_product, product_morphism, tensor, tensor_morphism

__all__ = [
    "Cocone",
    "Composite",
    "Cone",
    "CounterexampleReport",
    "Diagram",
    "Edge",
    "Overflow",
    "DEFAULT_COLIMIT_BUDGET",
    "canonical_decomposition",
    "colimit",
    "counterexample_cartesian",
    "induced_from_colimit",
    "induced_into_limit",
    "limit",
    "pushout",
]

DEFAULT_COLIMIT_BUDGET = 10_000


class Overflow(RuntimeError):
    """Colimit saturation produced more paths than the budget allows.

    ``cycle`` lists generator names forming a directed loop of the glued
    generator graph when there is one; such a loop is what makes a colimit
    infinite.
    """

    def __init__(self, budget: int, cycle: Sequence | None):
        self.budget = budget
        self.cycle = list(cycle) if cycle else None
        msg = f"colimit saturation exceeded {budget} paths"
        if self.cycle:
            msg += "; generator cycle: " + " -> ".join(map(repr, self.cycle))
        super().__init__(msg)


class Edge(NamedTuple):
    source: Hashable
    target: Hashable
    morphism: FlowMorphism


@dataclass(frozen=True)
class Diagram:
    nodes: Mapping[Hashable, Flow]
    edges: tuple[Edge, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "nodes", dict(self.nodes))
        object.__setattr__(self, "edges", tuple(Edge(*e) for e in self.edges))

    @property
    def sorted_nodes(self) -> tuple:
        return tuple(sorted(self.nodes, key=sort_key))

    def problems(self) -> list[str]:
        out = []
        for i, (a, b, m) in enumerate(self.edges):
            if a not in self.nodes or b not in self.nodes:
                out.append(f"edge {i} refers to an unknown node")
            elif m.source != self.nodes[a] or m.target != self.nodes[b]:
                out.append(f"edge {i} does not connect the flows at {a!r} and {b!r}")
            elif not check_morphism(m):
                out.append(f"edge {i} is not a morphism of flows")
        return out


@dataclass(frozen=True)
class Cone:
    apex: Flow
    legs: Mapping[Hashable, FlowMorphism]


@dataclass(frozen=True)
class Cocone:
    apex: Flow
    legs: Mapping[Hashable, FlowMorphism]
    # for colimits built here: each path of the apex as a word of (node, path) generators
    words: Mapping[Hashable, tuple] = field(default_factory=dict)


class Composite(NamedTuple):
    """A colimit path that is not a generator, named by its shortlex-least word."""

    factors: tuple


# ---------------------------------------------------------------------------
# limits


def _node_order(D: Diagram) -> list:
    """Backtracking order: favour nodes whose value is forced by earlier ones."""
    nodes = list(D.sorted_nodes)
    out_deg = defaultdict(int)
    for a, b, _ in D.edges:
        out_deg[a] += 1
    order, placed = [], set()
    while len(order) < len(nodes):
        def score(n):
            forced = any(b == n and a in placed for a, b, _ in D.edges)
            linked = sum((a == n and b in placed) or (b == n and a in placed) for a, b, _ in D.edges)
            return (forced, linked, out_deg[n])

        best = max((n for n in nodes if n not in placed), key=score)
        order.append(best)
        placed.add(best)
    return order


def _families(D: Diagram, level: str) -> list[tuple]:
    """Compatible families of states (``level="states"``) or paths."""
    nodes = D.sorted_nodes
    order = _node_order(D)
    attr = "state_map" if level == "states" else "path_map"
    elements = {
        n: (D.nodes[n].sorted_states if level == "states" else D.nodes[n].sorted_paths)
        for n in nodes
    }
    incoming = defaultdict(list)  # node -> [(source node, map)]
    outgoing = defaultdict(list)  # node -> [(target node, map)]
    for a, b, m in D.edges:
        mp = getattr(m, attr)
        outgoing[a].append((b, mp))
        incoming[b].append((a, mp))
    preimages = {}
    for a, b, m in D.edges:
        index = defaultdict(list)
        for x in elements[a]:
            index[getattr(m, attr)[x]].append(x)
        preimages[id(m), a, b] = index

    value: dict = {}
    results = []

    def consistent(n, x) -> bool:
        for b, mp in outgoing[n]:
            if b == n:
                if mp[x] != x:
                    return False
            elif b in value and mp[x] != value[b]:
                return False
        return all(mp[value[a]] == x for a, mp in incoming[n] if a in value)

    def candidates(n):
        for a, mp in incoming[n]:
            if a in value:
                return (mp[value[a]],)
        for a, b, m in D.edges:
            if a == n and b != n and b in value:
                return tuple(preimages[id(m), a, b].get(value[b], ()))
        return elements[n]

    def go(k):
        if k == len(order):
            results.append(tuple(value[n] for n in nodes))
            return
        n = order[k]
        for x in candidates(n):
            if consistent(n, x):
                value[n] = x
                go(k + 1)
                del value[n]

    go(0)
    return sorted(results, key=sort_key)


def limit(D: Diagram) -> tuple[Flow, Cone]:
    """Levelwise limit; families are tuples ordered like ``D.sorted_nodes``."""
    if not D.nodes:
        return terminal(), Cone(terminal(), {})
    nodes = D.sorted_nodes
    states = _families(D, "states")
    paths = _families(D, "paths")
    flows = [D.nodes[n] for n in nodes]
    src = {p: tuple(F.src[x] for F, x in zip(flows, p)) for p in paths}
    tgt = {p: tuple(F.tgt[x] for F, x in zip(flows, p)) for p in paths}
    path_set = set(paths)
    by_source = defaultdict(list)
    for p in paths:
        by_source[src[p]].append(p)
    comp = {}
    for p in paths:
        for q in by_source[tgt[p]]:
            r = tuple(F.comp[x, y] for F, x, y in zip(flows, p, q))
            assert r in path_set, "limit families must be closed under composition"
            comp[p, q] = r
    L = Flow(states, paths, src, tgt, comp)
    legs = {
        n: FlowMorphism(L, D.nodes[n], {s: s[i] for s in states}, {p: p[i] for p in paths})
        for i, n in enumerate(nodes)
    }
    return L, Cone(L, legs)


def induced_into_limit(D: Diagram, L: Flow, legs: Mapping[Hashable, FlowMorphism]) -> FlowMorphism:
    """Mediating morphism ``T -> lim D`` for a cone ``legs`` with apex ``T``."""
    nodes = D.sorted_nodes
    T = legs[nodes[0]].source
    return FlowMorphism(
        T,
        L,
        {s: tuple(legs[n].state_map[s] for n in nodes) for s in T.states},
        {p: tuple(legs[n].path_map[p] for n in nodes) for p in T.paths},
    )


# ---------------------------------------------------------------------------
# colimits


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def add(self, x):
        self.parent.setdefault(x, x)

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb

    def classes(self) -> dict:
        out = defaultdict(list)
        for x in self.parent:
            out[self.find(x)].append(x)
        return out


def _find_cycle(vertices, edges) -> list | None:
    """A directed cycle in a multigraph given as ``[(src, tgt, label)]``."""
    adj = defaultdict(list)
    for a, b, label in edges:
        adj[a].append((b, label))
    colour = {v: 0 for v in vertices}
    stack: list = []

    def dfs(v):
        colour[v] = 1
        for w, label in adj[v]:
            stack.append((v, label))
            if colour[w] == 1:
                start = next(i for i, (u, _) in enumerate(stack) if u == w)
                return [lab for _, lab in stack[start:]]
            if colour[w] == 0:
                found = dfs(w)
                if found:
                    return found
            stack.pop()
        colour[v] = 2
        return None

    for v in vertices:
        if colour[v] == 0:
            found = dfs(v)
            if found:
                return found
    return None


class _CosetTable:
    """Right Cayley graph of a finitely presented category.

    Rows are indexed by integers.  Rows ``0..k-1`` are the identities of the
    ``k`` objects; every other row is a non-identity element.  Relations
    ``g1 g2 = g3`` are imposed at every row, which yields the two-sided
    congruence.
    """

    def __init__(self, objects, gens, gsrc, gtgt, relations, budget):
        self.gens_from = defaultdict(list)
        for g in gens:
            self.gens_from[gsrc[g]].append(g)
        self.rels_from = defaultdict(list)
        for g1, g2, g3 in relations:
            self.rels_from[gsrc[g1]].append((g1, g2, g3))
        self.gtgt = gtgt
        self.budget = budget
        self.rows: list[dict] = []
        self.end: list = []  # target object of each row
        self.parent: list[int] = []
        self.live = 0
        for obj in objects:
            self._new_row(obj, identity=True)
        self.n_objects = len(objects)

    def _new_row(self, obj, identity=False) -> int:
        self.rows.append({})
        self.end.append(obj)
        self.parent.append(len(self.parent))
        if not identity:
            self.live += 1
            if self.live > self.budget:
                raise _BudgetHit
        return len(self.rows) - 1

    def find(self, r: int) -> int:
        root = r
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[r] != root:
            self.parent[r], r = root, self.parent[r]
        return root

    def define(self, r: int, g) -> int:
        r = self.find(r)
        row = self.rows[r]
        if g not in row:
            row[g] = self._new_row(self.gtgt[g])
        return self.find(row[g])

    def coincide(self, a: int, b: int):
        queue = [(a, b)]
        while queue:
            a, b = (self.find(x) for x in queue.pop())
            if a == b:
                continue
            keep, drop = min(a, b), max(a, b)
            self.parent[drop] = keep
            if drop >= self.n_objects:
                self.live -= 1
            kept = self.rows[keep]
            for g, t in self.rows[drop].items():
                if g in kept:
                    queue.append((t, kept[g]))
                else:
                    kept[g] = t
            self.rows[drop] = {}

    def run(self):
        r = 0
        while r < len(self.rows):
            if self.find(r) == r:
                for g1, g2, g3 in self.rels_from[self.end[r]]:
                    left = self.define(self.define(r, g1), g2)
                    right = self.define(r, g3)
                    if left != right:
                        self.coincide(left, right)
                    if self.find(r) != r:
                        break
                if self.find(r) == r:
                    for g in self.gens_from[self.end[r]]:
                        self.define(r, g)
            r += 1


class _BudgetHit(Exception):
    pass


def colimit(D: Diagram, budget: int = DEFAULT_COLIMIT_BUDGET) -> tuple[Flow, Cocone]:
    """Colimit of a finite diagram, or :class:`Overflow` past ``budget`` paths.

    States are classes of ``(node, state)`` pairs and generators classes of
    ``(node, path)`` pairs, each named by its least member.  A path of the
    colimit is named by the least generator it contains, or else by the
    shortlex-least word of generators (a :class:`Composite`); the naming
    depends only on the quotient, not on the order relations are applied.
    """
    if not D.nodes:
        E = empty()
        return E, Cocone(E, {})
    nodes = D.sorted_nodes

    states = _UnionFind()
    gens = _UnionFind()
    for n in nodes:
        F = D.nodes[n]
        for s in F.states:
            states.add((n, s))
        for p in F.paths:
            gens.add((n, p))
    for a, b, m in D.edges:
        for s, t in m.state_map.items():
            states.union((a, s), (b, t))
        for p, q in m.path_map.items():
            gens.union((a, p), (b, q))

    state_name = {}
    for members in states.classes().values():
        name = min(members, key=sort_key)
        for x in members:
            state_name[x] = name
    gen_name = {}
    for members in gens.classes().values():
        name = min(members, key=sort_key)
        for x in members:
            gen_name[x] = name

    gsrc, gtgt = {}, {}
    for (n, p), g in gen_name.items():
        F = D.nodes[n]
        gsrc[g] = state_name[n, F.src[p]]
        gtgt[g] = state_name[n, F.tgt[p]]
    objects = sorted(set(state_name.values()), key=sort_key)
    generators = sorted(set(gen_name.values()), key=sort_key)
    relations = sorted(
        {
            (gen_name[n, x], gen_name[n, y], gen_name[n, z])
            for n in nodes
            for (x, y), z in D.nodes[n].comp.items()
        },
        key=sort_key,
    )

    table = _saturate(objects, generators, gsrc, gtgt, relations, budget)
    apex, words, element_of = _read_off(table, objects, generators, gsrc, gtgt)

    legs = {}
    for n in nodes:
        F = D.nodes[n]
        legs[n] = FlowMorphism(
            F,
            apex,
            {s: state_name[n, s] for s in F.states},
            {p: element_of[gen_name[n, p]] for p in F.paths},
        )
    return apex, Cocone(apex, legs, words)


def _saturate(objects, generators, gsrc, gtgt, relations, budget) -> _CosetTable:
    table = _CosetTable(objects, generators, gsrc, gtgt, relations, budget)
    try:
        table.run()
    except _BudgetHit:
        cycle = _find_cycle(objects, [(gsrc[g], gtgt[g], g) for g in generators])
        raise Overflow(budget, cycle) from None
    return table


def _read_off(table: _CosetTable, objects, generators, gsrc, gtgt):
    """Turn a complete coset table into a flow with canonical names."""
    gens_from = defaultdict(list)
    for g in generators:
        gens_from[gsrc[g]].append(g)

    word_of: dict[int, tuple] = {}
    start_of: dict[int, Hashable] = {}
    for i, obj in enumerate(objects):
        # breadth-first in generator order visits rows in shortlex order of their least word
        frontier = [(i, ())]
        while frontier:
            nxt = []
            for r, w in frontier:
                for g in gens_from[table.end[r]]:
                    t = table.find(table.rows[r][g])
                    if t not in word_of:
                        word_of[t] = w + (g,)
                        start_of[t] = obj
                        nxt.append((t, w + (g,)))
            frontier = nxt

    def name(w):
        return w[0] if len(w) == 1 else Composite(w)

    names = {r: name(w) for r, w in word_of.items()}
    paths = list(names.values())
    src = {names[r]: start_of[r] for r in names}
    tgt = {names[r]: table.end[r] for r in names}
    rows_from = defaultdict(list)
    for r in names:
        rows_from[start_of[r]].append(r)
    comp = {}
    for a in names:
        for b in rows_from[table.end[a]]:
            r = a
            for g in word_of[b]:
                r = table.find(table.rows[r][g])
            comp[names[a], names[b]] = names[r]
    apex = Flow(objects, paths, src, tgt, comp)
    identity_of = {obj: i for i, obj in enumerate(objects)}
    element_of = {g: names[table.find(table.rows[identity_of[gsrc[g]]][g])] for g in generators}
    words = {names[r]: w for r, w in word_of.items()}
    return apex, words, element_of


def induced_from_colimit(
    cocone: Cocone, legs: Mapping[Hashable, FlowMorphism], target: Flow | None = None
) -> FlowMorphism:
    """Mediating morphism ``colim D -> T`` for a cocone ``legs`` into ``T``.

    Defined on generators and extended along the stored words; the caller
    should run :func:`check_morphism` when ``legs`` may not be a cocone.
    """
    C = cocone.apex
    if target is None:
        target = next(iter(legs.values())).target if legs else empty()
    smap = {}
    for n, leg in cocone.legs.items():
        for s, t in leg.state_map.items():
            smap[t] = legs[n].state_map[s]
    pmap = {}
    for p, word in cocone.words.items():
        image = None
        for n, q in word:
            g = legs[n].path_map[q]
            image = g if image is None else target.comp.get((image, g))
        pmap[p] = image
    return FlowMorphism(C, target, smap, pmap)


def pushout(
    left: FlowMorphism, right: FlowMorphism, budget: int = DEFAULT_COLIMIT_BUDGET
) -> tuple[Flow, Cocone]:
    """Colimit of ``left.target <- apex -> right.target``; nodes are 0 (apex), 1, 2."""
    if left.source != right.source:
        raise ValueError("a span needs a common apex")
    D = Diagram(
        {0: left.source, 1: left.target, 2: right.target},
        [Edge(0, 1, left), Edge(0, 2, right)],
    )
    return colimit(D, budget)


# ---------------------------------------------------------------------------
# canonical decomposition into points and globes

_GLOBE = globe(["g"])
_CONCAT = glob_concat(["a"], ["b"])
_POINT = point()


def canonical_decomposition(X: Flow) -> Diagram:
    """Diagram of points, globes and concatenated globes with colimit ``X``.

    Nodes are ``("point", s)``, ``("globe", x)`` and ``("concat", x, y)``
    for states, paths and composable pairs.  The concatenation node is glued
    to the globes of ``x``, ``y`` and of the composite ``x * y``.
    """
    nodes = {}
    edges = []

    def point_into(node_flow, state):
        return FlowMorphism(_POINT, node_flow, {0: state}, {})

    for s in X.sorted_states:
        nodes["point", s] = _POINT
    for x in X.sorted_paths:
        nodes["globe", x] = _GLOBE
        edges.append(Edge(("point", X.src[x]), ("globe", x), point_into(_GLOBE, 0)))
        edges.append(Edge(("point", X.tgt[x]), ("globe", x), point_into(_GLOBE, 1)))
    first = FlowMorphism(_GLOBE, _CONCAT, {0: 0, 1: 1}, {"g": "a"})
    second = FlowMorphism(_GLOBE, _CONCAT, {0: 1, 1: 2}, {"g": "b"})
    composite = FlowMorphism(_GLOBE, _CONCAT, {0: 0, 1: 2}, {"g": ("a", "b")})
    for x, y in X.composable_pairs():
        node = ("concat", x, y)
        nodes[node] = _CONCAT
        for s, i in ((X.src[x], 0), (X.tgt[x], 1), (X.tgt[y], 2)):
            edges.append(Edge(("point", s), node, point_into(_CONCAT, i)))
        edges.append(Edge(("globe", x), node, first))
        edges.append(Edge(("globe", y), node, second))
        edges.append(Edge(("globe", X.comp[x, y]), node, composite))
    return Diagram(nodes, edges)


# ---------------------------------------------------------------------------
# products do not commute with colimits


class CounterexampleReport(NamedTuple):
    lhs_paths: int  # paths of the colimit of products
    rhs_paths: int  # paths of the product with the colimit
    isomorphic: bool


def counterexample_cartesian(monoidal: str = "cartesian") -> CounterexampleReport:
    """Compare ``colim(I x D)`` with ``I x colim(D)`` for the concatenation pushout.

    ``D`` glues the end of ``I_v`` to the start of ``I_w`` over one achronal
    point.  With ``monoidal="tensor"`` the tensor product is used instead and
    the two sides agree.
    """
    if monoidal == "cartesian":
        prod, prod_map = cartesian_product, product_morphism
    elif monoidal == "tensor":
        prod, prod_map = tensor, tensor_morphism
    else:
        raise ValueError(f"unknown product {monoidal!r}")
    I = segment()
    Iv, Iw, star = globe(["v"]), globe(["w"]), Flow(["*"], (), {}, {})
    i1 = FlowMorphism(star, Iv, {"*": 1}, {})
    i0 = FlowMorphism(star, Iw, {"*": 0}, {})
    concat, _ = pushout(i1, i0)

    ident = FlowMorphism.identity(I)
    lhs, _ = pushout(prod_map(ident, i1), prod_map(ident, i0))
    rhs = prod(I, concat)
    return CounterexampleReport(len(lhs.paths), len(rhs.paths), find_isomorphism(lhs, rhs) is not None)
