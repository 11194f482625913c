"""Finite flows: the data model, standard constructors and morphism search.

A flow here is a finite set of states, a finite set of non-constant
execution paths, source and target maps, and an explicit composition table
defined exactly on endpoint-matching pairs.  There are no identity paths.
States act as units only through :meth:`Flow.extended_compose`, which is
never stored in the table.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType
from typing import Any, Hashable, Iterable, Iterator, Mapping

__all__ = [
    "BudgetExceeded",
    "DanglingIdentifier",
    "Flow",
    "FlowMorphism",
    "StateClassification",
    "achronal_set",
    "check_morphism",
    "classify_states",
    "empty",
    "enumerate_morphisms",
    "find_isomorphism",
    "glob_concat",
    "globe",
    "iter_morphisms",
    "make_standard",
    "path_fiber",
    "point",
    "segment",
    "sort_key",
    "terminal",
    "validate",
]

DEFAULT_SEARCH_BUDGET = 2_000_000


class BudgetExceeded(RuntimeError):
    """An exhaustive search visited more nodes than its budget allows."""


class DanglingIdentifier(KeyError):
    """A map or query refers to an identifier the flow does not declare."""


def sort_key(x: Any) -> tuple:
    """Total order over the heterogeneous identifiers used by constructions."""
    if isinstance(x, bool):
        return (0, int(x))
    if isinstance(x, int):
        return (1, x)
    if isinstance(x, str):
        return (2, x)
    if isinstance(x, tuple):
        # named tuples sort by their type name first so tags never interleave
        return (3, type(x).__name__, len(x), tuple(sort_key(e) for e in x))
    if isinstance(x, frozenset):
        return (4, tuple(sorted(sort_key(e) for e in x)))
    key = getattr(x, "_sort_key", None)
    if key is not None:
        return (5, type(x).__name__, key())
    return (6, repr(x))


def _sorted(xs: Iterable) -> tuple:
    return tuple(sorted(xs, key=sort_key))


class Flow:
    """An immutable finite flow ``(states, paths, src, tgt, comp)``.

    The constructor accepts arbitrary candidate data; use :func:`validate`
    to check the axioms.
    """

    def __init__(
        self,
        states: Iterable[Hashable],
        paths: Iterable[Hashable],
        src: Mapping,
        tgt: Mapping,
        comp: Mapping | None = None,
    ):
        self.states = frozenset(states)
        self.paths = frozenset(paths)
        self.src = MappingProxyType(dict(src))
        self.tgt = MappingProxyType(dict(tgt))
        self.comp = MappingProxyType(dict(comp or {}))

    def __repr__(self) -> str:
        return (
            f"Flow(<{len(self.states)} states>, <{len(self.paths)} paths>, "
            f"<{len(self.comp)} composites>)"
        )

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, Flow):
            return NotImplemented
        return (
            self.states == other.states
            and self.paths == other.paths
            and self.src == other.src
            and self.tgt == other.tgt
            and self.comp == other.comp
        )

    def __hash__(self) -> int:
        return self._hash

    @cached_property
    def _hash(self) -> int:
        return hash((self.states, self.paths, frozenset(self.comp.items())))

    @cached_property
    def sorted_states(self) -> tuple:
        return _sorted(self.states)

    @cached_property
    def sorted_paths(self) -> tuple:
        return _sorted(self.paths)

    @cached_property
    def _fibers(self) -> dict:
        out = defaultdict(list)
        for p in self.sorted_paths:
            out[self.src[p], self.tgt[p]].append(p)
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def _outgoing(self) -> dict:
        out = defaultdict(list)
        for p in self.sorted_paths:
            out[self.src[p]].append(p)
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def _incoming(self) -> dict:
        out = defaultdict(list)
        for p in self.sorted_paths:
            out[self.tgt[p]].append(p)
        return {k: tuple(v) for k, v in out.items()}

    def fiber(self, alpha: Hashable, beta: Hashable) -> tuple:
        """Paths from ``alpha`` to ``beta`` in canonical order."""
        return self._fibers.get((alpha, beta), ())

    def outgoing(self, alpha: Hashable) -> tuple:
        return self._outgoing.get(alpha, ())

    def incoming(self, beta: Hashable) -> tuple:
        return self._incoming.get(beta, ())

    def source(self, e: Hashable) -> Hashable:
        """Source map extended to states (a state is its own source)."""
        return e if e in self.states else self.src[e]

    def target(self, e: Hashable) -> Hashable:
        return e if e in self.states else self.tgt[e]

    def extended_compose(self, a: Hashable, b: Hashable) -> Hashable | None:
        """Compose states and paths, states acting as units.

        Returns ``None`` when ``a`` and ``b`` do not match end to start.
        """
        if self.target(a) != self.source(b):
            return None
        if a in self.states:
            return b
        if b in self.states:
            return a
        return self.comp.get((a, b))

    def composable_pairs(self) -> Iterator[tuple]:
        for x in self.sorted_paths:
            for y in self.outgoing(self.tgt[x]):
                yield x, y

    def relabel(self, state_names: Mapping, path_names: Mapping) -> Flow:
        """Rename identifiers; both maps must be injective."""
        return Flow(
            (state_names[s] for s in self.states),
            (path_names[p] for p in self.paths),
            {path_names[p]: state_names[s] for p, s in self.src.items()},
            {path_names[p]: state_names[s] for p, s in self.tgt.items()},
            {(path_names[x], path_names[y]): path_names[z] for (x, y), z in self.comp.items()},
        )


@dataclass(frozen=True, eq=False)
class FlowMorphism:
    """A pair of maps ``(state_map, path_map)`` between two flows.

    Equality and hashing use the two maps (plus the endpoint flows for
    equality), so morphisms can serve as state identifiers of hom flows.
    """

    source: Flow
    target: Flow
    state_map: Mapping = field(default_factory=dict)
    path_map: Mapping = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "state_map", MappingProxyType(dict(self.state_map)))
        object.__setattr__(self, "path_map", MappingProxyType(dict(self.path_map)))

    @classmethod
    def identity(cls, flow: Flow) -> FlowMorphism:
        return cls(flow, flow, {s: s for s in flow.states}, {p: p for p in flow.paths})

    def __call__(self, e: Hashable) -> Hashable:
        if e in self.source.states:
            return self.state_map[e]
        return self.path_map[e]

    def then(self, other: FlowMorphism) -> FlowMorphism:
        """The composite ``other . self``."""
        return FlowMorphism(
            self.source,
            other.target,
            {s: other.state_map[t] for s, t in self.state_map.items()},
            {p: other.path_map[q] for p, q in self.path_map.items()},
        )

    def is_bijective(self) -> bool:
        return (
            len(set(self.state_map.values())) == len(self.source.states) == len(self.target.states)
            and len(set(self.path_map.values())) == len(self.source.paths) == len(self.target.paths)
        )

    def inverse(self) -> FlowMorphism:
        if not self.is_bijective():
            raise ValueError("morphism is not bijective")
        return FlowMorphism(
            self.target,
            self.source,
            {t: s for s, t in self.state_map.items()},
            {q: p for p, q in self.path_map.items()},
        )

    @cached_property
    def _key(self) -> tuple:
        return (frozenset(self.state_map.items()), frozenset(self.path_map.items()))

    def __hash__(self) -> int:
        return hash(self._key)

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, FlowMorphism):
            return NotImplemented
        return (
            self._key == other._key
            and self.source == other.source
            and self.target == other.target
        )

    def _sort_key(self) -> tuple:
        return (
            tuple(sort_key(self.state_map[s]) for s in self.source.sorted_states),
            tuple(sort_key(self.path_map[p]) for p in self.source.sorted_paths),
        )

    def __repr__(self) -> str:
        states = ", ".join(f"{s!r}->{self.state_map[s]!r}" for s in self.source.sorted_states)
        paths = ", ".join(f"{p!r}->{self.path_map[p]!r}" for p in self.source.sorted_paths)
        return f"FlowMorphism({{{states}}}, {{{paths}}})"


@dataclass(frozen=True)
class StateClassification:
    achronal: frozenset
    source_image: frozenset
    target_image: frozenset
    initial: frozenset
    final: frozenset


# ---------------------------------------------------------------------------
# validation and queries


def validate(F: Flow) -> list[str]:
    """Return every violated flow axiom instance; empty iff ``F`` is a flow."""
    problems = []
    for e in _sorted(F.states & F.paths):
        problems.append(f"identifier {e!r} is both a state and a path")

    ok_paths = set()
    for p in F.sorted_paths:
        good = True
        for name, m in (("source", F.src), ("target", F.tgt)):
            if p not in m:
                problems.append(f"path {p!r} has no {name}")
                good = False
            elif m[p] not in F.states:
                problems.append(f"{name} of path {p!r} is undeclared state {m[p]!r}")
                good = False
        if good:
            ok_paths.add(p)
    for name, m in (("source", F.src), ("target", F.tgt)):
        for k in _sorted(set(m) - F.paths):
            problems.append(f"{name} declared for unknown path {k!r}")

    table = {}
    for (x, y), z in sorted(F.comp.items(), key=sort_key):
        if not {x, y, z} <= ok_paths:
            problems.append(f"composite ({x!r},{y!r}) = {z!r} references an unknown path")
            continue
        if F.tgt[x] != F.src[y]:
            problems.append(f"composite defined on non-composable pair ({x!r},{y!r})")
            continue
        if F.src[z] != F.src[x] or F.tgt[z] != F.tgt[y]:
            problems.append(f"composite ({x!r},{y!r}) = {z!r} has wrong endpoints")
            continue
        table[x, y] = z

    by_source = defaultdict(list)
    for p in _sorted(ok_paths):
        by_source[F.src[p]].append(p)
    for x in _sorted(ok_paths):
        for y in by_source[F.tgt[x]]:
            if (x, y) not in F.comp:
                problems.append(f"missing composite ({x!r},{y!r})")

    for (x, y), xy in sorted(table.items(), key=sort_key):
        for z in by_source[F.tgt[y]]:
            yz = table.get((y, z))
            if yz is None:
                continue
            left, right = table.get((xy, z)), table.get((x, yz))
            if left is not None and right is not None and left != right:
                problems.append(f"associativity failure on ({x!r},{y!r},{z!r})")
    return problems


def path_fiber(F: Flow, alpha: Hashable, beta: Hashable) -> frozenset:
    for s in (alpha, beta):
        if s not in F.states:
            raise DanglingIdentifier(s)
    return frozenset(F.fiber(alpha, beta))


def classify_states(F: Flow) -> StateClassification:
    sources = frozenset(F.src[p] for p in F.paths)
    targets = frozenset(F.tgt[p] for p in F.paths)
    return StateClassification(
        achronal=F.states - sources - targets,
        source_image=sources,
        target_image=targets,
        initial=F.states - targets,
        final=F.states - sources,
    )


def check_morphism(m: FlowMorphism) -> bool:
    """True iff ``m`` commutes with source, target and composition.

    Raises :class:`DanglingIdentifier` if a map is not total on the source
    flow or lands outside the target flow.
    """
    X, Y = m.source, m.target
    for dom, cod, mp in ((X.states, Y.states, m.state_map), (X.paths, Y.paths, m.path_map)):
        for e in dom:
            if e not in mp:
                raise DanglingIdentifier(e)
            if mp[e] not in cod:
                raise DanglingIdentifier(mp[e])
        for e in mp:
            if e not in dom:
                raise DanglingIdentifier(e)
    sm, pm = dict(m.state_map), dict(m.path_map)
    for p in X.paths:
        q = pm[p]
        if sm[X.src[p]] != Y.src[q] or sm[X.tgt[p]] != Y.tgt[q]:
            return False
    composite = Y.comp.get
    for (x, y), z in X.comp.items():
        if composite((pm[x], pm[y])) != pm[z]:
            return False
    return True


# ---------------------------------------------------------------------------
# standard flows


def empty() -> Flow:
    return Flow((), (), {}, {})


def achronal_set(n: int) -> Flow:
    if n < 0:
        raise ValueError("n must be non-negative")
    return Flow(range(n), (), {}, {})


def point() -> Flow:
    return achronal_set(1)


def terminal() -> Flow:
    """The terminal flow: one state 0 and one idempotent path u."""
    return Flow([0], ["u"], {"u": 0}, {"u": 0}, {("u", "u"): "u"})


def globe(A: Iterable[Hashable]) -> Flow:
    """``Glob(A)``: states 0 and 1, the elements of ``A`` as paths 0 -> 1."""
    A = frozenset(A)
    if A & {0, 1}:
        raise ValueError("globe labels must differ from the state names 0 and 1")
    return Flow([0, 1], A, {a: 0 for a in A}, {a: 1 for a in A})


def segment() -> Flow:
    """The directed segment: a single path I from 0 to 1."""
    return globe(["I"])


def glob_concat(A: Iterable[Hashable], B: Iterable[Hashable]) -> Flow:
    """``Glob(A) * Glob(B)``: paths A on 0->1, B on 1->2 and pairs (a, b) on 0->2."""
    A, B = frozenset(A), frozenset(B)
    pairs = {(a, b) for a in A for b in B}
    labels = A | B | pairs
    if A & B or len(labels) != len(A) + len(B) + len(pairs) or labels & {0, 1, 2}:
        raise ValueError("glob_concat labels must be pairwise distinct and differ from 0, 1, 2")
    src = {a: 0 for a in A} | {b: 1 for b in B} | {ab: 0 for ab in pairs}
    tgt = {a: 1 for a in A} | {b: 2 for b in B} | {ab: 2 for ab in pairs}
    return Flow([0, 1, 2], labels, src, tgt, {(a, b): (a, b) for a, b in pairs})


_STANDARD = {
    "empty": empty,
    "point": point,
    "achronal_set": achronal_set,
    "terminal": terminal,
    "segment": segment,
    "globe": globe,
    "glob_concat": glob_concat,
}


def make_standard(kind: str, *args) -> Flow:
    try:
        ctor = _STANDARD[kind]
    except KeyError:
        raise ValueError(f"unknown standard flow {kind!r}") from None
    return ctor(*args)


# ---------------------------------------------------------------------------
# morphism search


def _state_signature(F: Flow, s: Hashable) -> tuple:
    loops = len(F.fiber(s, s))
    return (len(F.outgoing(s)), len(F.incoming(s)), loops)


def iter_morphisms(
    F: Flow,
    G: Flow,
    *,
    injective: bool = False,
    budget: int = DEFAULT_SEARCH_BUDGET,
) -> Iterator[FlowMorphism]:
    """Yield every morphism ``F -> G`` by backtracking.

    Paths are assigned first (which forces their endpoints), then any state
    left unconstrained.  Composition constraints are checked as soon as the
    last of the three paths involved is assigned.  ``injective`` restricts
    to injective maps and additionally requires states to match on
    (out-degree, in-degree, loop count), which is sound for isomorphisms
    between flows of equal size only; :func:`find_isomorphism` uses it.
    """
    paths = F.sorted_paths
    states = F.sorted_states
    order = {p: i for i, p in enumerate(paths)}
    checks = defaultdict(list)
    for (x, y), z in F.comp.items():
        checks[max((x, y, z), key=order.__getitem__)].append((x, y, z))
    if injective:
        f_sig = {s: _state_signature(F, s) for s in states}
        g_sig = {s: _state_signature(G, s) for s in G.states}

    smap: dict = {}
    pmap: dict = {}
    used_s: set = set()
    used_p: set = set()
    visited = 0

    def tick():
        nonlocal visited
        visited += 1
        if visited > budget:
            raise BudgetExceeded(f"morphism search exceeded {budget} nodes")

    def bind_state(s, t) -> bool | None:
        # True: newly bound, None: already bound consistently, False: clash
        if s in smap:
            return None if smap[s] == t else False
        if injective and (t in used_s or f_sig[s] != g_sig[t]):
            return False
        smap[s] = t
        used_s.add(t)
        return True

    def unbind_state(s):
        used_s.discard(smap.pop(s))

    def paths_from(i):
        if i == len(paths):
            yield from states_from(0)
            return
        x = paths[i]
        a, b = F.src[x], F.tgt[x]
        if a in smap and b in smap:
            candidates = G.fiber(smap[a], smap[b])
        elif a in smap:
            candidates = G.outgoing(smap[a])
        elif b in smap:
            candidates = G.incoming(smap[b])
        else:
            candidates = G.sorted_paths
        for p in candidates:
            tick()
            if injective and p in used_p:
                continue
            ra = bind_state(a, G.src[p])
            if ra is False:
                continue
            rb = bind_state(b, G.tgt[p])
            if rb is False:
                if ra:
                    unbind_state(a)
                continue
            pmap[x] = p
            used_p.add(p)
            if all(G.comp.get((pmap[u], pmap[v])) == pmap[w] for u, v, w in checks[x]):
                yield from paths_from(i + 1)
            used_p.discard(p)
            del pmap[x]
            if rb:
                unbind_state(b)
            if ra:
                unbind_state(a)

    def states_from(j):
        while j < len(states) and states[j] in smap:
            j += 1
        if j == len(states):
            yield FlowMorphism(F, G, smap, pmap)
            return
        s = states[j]
        for t in G.sorted_states:
            tick()
            if bind_state(s, t):
                yield from states_from(j + 1)
                unbind_state(s)

    yield from paths_from(0)


def enumerate_morphisms(
    F: Flow, G: Flow, *, budget: int = DEFAULT_SEARCH_BUDGET
) -> list[FlowMorphism]:
    """All morphisms ``F -> G``, sorted by (state images, path images)."""
    return sorted(iter_morphisms(F, G, budget=budget), key=FlowMorphism._sort_key)


def _fiber_profile(F: Flow) -> Counter:
    return Counter(len(v) for v in F._fibers.values())


def find_isomorphism(
    F: Flow, G: Flow, *, budget: int = DEFAULT_SEARCH_BUDGET
) -> FlowMorphism | None:
    """An isomorphism ``F -> G`` or ``None`` after exhaustive search."""
    if (len(F.states), len(F.paths), len(F.comp)) != (len(G.states), len(G.paths), len(G.comp)):
        return None
    if _fiber_profile(F) != _fiber_profile(G):
        return None
    if Counter(_state_signature(F, s) for s in F.states) != Counter(
        _state_signature(G, s) for s in G.states
    ):
        return None
    for m in iter_morphisms(F, G, injective=True, budget=budget):
        if check_morphism(m.inverse()):
            return m
    return None
