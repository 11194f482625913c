"""Tensor and cartesian products of flows, and the symmetric monoidal witnesses."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache
from typing import Hashable, NamedTuple

from .core import Flow, FlowMorphism, classify_states, point

__all__ = [
    "InvariantFailure",
    "StructuralIsos",
    "TensorComponent",
    "achronal_product_check",
    "associator",
    "cartesian_product",
    "pairing",
    "product_morphism",
    "product_projections",
    "split",
    "structural_isos",
    "symmetry",
    "tensor",
    "tensor_morphism",
    "unit_left",
    "unit_right",
]


class InvariantFailure(RuntimeError):
    """A construction met data that valid inputs can never produce."""


class TensorComponent(NamedTuple):
    """A path of a product flow.

    ``tag`` is ``"PP"`` (path, path), ``"SP"`` (state, path) or
    ``"PS"`` (path, state).
    """

    tag: str
    left: Hashable
    right: Hashable


def join(X: Flow, Y: Flow, left: Hashable, right: Hashable) -> Hashable:
    """Identifier of the element ``(left, right)`` of ``X (x) Y``."""
    ls, rs = left in X.states, right in Y.states
    if ls and rs:
        return (left, right)
    return TensorComponent("SP" if ls else ("PS" if rs else "PP"), left, right)


def split(T: Flow, e: Hashable) -> tuple:
    """Inverse of :func:`join` for an element of a tensor flow ``T``."""
    if e in T.states:
        return e
    return e.left, e.right


@lru_cache(maxsize=8)
def _unital_table(F: Flow) -> tuple[dict, list]:
    """``extended_compose`` on element indices, as a square table with ``None`` gaps."""
    elements = F.sorted_states + F.sorted_paths
    index = {e: i for i, e in enumerate(elements)}
    table = [[None] * len(elements) for _ in elements]
    for (x, y), z in F.comp.items():
        table[index[x]][index[y]] = index[z]
    for s in F.states:
        table[index[s]][index[s]] = index[s]
    for p in F.paths:
        table[index[F.src[p]]][index[p]] = index[p]
        table[index[p]][index[F.tgt[p]]] = index[p]
    return index, table


@lru_cache(maxsize=64)  # flows are immutable; coherence checks rebuild the same products
def tensor(X: Flow, Y: Flow) -> Flow:
    """The tensor product ``X (x) Y``.

    Paths are pairs with at least one path component; a state component
    acts as a unit when composing.
    """
    states = [(a, b) for a in X.sorted_states for b in Y.sorted_states]
    paths, src, tgt = [], {}, {}
    xs, xt, ys, yt = X.src, X.tgt, Y.src, Y.tgt
    for x in X.sorted_paths:
        for y in Y.sorted_paths:
            p = TensorComponent("PP", x, y)
            paths.append(p)
            src[p], tgt[p] = (xs[x], ys[y]), (xt[x], yt[y])
    for a in X.sorted_states:
        for y in Y.sorted_paths:
            p = TensorComponent("SP", a, y)
            paths.append(p)
            src[p], tgt[p] = (a, ys[y]), (a, yt[y])
    for x in X.sorted_paths:
        for b in Y.sorted_states:
            p = TensorComponent("PS", x, b)
            paths.append(p)
            src[p], tgt[p] = (xs[x], b), (xt[x], b)
    (ix, ux), (iy, uy) = _unital_table(X), _unital_table(Y)
    # states and paths never share identifiers, so (left, right) determines the tag
    parts = [(ix[p.left], iy[p.right]) for p in paths]
    by_parts = [[None] * len(iy) for _ in ix]
    for p, (l, r) in zip(paths, parts):
        by_parts[l][r] = p
    by_source = defaultdict(list)
    for p, lr in zip(paths, parts):
        by_source[src[p]].append((p, lr))
    comp = {}
    for p, (pl, pr) in zip(paths, parts):
        rx, ry = ux[pl], uy[pr]
        for q, (ql, qr) in by_source[tgt[p]]:
            l, r = rx[ql], ry[qr]
            if l is None or r is None:
                raise InvariantFailure(f"no composite for {p!r} * {q!r}; is a factor invalid?")
            comp[p, q] = by_parts[l][r]
    return Flow(states, paths, src, tgt, comp)


def cartesian_product(X: Flow, Y: Flow) -> Flow:
    """The categorical product: paths are pairs of paths only."""
    states = [(a, b) for a in X.sorted_states for b in Y.sorted_states]
    paths = [TensorComponent("PP", x, y) for x in X.sorted_paths for y in Y.sorted_paths]
    comp = {}
    for (x1, x2), x in X.comp.items():
        for (y1, y2), y in Y.comp.items():
            comp[TensorComponent("PP", x1, y1), TensorComponent("PP", x2, y2)] = TensorComponent(
                "PP", x, y
            )
    return Flow(
        states,
        paths,
        {p: (X.src[p.left], Y.src[p.right]) for p in paths},
        {p: (X.tgt[p.left], Y.tgt[p.right]) for p in paths},
        comp,
    )


def product_projections(X: Flow, Y: Flow, P: Flow | None = None) -> tuple[FlowMorphism, FlowMorphism]:
    P = P or cartesian_product(X, Y)
    first = FlowMorphism(P, X, {s: s[0] for s in P.states}, {p: p.left for p in P.paths})
    second = FlowMorphism(P, Y, {s: s[1] for s in P.states}, {p: p.right for p in P.paths})
    return first, second


def pairing(f: FlowMorphism, g: FlowMorphism, P: Flow | None = None) -> FlowMorphism:
    """The mediating morphism ``T -> X x Y`` of ``f: T -> X`` and ``g: T -> Y``."""
    if f.source != g.source:
        raise ValueError("pairing needs morphisms with a common source")
    P = P or cartesian_product(f.target, g.target)
    T = f.source
    return FlowMorphism(
        T,
        P,
        {s: (f.state_map[s], g.state_map[s]) for s in T.states},
        {p: TensorComponent("PP", f.path_map[p], g.path_map[p]) for p in T.paths},
    )


def product_morphism(
    f: FlowMorphism, g: FlowMorphism, source: Flow | None = None, target: Flow | None = None
) -> FlowMorphism:
    source = source or cartesian_product(f.source, g.source)
    target = target or cartesian_product(f.target, g.target)
    return FlowMorphism(
        source,
        target,
        {(a, b): (f.state_map[a], g.state_map[b]) for a, b in source.states},
        {p: TensorComponent("PP", f.path_map[p.left], g.path_map[p.right]) for p in source.paths},
    )


def tensor_morphism(
    f: FlowMorphism, g: FlowMorphism, source: Flow | None = None, target: Flow | None = None
) -> FlowMorphism:
    """``f (x) g``, acting componentwise (tags are preserved)."""
    source = source or tensor(f.source, g.source)
    target = target or tensor(f.target, g.target)
    return FlowMorphism(
        source,
        target,
        {(a, b): (f.state_map[a], g.state_map[b]) for a, b in source.states},
        {p: TensorComponent(p.tag, f(p.left), g(p.right)) for p in source.paths},
    )


def achronal_product_check(X: Flow, Y: Flow) -> bool:
    lhs = classify_states(tensor(X, Y)).achronal
    ax, ay = classify_states(X).achronal, classify_states(Y).achronal
    return lhs == {(a, b) for a in ax for b in ay}


# ---------------------------------------------------------------------------
# structural isomorphisms, built from component tags


def _elementwise(source: Flow, target: Flow, fn) -> FlowMorphism:
    return FlowMorphism(
        source,
        target,
        {s: fn(s) for s in source.states},
        {p: fn(p) for p in source.paths},
    )


def unit_left(X: Flow) -> FlowMorphism:
    """``point (x) X -> X``."""
    P = point()
    T = tensor(P, X)
    return _elementwise(T, X, lambda e: split(T, e)[1])


def unit_right(X: Flow) -> FlowMorphism:
    """``X (x) point -> X``."""
    P = point()
    T = tensor(X, P)
    return _elementwise(T, X, lambda e: split(T, e)[0])


def symmetry(X: Flow, Y: Flow) -> FlowMorphism:
    """``X (x) Y -> Y (x) X``."""
    XY, YX = tensor(X, Y), tensor(Y, X)

    def swap(e):
        a, b = split(XY, e)
        return join(Y, X, b, a)

    return _elementwise(XY, YX, swap)


def associator(X: Flow, Y: Flow, Z: Flow) -> FlowMorphism:
    """``(X (x) Y) (x) Z -> X (x) (Y (x) Z)``."""
    XY, YZ = tensor(X, Y), tensor(Y, Z)
    source, target = tensor(XY, Z), tensor(X, YZ)

    def reassociate(e):
        xy, z = split(source, e)
        x, y = split(XY, xy)
        return join(X, YZ, x, join(Y, Z, y, z))

    return _elementwise(source, target, reassociate)


@dataclass(frozen=True)
class StructuralIsos:
    unit_left: FlowMorphism
    unit_right: FlowMorphism
    associator: FlowMorphism
    symmetry: FlowMorphism


def structural_isos(X: Flow, Y: Flow, Z: Flow) -> StructuralIsos:
    return StructuralIsos(unit_left(X), unit_right(X), associator(X, Y, Z), symmetry(X, Y))
