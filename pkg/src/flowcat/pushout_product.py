"""Pushout-products of flow morphisms with respect to the tensor product."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable

from .core import Flow, FlowMorphism, achronal_set, find_isomorphism, globe, point, sort_key
from .diagram import DEFAULT_COLIMIT_BUDGET, Diagram, Edge, colimit, induced_from_colimit
from .monoidal import tensor, tensor_morphism

__all__ = ["GlobIdentityReport", "PushoutProduct", "check_glob_identity", "pushout_product"]


@dataclass(frozen=True)
class PushoutProduct:
    corner: Flow
    map: FlowMorphism


def pushout_product(
    f: FlowMorphism, g: FlowMorphism, budget: int = DEFAULT_COLIMIT_BUDGET
) -> PushoutProduct:
    """``f [] g: (V (x) W) +_{U (x) W} (U (x) T) -> V (x) T`` for ``f: U -> V``, ``g: W -> T``."""
    U, V, W, T = f.source, f.target, g.source, g.target
    UW, VW, UT, VT = tensor(U, W), tensor(V, W), tensor(U, T), tensor(V, T)
    idU, idW, idV, idT = (FlowMorphism.identity(F) for F in (U, W, V, T))
    D = Diagram(
        {"UW": UW, "VW": VW, "UT": UT},
        [
            Edge("UW", "VW", tensor_morphism(f, idW, UW, VW)),
            Edge("UW", "UT", tensor_morphism(idU, g, UW, UT)),
        ],
    )
    corner, cocone = colimit(D, budget)
    legs = {
        "VW": tensor_morphism(idV, g, VW, VT),
        "UT": tensor_morphism(f, idT, UT, VT),
        "UW": tensor_morphism(f, g, UW, VT),
    }
    return PushoutProduct(corner, induced_from_colimit(cocone, legs, VT))


@dataclass(frozen=True)
class GlobIdentityReport:
    corner: Flow
    expected: Flow
    iso_found: bool
    map: FlowMorphism


def _labels(xs: Iterable[Hashable]) -> list[str]:
    # string labels keep globe generators apart from the states 0 and 1
    return [str(x) for x in sorted(xs, key=sort_key)]


def check_glob_identity(A: Iterable[Hashable], B: Iterable[Hashable]) -> GlobIdentityReport:
    """Pushout-product of ``{0,1} -> {0}`` with ``Glob(A) -> Glob(B)``, against ``Glob(B +_A B)``."""
    A, B = set(A), set(B)
    if not A <= B:
        raise ValueError("A must be a subset of B")
    a_labels, b_labels = _labels(A), _labels(B)
    if len(set(b_labels)) != len(B):
        raise ValueError("elements of B must have distinct string forms")
    fold = FlowMorphism(achronal_set(2), point(), {0: 0, 1: 0}, {})
    GA, GB = globe(a_labels), globe(b_labels)
    inclusion = FlowMorphism(GA, GB, {0: 0, 1: 1}, {a: a for a in a_labels})
    result = pushout_product(fold, inclusion)
    glued = [("left", b) for b in b_labels] + [("right", b) for b in b_labels if b not in a_labels]
    expected = globe(glued)
    return GlobIdentityReport(
        result.corner, expected, find_isomorphism(result.corner, expected) is not None, result.map
    )
