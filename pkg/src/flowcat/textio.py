"""Line-oriented text format for flows and morphisms.

A flow document is a sequence of declarations, one per line::

    # comment
    state a
    path v a b
    comp v w = u

A morphism document maps the identifiers of two such flows::

    map-state a -> b
    map-path v -> w

Identifiers are whitespace-free tokens.  Serialization is canonical:
states, then paths, then composites, each in natural token order.
"""

from __future__ import annotations

import re
from typing import Hashable

from .core import Flow, FlowMorphism, check_morphism, sort_key, validate
from .diagram import Composite
from .monoidal import TensorComponent

__all__ = [
    "FlowSyntaxError",
    "FlowSemanticError",
    "parse_flow",
    "parse_morphism",
    "render_id",
    "serialize_flow",
    "serialize_morphism",
]


class FlowSyntaxError(ValueError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class FlowSemanticError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


_TOKEN = re.compile(r"[^\s#]+")
_RESERVED = {"=", "->"}


def _tokens(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def parse_flow(text: str, *, check: bool = True) -> Flow:
    """Parse a flow document; raise on bad syntax or, with ``check``, an invalid flow."""
    states, paths = {}, {}
    src, tgt, comp = {}, {}, {}
    for lineno, words in _tokens(text):
        kind, args = words[0], words[1:]
        if kind == "state":
            if len(args) != 1:
                raise FlowSyntaxError(lineno, "expected 'state <id>'")
            (s,) = args
            if s in states or s in paths:
                raise FlowSemanticError(f"duplicate identifier {s!r}", lineno)
            states[s] = lineno
        elif kind == "path":
            if len(args) != 3:
                raise FlowSyntaxError(lineno, "expected 'path <id> <src> <tgt>'")
            p, a, b = args
            if p in states or p in paths:
                raise FlowSemanticError(f"duplicate identifier {p!r}", lineno)
            for s in (a, b):
                if s not in states:
                    raise FlowSemanticError(f"undeclared state {s!r}", lineno)
            paths[p] = lineno
            src[p], tgt[p] = a, b
        elif kind == "comp":
            if len(args) != 4 or args[2] != "=":
                raise FlowSyntaxError(lineno, "expected 'comp <id> <id> = <id>'")
            x, y, _, z = args
            for p in (x, y, z):
                if p not in paths:
                    raise FlowSemanticError(f"undeclared path {p!r}", lineno)
            if (x, y) in comp:
                raise FlowSemanticError(f"composite ({x},{y}) declared twice", lineno)
            comp[x, y] = z
        else:
            raise FlowSyntaxError(lineno, f"unknown declaration {kind!r}")
    F = Flow(states, paths, src, tgt, comp)
    problems = validate(F) if check else []
    if problems:
        raise FlowSemanticError("invalid flow: " + "; ".join(problems))
    return F


def render_id(x: Hashable) -> str:
    """Token form of a constructed identifier; ``ValueError`` if it has none."""
    if isinstance(x, bool):
        raise ValueError(f"cannot render {x!r}")
    if isinstance(x, int):
        return str(x)
    if isinstance(x, str):
        if not x or not _TOKEN.fullmatch(x) or x in _RESERVED:
            raise ValueError(f"identifier {x!r} is not a token")
        return x
    if isinstance(x, TensorComponent):
        return f"{x.tag}({render_id(x.left)},{render_id(x.right)})"
    if isinstance(x, Composite):
        return "*".join(render_id(f) for f in x.factors)
    if isinstance(x, tuple):
        inner = ",".join(render_id(e) for e in x)
        name = type(x).__name__ if type(x) is not tuple else ""
        return f"{name}({inner})"
    raise ValueError(f"cannot render {type(x).__name__} identifiers")


def _natural(token: str) -> tuple:
    return tuple((0, int(t), "") if t.isdigit() else (1, 0, t) for t in re.split(r"(\d+)", token) if t)


def _names(F: Flow) -> tuple[dict, dict]:
    try:
        states = {s: render_id(s) for s in F.states}
        paths = {p: render_id(p) for p in F.paths}
        if len(set(states.values()) | set(paths.values())) == len(F.states) + len(F.paths):
            return states, paths
    except ValueError:
        pass
    # fall back to positional names in canonical identifier order
    states = {s: f"s{i}" for i, s in enumerate(F.sorted_states)}
    paths = {p: f"p{i}" for i, p in enumerate(F.sorted_paths)}
    return states, paths


def serialize_flow(F: Flow) -> str:
    states, paths = _names(F)
    lines = [f"state {n}" for n in sorted(states.values(), key=_natural)]
    lines += sorted(
        (f"path {paths[p]} {states[F.src[p]]} {states[F.tgt[p]]}" for p in F.paths),
        key=lambda line: _natural(line.split()[1]),
    )
    entries = sorted(
        ((paths[x], paths[y], paths[z]) for (x, y), z in F.comp.items()),
        key=lambda e: (_natural(e[0]), _natural(e[1])),
    )
    lines += [f"comp {x} {y} = {z}" for x, y, z in entries]
    return "".join(line + "\n" for line in lines)


def parse_morphism(text: str, source: Flow, target: Flow) -> FlowMorphism:
    smap, pmap = {}, {}
    for lineno, words in _tokens(text):
        if len(words) != 4 or words[2] != "->" or words[0] not in ("map-state", "map-path"):
            raise FlowSyntaxError(lineno, "expected 'map-state <id> -> <id>' or 'map-path <id> -> <id>'")
        kind, a, _, b = words
        dom, cod, mp = (
            (source.states, target.states, smap) if kind == "map-state" else (source.paths, target.paths, pmap)
        )
        if a not in dom:
            raise FlowSemanticError(f"{a!r} is not declared in the source flow", lineno)
        if b not in cod:
            raise FlowSemanticError(f"{b!r} is not declared in the target flow", lineno)
        if a in mp:
            raise FlowSemanticError(f"{a!r} mapped twice", lineno)
        mp[a] = b
    missing = sorted((source.states - set(smap)) | (source.paths - set(pmap)), key=sort_key)
    if missing:
        raise FlowSemanticError(f"map is not total; unmapped: {', '.join(map(str, missing))}")
    m = FlowMorphism(source, target, smap, pmap)
    if not check_morphism(m):
        raise FlowSemanticError("map does not preserve source, target and composition")
    return m


def serialize_morphism(m: FlowMorphism) -> str:
    s_src, p_src = _names(m.source)
    s_tgt, p_tgt = _names(m.target)
    lines = [f"map-state {s_src[a]} -> {s_tgt[b]}" for a, b in m.state_map.items()]
    lines.sort(key=lambda line: _natural(line.split()[1]))
    paths = [f"map-path {p_src[a]} -> {p_tgt[b]}" for a, b in m.path_map.items()]
    paths.sort(key=lambda line: _natural(line.split()[1]))
    return "".join(line + "\n" for line in lines + paths)
