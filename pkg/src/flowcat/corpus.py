"""Exhaustively generated small flows used by the test and acceptance suites."""

from __future__ import annotations

from itertools import product

from .core import (
    Flow,
    achronal_set,
    find_isomorphism,
    glob_concat,
    globe,
    point,
    segment,
    terminal,
    validate,
)

__all__ = ["all_small_flows", "corpus", "named_flows"]


def _candidates(n_states: int, n_paths: int):
    states = list(range(n_states))
    paths = [f"p{i}" for i in range(n_paths)]
    for ends in product(product(states, repeat=2), repeat=n_paths):
        src = {p: e[0] for p, e in zip(paths, ends)}
        tgt = {p: e[1] for p, e in zip(paths, ends)}
        pairs = [(x, y) for x in paths for y in paths if tgt[x] == src[y]]
        options = [[z for z in paths if src[z] == src[x] and tgt[z] == tgt[y]] for x, y in pairs]
        for values in product(*options):
            yield Flow(states, paths, src, tgt, dict(zip(pairs, values)))


def _dedupe(flows, keep=()):
    kept = list(keep)
    out = []
    for F in flows:
        if any(find_isomorphism(F, G) is not None for G in kept):
            continue
        kept.append(F)
        out.append(F)
    return out


def all_small_flows(max_states: int = 2, max_paths: int = 2, *, up_to_iso: bool = True) -> list[Flow]:
    """Every flow on states ``0..n-1`` and paths ``p0..pk-1`` within the bounds.

    With ``up_to_iso`` one representative per isomorphism class is kept.
    """
    found = []
    for n in range(max_states + 1):
        for k in range(max_paths + 1 if n else 1):
            found.extend(F for F in _candidates(n, k) if not validate(F))
    return _dedupe(found) if up_to_iso else found


def named_flows() -> dict[str, Flow]:
    return {
        "empty": achronal_set(0),
        "point": point(),
        "achronal2": achronal_set(2),
        "segment": segment(),
        "terminal": terminal(),
        "globe1": globe(["a"]),
        "globe2": globe(["a", "b"]),
        "concat": glob_concat(["x"], ["y"]),
    }


def corpus(max_states: int = 2, max_paths: int = 2, *, up_to_iso: bool = True) -> dict[str, Flow]:
    """Named standard flows followed by the generated small flows.

    With ``up_to_iso`` generated flows isomorphic to an earlier entry are dropped.
    """
    named = named_flows()
    out = dict(named)
    rest = all_small_flows(max_states, max_paths, up_to_iso=up_to_iso)
    if up_to_iso:
        rest = _dedupe(rest, keep=list(named.values()))
    for i, F in enumerate(rest):
        out[f"small{i}"] = F
    return out
