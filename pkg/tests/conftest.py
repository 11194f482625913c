import itertools

import pytest
from hypothesis import strategies as st

from flowcat import Flow, FlowMorphism, check_morphism
from flowcat.corpus import corpus

CORPUS = corpus()
CORPUS_IDS = sorted(CORPUS)
# small enough for exhaustive hom and adjunction work
SMALL_IDS = [k for k in CORPUS_IDS if len(CORPUS[k].states) + len(CORPUS[k].paths) <= 4]


def naive_morphisms(F: Flow, G: Flow) -> list[FlowMorphism]:
    """Every total assignment, filtered by the morphism laws."""
    fs, fp = F.sorted_states, F.sorted_paths
    out = []
    for svals in itertools.product(G.sorted_states, repeat=len(fs)):
        for pvals in itertools.product(G.sorted_paths, repeat=len(fp)):
            m = FlowMorphism(F, G, dict(zip(fs, svals)), dict(zip(fp, pvals)))
            if check_morphism(m):
                out.append(m)
    return out


def count_naive(F: Flow, G: Flow) -> int:
    return len(naive_morphisms(F, G))


corpus_flows = st.sampled_from(CORPUS_IDS).map(CORPUS.__getitem__)
small_flows = st.sampled_from(SMALL_IDS).map(CORPUS.__getitem__)


@st.composite
def relabelled(draw, flows=corpus_flows):
    """A flow together with a randomly renamed copy."""
    F = draw(flows)
    states = list(F.sorted_states)
    paths = list(F.sorted_paths)
    sperm = draw(st.permutations(range(len(states))))
    pperm = draw(st.permutations(range(len(paths))))
    snames = {s: f"q{i}" for s, i in zip(states, sperm)}
    pnames = {p: f"e{i}" for p, i in zip(paths, pperm)}
    return F, F.relabel(snames, pnames)


@pytest.fixture(scope="session")
def flows():
    return CORPUS
