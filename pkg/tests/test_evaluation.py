import itertools

import networkx as nx
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from sklearn.metrics import normalized_mutual_info_score

from gnan.evaluation import confusion_counts, hard_assign, modularity, nmi, top_attributes
from gnan.model import Partition, build_graph

from oracles import all_labelings, brute_modularity, nmi_bruteforce


def P(labels):
    return Partition.from_labels(labels)


def test_hard_assign():
    assert hard_assign([[0.9, 0.1], [0.5, 0.5], [0.2, 0.8]]).labels.tolist() == [0, 0, 1]


def test_hard_assign_column_permutation():
    rng = np.random.default_rng(0)
    T = rng.random((20, 4))
    perm = np.array([2, 0, 3, 1])
    base = hard_assign(T).labels
    moved = hard_assign(T[:, perm]).labels
    assert (perm[moved] == base).all()


def test_nmi_basic():
    a = P([0, 0, 1, 1, 2, 2])
    assert nmi(a, a) == 1.0
    assert nmi(a, P([2, 2, 0, 0, 1, 1])) == pytest.approx(1.0, abs=1e-15)
    assert nmi(P([0, 0, 1, 1]), P([0, 1, 0, 1])) == pytest.approx(0.0, abs=1e-15)
    assert nmi_bruteforce([0, 0, 1, 1], [0, 1, 0, 1]) == pytest.approx(0.0, abs=1e-15)


def test_nmi_degenerate_single_community():
    assert nmi(P([0, 0, 0]), P([1, 1, 1])) == 1.0
    assert nmi(P([0, 0, 0]), P([0, 1, 1])) == 0.0
    assert nmi(P([0, 1, 1]), P([0, 0, 0])) == 0.0


def test_nmi_size_mismatch():
    with pytest.raises(ValueError):
        nmi(P([0, 1]), P([0, 1, 1]))


def test_nmi_exhaustive_against_oracle_small():
    # n <= 8 runs in the acceptance suite
    worst = 0.0
    for n in range(1, 7):
        labelings = list(all_labelings(n, 3))
        for a, b in itertools.product(labelings, repeat=2):
            worst = max(worst, abs(nmi(P(a), P(b)) - nmi_bruteforce(a, b)))
    assert worst <= 1e-12


@given(st.lists(st.integers(0, 4), min_size=2, max_size=40), st.data())
def test_nmi_properties(a, data):
    b = data.draw(st.lists(st.integers(0, 4), min_size=len(a), max_size=len(a)))
    pa, pb = P(a), P(b)
    v = nmi(pa, pb)
    assert 0.0 <= v <= 1.0
    assert v == pytest.approx(nmi(pb, pa), abs=1e-12)
    relabel = np.array([3, 0, 4, 1, 2])
    assert v == pytest.approx(nmi(P(relabel[a]), pb), abs=1e-12)
    if len(set(a)) > 1 and len(set(b)) > 1:
        assert v == pytest.approx(normalized_mutual_info_score(a, b), abs=1e-10)


def test_confusion_counts_marginals():
    cc = confusion_counts(P([0, 0, 1, 2]), Partition([1, 1, 1, 0], 3))
    assert cc.counts.tolist() == [[0, 2, 0], [0, 1, 0], [1, 0, 0]]
    assert cc.true_sizes.tolist() == [2, 1, 1]
    assert cc.pred_sizes.tolist() == [1, 3, 0]
    assert cc.total == 4


def two_cliques(k):
    e = [(i, j) for i in range(k) for j in range(i + 1, k)]
    e += [(i + k, j + k) for i, j in e]
    return build_graph(2 * k, e, directed=False)


def test_modularity_closed_forms():
    g = two_cliques(5)
    assert modularity(g, P([0] * 10)) == pytest.approx(0.0, abs=1e-15)
    assert modularity(g, P([0] * 5 + [1] * 5)) == pytest.approx(0.5, abs=1e-15)


def test_modularity_against_references():
    rng = np.random.default_rng(3)
    for _ in range(10):
        n = 15
        a = np.triu(rng.random((n, n)) < 0.25, 1)
        und = [tuple(e) for e in np.argwhere(a)]
        g = build_graph(n, und, directed=False)
        labels = rng.integers(0, 3, n)
        q = modularity(g, Partition(labels, 3))
        assert q == pytest.approx(brute_modularity(n, und, labels), abs=1e-12)
        G = nx.Graph()
        G.add_nodes_from(range(n))
        G.add_edges_from(und)
        comms = [set(np.flatnonzero(labels == r)) for r in range(3)]
        assert q == pytest.approx(nx.community.modularity(G, [c for c in comms if c]), abs=1e-12)
        assert -0.5 <= q <= 1


def test_modularity_errors():
    with pytest.raises(ValueError):
        modularity(build_graph(3, []), P([0, 1, 1]))
    with pytest.raises(ValueError):
        modularity(two_cliques(3), P([0, 1]))


def test_top_attributes():
    uniform = np.full((2, 18), 1 / 18)
    rep = top_attributes(uniform)
    assert rep.selected(0) == [] and rep.selected(1) == []
    phi = np.array([[0.05, 0.6, 0.2, 0.15]])
    rep = top_attributes(phi)
    assert [k for k, _ in rep.ranking[0]] == [1, 2, 3, 0]
    assert rep.selected(0) == [(1, 0.6), (2, 0.2), (3, 0.15)]
    assert [k for k, _ in top_attributes(phi, threshold=0.18).selected(0)] == [1, 2]
    text = rep.format(names=["a", "b", "c", "d"])
    assert "* b" in text and "  a" in text
