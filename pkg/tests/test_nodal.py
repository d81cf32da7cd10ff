from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fibpos.model import SurfaceCanonicalData, Verdict
from fibpos.nodal import (
    DisconnectedGraphError,
    FibreDualGraph,
    NodalCounts,
    adjunction_degree,
    ch_nodal_rhs,
    disconnecting_nodes,
    moriwaki_nodal_rhs,
    nodal_counts,
    refined_bounds,
    relative_minimality_check,
    socket_adjunction_discrepancy,
    socket_components,
)

from oracles import brute_bridges, brute_socket

TAIL = FibreDualGraph((1, 0), ((0, 1),))
ELLIPTIC_PAIR = FibreDualGraph((1, 1), ((0, 1),))
ONE_NODAL = FibreDualGraph((0,), ((0, 0),))
CHAIN = FibreDualGraph((2, 0, 0, 2), ((0, 1), (1, 2), (2, 3)))


def test_bridge_examples():
    assert disconnecting_nodes(ELLIPTIC_PAIR) == {0}
    assert disconnecting_nodes(ONE_NODAL) == frozenset()
    assert disconnecting_nodes(FibreDualGraph((1, 1), ((0, 1), (0, 1)))) == frozenset()
    with pytest.raises(DisconnectedGraphError):
        disconnecting_nodes(FibreDualGraph((1, 1)))


def test_socket_examples():
    assert socket_components(TAIL).vertices == {1} and socket_components(TAIL).rSocket == 1
    chain = socket_components(CHAIN)
    assert chain.vertices == {1, 2} and chain.rSocket == 1
    assert socket_components(ELLIPTIC_PAIR).rSocket == 0
    assert socket_components(FibreDualGraph((0,))).vertices == frozenset()


def test_counts_examples():
    assert nodal_counts(TAIL) == NodalCounts(1, 1, 0, 1)
    assert nodal_counts(ELLIPTIC_PAIR) == NodalCounts(1, 0, 1, 0)
    assert nodal_counts(ONE_NODAL) == NodalCounts(0, 0, 0, 0)
    # the internal node of the chain is counted once
    assert nodal_counts(CHAIN) == NodalCounts(3, 3, 0, 1)


def test_adjunction_examples():
    assert adjunction_degree(TAIL, 1) == -1
    assert adjunction_degree(TAIL, 0) == 1
    assert adjunction_degree(ONE_NODAL, 0) == 0


def test_chain_discrepancy_is_reported():
    oracle, formula = socket_adjunction_discrepancy(CHAIN)
    assert (oracle, formula) == (0, 1)
    assert socket_adjunction_discrepancy(TAIL) == (-1, -1)


def test_relative_minimality_examples():
    assert relative_minimality_check(NodalCounts.of(2, 0, 1))
    assert not relative_minimality_check(NodalCounts.of(1, 0, 1))
    assert relative_minimality_check(NodalCounts.of(0, 0, 0))


def test_counts_validation():
    with pytest.raises(ValueError):
        NodalCounts(3, 1, 1, 0)
    with pytest.raises(ValueError):
        NodalCounts.of(-1, 0, 0)
    assert NodalCounts.of(1, 2, 0) + NodalCounts.of(2, 0, 1) == NodalCounts.of(3, 2, 1)


def test_refined_bound_examples():
    c = refined_bounds(SurfaceCanonicalData(2, 0, 6, 1), NodalCounts.of(2, 1, 1))
    assert c.ch.rhs == c.xiao.rhs == c.moriwaki.rhs == 5
    assert c.gap == 0 and c.summary() == "all three bounds coincide"
    c = refined_bounds(SurfaceCanonicalData(3, 0, 6, 1), NodalCounts.of(2, 1, 1))
    assert c.ch.rhs == Fraction(17, 3) and c.moriwaki.rhs == 6
    assert c.summary() == "Moriwaki strongest by 1/3"
    c = refined_bounds(SurfaceCanonicalData(5, 0, 7, 2), NodalCounts.of(0, 0, 0))
    assert c.ch.rhs == c.moriwaki.rhs == Fraction(32, 5)


def test_refined_bounds_gate():
    c = refined_bounds(SurfaceCanonicalData(3, 0, 6, 1), NodalCounts.of(1, 0, 1))
    assert all(r.verdict is Verdict.NOT_APPLICABLE for r in c.reports)
    assert all("2r <= k" in r.failed_precondition for r in c.reports)


def test_dominance_grid():
    for g in range(2, 11):
        for k in range(7):
            for l in range(7):
                counts = NodalCounts.of(k, l, 0)
                ch, mw = ch_nodal_rhs(g, Fraction(1), counts), moriwaki_nodal_rhs(g, Fraction(1), counts)
                assert mw >= ch
                assert (mw == ch) == (g == 2 or l == 0)


@st.composite
def graphs(draw):
    n = draw(st.integers(1, 7))
    genera = tuple(draw(st.lists(st.integers(0, 2), min_size=n, max_size=n)))
    # a random spanning tree keeps the graph connected
    edges = [(draw(st.integers(0, v - 1)), v) for v in range(1, n)]
    extra = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=10 - len(edges)))
    return FibreDualGraph(genera, tuple(edges + extra))


@given(graphs())
def test_bridges_match_bruteforce(gph):
    assert disconnecting_nodes(gph) == brute_bridges(gph)
    sock, r = brute_socket(gph)
    got = socket_components(gph)
    assert got.vertices == sock and got.rSocket == r


@given(graphs())
def test_adjunction_sum_is_degree_of_dualizing_sheaf(gph):
    total = sum(adjunction_degree(gph, v) for v in range(gph.n_vertices))
    assert total == 2 * gph.arithmetic_genus() - 2


@given(graphs(), st.randoms(use_true_random=False))
def test_socket_relabel_invariance(gph, rnd):
    perm = list(range(gph.n_vertices))
    rnd.shuffle(perm)
    moved = gph.relabel(perm)
    before, after = socket_components(gph), socket_components(moved)
    assert {perm[v] for v in before.vertices} == after.vertices
    assert before.rSocket == after.rSocket
    assert nodal_counts(gph) == nodal_counts(moved)


def test_deep_path_is_iterative():
    n = 5000
    gph = FibreDualGraph(tuple([1] * n), tuple((i, i + 1) for i in range(n - 1)))
    assert len(disconnecting_nodes(gph)) == n - 1
