import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from immersion_kernel.errors import GraphInputError
from immersion_kernel.immersion import graph_canonical
from immersion_kernel.multigraph import (
    Multigraph,
    boundary,
    components,
    contract_edges,
    delete_edges,
    delete_vertices,
    disjoint_union,
    edges_between,
)
from oracles import cycle_rank, random_multigraph

A, B, C = 0, 1, 2
TRIANGLE = Multigraph.from_pairs(3, [(A, B), (A, C), (B, C)])  # ab=0 ac=1 bc=2
PATH = Multigraph.from_pairs(3, [(A, B), (B, C)])


def test_boundary_examples():
    assert boundary(TRIANGLE, {A}) == {0, 1}
    two = Multigraph.from_pairs(2, [(0, 1), (0, 1)])
    assert boundary(two, {0}) == {0, 1}
    assert boundary(PATH, {A, C}) == {0, 1}


def test_boundary_unknown_vertex():
    with pytest.raises(GraphInputError):
        boundary(TRIANGLE, {7})


def test_edges_between_examples():
    assert edges_between(TRIANGLE, {A}, {B}) == {0}
    assert edges_between(TRIANGLE, TRIANGLE.vertices, TRIANGLE.vertices) == {0, 1, 2}
    G = Multigraph.from_pairs(4, [(0, 1), (2, 3)])
    assert edges_between(G, {0, 1}, {2, 3}) == frozenset()


def test_components_examples():
    assert components(Multigraph()) == []
    assert components(TRIANGLE) == [frozenset({0, 1, 2})]
    G = Multigraph.from_pairs(4, [(0, 1), (2, 3)])
    assert sorted(map(sorted, components(G))) == [[0, 1], [2, 3]]


def test_delete_and_contract_examples():
    P = delete_edges(TRIANGLE, {0})
    assert P.num_edges == 2 and P.is_connected()
    H, rep = contract_edges(PATH, {0})
    assert H.num_vertices == 2 and H.edge_ids == (1,)
    assert rep[A] == rep[B]
    T, _ = contract_edges(TRIANGLE, {0})
    assert T.edge_ids == (1, 2) and T.multiplicity(0, 2) == 2
    assert delete_vertices(TRIANGLE, {A}).edge_ids == (2,)


def test_loops_and_duplicates_rejected():
    with pytest.raises(GraphInputError):
        Multigraph.from_pairs(2, [(0, 0)])
    with pytest.raises(GraphInputError):
        Multigraph([0, 1], [(0, 0, 1), (0, 1, 0)])
    with pytest.raises(GraphInputError):
        TRIANGLE.delete_edges({9})


def test_edge_ids_survive_and_stay_fresh():
    G = TRIANGLE.delete_edges({2})
    H, ids = G.add_edges([(1, 2)])
    # id 2 existed in an ancestor, so it is never reused
    assert ids == [3]
    assert H.endpoints(3) == (1, 2)


def test_disjoint_union_and_isomorphism_key():
    U, vmap, emap = disjoint_union(TRIANGLE, PATH)
    assert U.num_vertices == 6 and U.num_edges == 5
    assert len(components(U)) == 2
    relabelled = TRIANGLE.relabel({0: 5, 1: 9, 2: 7})
    assert graph_canonical(relabelled) == graph_canonical(TRIANGLE)
    assert graph_canonical(PATH) != graph_canonical(TRIANGLE)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_cycle_rank_matches_union_find(seed):
    rng = random.Random(seed)
    G = random_multigraph(rng, rng.randint(1, 8), rng.randint(0, 14))
    assert G.cycle_rank() == cycle_rank(G)
    X = [v for v in G.vertices if rng.random() < 0.5]
    inside = set(X)
    expect = {e for e, a, b in G.edges() if (a in inside) != (b in inside)}
    assert boundary(G, X) == expect


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_contraction_preserves_other_edges(seed):
    rng = random.Random(seed)
    G = random_multigraph(rng, rng.randint(2, 7), rng.randint(1, 12))
    F = {e for e in G.edge_ids if rng.random() < 0.3}
    H, rep = contract_edges(G, F)
    for e, a, b in G.edges():
        if rep[a] != rep[b]:
            assert H.has_edge(e) and set(H.endpoints(e)) == {rep[a], rep[b]}
        else:
            assert not H.has_edge(e)
    assert len(components(H)) == len(components(G))
