import random

import pytest

from immersion_kernel.errors import PreconditionError, ResourceLimitError
from immersion_kernel.immersion import is_family_free
from immersion_kernel.multigraph import Multigraph
from immersion_kernel.protrusion import ReductionTrace, lift_solution
from immersion_kernel.reduction import (
    Bouquet,
    approximate,
    bound_bouquet,
    bound_theta,
    find_bouquets,
    find_thetas,
    kernelize,
    min_deletion_set,
    opt_bruteforce,
    opt_lower_bound,
    prune_structures,
    reduce_from_approx,
    solve_fpt,
)
from oracles import cycle_rank, opt_literal, random_connected, random_multigraph

C3 = Multigraph.from_pairs(3, [(0, 1), (1, 2), (0, 2)])
K4_PAIRS = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
K4 = Multigraph.from_pairs(4, K4_PAIRS)


def test_theta_detection(theta2):
    G = Multigraph.from_pairs(2, [(0, 1)] * theta2.dF)
    ths = find_thetas(G, theta2.dF)
    assert len(ths) == 1 and len(ths[0].edges) == theta2.dF
    assert find_thetas(G, theta2.dF + 1) == []


def test_star_bouquet(theta2):
    d = theta2.dF
    G = Multigraph.from_pairs(d + 1, [(0, i) for i in range(1, d + 1)])
    bs = find_bouquets(G, theta2, d)
    assert len(bs) == 1
    assert bs[0].attachment == (0,) and all(len(S) == 1 for S in bs[0].elements)
    assert len(bs[0].elements) == d


def test_two_vertex_bouquet(theta2):
    d = theta2.dF
    pairs = []
    for i in range(d):
        pairs += [(0, 2 + i), (2 + i, 1)]
    G = Multigraph.from_pairs(d + 2, pairs)
    bs = find_bouquets(G, theta2, d)
    assert [b.attachment for b in bs] == [(0, 1)]
    assert len(bs[0].elements) == d


def test_prune_triangle(theta2):
    assert prune_structures(C3, theta2) == frozenset(C3.edge_ids)
    with pytest.raises(PreconditionError):
        prune_structures(Multigraph.from_pairs(3, [(0, 1), (1, 2)]), theta2)


def test_prune_thins_theta(theta2):
    G = Multigraph.from_pairs(3, [(0, 1)] * (theta2.dF + 4) + [(1, 2)])
    delta = prune_structures(G, theta2)
    assert len(delta & set(find_thetas(G, 2)[0].edges)) == theta2.dF - 1
    assert opt_bruteforce(G.delete_edges(delta), theta2) < opt_bruteforce(G, theta2)


def test_approximate_examples(theta2):
    T = Multigraph.from_pairs(4, [(0, 1), (1, 2), (1, 3)])
    assert approximate(T, theta2).edges == frozenset()
    sol = approximate(C3, theta2)
    assert 1 <= len(sol.edges) <= theta2.c_apx
    assert cycle_rank(C3.delete_edges(sol.edges)) == 0
    assert sol.verified


def test_approximate_lower_bound_sound(theta3):
    rng = random.Random(4)
    for _ in range(15):
        G = random_multigraph(rng, rng.randint(3, 7), rng.randint(4, 12))
        sol = approximate(G, theta3)
        opt = opt_bruteforce(G, theta3)
        assert sol.lower_bound <= opt <= len(sol.edges)
        assert opt_lower_bound(G, theta3, 10) <= opt


def test_bounding_theta_k4_family(k4fam):
    s = k4fam.dF + 3 + 5
    G = Multigraph.from_pairs(5, K4_PAIRS + [(0, 4)] * s)
    th = find_thetas(G, k4fam.dF)[0]
    delta = {0, 1, 2}  # the K4 edges at vertex 0 isolate the theta
    trace = ReductionTrace()
    H = bound_theta(G, th, delta, k4fam, trace)
    assert G.num_edges - H.num_edges == 5
    assert opt_bruteforce(H, k4fam, max_edges=80) == opt_bruteforce(G, k4fam, max_edges=80)
    # below the allowance nothing happens
    assert bound_theta(H, find_thetas(H, k4fam.dF)[0], delta, k4fam) == H
    F = lift_solution(min_deletion_set(H, k4fam, 2), trace, G, k4fam)
    assert is_family_free(G.delete_edges(F), k4fam)


def test_bounding_requires_free_region(theta2):
    G = Multigraph.from_pairs(3, [(0, 1)] * (theta2.dF + 5) + [(1, 2)])
    th = find_thetas(G, theta2.dF)[0]
    with pytest.raises(PreconditionError, match="not free"):
        bound_theta(G, th, set(), theta2)


def test_bound_bouquet_small_unchanged(theta2):
    d = theta2.dF
    G = Multigraph.from_pairs(d + 1, [(0, i) for i in range(1, d + 1)])
    b = find_bouquets(G, theta2, d)[0]
    assert bound_bouquet(G, b, set(), theta2) == G
    G2 = Multigraph.from_pairs(d + 6, [(0, i) for i in range(1, d + 6)])
    b2 = Bouquet((0,), tuple(frozenset([i]) for i in range(1, d + 6)))
    H = bound_bouquet(G2, b2, set(), theta2)
    assert H.num_vertices == d + 1


def test_reduce_from_approx_examples(theta2, k4fam):
    assert reduce_from_approx(C3, {0}, theta2) is None
    G = Multigraph.from_pairs(5, K4_PAIRS + [(0, 4)] * 60)
    sol = approximate(G, k4fam)
    H = reduce_from_approx(G, sol.edges, k4fam)
    assert H is not None and H.num_edges < G.num_edges
    assert opt_bruteforce(H, k4fam, max_edges=80) == opt_bruteforce(G, k4fam, max_edges=80)
    with pytest.raises(PreconditionError):
        reduce_from_approx(C3, set(), theta2)


def test_kernelize_examples(theta2):
    T = Multigraph.from_pairs(4, [(0, 1), (1, 2), (1, 3)])
    kr = kernelize(T, 0, theta2)
    assert not kr.no_instance and is_family_free(kr.graph, theta2)
    assert opt_bruteforce(kr.graph, theta2) == 0
    assert kernelize(C3, 0, theta2).no_instance
    with pytest.raises(PreconditionError):
        kernelize(C3, -1, theta2)


def test_kernelize_preserves_opt(theta3):
    rng = random.Random(17)
    for _ in range(15):
        G = random_multigraph(rng, rng.randint(5, 9), rng.randint(4, 12))
        opt = opt_bruteforce(G, theta3)
        for k in (0, 1, 2):
            kr = kernelize(G, k, theta3)
            if kr.no_instance:
                assert opt > k
            else:
                assert opt_bruteforce(kr.graph, theta3) == opt


def test_solve_fpt_examples(theta2, theta3):
    sol, _ = solve_fpt(C3, 1, theta2)
    assert sol is not None and len(sol.edges) == 1
    assert solve_fpt(K4, 1, theta3)[0] is None
    sol, _ = solve_fpt(K4, 2, theta3)
    assert sol is not None and len(sol.edges) == 2 and is_family_free(K4.delete_edges(sol.edges), theta3)
    with pytest.raises(ResourceLimitError):
        solve_fpt(C3, 50, theta2)


def test_opt_examples(theta2, theta3, k4fam):
    assert opt_bruteforce(C3, theta2) == 1
    assert opt_bruteforce(K4, theta3) == 2
    forest = Multigraph.from_pairs(5, [(0, 1), (1, 2), (3, 4)])
    for F in (theta2, theta3, k4fam):
        assert opt_bruteforce(forest, F) == 0


def test_opt_matches_literal_oracle(theta3):
    rng = random.Random(23)
    for _ in range(25):
        n = rng.randint(2, 6)
        G = random_connected(rng, n, rng.randint(n - 1, 10))
        assert opt_bruteforce(G, theta3) == opt_literal(G, theta3.members)


def test_min_deletion_set_theta2_forest_complement(theta2):
    rng = random.Random(2)
    for _ in range(10):
        G = random_multigraph(rng, 6, 10)
        F = min_deletion_set(G, theta2, 10)
        assert len(F) == cycle_rank(G) and cycle_rank(G.delete_edges(F)) == 0
