import random

import pytest

from immersion_kernel.cuts import (
    enumerate_important_cuts,
    important_cut_verdict,
    is_important_cut,
    splitter_family,
    verify_splitter,
)
from immersion_kernel.errors import PreconditionError
from immersion_kernel.multigraph import Multigraph
from oracles import important_cuts_brute, random_multigraph, shatters

PATH = Multigraph.from_pairs(3, [(0, 1), (1, 2)])  # s=0 a=1 t=2; sa=0 at=1


def cut_sets(G, S, T, k):
    return {c.cut for c in enumerate_important_cuts(G, S, T, k)}


def test_single_edge():
    G = Multigraph.from_pairs(2, [(0, 1)])
    assert cut_sets(G, {0}, {1}, 1) == {frozenset({0})}


def test_path_only_far_cut():
    assert cut_sets(PATH, {0}, {2}, 1) == {frozenset({1})}
    assert cut_sets(PATH, {0}, {2}, 0) == set()


def test_is_important_examples():
    ok, why = important_cut_verdict(PATH, {0}, {2}, {0})
    assert not ok and why
    assert is_important_cut(PATH, {0}, {2}, {1})
    assert not is_important_cut(PATH, {0}, {2}, {0, 1})
    ok, why = important_cut_verdict(PATH, {0}, {2}, set())
    assert not ok and "cut" in why


def test_overlapping_terminals_rejected():
    with pytest.raises(PreconditionError):
        enumerate_important_cuts(PATH, {0}, {0}, 1)


def test_random_against_definition():
    rng = random.Random(21)
    for _ in range(80):
        G = random_multigraph(rng, rng.randint(2, 7), rng.randint(1, 10))
        vs = list(G.vertices)
        rng.shuffle(vs)
        S, T = {vs[0]}, {vs[1]}
        k = rng.randint(0, 3)
        assert cut_sets(G, S, T, k) == important_cuts_brute(G, S, T, k)


def test_splitter_examples():
    U = list(range(6))
    assert splitter_family(U, 0, 3).sets == (frozenset(),)
    assert splitter_family(U, 2, 0).sets == (frozenset(U),)


@pytest.mark.parametrize("n,a,b", [(1, 1, 1), (2, 1, 2), (3, 2, 2), (5, 3, 3), (9, 2, 2), (10, 3, 2)])
def test_splitter_shatters(n, a, b):
    fam = splitter_family(range(n), a, b, seed=3)
    assert verify_splitter(fam)
    assert shatters(range(n), fam.sets, a, b) is None


def test_splitter_large_universe_hashed():
    fam = splitter_family(range(40), 2, 2)
    assert verify_splitter(fam)


def test_splitter_arbitrary_labels():
    fam = splitter_family(["x", "y", "z", "w"], 2, 1)
    assert shatters(["x", "y", "z", "w"], fam.sets, 2, 1) is None
