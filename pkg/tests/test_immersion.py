import random

import pytest

from immersion_kernel.errors import FamilyInvalidError, GraphInputError, PreconditionError, ResourceLimitError
from immersion_kernel.immersion import (
    BoundariedGraph,
    GraphFamily,
    RelevantPair,
    SearchLimits,
    enumerate_relevant_pairs,
    extended_graph,
    find_immersion,
    find_rooted_immersion,
    glue,
    is_family_free,
    validate_family,
)
from immersion_kernel.multigraph import Multigraph
from oracles import free_oracle, immersion_exists, random_connected, random_multigraph

THETA2 = Multigraph.from_pairs(2, [(0, 1), (0, 1)])
THETA3 = Multigraph.from_pairs(2, [(0, 1)] * 3)
C3 = Multigraph.from_pairs(3, [(0, 1), (1, 2), (0, 2)])
K4 = Multigraph.from_pairs(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
EDGE = Multigraph.from_pairs(2, [(0, 1)])


def test_theta2_in_triangle():
    m = find_immersion(THETA2, C3)
    assert m is not None and m.is_valid(THETA2, C3)
    assert sorted(len(p) for p in m.edge_map.values()) == [1, 2]


def test_theta2_absent_from_tree():
    rng = random.Random(3)
    for _ in range(10):
        n = rng.randint(2, 9)
        T = random_connected(rng, n, n - 1)
        assert find_immersion(THETA2, T) is None


def test_theta3_in_k4():
    m = find_immersion(THETA3, K4)
    assert m is not None and m.is_valid(THETA3, K4)


def test_forbidden_edges_respected():
    m = find_immersion(THETA2, C3, forbidden={0})
    assert m is None


def test_size_limit_echoes_limits():
    big = Multigraph.from_pairs(2, [(0, 1)] * 5)
    with pytest.raises(ResourceLimitError, match="4"):
        find_immersion(big, C3, limits=SearchLimits(max_pattern_edges=4))


def test_fixed_unknown_vertex():
    with pytest.raises(GraphInputError):
        find_immersion(THETA2, C3, fixed={0: 9})


def test_family_freeness_examples(theta2, theta3):
    forest = Multigraph.from_pairs(5, [(0, 1), (1, 2), (3, 4)])
    assert is_family_free(forest, theta2)
    assert not is_family_free(C3, theta2)
    assert is_family_free(C3, theta3)


def test_validate_family_examples():
    assert validate_family(GraphFamily("t2", [THETA2], 1, 1)).valid
    k5 = Multigraph.from_pairs(5, [(a, b) for a in range(5) for b in range(a + 1, 5)])
    rep = validate_family(GraphFamily("k5", [k5], 1, 1))
    assert not rep.valid and any("planar and subcubic" in p for p in rep.problems)
    two = Multigraph.from_pairs(4, [(0, 1), (0, 1), (2, 3), (2, 3)])
    rep = validate_family(GraphFamily("2t2", [two], 1, 1))
    assert not rep.valid and any("disconnected" in p for p in rep.problems)


def test_relevant_pairs_r1_theta2(theta2):
    pairs = enumerate_relevant_pairs(1, theta2)
    # golden value from exhaustive generation with canonical deduplication
    assert len(pairs) == 399
    keys = {p.key() for p in pairs}
    assert len(keys) == len(pairs)
    for p in pairs:
        assert p.phi and all(i == 1 for _, i in p.phi)
        assert p.pattern.num_edges <= 4
        assert all(p.pattern.degree(v) > 0 for v in p.pattern.vertices)


def test_rooted_immersion_examples():
    v = BoundariedGraph(Multigraph([0]), (0,))
    X = extended_graph(v)
    p = RelevantPair(EDGE, ((0, 1),))
    m = find_rooted_immersion(p, X)
    assert m is not None
    assert m.vertex_map == {0: X.copies[0], 1: 0}
    assert list(m.edge_map.values()) == [[X.pendant[0]]]
    assert find_rooted_immersion(p, X, forbidden=set(X.pendant)) is None
    Xc = extended_graph(BoundariedGraph(C3, (0,)))
    assert find_rooted_immersion(RelevantPair(THETA2, ((0, 1),)), Xc) is None


def test_glue_examples():
    A = BoundariedGraph(C3, ())
    B = BoundariedGraph(EDGE, ())
    U, _ = glue(A, B)
    assert U.num_vertices == 5 and U.num_edges == 4
    v = BoundariedGraph(Multigraph([0]), (0,))
    U, rec = glue(v, v)
    assert U.num_vertices == 2 and U.num_edges == 1
    vv = BoundariedGraph(Multigraph([0]), (0, 0))
    U, rec = glue(vv, vv)
    assert U.num_edges == 2 and U.multiplicity(*U.vertices) == 2
    with pytest.raises(PreconditionError):
        glue(v, vv)


def test_boundary_must_exist():
    with pytest.raises(GraphInputError):
        BoundariedGraph(EDGE, (5,))


def test_oracle_equivalence_sample():
    rng = random.Random(11)
    for _ in range(120):
        hm = rng.randint(1, 4)
        H = random_connected(rng, rng.randint(2, hm + 1), hm)
        G = random_multigraph(rng, rng.randint(2, 6), rng.randint(0, 9))
        m = find_immersion(H, G)
        assert (m is not None) == immersion_exists(H, G)
        if m is not None:
            assert m.is_valid(H, G)


def test_family_free_matches_oracle(theta2, theta3):
    rng = random.Random(5)
    for _ in range(60):
        G = random_multigraph(rng, rng.randint(2, 6), rng.randint(0, 9))
        for F in (theta2, theta3):
            assert is_family_free(G, F) == free_oracle(G, F.members)


def test_invalid_family_file_rejected(tmp_path):
    from immersion_kernel.families import load_family

    p = tmp_path / "fam.json"
    p.write_text('{"name": "x", "graphs": [[[0, 1], [2, 3]]], "bF": 1}')
    with pytest.raises(FamilyInvalidError):
        load_family(str(p))
