import json
import random

import pytest

from immersion_kernel.errors import PreconditionError
from immersion_kernel.generators import planted_protrusion
from immersion_kernel.immersion import BoundariedGraph, is_family_free
from immersion_kernel.multigraph import Multigraph
from immersion_kernel.protrusion import (
    ReductionTrace,
    ReplacementTable,
    compute_signature,
    default_table,
    exhaustive_replacement,
    extend_table,
    find_replaceable_protrusion,
    lift_solution,
    replace_protrusion,
)
from immersion_kernel.reduction import min_deletion_set
from oracles import cycle_rank, opt_literal, random_connected, random_multigraph, same_signature_implies_equivalent_check

C3 = Multigraph.from_pairs(3, [(0, 1), (1, 2), (0, 2)])
VERTEX1 = BoundariedGraph(Multigraph([0]), (0,))


def triangle_with_tail(length):
    """C3 on 0,1,2 and a path 0-3-4-... of ``length`` edges."""
    pairs = [(0, 1), (1, 2), (0, 2)]
    prev = 0
    for i in range(length):
        pairs.append((prev, 3 + i))
        prev = 3 + i
    return Multigraph.from_pairs(3 + length, pairs)


def random_hosts(rng, r, count, max_edges=8):
    out = []
    for _ in range(count):
        H = random_multigraph(rng, rng.randint(1, 6), rng.randint(0, max_edges))
        out.append(BoundariedGraph(H, tuple(rng.choice(H.vertices) for _ in range(r))))
    return out


def test_signature_rejects_non_free(theta2):
    with pytest.raises(PreconditionError):
        compute_signature(BoundariedGraph(C3, (0,)), theta2)


def test_signature_isomorphism_invariant(theta2):
    P = BoundariedGraph(Multigraph.from_pairs(3, [(0, 1), (1, 2)]), (0, 2))
    Q = BoundariedGraph(Multigraph([5, 7, 9], [(10, 9, 7), (11, 7, 5)]), (9, 5))
    assert compute_signature(P, theta2) == compute_signature(Q, theta2)


def test_same_signature_examples(theta2):
    rng = random.Random(1)
    hosts = random_hosts(rng, 1, 20)
    assert same_signature_implies_equivalent_check(VERTEX1, VERTEX1, hosts)
    other = BoundariedGraph(Multigraph([3]), (3,))
    assert compute_signature(VERTEX1, theta2) == compute_signature(other, theta2)
    assert same_signature_implies_equivalent_check(VERTEX1, other, hosts)


def test_signature_agreement_iff_equal(theta2):
    pendant = BoundariedGraph(Multigraph.from_pairs(2, [(0, 1)]), (0,))
    same = compute_signature(VERTEX1, theta2) == compute_signature(pendant, theta2)
    hosts = random_hosts(random.Random(2), 1, 20)
    assert same_signature_implies_equivalent_check(VERTEX1, pendant, hosts) == same


def test_signature_separates_boundary_partitions(theta2):
    # both slots on one vertex versus on two unconnected vertices
    a = BoundariedGraph(Multigraph([0]), (0, 0))
    c = BoundariedGraph(Multigraph([0, 1]), (0, 1))
    assert compute_signature(a, theta2) != compute_signature(c, theta2)
    hosts = random_hosts(random.Random(3), 2, 20)
    assert not same_signature_implies_equivalent_check(a, c, hosts)


def test_table_budget_zero(theta2):
    tab = extend_table(ReplacementTable(theta2), 1, 0)
    assert len(tab) >= 1
    assert all(lst[0].graph.graph.num_edges == 0 for lst in tab.entries.values())


def test_table_self_check(theta2):
    tab = extend_table(ReplacementTable(theta2), 1, 3)
    assert len(tab) > 0
    for (r, sig), lst in tab.entries.items():
        for e in lst:
            assert compute_signature(e.graph, theta2) == sig and e.graph.r == r


def test_table_roundtrip_and_corrupt_entry(theta2, tmp_path):
    tab = ReplacementTable(theta2)
    extend_table(tab, 1, 3)
    extend_table(tab, 2, 2)
    path = tmp_path / "t.json"
    tab.save(str(path))
    again = ReplacementTable.load(str(path), theta2)
    assert set(again.entries) == set(tab.entries) and again.budgets == tab.budgets
    data = json.loads(path.read_text())
    victim = next(it for it in data["entries"] if it["graph"]["edges"])
    victim["graph"]["edges"] = []
    path.write_text(json.dumps(data))
    loaded = ReplacementTable.load(str(path), theta2)
    assert len(loaded) == len(tab) - 1
    for (r, sig), lst in loaded.entries.items():
        for e in lst:
            assert compute_signature(e.graph, theta2) == sig


def test_table_wrong_family_ignored(theta2, theta3, tmp_path):
    path = tmp_path / "t.json"
    extend_table(ReplacementTable(theta2), 1, 2).save(str(path))
    assert len(ReplacementTable.load(str(path), theta3)) == 0


def test_small_graph_has_no_protrusion(theta2, theta3):
    P = Multigraph.from_pairs(3, [(0, 1), (1, 2)])
    assert P.num_edges <= 2 * theta2.bF * theta2.cF
    assert find_replaceable_protrusion(P, theta2) is None
    G = Multigraph.from_pairs(15, [(i, i + 1) for i in range(14)] + [(0, 1), (0, 1)])
    assert G.num_edges <= 2 * theta3.bF * theta3.cF
    assert find_replaceable_protrusion(G, theta3) is None


def test_finder_needs_connected(theta2):
    with pytest.raises(PreconditionError):
        find_replaceable_protrusion(Multigraph.from_pairs(4, [(0, 1), (2, 3)]), theta2)


def test_finder_path_on_dense_core(theta3):
    K4 = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    path = [(3 + i, 4 + i) for i in range(20)]
    G = Multigraph.from_pairs(24, K4 + path)
    X = find_replaceable_protrusion(G, theta3)
    assert X is not None
    assert len(G.boundary(X)) <= 2 * theta3.bF
    assert is_family_free(G.induced(X), theta3)
    assert G.induced(X).num_edges > theta3.cF


def test_replace_tail_by_vertex(theta2):
    G = triangle_with_tail(5)
    tab = default_table(theta2)
    tail = frozenset(range(3, 8))
    trace = ReductionTrace()
    out = replace_protrusion(G, tail, tab, trace)
    assert out.progress
    H = out.graph
    assert H.num_edges == 4 and cycle_rank(H) == cycle_rank(G)
    Fp = frozenset({0})
    F = lift_solution(Fp, trace, G, theta2)
    assert len(F) <= 1 and is_family_free(G.delete_edges(F), theta2)


def test_replace_preserves_opt_randomly(theta3):
    rng = random.Random(12)
    tab = default_table(theta3)
    checked = 0
    for _ in range(12):
        core = random_connected(rng, 4, rng.randint(6, 8))
        n = 4 + 20 - core.num_edges
        pairs = [(a, b) for _, a, b in core.edges()] + [(rng.randrange(v), v) for v in range(4, n)]
        G = Multigraph.from_pairs(n, pairs)
        X = find_replaceable_protrusion(G, theta3, tab)
        if X is None:
            continue
        out = replace_protrusion(G, X, tab)
        assert out.progress
        assert opt_literal(out.graph, theta3.members) == opt_literal(G, theta3.members)
        checked += 1
    assert checked >= 3


def test_lift_examples(theta2):
    T = Multigraph.from_pairs(4, [(0, 1), (1, 2), (1, 3)])
    assert lift_solution(frozenset(), ReductionTrace(), T, theta2) == frozenset()
    assert lift_solution({0}, ReductionTrace(), C3, theta2) == {0}
    with pytest.raises(PreconditionError):
        lift_solution(frozenset(), ReductionTrace(), C3, theta2)


def test_exhaustive_replacement_free_small_unchanged(theta2):
    G = Multigraph.from_pairs(3, [(0, 1), (1, 2)])
    H, trace = exhaustive_replacement(G, theta2, default_table(theta2))
    assert H == G and not trace.records


def test_exhaustive_replacement_collapses_tree(theta3):
    K4 = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    rng = random.Random(3)
    pairs = list(K4)
    for v in range(4, 44):
        pairs.append((rng.randrange(v), v))
    G = Multigraph.from_pairs(44, pairs)
    H, trace = exhaustive_replacement(G, theta3, default_table(theta3))
    assert H.num_edges <= 6 + 2 * theta3.bF * theta3.cF + 2
    F = lift_solution(min_deletion_set(H, theta3, 4), trace, G, theta3)
    assert len(F) == 2


def test_planted_protrusion_found(theta2, theta3, k4fam):
    for F in (theta2, theta3, k4fam):
        inst = planted_protrusion(F, 1, seed=5)
        assert find_replaceable_protrusion(inst.graph, F) is not None
