"""Independent brute-force references used by the tests.

Nothing here calls the search code under test; graphs are only read through
Multigraph accessors.
"""
from __future__ import annotations

import itertools
import random
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

from immersion_kernel.multigraph import Multigraph
from immersion_kernel.treecut import TreeCutDecomposition


# ---- graphs


def random_multigraph(rng: random.Random, n: int, m: int) -> Multigraph:
    pairs = [tuple(rng.sample(range(n), 2)) for _ in range(m)] if n >= 2 else []
    return Multigraph.from_pairs(n, pairs)


def random_connected(rng: random.Random, n: int, m: int) -> Multigraph:
    """Random spanning tree on n vertices plus m-(n-1) random extra edges."""
    assert m >= n - 1
    pairs = [(rng.randrange(i), i) for i in range(1, n)]
    while len(pairs) < m:
        pairs.append(tuple(rng.sample(range(n), 2)))
    rng.shuffle(pairs)
    return Multigraph.from_pairs(n, pairs)


# ---- immersions


def _simple_paths(G: Multigraph, s: int, t: int) -> List[Tuple[int, ...]]:
    """All vertex-simple s-t paths as edge-id tuples (parallel edges distinct)."""
    out: List[Tuple[int, ...]] = []

    def go(v: int, seen: Set[int], path: List[int]) -> None:
        if v == t:
            out.append(tuple(path))
            return
        for e in G.incident(v):
            w = G.other(e, v)
            if w in seen:
                continue
            seen.add(w)
            path.append(e)
            go(w, seen, path)
            path.pop()
            seen.discard(w)

    go(s, {s}, [])
    return out


def immersion_exists(H: Multigraph, G: Multigraph) -> bool:
    """Exhaustive: every injective vertex map, every packing of simple paths.

    A weak immersion may use trails, but every trail contains a simple path
    on a subset of its edges, so simple paths suffice.
    """
    hv = list(H.vertices)
    if len(hv) > G.num_vertices or H.num_edges > G.num_edges:
        return False
    cache: Dict[Tuple[int, int], List[Tuple[int, ...]]] = {}

    def paths(x: int, y: int) -> List[Tuple[int, ...]]:
        if (x, y) not in cache:
            cache[(x, y)] = _simple_paths(G, x, y)
        return cache[(x, y)]

    hedges = list(H.edges())
    for image in itertools.permutations(G.vertices, len(hv)):
        vm = dict(zip(hv, image))

        def pack(i: int, used: Set[int]) -> bool:
            if i == len(hedges):
                return True
            _, a, b = hedges[i]
            for p in paths(vm[a], vm[b]):
                if used.isdisjoint(p):
                    used.update(p)
                    if pack(i + 1, used):
                        return True
                    used.difference_update(p)
            return False

        if pack(0, set()):
            return True
    return False


def free_oracle(G: Multigraph, members: Sequence[Multigraph]) -> bool:
    return not any(immersion_exists(H, G) for H in members)


def opt_literal(G: Multigraph, members: Sequence[Multigraph], limit: int = 8) -> int:
    """Smallest |F| with G - F free, by enumerating edge subsets by size."""
    es = list(G.edge_ids)
    for size in range(0, min(limit, len(es)) + 1):
        for F in itertools.combinations(es, size):
            if free_oracle(G.delete_edges(F), members):
                return size
    raise RuntimeError("OPT above oracle limit")


def cycle_rank(G: Multigraph) -> int:
    """Sum over components of ||C|| - |C| + 1, computed from scratch."""
    parent = {v: v for v in G.vertices}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    extra = 0
    for _, a, b in G.edges():
        ra, rb = find(a), find(b)
        if ra == rb:
            extra += 1
        else:
            parent[ra] = rb
    return extra


# ---- cuts


def _reach(G: Multigraph, S: Iterable[int], removed: FrozenSet[int]) -> FrozenSet[int]:
    seen = set(S)
    stack = list(seen)
    while stack:
        x = stack.pop()
        for e in G.incident(x):
            if e in removed:
                continue
            y = G.other(e, x)
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return frozenset(seen)


def important_cuts_brute(G: Multigraph, S: Iterable[int], T: Iterable[int], k: int) -> Set[FrozenSet[int]]:
    """Definition check over every edge subset of size <= k."""
    S, T = frozenset(S), frozenset(T)
    es = list(G.edge_ids)
    cuts: Dict[FrozenSet[int], FrozenSet[int]] = {}
    for size in range(0, k + 1):
        for D in itertools.combinations(es, size):
            D = frozenset(D)
            R = _reach(G, S, D)
            if R.isdisjoint(T):
                cuts[D] = R
    out = set()
    for D, R in cuts.items():
        # minimal: restoring any single edge reconnects S and T
        if not all(not _reach(G, S, D - {e}).isdisjoint(T) for e in D):
            continue
        if any(len(D2) <= len(D) and R < R2 for D2, R2 in cuts.items()):
            continue
        out.add(D)
    return out


def shatters(universe: Sequence, sets: Sequence[FrozenSet], a: int, b: int) -> Optional[Tuple]:
    """First disjoint (A, B) with |A| <= a, |B| <= b not separated, else None."""
    U = list(universe)
    for na in range(0, min(a, len(U)) + 1):
        for A in itertools.combinations(U, na):
            rest = [x for x in U if x not in A]
            for nb in range(0, min(b, len(rest)) + 1):
                for B in itertools.combinations(rest, nb):
                    if not any(set(A) <= s and s.isdisjoint(B) for s in sets):
                        return A, B
    return None


# ---- decompositions


def _rooted_trees(t: int) -> Iterator[Dict[int, Optional[int]]]:
    """Every parent map on nodes 0..t-1 forming a single rooted tree."""
    for parents in itertools.product(range(-1, t), repeat=t):
        if sum(1 for p in parents if p == -1) != 1:
            continue
        if any(p == i for i, p in enumerate(parents)):
            continue
        ok = True
        for i in range(t):
            x, steps = i, 0
            while x != -1 and steps <= t:
                x = parents[x]
                steps += 1
            if x != -1:
                ok = False
                break
        if ok:
            yield {i: (None if p == -1 else p) for i, p in enumerate(parents)}


def all_decompositions(G: Multigraph, max_nodes: Optional[int] = None) -> Iterator[TreeCutDecomposition]:
    """All single-tree decompositions of a connected G with up to max_nodes
    nodes (empty bags allowed)."""
    vs = list(G.vertices)
    top = max_nodes if max_nodes is not None else len(vs)
    for t in range(1, top + 1):
        trees = list(_rooted_trees(t))
        for assign in itertools.product(range(t), repeat=len(vs)):
            bags = {i: frozenset(v for v, a in zip(vs, assign) if a == i) for i in range(t)}
            for parent in trees:
                yield TreeCutDecomposition(G, parent, bags)


def random_decomposition(rng: random.Random, G: Multigraph, max_nodes: int = 6) -> TreeCutDecomposition:
    """One random tree per component, random bag assignment (bags may be empty)."""
    parent: Dict[int, Optional[int]] = {}
    bags: Dict[int, FrozenSet[int]] = {}
    nxt = 0
    for C in G.components():
        t = rng.randint(1, max(1, min(max_nodes, len(C) + 1)))
        ids = list(range(nxt, nxt + t))
        nxt += t
        parent[ids[0]] = None
        for i in range(1, t):
            parent[ids[i]] = ids[rng.randrange(i)]
        members: Dict[int, Set[int]] = {i: set() for i in ids}
        for v in sorted(C):
            members[rng.choice(ids)].add(v)
        if not any(members.values()):
            members[ids[0]].add(min(C))
        for i in ids:
            bags[i] = frozenset(members[i])
    return TreeCutDecomposition(G, parent, bags)


# ---- signature soundness


def opt_theta2(G: Multigraph) -> int:
    """OPT for {theta2}: a graph is theta2-free iff it is a forest."""
    return cycle_rank(G)


def same_signature_implies_equivalent_check(A, B, hosts, opt=opt_theta2) -> bool:
    """OPT(A+H) == OPT(B+H) for every boundaried host H.

    Meant for pairs with equal signatures; ``opt`` must be exact.
    """
    from immersion_kernel.immersion import glue

    return all(opt(glue(A, H)[0]) == opt(glue(B, H)[0]) for H in hosts)
