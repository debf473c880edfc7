"""Seeded workloads shared by the acceptance suite and scripts/calibrate.py."""
from __future__ import annotations

import random
from typing import Iterator, List, Tuple

from oracles import random_connected, random_multigraph

from immersion_kernel.errors import ResourceLimitError
from immersion_kernel.generators import planted_protrusion
from immersion_kernel.immersion import GraphFamily, is_family_free
from immersion_kernel.multigraph import Multigraph
from immersion_kernel.protrusion import find_replaceable_protrusion
from immersion_kernel.reduction import find_bouquets, find_thetas, opt_bruteforce

E2E_BASE = 1000
PLANTED_SIZES = (40, 120, 200)


def e2e_graph(seed: int) -> Multigraph:
    """Random multigraph with at most 20 edges."""
    rng = random.Random(seed)
    m = rng.randint(1, 20)
    n = rng.randint(max(2, m // 2), max(2, m))
    return random_multigraph(rng, n, m)


def e2e_corpus(count: int = 300, base: int = E2E_BASE) -> List[Tuple[int, Multigraph]]:
    return [(base + i, e2e_graph(base + i)) for i in range(count)]


def planted_corpus(family: GraphFamily, ks=range(1, 6), sizes=PLANTED_SIZES, seed: int = 0) -> Iterator[Tuple[int, int, Multigraph]]:
    """(k, target edges, graph) with OPT = k by construction."""
    H = family.members[0]
    per_copy = H.num_edges - H.num_vertices + 1
    for k in ks:
        for m in sizes:
            n = m - k * per_copy + 1
            inst = planted_protrusion(family, k, n=n, m=m, seed=seed + 97 * k + m)
            yield k, m, inst.graph


def structured_corpus(family: GraphFamily, count: int, seed: int = 7,
                      max_tries: int = 5000) -> Tuple[List[Tuple[Multigraph, int]], int]:
    """Connected non-free graphs none of whose detectors fire, with their OPT.

    Graphs whose exact OPT is beyond the oracle budget are skipped.
    Returns the accepted (graph, OPT) pairs and the number of draws.
    """
    rng = random.Random(seed)
    out: List[Tuple[Multigraph, int]] = []
    tries = 0
    while len(out) < count and tries < max_tries:
        tries += 1
        n = rng.randint(3, 10)
        m = rng.randint(n, min(2 * n, 20))
        G = random_connected(rng, n, m)
        if is_family_free(G, family):
            continue
        if find_thetas(G, family.dF) or find_bouquets(G, family, family.dF):
            continue
        if find_replaceable_protrusion(G, family) is not None:
            continue
        try:
            opt = opt_bruteforce(G, family)
        except ResourceLimitError:
            continue
        out.append((G, opt))
    return out, tries
